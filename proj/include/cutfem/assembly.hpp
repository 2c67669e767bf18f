#ifndef CUTFEM_ASSEMBLY_HPP
#define CUTFEM_ASSEMBLY_HPP

#include "cutfem/space.hpp"

#include <Eigen/Sparse>

namespace cutfem {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct NitscheParams {
  double beta = 10.0;
  double sigma = 0.1;
  /// Regularization length; 0 selects the standard method.
  double epsilon = 0.0;
  TubularParams tubular;

  /// Throws with the offending field name.
  void validate(const LevelSetDomain& domain) const;
  /// Tubular parameters with epsilon taken from this record.
  TubularParams cutoff() const;
};

/// Defaults tied to the mesh size: δ = h, ε0 = h, δ0 = R/2.
NitscheParams default_params(const LevelSetDomain& domain, double h, double epsilon = 0.0);

/// Problem data entering the load.
struct BoundaryData {
  ScalarField f;
  ScalarField g_D;
  ScalarField g_N;
};

enum class NormVariant { with_stab, no_stab };

struct SystemMatrices {
  SparseMatrix A;
  SparseMatrix S;
  Eigen::VectorXd b;
  bool symmetric = true;

  SparseMatrix system() const { return A + S; }
};

SparseMatrix assemble_a(const Discretization& d);
/// ∫_T ∇φ_i·∇φ_j over the full active triangles.
SparseMatrix assemble_full_gradient(const Discretization& d);
SparseMatrix assemble_A_h(const Discretization& d, const NitscheParams& p);
SparseMatrix assemble_A_h_eps(const Discretization& d, const NitscheParams& p);
SparseMatrix assemble_s_h(const Discretization& d, double sigma);
/// (φ_i, φ_j) on ∂Ω_D.
SparseMatrix assemble_boundary_mass(const Discretization& d);
SparseMatrix assemble_mass(const Discretization& d);
Eigen::VectorXd assemble_L_h(const Discretization& d, const NitscheParams& p, const BoundaryData& data);
/// (g_N, χ φ_i) on ∂Ω_N.
Eigen::VectorXd assemble_chi_neumann_load(const Discretization& d, const NitscheParams& p, const ScalarField& g_N);

/// A_h or A_{h,ε} (by p.epsilon), s_h and L_h.
SystemMatrices assemble_system(const Discretization& d, const NitscheParams& p, const BoundaryData& data);

/// Gram matrix of the energy norm: A_grad + [S] + h^{-1} M_D.
SparseMatrix energy_gram(const Discretization& d, const NitscheParams& p, NormVariant variant);
double energy_norm(const FeFunction& v, const NitscheParams& p, NormVariant variant);

struct ErrorNorms {
  double energy = 0.0;  ///< |||u − u_h||| without the stabilizer
  double gradient = 0.0; ///< ‖∇(u − u_h)‖_{L2(Ω)}
  double sh_norm = 0.0; ///< ‖u_h‖_{s_h}
  double l2 = 0.0;      ///< ‖u − u_h‖_{L2(Ω)}
};
ErrorNorms error_norms(const ScalarField& u, const VectorField& grad_u, const FeFunction& uh,
                       const NitscheParams& p);

/// A_h(u, φ_i) for a function known analytically, for every basis function.
Eigen::VectorXd apply_A_h_exact(const Discretization& d, const NitscheParams& p, const ScalarField& u,
                                const VectorField& grad_u);
/// A_{h,ε}(u, φ_i) for an analytic u.
Eigen::VectorXd apply_A_h_eps_exact(const Discretization& d, const NitscheParams& p, const ScalarField& u,
                                    const VectorField& grad_u);

} // namespace cutfem

#endif // CUTFEM_ASSEMBLY_HPP
