#ifndef CUTFEM_SPACE_HPP
#define CUTFEM_SPACE_HPP

#include "cutfem/geometry.hpp"
#include "cutfem/mesh.hpp"
#include "cutfem/quadrature.hpp"
#include "cutfem/types.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace cutfem {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Vector2(const Point&)>;

/// Vertex dofs of the continuous P1 space on the active mesh.
struct DofMap {
  std::vector<int> vertex_dof; ///< -1 for vertices not touched by an active triangle
  std::vector<int> dof_vertex;
  /// Dofs of the three local vertices, indexed by active position.
  std::vector<std::array<int, 3>> cell_dofs;

  int size() const { return static_cast<int>(dof_vertex.size()); }
};

DofMap build_dofmap(const BackgroundMesh& mesh, const CutTopology& topology);

/// Everything a discrete problem on one background mesh needs.
struct Discretization {
  LevelSetDomain domain;
  BackgroundMesh mesh;
  CutTopology topology;
  DofMap dofs;
  RuleSet rules;

  double h() const { return mesh.h; }
  int ndof() const { return dofs.size(); }
};

std::shared_ptr<const Discretization> discretize(const LevelSetDomain& domain, const Box& box, int n,
                                                 const Point& shift = Point::Zero(),
                                                 const QuadratureOptions& options = {});

/// Gradients of the three barycentric coordinates of t.
std::array<Vector2, 3> p1_gradients(const Triangle& t);
Eigen::Vector3d barycentric(const Triangle& t, const Point& x);

struct FeFunction {
  std::shared_ptr<const Discretization> space;
  Eigen::VectorXd coefficients;

  FeFunction() = default;
  FeFunction(std::shared_ptr<const Discretization> s, Eigen::VectorXd c);
  static FeFunction zero(std::shared_ptr<const Discretization> s);
};

/// Value at x of f restricted to background triangle t.
double evaluate(const FeFunction& f, int t, const Point& x);
Vector2 gradient(const FeFunction& f, int t);

/// [∇_n f] on interior face `face`, with n the stored normal of the face.
double jump_normal_gradient(const FeFunction& f, int face);

/// Nodal interpolant at the dof vertices.
FeFunction nodal_interpolate(const ScalarField& u, std::shared_ptr<const Discretization> space);

/// Vertex-patch L2 projection onto affines over the active patch, evaluated at the vertex.
FeFunction clement_interpolate(const ScalarField& u, std::shared_ptr<const Discretization> space);

} // namespace cutfem

#endif // CUTFEM_SPACE_HPP
