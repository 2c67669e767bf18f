#include "cutfem/assembly.hpp"

#include <cmath>
#include <sstream>

namespace cutfem {

void NitscheParams::validate(const LevelSetDomain& domain) const {
  if (!(beta > 0.0)) throw Error("beta must be positive");
  if (!(sigma >= 0.0)) throw Error("sigma must be non-negative");
  if (!(epsilon >= 0.0)) throw Error("epsilon must be non-negative");
  if (epsilon > 0.0) {
    if (epsilon > tubular.epsilon0) throw Error("epsilon exceeds epsilon0");
    cutoff().validate(domain);
  }
}

TubularParams NitscheParams::cutoff() const {
  TubularParams t = tubular;
  t.epsilon = epsilon;
  return t;
}

NitscheParams default_params(const LevelSetDomain& domain, double h, double epsilon) {
  NitscheParams p;
  p.tubular = default_tubular(domain, h);
  p.epsilon = epsilon;
  p.tubular.epsilon = epsilon;
  return p;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Cell {
  int t;
  const std::array<int, 3>& dofs;
  std::array<Vector2, 3> grads;
  Triangle tri;
};

template <class F>
void for_each_active(const Discretization& d, F&& f) {
  for (std::size_t k = 0; k < d.topology.active.size(); ++k) {
    const int t = d.topology.active[k];
    const Triangle tri = d.mesh.triangle(t);
    const Cell cell{t, d.dofs.cell_dofs[k], p1_gradients(tri), tri};
    f(k, cell);
  }
}

SparseMatrix from_triplets(const Discretization& d, const Triplets& trips) {
  SparseMatrix m(d.ndof(), d.ndof());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void add_gradient_terms(const Discretization& d, Triplets& trips, bool full_triangles) {
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const double measure =
        full_triangles ? std::abs(signed_area(c.tri)) : d.rules.volume[k].measure();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(c.dofs[i], c.dofs[j], measure * c.grads[i].dot(c.grads[j]));
  });
}

// Entry (i, j) holds the form with trial φ_j and test φ_i.
void add_nitsche_terms(const Discretization& d, const NitscheParams& p, Triplets& trips, bool regularized) {
  const double penalty = p.beta / d.h();
  const TubularParams cut = p.cutoff();
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const BoundaryRules& br = d.rules.boundary[k];
    const QuadRule& rd = br.dirichlet;
    for (std::size_t q = 0; q < rd.size(); ++q) {
      const Eigen::Vector3d l = barycentric(c.tri, rd.points[q]);
      const Vector2& n = rd.normals[q];
      const double w = rd.weights[q];
      const double weight = regularized ? chi(d.domain, cut, rd.points[q]) : 1.0;
      for (int i = 0; i < 3; ++i) {
        const double dn_i = c.grads[i].dot(n);
        for (int j = 0; j < 3; ++j) {
          const double dn_j = c.grads[j].dot(n);
          const double v = -weight * dn_j * l[i] - l[j] * dn_i + penalty * l[i] * l[j];
          trips.emplace_back(c.dofs[i], c.dofs[j], w * v);
        }
      }
    }
    if (!regularized) return;
    const QuadRule& rn = br.neumann;
    for (std::size_t q = 0; q < rn.size(); ++q) {
      const double x = chi(d.domain, cut, rn.points[q]);
      if (x == 0.0) continue;
      const Eigen::Vector3d l = barycentric(c.tri, rn.points[q]);
      const Vector2& n = rn.normals[q];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          trips.emplace_back(c.dofs[i], c.dofs[j], -rn.weights[q] * x * c.grads[j].dot(n) * l[i]);
    }
  });
}

} // namespace

SparseMatrix assemble_a(const Discretization& d) {
  if (d.rules.volume.size() != d.topology.active.size()) throw Error("assemble_a: missing quadrature rules");
  Triplets trips;
  add_gradient_terms(d, trips, false);
  return from_triplets(d, trips);
}

SparseMatrix assemble_full_gradient(const Discretization& d) {
  Triplets trips;
  add_gradient_terms(d, trips, true);
  return from_triplets(d, trips);
}

SparseMatrix assemble_A_h(const Discretization& d, const NitscheParams& p) {
  Triplets trips;
  add_gradient_terms(d, trips, false);
  add_nitsche_terms(d, p, trips, false);
  return from_triplets(d, trips);
}

SparseMatrix assemble_A_h_eps(const Discretization& d, const NitscheParams& p) {
  Triplets trips;
  add_gradient_terms(d, trips, false);
  add_nitsche_terms(d, p, trips, true);
  return from_triplets(d, trips);
}

SparseMatrix assemble_s_h(const Discretization& d, double sigma) {
  Triplets trips;
  const double scale = sigma * d.h();
  for (int f : d.topology.boundary_faces) {
    const Face& F = d.mesh.faces[f];
    const Vector2 n = d.mesh.face_normal(f);
    const QuadRule rule = face_rule(d.mesh.vertices[F.vertices[0]], d.mesh.vertices[F.vertices[1]]);
    const double length = rule.measure();
    std::array<int, 6> idx;
    std::array<double, 6> jump;
    for (int side = 0; side < 2; ++side) {
      const int t = F.triangles[side];
      const auto g = p1_gradients(d.mesh.triangle(t));
      const auto& dofs = d.dofs.cell_dofs[d.topology.active_index[t]];
      const double sign = side == 0 ? 1.0 : -1.0;
      for (int k = 0; k < 3; ++k) {
        idx[3 * side + k] = dofs[k];
        jump[3 * side + k] = sign * g[k].dot(n);
      }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) trips.emplace_back(idx[i], idx[j], scale * length * jump[i] * jump[j]);
  }
  return from_triplets(d, trips);
}

SparseMatrix assemble_boundary_mass(const Discretization& d) {
  Triplets trips;
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const QuadRule& rd = d.rules.boundary[k].dirichlet;
    for (std::size_t q = 0; q < rd.size(); ++q) {
      const Eigen::Vector3d l = barycentric(c.tri, rd.points[q]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trips.emplace_back(c.dofs[i], c.dofs[j], rd.weights[q] * l[i] * l[j]);
    }
  });
  return from_triplets(d, trips);
}

SparseMatrix assemble_mass(const Discretization& d) {
  Triplets trips;
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const QuadRule& rv = d.rules.volume[k];
    for (std::size_t q = 0; q < rv.size(); ++q) {
      const Eigen::Vector3d l = barycentric(c.tri, rv.points[q]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trips.emplace_back(c.dofs[i], c.dofs[j], rv.weights[q] * l[i] * l[j]);
    }
  });
  return from_triplets(d, trips);
}

Eigen::VectorXd assemble_L_h(const Discretization& d, const NitscheParams& p, const BoundaryData& data) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d.ndof());
  const double penalty = p.beta / d.h();
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const QuadRule& rv = d.rules.volume[k];
    if (data.f) {
      for (std::size_t q = 0; q < rv.size(); ++q) {
        const double fv = rv.weights[q] * data.f(rv.points[q]);
        const Eigen::Vector3d l = barycentric(c.tri, rv.points[q]);
        for (int i = 0; i < 3; ++i) b[c.dofs[i]] += fv * l[i];
      }
    }
    const BoundaryRules& br = d.rules.boundary[k];
    if (data.g_N) {
      for (std::size_t q = 0; q < br.neumann.size(); ++q) {
        const double gv = br.neumann.weights[q] * data.g_N(br.neumann.points[q]);
        const Eigen::Vector3d l = barycentric(c.tri, br.neumann.points[q]);
        for (int i = 0; i < 3; ++i) b[c.dofs[i]] += gv * l[i];
      }
    }
    if (data.g_D) {
      const QuadRule& rd = br.dirichlet;
      for (std::size_t q = 0; q < rd.size(); ++q) {
        const double gv = rd.weights[q] * data.g_D(rd.points[q]);
        const Eigen::Vector3d l = barycentric(c.tri, rd.points[q]);
        for (int i = 0; i < 3; ++i) b[c.dofs[i]] += gv * (penalty * l[i] - c.grads[i].dot(rd.normals[q]));
      }
    }
  });
  return b;
}

Eigen::VectorXd assemble_chi_neumann_load(const Discretization& d, const NitscheParams& p,
                                          const ScalarField& g_N) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d.ndof());
  const TubularParams cut = p.cutoff();
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const QuadRule& rn = d.rules.boundary[k].neumann;
    for (std::size_t q = 0; q < rn.size(); ++q) {
      const double x = chi(d.domain, cut, rn.points[q]);
      if (x == 0.0) continue;
      const double gv = rn.weights[q] * x * g_N(rn.points[q]);
      const Eigen::Vector3d l = barycentric(c.tri, rn.points[q]);
      for (int i = 0; i < 3; ++i) b[c.dofs[i]] += gv * l[i];
    }
  });
  return b;
}

SystemMatrices assemble_system(const Discretization& d, const NitscheParams& p, const BoundaryData& data) {
  p.validate(d.domain);
  SystemMatrices m;
  const bool regularized = p.epsilon > 0.0;
  m.A = regularized ? assemble_A_h_eps(d, p) : assemble_A_h(d, p);
  m.S = assemble_s_h(d, p.sigma);
  m.b = assemble_L_h(d, p, data);
  m.symmetric = !regularized;
  return m;
}

SparseMatrix energy_gram(const Discretization& d, const NitscheParams& p, NormVariant variant) {
  SparseMatrix g = assemble_a(d);
  if (variant == NormVariant::with_stab) g += assemble_s_h(d, p.sigma);
  g += (1.0 / d.h()) * assemble_boundary_mass(d);
  return g;
}

double energy_norm(const FeFunction& v, const NitscheParams& p, NormVariant variant) {
  const SparseMatrix g = energy_gram(*v.space, p, variant);
  return std::sqrt(std::max(0.0, v.coefficients.dot(g * v.coefficients)));
}

ErrorNorms error_norms(const ScalarField& u, const VectorField& grad_u, const FeFunction& uh,
                       const NitscheParams& p) {
  const Discretization& d = *uh.space;
  double grad2 = 0.0;
  double l2 = 0.0;
  double trace2 = 0.0;
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    Vector2 gh = Vector2::Zero();
    for (int i = 0; i < 3; ++i) gh += uh.coefficients[c.dofs[i]] * c.grads[i];
    auto value = [&](const Point& x) {
      const Eigen::Vector3d l = barycentric(c.tri, x);
      double s = 0.0;
      for (int i = 0; i < 3; ++i) s += l[i] * uh.coefficients[c.dofs[i]];
      return s;
    };
    const QuadRule& rv = d.rules.volume[k];
    for (std::size_t q = 0; q < rv.size(); ++q) {
      const Point& x = rv.points[q];
      grad2 += rv.weights[q] * (grad_u(x) - gh).squaredNorm();
      const double e = u(x) - value(x);
      l2 += rv.weights[q] * e * e;
    }
    const QuadRule& rd = d.rules.boundary[k].dirichlet;
    for (std::size_t q = 0; q < rd.size(); ++q) {
      const double e = u(rd.points[q]) - value(rd.points[q]);
      trace2 += rd.weights[q] * e * e;
    }
  });
  ErrorNorms out;
  out.energy = std::sqrt(grad2 + trace2 / d.h());
  out.gradient = std::sqrt(grad2);
  out.l2 = std::sqrt(l2);
  const SparseMatrix s = assemble_s_h(d, p.sigma);
  out.sh_norm = std::sqrt(std::max(0.0, uh.coefficients.dot(s * uh.coefficients)));
  return out;
}

namespace {

Eigen::VectorXd apply_exact(const Discretization& d, const NitscheParams& p, const ScalarField& u,
                            const VectorField& grad_u, bool regularized) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(d.ndof());
  const double penalty = p.beta / d.h();
  const TubularParams cut = p.cutoff();
  for_each_active(d, [&](std::size_t k, const Cell& c) {
    const QuadRule& rv = d.rules.volume[k];
    Vector2 gint = Vector2::Zero();
    for (std::size_t q = 0; q < rv.size(); ++q) gint += rv.weights[q] * grad_u(rv.points[q]);
    for (int i = 0; i < 3; ++i) r[c.dofs[i]] += gint.dot(c.grads[i]);
    const BoundaryRules& br = d.rules.boundary[k];
    const QuadRule& rd = br.dirichlet;
    for (std::size_t q = 0; q < rd.size(); ++q) {
      const Point& x = rd.points[q];
      const Vector2& n = rd.normals[q];
      const double weight = regularized ? chi(d.domain, cut, x) : 1.0;
      const double dnu = grad_u(x).dot(n);
      const double ux = u(x);
      const Eigen::Vector3d l = barycentric(c.tri, x);
      for (int i = 0; i < 3; ++i)
        r[c.dofs[i]] += rd.weights[q] * (-weight * dnu * l[i] - ux * c.grads[i].dot(n) + penalty * ux * l[i]);
    }
    if (!regularized) return;
    const QuadRule& rn = br.neumann;
    for (std::size_t q = 0; q < rn.size(); ++q) {
      const double x = chi(d.domain, cut, rn.points[q]);
      if (x == 0.0) continue;
      const double dnu = grad_u(rn.points[q]).dot(rn.normals[q]);
      const Eigen::Vector3d l = barycentric(c.tri, rn.points[q]);
      for (int i = 0; i < 3; ++i) r[c.dofs[i]] -= rn.weights[q] * x * dnu * l[i];
    }
  });
  return r;
}

} // namespace

Eigen::VectorXd apply_A_h_exact(const Discretization& d, const NitscheParams& p, const ScalarField& u,
                                const VectorField& grad_u) {
  return apply_exact(d, p, u, grad_u, false);
}

Eigen::VectorXd apply_A_h_eps_exact(const Discretization& d, const NitscheParams& p, const ScalarField& u,
                                    const VectorField& grad_u) {
  return apply_exact(d, p, u, grad_u, true);
}

} // namespace cutfem
