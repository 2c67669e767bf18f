#include "cutfem/space.hpp"

#include <Eigen/Dense>

#include <sstream>

namespace cutfem {

DofMap build_dofmap(const BackgroundMesh& mesh, const CutTopology& topology) {
  DofMap dofs;
  dofs.vertex_dof.assign(mesh.vertices.size(), -1);
  // Number vertices in ascending vertex order for a mesh-independent layout.
  std::vector<char> used(mesh.vertices.size(), 0);
  for (int t : topology.active)
    for (int v : mesh.triangles[t]) used[v] = 1;
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) continue;
    dofs.vertex_dof[v] = static_cast<int>(dofs.dof_vertex.size());
    dofs.dof_vertex.push_back(static_cast<int>(v));
  }
  dofs.cell_dofs.reserve(topology.active.size());
  for (int t : topology.active) {
    const auto& v = mesh.triangles[t];
    dofs.cell_dofs.push_back({dofs.vertex_dof[v[0]], dofs.vertex_dof[v[1]], dofs.vertex_dof[v[2]]});
  }
  return dofs;
}

std::shared_ptr<const Discretization> discretize(const LevelSetDomain& domain, const Box& box, int n,
                                                 const Point& shift, const QuadratureOptions& options) {
  BackgroundMesh mesh = build_background(box, n, shift);
  CutTopology topology = classify(mesh, domain);
  DofMap dofs = build_dofmap(mesh, topology);
  RuleSet rules = build_rules(mesh, topology, domain, options);
  return std::make_shared<const Discretization>(
      Discretization{domain, std::move(mesh), std::move(topology), std::move(dofs), std::move(rules)});
}

std::array<Vector2, 3> p1_gradients(const Triangle& t) {
  const double twice_area = 2.0 * signed_area(t);
  std::array<Vector2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Vector2 d = t[(k + 2) % 3] - t[(k + 1) % 3];
    g[k] = Vector2(-d.y(), d.x()) / twice_area;
  }
  return g;
}

Eigen::Vector3d barycentric(const Triangle& t, const Point& x) {
  const double area = signed_area(t);
  Eigen::Vector3d l;
  for (int k = 0; k < 3; ++k) l[k] = signed_area({x, t[(k + 1) % 3], t[(k + 2) % 3]}) / area;
  return l;
}

FeFunction::FeFunction(std::shared_ptr<const Discretization> s, Eigen::VectorXd c)
    : space(std::move(s)), coefficients(std::move(c)) {
  if (!space) throw Error("FeFunction: missing space");
  if (coefficients.size() != space->ndof()) throw Error("FeFunction: coefficient count does not match dofs");
}

FeFunction FeFunction::zero(std::shared_ptr<const Discretization> s) {
  const int n = s->ndof();
  return FeFunction(std::move(s), Eigen::VectorXd::Zero(n));
}

namespace {

const std::array<int, 3>& active_dofs(const Discretization& d, int t) {
  if (t < 0 || t >= static_cast<int>(d.mesh.triangles.size()) || !d.topology.is_active(t)) {
    std::ostringstream msg;
    msg << "triangle " << t << " is not active";
    throw Error(msg.str());
  }
  return d.dofs.cell_dofs[d.topology.active_index[t]];
}

} // namespace

double evaluate(const FeFunction& f, int t, const Point& x) {
  const auto& dofs = active_dofs(*f.space, t);
  const Eigen::Vector3d l = barycentric(f.space->mesh.triangle(t), x);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += l[k] * f.coefficients[dofs[k]];
  return s;
}

Vector2 gradient(const FeFunction& f, int t) {
  const auto& dofs = active_dofs(*f.space, t);
  const auto g = p1_gradients(f.space->mesh.triangle(t));
  Vector2 s = Vector2::Zero();
  for (int k = 0; k < 3; ++k) s += f.coefficients[dofs[k]] * g[k];
  return s;
}

double jump_normal_gradient(const FeFunction& f, int face) {
  const Discretization& d = *f.space;
  const Face& F = d.mesh.faces.at(face);
  if (!F.interior()) throw Error("jump_normal_gradient: face " + std::to_string(face) + " has one neighbour");
  const Vector2 n = d.mesh.face_normal(face);
  return (gradient(f, F.triangles[0]) - gradient(f, F.triangles[1])).dot(n);
}

FeFunction nodal_interpolate(const ScalarField& u, std::shared_ptr<const Discretization> space) {
  Eigen::VectorXd c(space->ndof());
  for (int i = 0; i < space->ndof(); ++i) c[i] = u(space->mesh.vertices[space->dofs.dof_vertex[i]]);
  return FeFunction(std::move(space), std::move(c));
}

FeFunction clement_interpolate(const ScalarField& u, std::shared_ptr<const Discretization> space) {
  const Discretization& d = *space;
  const double h = d.h();
  Eigen::VectorXd c(d.ndof());
  for (int i = 0; i < d.ndof(); ++i) {
    const int v = d.dofs.dof_vertex[i];
    const Point& xv = d.mesh.vertices[v];
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (int t : d.mesh.vertex_triangles[v]) {
      if (!d.topology.is_active(t)) continue;
      const QuadRule rule = triangle_rule(d.mesh.triangle(t), 3);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        const Eigen::Vector3d phi(1.0, (x.x() - xv.x()) / h, (x.y() - xv.y()) / h);
        M += rule.weights[q] * phi * phi.transpose();
        b += rule.weights[q] * u(x) * phi;
      }
    }
    Eigen::LDLT<Eigen::Matrix3d> ldlt(M);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-14 * M.trace())) {
      std::ostringstream msg;
      msg << "clement_interpolate: degenerate patch moment matrix at vertex " << v;
      throw Error(msg.str());
    }
    c[i] = ldlt.solve(b)[0];
  }
  return FeFunction(std::move(space), std::move(c));
}

} // namespace cutfem
