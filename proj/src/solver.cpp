#include "pcl/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "pcl/errors.hpp"
#include "pcl/log.hpp"
#include "pcl/rng.hpp"

namespace pcl {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Problem {
  const ConstrainedMesh& mesh;
  double p;
  std::vector<double> f_c;      // force at centroids
  std::vector<int> free_nodes;  // global indices
  std::vector<int> free_index;  // global -> free position or -1

  Problem(const ConstrainedMesh& m, const ForceSpec& f, double p_,
          const std::optional<std::vector<int>>& free_override)
      : mesh(m), p(p_) {
    f_c.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      f_c[t] = f(mesh.centroid(static_cast<int>(t)));
    if (free_override) {
      free_nodes = *free_override;
    } else {
      for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
        if (!mesh.dirichlet_mask[v]) free_nodes.push_back(static_cast<int>(v));
    }
    free_index.assign(mesh.nodes.size(), -1);
    for (std::size_t k = 0; k < free_nodes.size(); ++k) free_index[free_nodes[k]] = static_cast<int>(k);
  }

  Vec2 gradient_on(const Eigen::VectorXd& u, std::size_t t) const {
    const auto& tr = mesh.triangles[t];
    Eigen::Vector3d ul(u[tr[0]], u[tr[1]], u[tr[2]]);
    return mesh.tri_grad[t] * ul;
  }

  // energy with gradient regularization eps (eps = 0: the true energy)
  double energy(const Eigen::VectorXd& u, double eps) const {
    double e = 0.0;
    const double e2 = eps * eps;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tr = mesh.triangles[t];
      const double g2 = gradient_on(u, t).squaredNorm();
      const double ubar = (u[tr[0]] + u[tr[1]] + u[tr[2]]) / 3.0;
      e += mesh.tri_area[t] * (std::pow(g2 + e2, 0.5 * p) / p - f_c[t] * ubar);
    }
    return e;
  }

  // gradient of the (regularized) energy restricted to the free nodes
  Eigen::VectorXd grad(const Eigen::VectorXd& u, double eps) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(free_nodes.size());
    const double e2 = eps * eps;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tr = mesh.triangles[t];
      const Vec2 gu = gradient_on(u, t);
      const double s = gu.squaredNorm() + e2;
      double w = 0.0;
      if (s > 0.0) w = std::pow(s, 0.5 * p - 1.0);
      const Vec2 flux = w * gu;
      for (int k = 0; k < 3; ++k) {
        const int fi = free_index[tr[k]];
        if (fi < 0) continue;
        g[fi] += mesh.tri_area[t] *
                 (flux.dot(mesh.tri_grad[t].col(k)) - f_c[t] / 3.0);
      }
    }
    return g;
  }

  SpMat hessian(const Eigen::VectorXd& u, double eps) const {
    std::vector<Triplet> trip;
    trip.reserve(9 * mesh.triangles.size());
    const double e2 = eps * eps;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tr = mesh.triangles[t];
      const Vec2 gu = gradient_on(u, t);
      const double s = gu.squaredNorm() + e2;
      if (s <= 0.0) continue;
      const double w1 = std::pow(s, 0.5 * p - 1.0);
      const double w2 = (p - 2.0) * std::pow(s, 0.5 * p - 2.0);
      for (int a = 0; a < 3; ++a) {
        const int fa = free_index[tr[a]];
        if (fa < 0) continue;
        const Vec2 ga = mesh.tri_grad[t].col(a);
        for (int b = 0; b < 3; ++b) {
          const int fb = free_index[tr[b]];
          if (fb < 0) continue;
          const Vec2 gb = mesh.tri_grad[t].col(b);
          const double h = mesh.tri_area[t] * (w1 * ga.dot(gb) + w2 * (gu.dot(ga)) * (gu.dot(gb)));
          trip.emplace_back(fa, fb, h);
        }
      }
    }
    SpMat H(free_nodes.size(), free_nodes.size());
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }
};

// Armijo backtracking on the regularized energy.
double line_search(const Problem& prob, Eigen::VectorXd& u, const Eigen::VectorXd& dir,
                   const Eigen::VectorXd& g, double eps) {
  const double e0 = prob.energy(u, eps);
  const double slope = g.dot(dir);
  double t = 1.0;
  Eigen::VectorXd trial = u;
  for (int k = 0; k < 40; ++k) {
    for (std::size_t i = 0; i < prob.free_nodes.size(); ++i)
      trial[prob.free_nodes[i]] = u[prob.free_nodes[i]] + t * dir[i];
    if (prob.energy(trial, eps) <= e0 + 1e-4 * t * slope) {
      u = trial;
      return t;
    }
    t *= 0.5;
  }
  return 0.0;
}

// Preconditioned nonlinear conjugate gradient; fallback when Newton stalls.
bool ncg_minimize(const Problem& prob, Eigen::VectorXd& u, double eps, double target,
                  int iterations) {
  Eigen::VectorXd g = prob.grad(u, eps);
  Eigen::VectorXd diag = prob.hessian(u, eps).diagonal().cwiseMax(1e-12);
  Eigen::VectorXd pg = g.cwiseQuotient(diag);
  Eigen::VectorXd dir = -pg;
  double gg = g.dot(pg);
  for (int it = 0; it < iterations; ++it) {
    if (prob.grad(u, 0.0).norm() <= target) return true;
    if (line_search(prob, u, dir, g, eps) == 0.0) return false;
    Eigen::VectorXd g_new = prob.grad(u, eps);
    Eigen::VectorXd pg_new = g_new.cwiseQuotient(diag);
    const double beta = std::max(0.0, g_new.dot(pg_new - pg) / std::max(gg, 1e-300));
    dir = -pg_new + beta * dir;
    g = g_new;
    pg = pg_new;
    gg = g.dot(pg);
    if (dir.dot(g) > 0.0) dir = -pg;  // restart on a non-descent direction
  }
  return prob.grad(u, 0.0).norm() <= target;
}

}  // namespace

Eigen::Matrix<double, Eigen::Dynamic, 2> element_gradients(const ConstrainedMesh& mesh,
                                                           const Eigen::VectorXd& values) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> grads(mesh.triangles.size(), 2);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    Eigen::Vector3d ul(values[tr[0]], values[tr[1]], values[tr[2]]);
    grads.row(t) = (mesh.tri_grad[t] * ul).transpose();
  }
  return grads;
}

ScalarField solve_p_poisson(const ConstrainedMesh& mesh, const ForceSpec& f, double p,
                            double tol, const SolveOptions& opts) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::Precondition, "exponent p must lie in (1, inf)");
  if (!(tol > 0.0)) throw Error(ErrorCode::Precondition, "tolerance must be positive");

  Problem prob(mesh, f, p, opts.free_nodes);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.nodes.size());
  if (opts.boundary_values) {
    if (opts.boundary_values->size() != static_cast<Eigen::Index>(mesh.nodes.size()))
      throw Error(ErrorCode::Precondition, "boundary_values size mismatch");
    u = *opts.boundary_values;
    for (int v : prob.free_nodes) u[v] = 0.0;
  }
  if (opts.initial) u = *opts.initial;
  if (opts.random_init) {
    Rng rng(opts.init_seed);
    for (int v : prob.free_nodes) u[v] = rng.uniform(-0.1, 0.1);
  }

  auto finish = [&](const Eigen::VectorXd& sol) {
    ScalarField field;
    field.values = sol;
    field.p = p;
    field.element_gradients = element_gradients(mesh, sol);
    field.energy = prob.energy(sol, 0.0);
    return field;
  };

  if (prob.free_nodes.empty()) return finish(u);

  double eps = p == 2.0 ? 0.0 : 1e-2;
  const double eps_min = p == 2.0 ? 0.0 : 1e-8;
  double residual = std::numeric_limits<double>::infinity();
  double prev_residual = residual;
  int plateau = 0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    residual = prob.grad(u, 0.0).norm();
    const double target = tol * (1.0 + std::abs(prob.energy(u, 0.0)));
    if (residual <= target) return finish(u);

    Eigen::VectorXd g = prob.grad(u, eps);
    SpMat H = prob.hessian(u, eps);
    Eigen::SimplicialLDLT<SpMat> ldlt(H);
    Eigen::VectorXd dir;
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      dir = ldlt.solve(-g);
      newton_ok = ldlt.info() == Eigen::Success && dir.allFinite();
    }
    if (!newton_ok || g.dot(dir) >= 0.0) dir = -g;

    const double step = line_search(prob, u, dir, g, eps);

    // continuation: halve the regularization each step, faster on plateaus
    if (residual > 0.5 * prev_residual) ++plateau;
    prev_residual = residual;
    eps = std::max(eps * (plateau > 2 ? 0.25 : 0.5), eps_min);

    if (step == 0.0 && eps <= eps_min * 1.0001) {
      // Newton made no progress at the final regularization
      const double tgt = tol * (1.0 + std::abs(prob.energy(u, 0.0)));
      if (ncg_minimize(prob, u, eps, tgt, 400)) return finish(u);
      throw SolverStalledError(prob.grad(u, 0.0).norm(), "line search failed");
    }
  }
  residual = prob.grad(u, 0.0).norm();
  const double target = tol * (1.0 + std::abs(prob.energy(u, 0.0)));
  if (residual <= target) return finish(u);
  if (ncg_minimize(prob, u, eps, target, 800)) return finish(u);
  throw SolverStalledError(prob.grad(u, 0.0).norm(), "iteration budget exhausted");
}

double residual_norm(const ConstrainedMesh& mesh, const ScalarField& field, const ForceSpec& f,
                     const std::optional<std::vector<int>>& free_nodes) {
  Problem prob(mesh, f, field.p, free_nodes);
  return prob.grad(field.values, 0.0).norm();
}

ComplianceValue compliance(const ConstrainedMesh& mesh, const ScalarField& field,
                           const ForceSpec& f) {
  const double pprime = field.p / (field.p - 1.0);
  ComplianceValue c;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double g = field.element_gradients.row(t).norm();
    const double ubar =
        (field.values[tr[0]] + field.values[tr[1]] + field.values[tr[2]]) / 3.0;
    c.from_gradient += mesh.tri_area[t] * std::pow(g, field.p);
    c.from_work += mesh.tri_area[t] * f(mesh.centroid(static_cast<int>(t))) * ubar;
  }
  c.from_gradient /= pprime;
  c.from_work /= pprime;
  return c;
}

double local_energy(const ConstrainedMesh& mesh, const ScalarField& field, const Vec2& x,
                    double r) {
  if (r <= 0.0) throw Error(ErrorCode::Precondition, "local_energy needs r > 0");
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    // cheap reject: triangle bounding circle vs the ball
    const Vec2 c = mesh.centroid(static_cast<int>(t));
    const double reach = std::max({(mesh.nodes[tr[0]] - c).norm(), (mesh.nodes[tr[1]] - c).norm(),
                                   (mesh.nodes[tr[2]] - c).norm()});
    if ((c - x).norm() > r + reach) continue;
    const double a = triangle_disk_area(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]],
                                        x, r);
    if (a <= 0.0) continue;
    e += a * std::pow(field.element_gradients.row(t).norm(), field.p);
  }
  return e / r;
}

ScalarField dirichlet_replacement(const ConstrainedMesh& mesh, const ScalarField& field,
                                  const Vec2& x, double r, double tol) {
  std::vector<int> free_nodes;
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
    if (!mesh.dirichlet_mask[v] && (mesh.nodes[v] - x).norm() < r)
      free_nodes.push_back(static_cast<int>(v));

  SolveOptions opts;
  opts.free_nodes = free_nodes;
  opts.initial = field.values;
  ForceSpec zero = make_constant_force(0.0);
  ScalarField w = solve_p_poisson(mesh, zero, field.p, tol, opts);
  // report the true energy of w (with the original force it is not needed;
  // the seminorm is what replacement diagnostics use)
  return w;
}

double field_value_at(const ConstrainedMesh& mesh, const ScalarField& field, const Vec2& x) {
  const int t = mesh.locate(x);
  if (t < 0) throw Error(ErrorCode::Precondition, "evaluation point outside the mesh");
  const auto& tr = mesh.triangles[t];
  const Vec2& a = mesh.nodes[tr[0]];
  const Vec2& b = mesh.nodes[tr[1]];
  const Vec2& c = mesh.nodes[tr[2]];
  const double area2 = cross2(b - a, c - a);
  const double l0 = cross2(c - b, x - b) / area2;
  const double l1 = cross2(a - c, x - c) / area2;
  const double l2 = 1.0 - l0 - l1;
  return l0 * field.values[tr[0]] + l1 * field.values[tr[1]] + l2 * field.values[tr[2]];
}

}  // namespace pcl
