#ifndef PCL_SOLVER_HPP
#define PCL_SOLVER_HPP

#include <optional>

#include "pcl/force.hpp"
#include "pcl/mesh.hpp"

namespace pcl {

// Nodal P1 field with per-element gradients and the cached energy
// E_p(u) = (1/p) int |grad u|^p - int f u  (one-point quadrature for f u).
struct ScalarField {
  Eigen::VectorXd values;
  double p = 2.0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> element_gradients;
  double energy = 0.0;
};

struct SolveOptions {
  int max_iterations = 200;
  // nodal values imposed at masked nodes (zero when absent)
  std::optional<Eigen::VectorXd> boundary_values;
  // custom free set (used by the Dirichlet replacement); overrides the mask
  std::optional<std::vector<int>> free_nodes;
  // random initial guess on the free nodes, for uniqueness checks
  bool random_init = false;
  std::uint64_t init_seed = 0;
  std::optional<Eigen::VectorXd> initial;
};

// Minimizes the discrete p-energy over fields matching the imposed values on
// masked nodes. Damped Newton on the (|g|^2 + eps^2)^{p/2} regularization
// with eps continuation, Armijo backtracking, and a preconditioned nonlinear
// CG fallback; stops when the unregularized gradient norm on the free nodes
// drops below tol * (1 + |E_p|). Throws SolverStalled past the budget.
ScalarField solve_p_poisson(const ConstrainedMesh& mesh, const ForceSpec& f, double p,
                            double tol, const SolveOptions& opts = {});

// Unregularized first-order residual of the field (norm of the energy
// gradient over the free nodes).
double residual_norm(const ConstrainedMesh& mesh, const ScalarField& field, const ForceSpec& f,
                     const std::optional<std::vector<int>>& free_nodes = std::nullopt);

// Both compliance evaluations: (1/p') int |grad u|^p and (1/p') int f u.
// They agree up to the solver tolerance by the weak formulation with u as
// the test function.
struct ComplianceValue {
  double from_gradient = 0.0;
  double from_work = 0.0;
};
ComplianceValue compliance(const ConstrainedMesh& mesh, const ScalarField& field,
                           const ForceSpec& f);

// (1/r) int_{B_r(x)} |grad u|^p with exact triangle-disk clipping.
double local_energy(const ConstrainedMesh& mesh, const ScalarField& field, const Vec2& x,
                    double r);

// p-harmonic extension inside B_r(x): equals the field outside the ball and
// on masked nodes, minimizes the p-energy with zero force inside.
ScalarField dirichlet_replacement(const ConstrainedMesh& mesh, const ScalarField& field,
                                  const Vec2& x, double r, double tol);

inline double sup_norm(const ScalarField& field) {
  return field.values.size() ? field.values.cwiseAbs().maxCoeff() : 0.0;
}

// barycentric evaluation; throws Precondition when p is outside the mesh
double field_value_at(const ConstrainedMesh& mesh, const ScalarField& field, const Vec2& x);

// rebuilds per-element gradients from nodal values
Eigen::Matrix<double, Eigen::Dynamic, 2> element_gradients(const ConstrainedMesh& mesh,
                                                           const Eigen::VectorXd& values);

}  // namespace pcl

#endif
