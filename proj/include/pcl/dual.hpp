#ifndef PCL_DUAL_HPP
#define PCL_DUAL_HPP

#include "pcl/solver.hpp"

namespace pcl {

// Piecewise-constant flux field, the dual variable.
struct FluxField {
  Eigen::Matrix<double, Eigen::Dynamic, 2> sigma;
  double p_conj = 2.0;
};

// sigma = |grad u|^{p-2} grad u per element; |sigma|^{p'} = |grad u|^p holds
// exactly, so the dual objective of this flux equals the gradient compliance.
FluxField flux_of(const ScalarField& field);

// Distributional divergence tested against the hat functions of free nodes:
// max_i |sum_T sigma.grad(phi_i) - int f phi_i| / |grad phi_i|_{L^p}.
double divergence_residual(const FluxField& flux, const ForceSpec& f,
                           const ConstrainedMesh& mesh);

// (1/p') int |sigma|^{p'}
double dual_value(const FluxField& flux, const ConstrainedMesh& mesh);

// int f u - (1/p) int |grad u|^p
double primal_value(const ScalarField& field, const ForceSpec& f, const ConstrainedMesh& mesh);

// Duality gap dual - primal; admissibility is gated on the divergence
// residual, and an infeasible flux is NotACertificate rather than a number.
double duality_gap(const ScalarField& field, const FluxField& flux, const ForceSpec& f,
                   const ConstrainedMesh& mesh, double admissibility_threshold);

// Adds the rotated gradient of a nodal stream function; discretely
// divergence-free against every interior hat, so the residual is untouched.
FluxField add_stream_perturbation(const FluxField& flux, const ConstrainedMesh& mesh,
                                  const Eigen::VectorXd& psi);

}  // namespace pcl

#endif
