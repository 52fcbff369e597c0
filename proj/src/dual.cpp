#include "pcl/dual.hpp"

#include <cmath>

#include "pcl/errors.hpp"

namespace pcl {

FluxField flux_of(const ScalarField& field) {
  FluxField flux;
  flux.p_conj = field.p / (field.p - 1.0);
  flux.sigma.resize(field.element_gradients.rows(), 2);
  for (Eigen::Index t = 0; t < field.element_gradients.rows(); ++t) {
    const Vec2 g = field.element_gradients.row(t).transpose();
    const double mag = g.norm();
    flux.sigma.row(t) =
        mag > 0.0 ? (std::pow(mag, field.p - 2.0) * g).transpose().eval() : Vec2(0, 0).transpose();
  }
  return flux;
}

double divergence_residual(const FluxField& flux, const ForceSpec& f,
                           const ConstrainedMesh& mesh) {
  const double p = flux.p_conj / (flux.p_conj - 1.0);
  Eigen::VectorXd node_residual = Eigen::VectorXd::Zero(mesh.nodes.size());
  Eigen::VectorXd hat_norm_p = Eigen::VectorXd::Zero(mesh.nodes.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 s = flux.sigma.row(t).transpose();
    const double fc = f(mesh.centroid(static_cast<int>(t)));
    for (int k = 0; k < 3; ++k) {
      const Vec2 gphi = mesh.tri_grad[t].col(k);
      node_residual[tr[k]] += mesh.tri_area[t] * (s.dot(gphi) - fc / 3.0);
      hat_norm_p[tr[k]] += mesh.tri_area[t] * std::pow(gphi.norm(), p);
    }
  }
  double worst = 0.0;
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    if (mesh.dirichlet_mask[v]) continue;
    const double norm = std::pow(std::max(hat_norm_p[v], 1e-300), 1.0 / p);
    worst = std::max(worst, std::abs(node_residual[v]) / norm);
  }
  return worst;
}

double dual_value(const FluxField& flux, const ConstrainedMesh& mesh) {
  double v = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    v += mesh.tri_area[t] * std::pow(flux.sigma.row(t).norm(), flux.p_conj);
  return v / flux.p_conj;
}

double primal_value(const ScalarField& field, const ForceSpec& f, const ConstrainedMesh& mesh) {
  double work = 0.0, grad = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double ubar =
        (field.values[tr[0]] + field.values[tr[1]] + field.values[tr[2]]) / 3.0;
    work += mesh.tri_area[t] * f(mesh.centroid(static_cast<int>(t))) * ubar;
    grad += mesh.tri_area[t] * std::pow(field.element_gradients.row(t).norm(), field.p);
  }
  return work - grad / field.p;
}

double duality_gap(const ScalarField& field, const FluxField& flux, const ForceSpec& f,
                   const ConstrainedMesh& mesh, double admissibility_threshold) {
  const double residual = divergence_residual(flux, f, mesh);
  if (residual > admissibility_threshold)
    throw Error(ErrorCode::NotACertificate,
                "divergence residual " + std::to_string(residual) + " above threshold");
  return dual_value(flux, mesh) - primal_value(field, f, mesh);
}

FluxField add_stream_perturbation(const FluxField& flux, const ConstrainedMesh& mesh,
                                  const Eigen::VectorXd& psi) {
  FluxField out = flux;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    Eigen::Vector3d pl(psi[tr[0]], psi[tr[1]], psi[tr[2]]);
    const Vec2 gpsi = mesh.tri_grad[t] * pl;
    out.sigma.row(t) += Vec2(-gpsi.y(), gpsi.x()).transpose();
  }
  return out;
}

}  // namespace pcl
