#ifndef PCL_REGULARITY_HPP
#define PCL_REGULARITY_HPP

#include <string>

#include "pcl/flatness.hpp"
#include "pcl/optimizer.hpp"
#include "pcl/solver.hpp"

namespace pcl {

enum class FitQuality { Ok, DegenerateZero, Unreliable, NotApplicable };
const char* to_string(FitQuality q);

struct LogLogFit {
  double slope = 0.0;
  double r2 = 0.0;
  FitQuality quality = FitQuality::Ok;
};
// Least-squares exponent on log-log axes; flags all-zero data and poor fits
// (r2 < 0.9) instead of comparing them against predictions.
LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct DecayReport {
  Vec2 center{0, 0};
  std::vector<double> radii;   // strictly decreasing
  std::vector<double> values;  // beta or energy samples, >= 0
  double fitted_exponent = 0.0;
  double fit_r2 = 0.0;
  double predicted_exponent = 0.0;
  std::string exponent_kind;
  FitQuality quality = FitQuality::Ok;
};

// Flatness against radius with a log-log exponent fit; the prediction is
// reported, never enforced. Radii below min_radius (the mesh floor) are
// refused.
DecayReport beta_decay(const GlueGraph& sigma, const Vec2& x, std::vector<double> radii,
                       double predicted, double min_radius = 0.0);

// Local energy mass int_{B_r} |grad u|^p against radius. Applicable only
// while the glue stays eps0-flat at every sampled radius; the prediction is
// 1 + b from the decay exponents of (p, q).
DecayReport omega_decay(const ConstrainedMesh& mesh, const ScalarField& field,
                        const GlueGraph& sigma, const Vec2& x, std::vector<double> radii,
                        double eps0, double q);

struct LocalEnergySup {
  Vec2 center{0, 0};
  double radius = 0.0;
  double tau = 0.0;
  double value = 0.0;
  int argmax = -1;  // index into candidates, -1 when sigma itself wins
  int admissible_candidates = 0;
};

// Sampled lower bound on the sup of the local energy over tau-flat chord
// replacements of the glue inside the ball (the class is infinite; this is an
// estimate, never the true sup). Candidate angles come from a fixed grid so
// the sets are nested in both tau and n_samples.
LocalEnergySup w_tau_estimate(const GlueGraph& sigma, const EvalContext& ctx, const Vec2& x,
                              double r, double tau, int n_samples);

struct DensityScan {
  double fraction = 0.0;        // share of sampled radii with exactly two crossings
  double both_sides_rate = 0.0; // among those, share with points on both sides
  int samples = 0;
  int two_point_samples = 0;
};
DensityScan density_scan(const GlueGraph& sigma, const Vec2& x, double r1, double tau);

struct HeightExcess {
  double height = 0.0;
  double excess = 0.0;
};
// Height of the clipped arc over its chord versus the length excess;
// requires the two-crossing both-sides picture, else NotAChordConfiguration.
HeightExcess height_vs_excess(const GlueGraph& sigma, const Vec2& x, double r);

struct QuadrupleSite {
  int vertex = -1;
  Vec2 position{0, 0};
  double r_s = 0.0;
  double d_length = 0.0;
  double d_compliance = 0.0;
  double d_objective = 0.0;
  bool improved = false;  // d_objective < 0: the cross is strictly suboptimal
};
// Builds the Steiner competitor at every degree-4 vertex (clip the ball, add
// wall arcs sized by the cross flatness, connect the four exit points by the
// minimal Steiner tree) and evaluates the objective change.
std::vector<QuadrupleSite> quadruple_scan(const GlueGraph& sigma, const EvalContext& ctx,
                                          double hop_radius);

struct LoopReport {
  int loop_edges = 0;
  double removed_length = 0.0;
  double d_objective = 0.0;
};
struct LoopCertificate {
  bool pass = false;
  bool local_minimum_caveat = false;   // loops remain but no removal improves
  bool lambda_zero_inconclusive = false;
  std::vector<LoopReport> loops;
};
LoopCertificate loop_certificate(const GlueGraph& sigma, const EvalContext& ctx);

struct AhlforsCertificate {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int samples = 0;
  bool pass = false;
};
// Two-sided length-density check over arclength-uniform centers and the given
// radii, restricted to balls inside the domain and below half the diameter.
AhlforsCertificate ahlfors_certificate(const GlueGraph& sigma, const PolygonalDomain& domain,
                                       int n_centers, const std::vector<double>& radii,
                                       double ceiling);

// Synthetic crack instance: p-harmonic field on the unit disk vanishing on a
// diameter glue line, driven by boundary data that is odd across the crack.
struct CrackInstance {
  ConstrainedMesh mesh;
  ScalarField field;
  GlueGraph sigma;
};
CrackInstance make_crack_instance(double p, double h, double tol = 1e-9);

}  // namespace pcl

#endif
