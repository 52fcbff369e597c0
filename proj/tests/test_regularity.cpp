#include <doctest.h>

#include "oracles.hpp"
#include "pcl/errors.hpp"
#include "pcl/exponents.hpp"
#include "pcl/regularity.hpp"

using namespace pcl;

namespace {

GlueGraph parabola_graph(double span, int pieces) {
  GlueGraph g;
  int prev = -1;
  for (int k = 0; k <= pieces; ++k) {
    const double t = -span + 2.0 * span * k / pieces;
    const int v = g.add_vertex(Vec2(t, t * t));
    if (prev >= 0) g.add_edge(prev, v);
    prev = v;
  }
  return g;
}

EvalContext disk_context(double h, double lambda = 0.1) {
  EvalContext ctx;
  ctx.domain = make_disk(Vec2(0, 0), 1.0, static_cast<int>(std::ceil(2 * M_PI / h)));
  ctx.force = make_constant_force(1.0);
  ctx.p = 2.0;
  ctx.lambda = lambda;
  ctx.mesh_h = h;
  ctx.solver_tol = 1e-8;
  return ctx;
}

}  // namespace

TEST_CASE("fit_loglog recovers exponents and flags degenerate data") {
  std::vector<double> xs{0.4, 0.3, 0.2, 0.1, 0.05};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * std::pow(x, 1.7));
  const LogLogFit fit = fit_loglog(xs, ys);
  CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0));
  CHECK(fit.quality == FitQuality::Ok);

  const LogLogFit zero = fit_loglog(xs, {0, 0, 0, 0, 0});
  CHECK(zero.quality == FitQuality::DegenerateZero);
}

TEST_CASE("beta_decay: straight segment is degenerate zero") {
  const GlueGraph seg = make_segment(Vec2(-2, 0), Vec2(2, 0));
  const DecayReport rep = beta_decay(seg, Vec2(0, 0), {0.4, 0.3, 0.2, 0.1}, 0.5);
  CHECK(rep.quality == FitQuality::DegenerateZero);
  for (double b : rep.values) CHECK(b < kTolBeta);
}

TEST_CASE("beta_decay: parabola fits exponent near one") {
  const GlueGraph par = parabola_graph(1.0, 400);
  const DecayReport rep =
      beta_decay(par, Vec2(0, 0), {0.4, 0.32, 0.24, 0.16, 0.08}, 1.0);
  CHECK(rep.quality == FitQuality::Ok);
  CHECK(rep.fitted_exponent == doctest::Approx(1.0).epsilon(0.2));

  // oracle at one radius: dense discrete Hausdorff over a dense angle grid
  const double r = 0.3;
  const BallClip clip = clip_to_ball(par, Vec2(0, 0), r);
  std::vector<Vec2> sigma_samples;
  for (const auto& s : clip.segments) {
    const int n = 400;
    for (int k = 0; k <= n; ++k)
      sigma_samples.push_back(s[0] + (static_cast<double>(k) / n) * (s[1] - s[0]));
  }
  double best = 1e300;
  for (int a = 0; a < 720; ++a) {
    const double theta = M_PI * a / 720;
    const Vec2 dir(std::cos(theta), std::sin(theta));
    std::vector<Vec2> chord;
    for (int k = 0; k <= 800; ++k)
      chord.push_back(Vec2(0, 0) + (2.0 * k / 800.0 - 1.0) * r * dir);
    best = std::min(best, hausdorff_distance(sigma_samples, chord) / r);
  }
  const double lib = flatness(par, Vec2(0, 0), r).beta;
  CHECK(lib == doctest::Approx(best).epsilon(0.0).scale(1.0).epsilon(5e-3));
}

TEST_CASE("beta_decay: right-angle corner is scale invariant") {
  const GlueGraph corner =
      make_graph({Vec2(1.5, 0), Vec2(0, 0), Vec2(0, 1.5)}, {{0, 1}, {1, 2}});
  const DecayReport rep =
      beta_decay(corner, Vec2(0, 0), {0.5, 0.4, 0.3, 0.2, 0.1}, 0.0);
  CHECK(std::abs(rep.fitted_exponent) < 0.05);
  // negative control for the decay fits: values do not shrink with r
  const double first = rep.values.front();
  for (double b : rep.values) CHECK(b == doctest::Approx(first).epsilon(0.02));
}

TEST_CASE("beta_decay input validation") {
  const GlueGraph seg = make_segment(Vec2(-1, 0), Vec2(1, 0));
  CHECK_THROWS_AS((void)beta_decay(seg, Vec2(0, 0.5), {0.4, 0.2}, 0.5), Error);   // off Sigma
  CHECK_THROWS_AS((void)beta_decay(seg, Vec2(0, 0), {0.2, 0.4}, 0.5), Error);     // not decreasing
  CHECK_THROWS_AS((void)beta_decay(seg, Vec2(0, 0), {0.4, 0.05}, 0.5, 0.1), Error);  // below floor
}

TEST_CASE("omega_decay on the synthetic crack fits the square law") {
  const CrackInstance crack = make_crack_instance(2.0, 1.0 / 40);
  const DecayReport rep = omega_decay(crack.mesh, crack.field, crack.sigma, Vec2(0, 0),
                                      {0.4, 0.3, 0.2, 0.1}, 0.1, 1e9);
  CHECK(rep.quality == FitQuality::Ok);
  CHECK(rep.fitted_exponent >= 1.8);
  CHECK(rep.fitted_exponent <= 2.2);
  // the paper's guaranteed rate 1 + b is a lower bound and the fit beats it
  CHECK(rep.predicted_exponent > 1.0);
  CHECK(rep.fitted_exponent >= rep.predicted_exponent - 0.05);
}

TEST_CASE("omega_decay degenerate and inapplicable branches") {
  const CrackInstance crack = make_crack_instance(2.0, 1.0 / 24);
  ScalarField zero = crack.field;
  zero.values.setZero();
  zero.element_gradients.setZero();
  const DecayReport rep = omega_decay(crack.mesh, zero, crack.sigma, Vec2(0, 0),
                                      {0.4, 0.3, 0.2}, 0.1, 1e9);
  CHECK(rep.quality == FitQuality::DegenerateZero);

  // cross center is nowhere near a line: not applicable
  const GlueGraph cross = make_cross(Vec2(0, 0), 1.0);
  const PolygonalDomain disk = make_disk(Vec2(0, 0), 1.0, 96);
  const ConstrainedMesh m = build_mesh(disk, cross, 1.0 / 24);
  const ScalarField u = solve_p_poisson(m, make_constant_force(1.0), 2.0, 1e-8);
  const DecayReport na =
      omega_decay(m, u, cross, Vec2(0, 0), {0.4, 0.3, 0.2}, 0.1, 1e9);
  CHECK(na.quality == FitQuality::NotApplicable);
}

TEST_CASE("flat versus corner decay: the corner is slower") {
  const double h = 1.0 / 32;
  const PolygonalDomain disk = make_disk(Vec2(0, 0), 1.0, 128);
  const ForceSpec f = make_constant_force(1.0);
  // right-angle corner through the center
  const GlueGraph corner =
      make_graph({Vec2(1, 0), Vec2(0, 0), Vec2(0, 1)}, {{0, 1}, {1, 2}});
  const ConstrainedMesh mc = build_mesh(disk, corner, h);
  const ScalarField uc = solve_p_poisson(mc, f, 2.0, 1e-8);
  std::vector<double> radii{0.4, 0.3, 0.2, 0.1};
  std::vector<double> vals;
  for (double r : radii) vals.push_back(r * local_energy(mc, uc, Vec2(0, 0), r));
  const LogLogFit corner_fit = fit_loglog(radii, vals);

  const CrackInstance crack = make_crack_instance(2.0, h);
  std::vector<double> fvals;
  for (double r : radii) fvals.push_back(r * local_energy(crack.mesh, crack.field, Vec2(0, 0), r));
  const LogLogFit flat_fit = fit_loglog(radii, fvals);
  CHECK(corner_fit.slope < 2.0);
  CHECK(corner_fit.slope < flat_fit.slope + 0.1);
}

TEST_CASE("w_tau_estimate") {
  EvalContext ctx = disk_context(0.1);
  const GlueGraph diam = make_segment(Vec2(-1, 0), Vec2(1, 0));
  const Vec2 x(0, 0);
  const double r = 0.3, tau = 0.25;

  SUBCASE("no samples reduces to the local energy of Sigma") {
    const LocalEnergySup est = w_tau_estimate(diam, ctx, x, r, tau, 0);
    const ConstrainedMesh m = build_mesh(ctx.domain, diam, ctx.mesh_h);
    const ScalarField u = solve_p_poisson(m, ctx.force, ctx.p, ctx.solver_tol);
    CHECK(est.value == doctest::Approx(local_energy(m, u, x, r)).epsilon(1e-12));
    CHECK(est.argmax == -1);
  }

  SUBCASE("zero force gives zero") {
    EvalContext zero_ctx = ctx;
    zero_ctx.force = make_constant_force(0.0);
    const LocalEnergySup est = w_tau_estimate(diam, zero_ctx, x, r, tau, 3);
    CHECK(est.value == 0.0);
  }

  SUBCASE("monotone in the sample count and in tau") {
    const LocalEnergySup e2 = w_tau_estimate(diam, ctx, x, r, tau, 2);
    const LocalEnergySup e5 = w_tau_estimate(diam, ctx, x, r, tau, 5);
    CHECK(e5.value >= e2.value - 1e-15);
    const LocalEnergySup narrow = w_tau_estimate(diam, ctx, x, r, 0.1, 5);
    CHECK(e5.value >= narrow.value - 1e-15);
    CHECK(e5.admissible_candidates >= narrow.admissible_candidates);
  }

  SUBCASE("not admissible when Sigma is not flat") {
    const GlueGraph cross = make_cross(Vec2(0, 0), 0.9);
    CHECK_THROWS_AS((void)w_tau_estimate(cross, ctx, x, r, 0.1, 2), Error);
  }
}

TEST_CASE("density_scan") {
  const GlueGraph diam = make_segment(Vec2(-1, 0), Vec2(1, 0));
  const DensityScan d = density_scan(diam, Vec2(0, 0), 0.8, 0.5);
  CHECK(d.fraction == 1.0);
  CHECK(d.both_sides_rate == 1.0);

  const GlueGraph cross = make_cross(Vec2(0, 0), 1.0);
  const DensityScan c = density_scan(cross, Vec2(0, 0), 0.8, 0.5);
  CHECK(c.fraction == 0.0);
}

TEST_CASE("height_vs_excess") {
  SUBCASE("the chord itself") {
    const GlueGraph diam = make_segment(Vec2(-2, 0), Vec2(2, 0));
    const HeightExcess he = height_vs_excess(diam, Vec2(0, 0), 1.0);
    CHECK(he.height == doctest::Approx(0.0));
    CHECK(he.excess == doctest::Approx(0.0));
  }

  SUBCASE("tent bulge: closed-form slack") {
    const double delta = 0.05;
    const GlueGraph tent = make_graph({Vec2(-2, 0), Vec2(0, delta), Vec2(2, 0)},
                                      {{0, 1}, {1, 2}});
    const HeightExcess he = height_vs_excess(tent, Vec2(0, 0), 1.0);
    CHECK(he.height == doctest::Approx(delta / 2).epsilon(0.02));
    CHECK(he.height <= std::sqrt(2.0 * 1.0 * std::max(he.excess, 0.0)) + kTolLen);
  }

  SUBCASE("random flat polylines never violate the bound") {
    Rng rng(77);
    int tested = 0;
    for (int it = 0; it < 120; ++it) {
      // mildly wiggly near-horizontal polyline crossing the unit ball
      GlueGraph g;
      int prev = -1;
      for (int k = 0; k <= 8; ++k) {
        const double x = -2.0 + 4.0 * k / 8;
        const double y = 0.08 * rng.uniform(-1, 1);
        const int v = g.add_vertex(Vec2(x, y));
        if (prev >= 0) g.add_edge(prev, v);
        prev = v;
      }
      HeightExcess he;
      try {
        he = height_vs_excess(g, Vec2(0, 0), 1.0);
      } catch (const Error&) {
        continue;
      }
      ++tested;
      CHECK(he.height <= std::sqrt(2.0 * 1.0 * std::max(he.excess, 0.0)) + kTolLen);
    }
    CHECK(tested > 60);
  }

  SUBCASE("cross is not a chord configuration") {
    const GlueGraph cross = make_cross(Vec2(0, 0), 1.0);
    CHECK_THROWS_AS((void)height_vs_excess(cross, Vec2(0, 0), 0.5), Error);
  }
}

TEST_CASE("quadruple_scan on the symmetric cross") {
  EvalContext ctx = disk_context(0.08, 0.05);
  const GlueGraph cross = make_cross(Vec2(0, 0), 0.6);
  const double r_s = 0.2;
  const auto sites = quadruple_scan(cross, ctx, r_s);
  REQUIRE(sites.size() == 1);
  const double expected = -(4.0 - std::sqrt(2.0) * (std::sqrt(3.0) + 1.0)) * r_s;
  CHECK(sites[0].d_length == doctest::Approx(expected).epsilon(0.0).scale(1.0).epsilon(1e-3 * r_s));
  CHECK(sites[0].d_compliance >= -1e-6);  // removing glue can only soften

  // a tree without degree-4 vertices reports nothing
  const GlueGraph star = make_graph(
      {Vec2(0, 0), Vec2(0.4, 0), Vec2(0, 0.4), Vec2(-0.4, 0)}, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(quadruple_scan(star, ctx, r_s).empty());
}

TEST_CASE("loop_certificate") {
  EvalContext ctx = disk_context(0.09, 0.5);

  SUBCASE("loop-free passes") {
    const LoopCertificate cert =
        loop_certificate(make_segment(Vec2(-0.5, 0), Vec2(0.5, 0)), ctx);
    CHECK(cert.pass);
    CHECK(cert.loops.empty());
  }

  SUBCASE("a wasteful loop fails with a strictly improving removal") {
    const GlueGraph tri = make_graph({Vec2(-0.3, -0.2), Vec2(0.3, -0.2), Vec2(0, 0.3)},
                                     {{0, 1}, {1, 2}, {2, 0}});
    const LoopCertificate cert = loop_certificate(tri, ctx);
    CHECK(!cert.pass);
    REQUIRE(cert.loops.size() == 1);
    CHECK(cert.loops[0].d_objective < 0.0);
    CHECK(cert.loops[0].removed_length > 0.0);
  }

  SUBCASE("lambda zero is inconclusive") {
    EvalContext zero = disk_context(0.09, 0.0);
    const GlueGraph tri = make_graph({Vec2(-0.3, -0.2), Vec2(0.3, -0.2), Vec2(0, 0.3)},
                                     {{0, 1}, {1, 2}, {2, 0}});
    const LoopCertificate cert = loop_certificate(tri, zero);
    CHECK(cert.lambda_zero_inconclusive);
  }
}

TEST_CASE("ahlfors_certificate") {
  const PolygonalDomain disk = make_disk(Vec2(0, 0), 1.0, 128);

  const GlueGraph seg = make_segment(Vec2(-0.6, 0), Vec2(0.6, 0));
  const AhlforsCertificate a = ahlfors_certificate(seg, disk, 20, {0.05, 0.1, 0.2}, 20.0);
  CHECK(a.pass);
  CHECK(a.min_ratio >= 1.0 - kTolLen);
  CHECK(a.max_ratio <= 2.0 + 1e-9);

  // 3-star: near the hub the ratio approaches 3
  const GlueGraph star = make_graph(
      {Vec2(0, 0), Vec2(0.5, 0), Vec2(-0.25, 0.43), Vec2(-0.25, -0.43)},
      {{0, 1}, {0, 2}, {0, 3}});
  const AhlforsCertificate s = ahlfors_certificate(star, disk, 30, {0.04, 0.08}, 20.0);
  CHECK(s.pass);
  CHECK(s.max_ratio <= 3.0 + 1e-9);
  CHECK(s.max_ratio > 2.0);
}

TEST_CASE("paper exponent table") {
  // q0 thresholds
  CHECK(q0_threshold(1.5) == doctest::Approx(2.0 * 1.5 / (3 * 1.5 - 2)));
  CHECK(q0_satisfied(3.0, 1.0));
  CHECK(!q0_satisfied(2.0, 1.0));
  CHECK(q0_satisfied(2.0, 1.01));
  CHECK(!q0_satisfied(1.5, 1.0));

  // q1 and positivity of the decay increment
  CHECK(q1_threshold(2.0) == doctest::Approx(4.0 / 3.0));
  CHECK(q1_threshold(1.5) == doctest::Approx(2.0));
  for (double p : {1.5, 2.0, 3.0}) {
    const double q1 = q1_threshold(p);
    CHECK(alpha_exponent(p, q1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(alpha_exponent(p, q1 * 1.5) > 0.0);
    CHECK(decay_b(p, 1e9) > 0.0);
  }
  // bounded force: alpha = 1 + p' for p >= 2, 3(p-1) for p < 2
  CHECK(alpha_exponent(2.0, std::numeric_limits<double>::infinity()) == doctest::Approx(3.0));
  CHECK(alpha_exponent(1.5, std::numeric_limits<double>::infinity()) == doctest::Approx(1.5));
}
