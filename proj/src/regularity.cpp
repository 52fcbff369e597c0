#include "pcl/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcl/competitors.hpp"
#include "pcl/errors.hpp"
#include "pcl/exponents.hpp"
#include "pcl/log.hpp"

namespace pcl {

const char* to_string(FitQuality q) {
  switch (q) {
    case FitQuality::Ok: return "ok";
    case FitQuality::DegenerateZero: return "degenerate_zero";
    case FitQuality::Unreliable: return "unreliable";
    case FitQuality::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  LogLogFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] > 1e-290) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  if (lx.size() < xs.size() / 2 + 1 || lx.size() < 2) {
    fit.quality = FitQuality::DegenerateZero;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) {
    fit.quality = FitQuality::Unreliable;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.r2 = syy > 1e-30 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.quality = fit.r2 < 0.9 ? FitQuality::Unreliable : FitQuality::Ok;
  return fit;
}

namespace {

void require_radii(const std::vector<double>& radii, double min_radius) {
  if (radii.size() < 2) throw Error(ErrorCode::Precondition, "need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] <= min_radius)
      throw Error(ErrorCode::Precondition, "radius at or below the resolution floor");
    if (i > 0 && radii[i] >= radii[i - 1])
      throw Error(ErrorCode::Precondition, "radii must be strictly decreasing");
  }
}

bool on_both_sides(const GlueGraph& g, const Vec2& x, double s, const std::vector<Vec2>& pts) {
  if (pts.size() != 2) return false;
  const FlatnessReport rep = flatness(g, x, s);
  const Vec2 dir(std::cos(rep.best_line_angle), std::sin(rep.best_line_angle));
  const double band = (rep.beta + kTolBeta) * s;
  const Vec2 n(-dir.y(), dir.x());
  for (const auto& z : pts)
    if (std::abs(n.dot(z - x)) > band) return false;
  const double s0 = dir.dot(pts[0] - x);
  const double s1 = dir.dot(pts[1] - x);
  return s0 * s1 < 0.0;
}

}  // namespace

DecayReport beta_decay(const GlueGraph& sigma, const Vec2& x, std::vector<double> radii,
                       double predicted, double min_radius) {
  require_radii(radii, min_radius);
  if (distance_to_graph(sigma, x) > tau_geo(sigma))
    throw Error(ErrorCode::NotOnSigma, "decay center must lie on Sigma");
  DecayReport rep;
  rep.center = x;
  rep.exponent_kind = "beta_alpha";
  rep.predicted_exponent = predicted;
  for (double r : radii) {
    try {
      rep.values.push_back(flatness(sigma, x, r).beta);
      rep.radii.push_back(r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyIntersection) throw;
      break;  // partial report
    }
  }
  const LogLogFit fit = fit_loglog(rep.radii, rep.values);
  rep.fitted_exponent = fit.slope;
  rep.fit_r2 = fit.r2;
  rep.quality = fit.quality;
  return rep;
}

DecayReport omega_decay(const ConstrainedMesh& mesh, const ScalarField& field,
                        const GlueGraph& sigma, const Vec2& x, std::vector<double> radii,
                        double eps0, double q) {
  require_radii(radii, 2.0 * mesh.h);
  DecayReport rep;
  rep.center = x;
  rep.exponent_kind = "omega_decay";
  rep.predicted_exponent = 1.0 + decay_b(field.p, q);
  for (double r : radii) {
    if (flatness(sigma, x, r).beta > eps0) {
      rep.quality = FitQuality::NotApplicable;
      return rep;
    }
  }
  for (double r : radii) {
    rep.radii.push_back(r);
    rep.values.push_back(r * local_energy(mesh, field, x, r));
  }
  const LogLogFit fit = fit_loglog(rep.radii, rep.values);
  rep.fitted_exponent = fit.slope;
  rep.fit_r2 = fit.r2;
  rep.quality = fit.quality;
  return rep;
}

LocalEnergySup w_tau_estimate(const GlueGraph& sigma, const EvalContext& ctx, const Vec2& x,
                              double r, double tau, int n_samples) {
  const FlatnessReport rep = flatness(sigma, x, r);
  if (rep.beta > tau + kTolBeta)
    throw Error(ErrorCode::NotAdmissible, "Sigma itself is not tau-flat in the ball");

  LocalEnergySup out;
  out.center = x;
  out.radius = r;
  out.tau = tau;

  const double h1_sigma = total_length(sigma);
  auto energy_of = [&](const GlueGraph& g) {
    const ConstrainedMesh mesh = build_mesh(ctx.domain, normalize(g), ctx.mesh_h);
    const ScalarField u = solve_p_poisson(mesh, ctx.force, ctx.p, ctx.solver_tol);
    return local_energy(mesh, u, x, r);
  };

  out.value = energy_of(sigma);
  out.argmax = -1;
  out.admissible_candidates = 0;

  // fixed angle grid around the best line keeps candidate sets nested in
  // both tau and n_samples
  const double delta0 = 0.05;
  for (int k = 0; k < n_samples; ++k) {
    const int step = (k + 2) / 2;
    const double sign = k % 2 ? -1.0 : 1.0;
    const double theta = k == 0 ? rep.best_line_angle
                                : rep.best_line_angle + sign * step * delta0;
    GlueGraph cand;
    try {
      cand = competitor_cut_chord_at_angle(sigma, x, r, tau * 0.9, theta);
    } catch (const Error&) {
      continue;
    }
    if (!is_connected(cand)) continue;
    if (total_length(cand) > 100.0 * std::max(h1_sigma, 1e-12)) continue;
    try {
      if (flatness(cand, x, r).beta > tau + kTolBeta) continue;
    } catch (const Error&) {
      continue;
    }
    ++out.admissible_candidates;
    double val;
    try {
      val = energy_of(cand);
    } catch (const Error&) {
      continue;
    }
    if (val > out.value) {
      out.value = val;
      out.argmax = k;
    }
  }
  return out;
}

DensityScan density_scan(const GlueGraph& sigma, const Vec2& x, double r1, double tau) {
  DensityScan scan;
  scan.samples = 64;
  const double lo = tau * r1 / 4.0;
  const double hi = tau * r1 / 2.0;
  for (int k = 0; k < scan.samples; ++k) {
    const double s = lo + (hi - lo) * (k + 0.5) / scan.samples;
    const auto pts = circle_intersection_points(sigma, x, s);
    if (pts.size() == 2) {
      ++scan.two_point_samples;
      if (on_both_sides(sigma, x, s, pts)) scan.both_sides_rate += 1.0;
    }
  }
  scan.fraction = static_cast<double>(scan.two_point_samples) / scan.samples;
  scan.both_sides_rate =
      scan.two_point_samples ? scan.both_sides_rate / scan.two_point_samples : 0.0;
  return scan;
}

HeightExcess height_vs_excess(const GlueGraph& sigma, const Vec2& x, double r) {
  const auto pts = circle_intersection_points(sigma, x, r);
  if (pts.size() != 2 || !on_both_sides(sigma, x, r, pts))
    throw Error(ErrorCode::NotAChordConfiguration,
                "need exactly two crossings on both sides");
  const BallClip clip = clip_to_ball(sigma, x, r);
  if (clip.empty()) throw Error(ErrorCode::NotAChordConfiguration, "empty clip");

  // connectivity of the clipped pieces via endpoint coincidence
  const double tau = std::max(tau_geo(sigma), 1e-12 * r);
  const std::size_t n = clip.segments.size();
  if (n == 0) throw Error(ErrorCode::NotAChordConfiguration, "no arc in the ball");
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const Vec2& a : clip.segments[i])
        for (const Vec2& b : clip.segments[j])
          if ((a - b).norm() <= tau) root[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  for (std::size_t i = 1; i < n; ++i)
    if (find(static_cast<int>(i)) != find(0))
      throw Error(ErrorCode::NotAChordConfiguration, "clipped arc is not connected");

  HeightExcess he;
  double arc_len = 0.0;
  for (const auto& s : clip.segments) {
    arc_len += (s[1] - s[0]).norm();
    // distance to a segment is convex, so piece endpoints carry the maximum
    he.height = std::max(he.height, point_segment_dist(s[0], pts[0], pts[1]));
    he.height = std::max(he.height, point_segment_dist(s[1], pts[0], pts[1]));
  }
  he.excess = arc_len - (pts[1] - pts[0]).norm();
  return he;
}

std::vector<QuadrupleSite> quadruple_scan(const GlueGraph& sigma, const EvalContext& ctx,
                                          double hop_radius) {
  std::vector<QuadrupleSite> sites;
  const GlueGraph g = normalize(sigma);
  Evaluation base;
  bool have_base = false;

  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (degree(g, static_cast<int>(v)) != 4) continue;
    const Vec2 x = g.vertices[v];
    double min_len = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (g.edges[e][0] == static_cast<int>(v) || g.edges[e][1] == static_cast<int>(v))
        min_len = std::min(min_len, g.edge_length(static_cast<int>(e)));
    const double r_s = std::min({hop_radius, 0.9 * min_len,
                                 0.9 * ctx.domain.distance_to_boundary(x)});
    if (r_s <= 0.0) continue;
    const auto exits = circle_intersection_points(g, x, r_s);
    if (exits.size() != 4) continue;

    GlueGraph cand;
    try {
      cand = steiner_cross_competitor(g, x, r_s);
    } catch (const Error&) {
      continue;
    }
    if (!is_connected(cand)) continue;

    QuadrupleSite site;
    site.vertex = static_cast<int>(v);
    site.position = x;
    site.r_s = r_s;
    site.d_length = total_length(cand) - total_length(g);
    try {
      if (!have_base) {
        base = evaluate(g, ctx);
        have_base = true;
      }
      const Evaluation ce = evaluate(cand, ctx);
      site.d_compliance = ce.compliance - base.compliance;
      site.d_objective = ce.objective - base.objective;
      site.improved = site.d_objective < 0.0;
    } catch (const Error&) {
      site.d_compliance = std::numeric_limits<double>::quiet_NaN();
      site.d_objective = std::numeric_limits<double>::quiet_NaN();
    }
    sites.push_back(site);
  }
  return sites;
}

LoopCertificate loop_certificate(const GlueGraph& sigma, const EvalContext& ctx) {
  LoopCertificate cert;
  const GlueGraph g = normalize(sigma);
  const auto loops = find_loops(g);
  if (loops.empty()) {
    cert.pass = true;
    return cert;
  }
  const Evaluation base = evaluate(g, ctx);
  bool any_improvement = false;
  for (const auto& loop : loops) {
    // remove the longest edge of the loop: the largest length win
    int best_edge = loop[0];
    for (int e : loop)
      if (g.edge_length(e) > g.edge_length(best_edge)) best_edge = e;
    GlueGraph cand = g;
    cand.edges.erase(cand.edges.begin() + best_edge);
    cand.edge_ids.erase(cand.edge_ids.begin() + best_edge);
    cand.edge_source.erase(cand.edge_source.begin() + best_edge);
    LoopReport rep;
    rep.loop_edges = static_cast<int>(loop.size());
    rep.removed_length = g.edge_length(best_edge);
    try {
      rep.d_objective = evaluate(cand, ctx).objective - base.objective;
      if (rep.d_objective < 0.0) any_improvement = true;
    } catch (const Error&) {
      rep.d_objective = std::numeric_limits<double>::quiet_NaN();
    }
    cert.loops.push_back(rep);
  }
  cert.lambda_zero_inconclusive = ctx.lambda == 0.0;
  cert.local_minimum_caveat = !any_improvement;
  // loops remain: acceptable only when no tested removal improves strictly
  cert.pass = !any_improvement && !cert.lambda_zero_inconclusive;
  return cert;
}

AhlforsCertificate ahlfors_certificate(const GlueGraph& sigma, const PolygonalDomain& domain,
                                       int n_centers, const std::vector<double>& radii,
                                       double ceiling) {
  AhlforsCertificate cert;
  cert.min_ratio = std::numeric_limits<double>::infinity();
  const double len = total_length(sigma);
  if (len <= 0.0 || n_centers <= 0) return cert;
  const double diam = graph_diameter_bound(sigma);
  for (int i = 0; i < n_centers; ++i) {
    const Vec2 x = point_at_arclength(sigma, len * (i + 0.5) / n_centers);
    for (double r : radii) {
      if (r >= diam / 2.0) continue;
      if (domain.distance_to_boundary(x) <= r) continue;
      const double ratio = ahlfors_ratio(sigma, x, r);
      cert.min_ratio = std::min(cert.min_ratio, ratio);
      cert.max_ratio = std::max(cert.max_ratio, ratio);
      ++cert.samples;
    }
  }
  cert.pass = cert.samples > 0 && cert.min_ratio >= 1.0 - kTolLen && cert.max_ratio <= ceiling;
  return cert;
}

CrackInstance make_crack_instance(double p, double h, double tol) {
  CrackInstance inst;
  inst.sigma = make_segment(Vec2(-1, 0), Vec2(1, 0));
  const PolygonalDomain disk =
      make_disk(Vec2(0, 0), 1.0, static_cast<int>(std::ceil(2.0 * M_PI / h)));
  inst.mesh = build_mesh(disk, inst.sigma, h);
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(inst.mesh.nodes.size());
  for (std::size_t v = 0; v < inst.mesh.nodes.size(); ++v)
    if (inst.mesh.dirichlet_mask[v])
      bv[v] = inst.mesh.nodes[v].y() * (1.0 + 0.5 * inst.mesh.nodes[v].x());
  SolveOptions opts;
  opts.boundary_values = bv;
  inst.field = solve_p_poisson(inst.mesh, make_constant_force(0.0), p, tol, opts);
  return inst;
}

}  // namespace pcl
