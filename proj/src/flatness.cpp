#include "pcl/flatness.hpp"

#include <algorithm>
#include <cmath>

#include "pcl/errors.hpp"

namespace pcl {

double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptySet, "hausdorff_distance needs nonempty samplings");
  auto directed = [](std::span<const Vec2> from, std::span<const Vec2> to) {
    double sup = 0.0;
    for (const Vec2& p : from) {
      double inf = std::numeric_limits<double>::infinity();
      for (const Vec2& q : to) inf = std::min(inf, (p - q).squaredNorm());
      sup = std::max(sup, inf);
    }
    return std::sqrt(sup);
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace {

double dist_to_clip(const Vec2& p, const BallClip& clip) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : clip.segments) d = std::min(d, point_segment_dist(p, s[0], s[1]));
  for (const auto& q : clip.points) d = std::min(d, (p - q).norm());
  return d;
}

}  // namespace

double hausdorff_to_chord_union(const BallClip& clip, const Vec2& x, double r,
                                std::span<const double> angles) {
  std::vector<std::array<Vec2, 2>> chords;
  for (double theta : angles) {
    const Vec2 dir(std::cos(theta), std::sin(theta));
    chords.push_back({x - r * dir, x + r * dir});
  }
  auto dist_to_chords = [&](const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : chords) d = std::min(d, point_segment_dist(p, c[0], c[1]));
    return d;
  };

  // pieces -> chords: distance to a union of segments is attained at piece
  // endpoints only when the union is convex; with several chords refine over
  // each piece as well
  double d1 = 0.0;
  for (const auto& s : clip.segments) {
    if (chords.size() == 1) {
      d1 = std::max(d1, point_segment_dist(s[0], chords[0][0], chords[0][1]));
      d1 = std::max(d1, point_segment_dist(s[1], chords[0][0], chords[0][1]));
    } else {
      const int n = 64;
      double lo = 0.0, hi = 1.0, best = 0.0;
      int arg = 0;
      for (int k = 0; k <= n; ++k) {
        const double v = dist_to_chords(s[0] + (static_cast<double>(k) / n) * (s[1] - s[0]));
        if (v > best) {
          best = v;
          arg = k;
        }
      }
      lo = std::max(0.0, (arg - 1.0) / n);
      hi = std::min(1.0, (arg + 1.0) / n);
      for (int it = 0; it < 40; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (dist_to_chords(s[0] + m1 * (s[1] - s[0])) <
            dist_to_chords(s[0] + m2 * (s[1] - s[0])))
          lo = m1;
        else
          hi = m2;
      }
      best = std::max(best, dist_to_chords(s[0] + 0.5 * (lo + hi) * (s[1] - s[0])));
      d1 = std::max(d1, best);
    }
  }
  for (const auto& q : clip.points) d1 = std::max(d1, dist_to_chords(q));

  // chords -> pieces: dense samples plus Lipschitz-guarded local refinement
  double d2 = 0.0;
  const int n = 1024;
  for (const auto& c : chords) {
    auto chord_point = [&](double t) -> Vec2 { return c[0] + t * (c[1] - c[0]); };
    auto f = [&](double t) { return dist_to_clip(chord_point(t), clip); };
    std::vector<double> vals(n + 1);
    double best = 0.0;
    int arg = 0;
    for (int k = 0; k <= n; ++k) {
      vals[k] = f(static_cast<double>(k) / n);
      if (vals[k] > best) {
        best = vals[k];
        arg = k;
      }
    }
    const double step = 2.0 * r / n;
    for (int k = 0; k < n; ++k) {
      if (std::min(vals[k], vals[k + 1]) + step / 2.0 < best && k != arg - 1 && k != arg)
        continue;
      double lo = static_cast<double>(k) / n, hi = static_cast<double>(k + 1) / n;
      for (int it = 0; it < 40; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2))
          lo = m1;
        else
          hi = m2;
      }
      best = std::max(best, f(0.5 * (lo + hi)));
    }
    d2 = std::max(d2, best);
  }
  return std::max(d1, d2);
}

FlatnessReport flatness(const GlueGraph& sigma, const Vec2& x, double r) {
  if (r <= 0.0) throw Error(ErrorCode::Precondition, "flatness needs r > 0");
  const BallClip clip = clip_to_ball(sigma, x, r);
  if (clip.empty())
    throw Error(ErrorCode::EmptyIntersection, "Sigma does not meet the closed ball");

  auto beta_of = [&](double theta) {
    const double a[1] = {theta};
    return hausdorff_to_chord_union(clip, x, r, a) / r;
  };

  const int n_scan = 96;
  std::vector<double> b(n_scan);
  for (int k = 0; k < n_scan; ++k) b[k] = beta_of(M_PI * k / n_scan);

  // golden-section refinement of every local minimum of the pi-periodic scan
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double best_beta = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  auto consider = [&](double theta, double value) {
    theta = std::fmod(theta, M_PI);
    if (theta < 0.0) theta += M_PI;
    if (value < best_beta - 1e-15 ||
        (std::abs(value - best_beta) <= 1e-15 && theta < best_theta)) {
      best_beta = value;
      best_theta = theta;
    }
  };
  for (int k = 0; k < n_scan; ++k) {
    const double prev = b[(k + n_scan - 1) % n_scan];
    const double next = b[(k + 1) % n_scan];
    if (b[k] > prev || b[k] > next) continue;  // not a (weak) local minimum
    double lo = M_PI * (k - 1) / n_scan;
    double hi = M_PI * (k + 1) / n_scan;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = beta_of(x1), f2 = beta_of(x2);
    while (hi - lo > 1e-4) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = beta_of(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = beta_of(x2);
      }
    }
    const double theta = 0.5 * (lo + hi);
    consider(theta, beta_of(theta));
  }
  if (!std::isfinite(best_beta)) {
    // flat scan (constant in theta); smallest angle wins
    consider(0.0, b[0]);
  }

  FlatnessReport rep;
  rep.center = x;
  rep.radius = r;
  rep.beta = best_beta;
  rep.best_line_angle = best_theta;
  return rep;
}

double ahlfors_ratio(const GlueGraph& sigma, const Vec2& x, double r) {
  if (r <= 0.0) throw Error(ErrorCode::Precondition, "ahlfors_ratio needs r > 0");
  if (distance_to_graph(sigma, x) > tau_geo(sigma))
    throw Error(ErrorCode::NotOnSigma, "center is not on Sigma");
  return length_in_ball(sigma, x, r) / r;
}

int count_circle_intersections(const GlueGraph& sigma, const Vec2& x, double s) {
  if (s <= 0.0) throw Error(ErrorCode::Precondition, "radius must be positive");
  return static_cast<int>(circle_intersection_points(sigma, x, s).size());
}

}  // namespace pcl
