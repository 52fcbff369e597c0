// Independent reference computations used to freeze expected test values.
// Everything here is deliberately brute force and shares no code with the
// library paths it checks.
#ifndef PCL_TESTS_ORACLES_HPP
#define PCL_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include "pcl/geometry.hpp"
#include "pcl/rng.hpp"

namespace oracle {

using pcl::Vec2;

// Monte Carlo area of triangle cap disk.
inline double mc_triangle_disk_area(const Vec2& a, const Vec2& b, const Vec2& c,
                                    const Vec2& center, double r, int n, std::uint64_t seed) {
  pcl::Rng rng(seed);
  int hits = 0;
  for (int k = 0; k < n; ++k) {
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec2 p = a + u * (b - a) + v * (c - a);
    if ((p - center).norm() <= r) ++hits;
  }
  const double tri_area = 0.5 * std::abs(pcl::cross2(b - a, c - a));
  return tri_area * hits / n;
}

// Brute-force discrete Hausdorff distance (definition, no early exits).
inline double brute_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto dir = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double sup = 0.0;
    for (const auto& p : from) {
      double inf = 1e300;
      for (const auto& q : to) inf = std::min(inf, (p - q).norm());
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return std::max(dir(a, b), dir(b, a));
}

// Steiner tree length of 4 terminals by numeric descent over the positions of
// two Steiner points (coordinate descent with shrinking step, several
// pairings and restarts). Independent of the closed-form construction.
inline double steiner4_descent_length(const std::array<Vec2, 4>& pts) {
  auto tree_len = [&](const Vec2& s1, const Vec2& s2, int pairing) {
    // pairing 0: (0,1)+s1, (2,3)+s2 ; pairing 1: (0,2),(1,3); pairing 2: (0,3),(1,2)
    static const int groups[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    const int* gr = groups[pairing];
    return (pts[gr[0]] - s1).norm() + (pts[gr[1]] - s1).norm() + (s1 - s2).norm() +
           (pts[gr[2]] - s2).norm() + (pts[gr[3]] - s2).norm();
  };
  double best = 1e300;
  for (int pairing = 0; pairing < 3; ++pairing) {
    for (int start = 0; start < 4; ++start) {
      Vec2 s1 = 0.25 * (pts[0] + pts[1] + pts[2] + pts[3]);
      Vec2 s2 = s1;
      if (start == 1) s1 += Vec2(0.1, 0.0);
      if (start == 2) s2 += Vec2(0.0, 0.1);
      if (start == 3) {
        s1 = 0.5 * (pts[0] + pts[1]);
        s2 = 0.5 * (pts[2] + pts[3]);
      }
      double step = 0.5;
      double cur = tree_len(s1, s2, pairing);
      while (step > 1e-10) {
        bool improved = false;
        const Vec2 dirs[4] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
        for (Vec2* s : {&s1, &s2}) {
          for (const auto& d : dirs) {
            const Vec2 save = *s;
            *s += step * d;
            const double t = tree_len(s1, s2, pairing);
            if (t < cur - 1e-15) {
              cur = t;
              improved = true;
            } else {
              *s = save;
            }
          }
        }
        if (!improved) step *= 0.5;
      }
      best = std::min(best, cur);
    }
  }
  return best;
}

// Euclidean MST length of a small point set.
inline double mst_length(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<char> in(n, 0);
  std::vector<double> dist(n, 1e300);
  in[0] = 1;
  for (int i = 1; i < n; ++i) dist[i] = (pts[i] - pts[0]).norm();
  double total = 0.0;
  for (int it = 1; it < n; ++it) {
    int best = -1;
    for (int i = 0; i < n; ++i)
      if (!in[i] && (best < 0 || dist[i] < dist[best])) best = i;
    total += dist[best];
    in[best] = 1;
    for (int i = 0; i < n; ++i)
      if (!in[i]) dist[i] = std::min(dist[i], (pts[i] - pts[best]).norm());
  }
  return total;
}

// Exact radial solution of -div(|grad u|^{p-2} grad u) = 1 on the unit disk:
// u(s) = ((p-1)/p) (1/2)^{1/(p-1)} (1 - s^{p/(p-1)}).
inline double radial_u(double p, double s) {
  const double pp = p / (p - 1.0);
  return (p - 1.0) / p * std::pow(0.5, 1.0 / (p - 1.0)) * (1.0 - std::pow(s, pp));
}

// Compliance C_p = (1/p') int u dx for f == 1 on the unit disk, by quadrature.
inline double radial_compliance(double p, int n = 200000) {
  double integral = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = (k + 0.5) / n;
    integral += radial_u(p, s) * 2.0 * M_PI * s / n;
  }
  const double pprime = p / (p - 1.0);
  return integral / pprime;
}

}  // namespace oracle

#endif
