#include "pcl/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

// Splits the graph at the circle and keeps only the closed-complement part.
// Returns the kept graph plus the indices of its vertices on the circle.
struct ClippedOutside {
  GlueGraph graph;
  std::vector<int> stub_vertices;
};

ClippedOutside remove_ball(const GlueGraph& sigma, const Vec2& x, double r) {
  const double tau = tau_geo(sigma);
  GlueGraph out;
  out.next_id = sigma.next_id;
  std::vector<int> remap(sigma.vertices.size(), -1);
  auto keep_vertex = [&](int v) {
    if (remap[v] < 0) {
      remap[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(sigma.vertices[v]);
      out.vertex_ids.push_back(sigma.vertex_ids[v]);
    }
    return remap[v];
  };
  std::vector<int> stubs;
  auto circle_vertex = [&](const Vec2& p) {
    for (int s : stubs)
      if ((out.vertices[s] - p).norm() <= tau) return s;
    GlueGraph& g = out;
    const int v = g.add_vertex(p);
    stubs.push_back(v);
    return v;
  };

  for (std::size_t e = 0; e < sigma.edges.size(); ++e) {
    const Vec2 a = sigma.edge_a(static_cast<int>(e));
    const Vec2 b = sigma.edge_b(static_cast<int>(e));
    const double da = (a - x).norm();
    const double db = (b - x).norm();
    const bool ain = da < r - tau;
    const bool bin = db < r - tau;
    std::array<double, 2> ts;
    const int n = segment_circle_params(a, b, x, r, ts);
    const std::int64_t src = sigma.edge_source[e];

    if (!ain && !bin) {
      if (n == 2 && ts[1] - ts[0] > 1e-12) {
        // edge dips through the ball: keep the two outer parts
        const int va = keep_vertex(sigma.edges[e][0]);
        const int vb = keep_vertex(sigma.edges[e][1]);
        const Vec2 p0 = a + ts[0] * (b - a);
        const Vec2 p1 = a + ts[1] * (b - a);
        if ((p0 - a).norm() > tau) out.add_edge(va, circle_vertex(p0), src);
        if ((b - p1).norm() > tau) out.add_edge(circle_vertex(p1), vb, src);
      } else {
        out.add_edge(keep_vertex(sigma.edges[e][0]), keep_vertex(sigma.edges[e][1]), src);
      }
    } else if (ain != bin) {
      const double tcut = ain ? (n > 0 ? ts[n - 1] : 1.0) : (n > 0 ? ts[0] : 0.0);
      const Vec2 pc = a + tcut * (b - a);
      if (ain) {
        const int vb = keep_vertex(sigma.edges[e][1]);
        if ((b - pc).norm() > tau) out.add_edge(circle_vertex(pc), vb, src);
      } else {
        const int va = keep_vertex(sigma.edges[e][0]);
        if ((pc - a).norm() > tau) out.add_edge(va, circle_vertex(pc), src);
      }
    }
    // both strictly inside: dropped
  }
  // isolated vertices outside the ball survive
  std::vector<char> on_edge(sigma.vertices.size(), 0);
  for (const auto& e : sigma.edges) on_edge[e[0]] = on_edge[e[1]] = 1;
  for (std::size_t v = 0; v < sigma.vertices.size(); ++v)
    if (!on_edge[v] && (sigma.vertices[v] - x).norm() >= r - tau) keep_vertex(static_cast<int>(v));

  // vertices that landed on the circle also act as stubs
  for (std::size_t v = 0; v < out.vertices.size(); ++v) {
    if (std::abs((out.vertices[v] - x).norm() - r) <= tau &&
        std::find(stubs.begin(), stubs.end(), static_cast<int>(v)) == stubs.end())
      stubs.push_back(static_cast<int>(v));
  }
  return {std::move(out), std::move(stubs)};
}

bool graph_escapes_ball(const GlueGraph& sigma, const Vec2& x, double r) {
  const double tau = tau_geo(sigma);
  for (const auto& v : sigma.vertices)
    if ((v - x).norm() > r + tau) return true;
  return false;
}

}  // namespace

GlueGraph competitor_cut_circle(const GlueGraph& sigma, const Vec2& x, double r, int n_arc) {
  if (r <= 0.0 || n_arc < 3) throw Error(ErrorCode::Precondition, "need r > 0 and n_arc >= 3");
  if (!graph_escapes_ball(sigma, x, r))
    throw Error(ErrorCode::WouldDisconnectAll, "Sigma lies entirely inside the ball");

  ClippedOutside clip = remove_ball(sigma, x, r);
  GlueGraph g = std::move(clip.graph);

  std::vector<int> ring(n_arc);
  for (int k = 0; k < n_arc; ++k) {
    const double ang = 2.0 * M_PI * k / n_arc;
    ring[k] = g.add_vertex(x + r * Vec2(std::cos(ang), std::sin(ang)));
  }
  for (int k = 0; k < n_arc; ++k) g.add_edge(ring[k], ring[(k + 1) % n_arc]);

  for (int stub : clip.stub_vertices) {
    int bestv = ring[0];
    double bestd = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_arc; ++k) {
      const double d = (g.vertices[ring[k]] - g.vertices[stub]).norm();
      if (d < bestd) {
        bestd = d;
        bestv = ring[k];
      }
    }
    g.add_edge(stub, bestv);
  }
  return normalize(g);
}

GlueGraph competitor_cut_chord(const GlueGraph& sigma, const Vec2& x, double r,
                               double beta_wall) {
  if (r <= 0.0 || beta_wall < 0.0 || beta_wall > 1.0)
    throw Error(ErrorCode::Precondition, "need r > 0 and beta_wall in [0,1]");
  const FlatnessReport rep = flatness(sigma, x, r);  // throws EmptyIntersection
  if (rep.beta > beta_wall + kTolBeta)
    throw Error(ErrorCode::Precondition, "Sigma is not flat enough for the chord competitor");
  return competitor_cut_chord_at_angle(sigma, x, r, beta_wall, rep.best_line_angle);
}

GlueGraph competitor_cut_chord_at_angle(const GlueGraph& sigma, const Vec2& x, double r,
                                        double beta_wall, double theta) {
  if (r <= 0.0 || beta_wall < 0.0 || beta_wall > 1.0)
    throw Error(ErrorCode::Precondition, "need r > 0 and beta_wall in [0,1]");
  if (!graph_escapes_ball(sigma, x, r))
    throw Error(ErrorCode::WouldDisconnectAll, "Sigma lies entirely inside the ball");

  ClippedOutside clip = remove_ball(sigma, x, r);
  GlueGraph g = std::move(clip.graph);

  const Vec2 dir(std::cos(theta), std::sin(theta));
  const int xi1 = g.add_vertex(x - r * dir);
  const int xi2 = g.add_vertex(x + r * dir);
  g.add_edge(xi1, xi2);

  // wall arcs of half-width arcsin(beta_wall) around the chord ends
  const double half = std::asin(std::min(beta_wall, 1.0));
  std::vector<int> wall;
  wall.push_back(xi1);
  wall.push_back(xi2);
  if (half > 0.0) {
    const int n_side = std::max(2, static_cast<int>(std::ceil(half / 0.05)));
    const double base[2] = {std::atan2(-dir.y(), -dir.x()), std::atan2(dir.y(), dir.x())};
    for (int side = 0; side < 2; ++side) {
      int prev = side == 0 ? xi1 : xi2;
      int prev_neg = prev;
      for (int k = 1; k <= n_side; ++k) {
        const double da = half * k / n_side;
        const int vp = g.add_vertex(x + r * Vec2(std::cos(base[side] + da), std::sin(base[side] + da)));
        const int vn = g.add_vertex(x + r * Vec2(std::cos(base[side] - da), std::sin(base[side] - da)));
        g.add_edge(prev, vp);
        g.add_edge(prev_neg, vn);
        wall.push_back(vp);
        wall.push_back(vn);
        prev = vp;
        prev_neg = vn;
      }
    }
  }

  for (int stub : clip.stub_vertices) {
    int bestv = wall[0];
    double bestd = std::numeric_limits<double>::infinity();
    for (int w : wall) {
      const double d = (g.vertices[w] - g.vertices[stub]).norm();
      if (d < bestd) {
        bestd = d;
        bestv = w;
      }
    }
    g.add_edge(stub, bestv);
  }
  return normalize(g);
}

// ---------------------------------------------------------------------------
// Steiner trees

GlueGraph minimum_spanning_tree(const std::vector<Vec2>& points) {
  GlueGraph g;
  for (const auto& p : points) g.add_vertex(p);
  const int n = static_cast<int>(points.size());
  struct Cand {
    double len;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cands.push_back({(points[i] - points[j]).norm(), i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.len != b.len ? a.len < b.len : std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (const auto& c : cands) {
    const int a = find(c.i), b = find(c.j);
    if (a == b) continue;
    root[a] = b;
    g.add_edge(c.i, c.j);
  }
  return g;
}

Vec2 fermat_point(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle_at = [](const Vec2& v, const Vec2& p, const Vec2& q) {
    const Vec2 u = (p - v).normalized();
    const Vec2 w = (q - v).normalized();
    return std::acos(std::clamp(u.dot(w), -1.0, 1.0));
  };
  const double limit = 2.0 * M_PI / 3.0 - 1e-12;
  if (angle_at(a, b, c) >= limit) return a;
  if (angle_at(b, a, c) >= limit) return b;
  if (angle_at(c, a, b) >= limit) return c;

  auto apex = [](const Vec2& p, const Vec2& q, const Vec2& opposite) -> Vec2 {
    const Vec2 mid = 0.5 * (p + q);
    Vec2 n(-(q - p).y(), (q - p).x());
    n *= std::sqrt(3.0) / 2.0;
    // place the apex on the far side from the opposite vertex
    if ((opposite - mid).dot(n) > 0.0) n = -n;
    return mid + n;
  };
  // intersection of the two Simpson lines
  const Vec2 e1 = apex(b, c, a);
  const Vec2 e2 = apex(a, c, b);
  const Vec2 d1 = e1 - a;
  const Vec2 d2 = e2 - b;
  const double denom = cross2(d1, d2);
  if (std::abs(denom) < 1e-15) return (a + b + c) / 3.0;
  const double t = cross2(b - a, d2) / denom;
  return a + t * d1;
}

namespace {

struct SteinerCandidate {
  double length = std::numeric_limits<double>::infinity();
  GlueGraph graph;
};

// Full 2-Steiner-point topology for pairs (p,q) and (r,s): the tree length is
// the distance between the two equilateral third points, and the Steiner
// points are recovered on the circumcircles.
SteinerCandidate full_topology(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
  SteinerCandidate out;
  auto apex = [](const Vec2& u, const Vec2& v, const Vec2& away) -> Vec2 {
    const Vec2 mid = 0.5 * (u + v);
    Vec2 n(-(v - u).y(), (v - u).x());
    n *= std::sqrt(3.0) / 2.0;
    if ((away - mid).dot(n) > 0.0) n = -n;
    return mid + n;
  };
  const Vec2 mid_rs = 0.5 * (r + s);
  const Vec2 mid_pq = 0.5 * (p + q);
  const Vec2 e = apex(p, q, mid_rs);
  const Vec2 f = apex(r, s, mid_pq);

  auto circumcenter = [](const Vec2& a, const Vec2& b, const Vec2& c) -> std::optional<Vec2> {
    const double d = 2.0 * cross2(b - a, c - a);
    if (std::abs(d) < 1e-18) return std::nullopt;
    const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
    return Vec2((a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
                (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d);
  };
  auto second_hit = [&](const Vec2& from, const Vec2& to, const Vec2& center,
                        double radius) -> std::optional<Vec2> {
    // intersections of segment [from,to] with the circle, nearest to `to` side
    std::array<double, 2> ts;
    const int n = segment_circle_params(from, to, center, radius, ts);
    if (n == 0) return std::nullopt;
    // `from` lies on the circle; take the other parameter
    for (int k = n - 1; k >= 0; --k)
      if (ts[k] > 1e-9) return from + ts[k] * (to - from);
    return std::nullopt;
  };

  const auto c1 = circumcenter(p, q, e);
  const auto c2 = circumcenter(r, s, f);
  if (!c1 || !c2) return out;
  const auto s1 = second_hit(e, f, *c1, (p - *c1).norm());
  const auto s2 = second_hit(f, e, *c2, (r - *c2).norm());
  if (!s1 || !s2) return out;
  // Steiner points must sit between the terminals along [e,f]
  const double ef = (f - e).norm();
  const double te = (*s1 - e).norm() / ef;
  const double tf = 1.0 - (*s2 - f).norm() / ef;
  if (te <= 0.0 || tf >= 1.0 || te >= tf + 1e-12) return out;

  GlueGraph g;
  const int vp = g.add_vertex(p);
  const int vq = g.add_vertex(q);
  const int vr = g.add_vertex(r);
  const int vs = g.add_vertex(s);
  const int v1 = g.add_vertex(*s1);
  const int v2 = g.add_vertex(*s2);
  g.add_edge(vp, v1);
  g.add_edge(vq, v1);
  g.add_edge(v1, v2);
  g.add_edge(v2, vr);
  g.add_edge(v2, vs);
  out.length = total_length(g);
  out.graph = std::move(g);
  return out;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  std::vector<Vec2> hull;
  auto build = [&](auto begin, auto end) {
    std::size_t start = hull.size();
    for (auto it = begin; it != end; ++it) {
      while (hull.size() >= start + 2 &&
             cross2(hull[hull.size() - 1] - hull[hull.size() - 2], *it - hull[hull.size() - 2]) <=
                 1e-15)
        hull.pop_back();
      hull.push_back(*it);
    }
    hull.pop_back();
  };
  build(pts.begin(), pts.end());
  build(pts.rbegin(), pts.rend());
  return hull;
}

}  // namespace

GlueGraph steiner_connection_4(const std::array<Vec2, 4>& points) {
  // collapse coincident inputs
  std::vector<Vec2> distinct;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : distinct)
      if ((p - q).norm() < 1e-12) dup = true;
    if (!dup) distinct.push_back(p);
  }
  if (distinct.size() <= 1) {
    GlueGraph g;
    if (!distinct.empty()) g.add_vertex(distinct[0]);
    return g;
  }
  if (distinct.size() == 2) return make_segment(distinct[0], distinct[1]);
  if (distinct.size() == 3) {
    const Vec2 f = fermat_point(distinct[0], distinct[1], distinct[2]);
    GlueGraph g;
    const int vf = g.add_vertex(f);
    for (const auto& p : distinct) {
      if ((p - f).norm() < 1e-12) continue;
      g.add_edge(g.add_vertex(p), vf);
    }
    return g;
  }

  const std::vector<Vec2> hull = convex_hull(distinct);
  GlueGraph best = minimum_spanning_tree(distinct);
  double best_len = total_length(best);
  if (hull.size() == 4) {
    // two planar topologies along the hull order
    const SteinerCandidate t1 = full_topology(hull[0], hull[1], hull[2], hull[3]);
    const SteinerCandidate t2 = full_topology(hull[1], hull[2], hull[3], hull[0]);
    for (const auto* cand : {&t1, &t2}) {
      if (cand->length < best_len - 1e-15) {
        best_len = cand->length;
        best = cand->graph;
      }
    }
  }
  return best;
}

double cross_flatness(const GlueGraph& sigma, const Vec2& x, double r, double* best_angle) {
  const BallClip clip = clip_to_ball(sigma, x, r);
  if (clip.empty())
    throw Error(ErrorCode::EmptyIntersection, "Sigma does not meet the closed ball");
  auto value = [&](double phi) {
    const double angles[2] = {phi, phi + M_PI / 2.0};
    return hausdorff_to_chord_union(clip, x, r, angles) / r;
  };
  const int n_scan = 48;
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int k = 0; k < n_scan; ++k) {
    const double phi = 0.5 * M_PI * k / n_scan;
    const double v = value(phi);
    if (v < best) {
      best = v;
      arg = phi;
    }
  }
  double lo = arg - 0.5 * M_PI / n_scan;
  double hi = arg + 0.5 * M_PI / n_scan;
  for (int it = 0; it < 30; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (value(m1) > value(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double phi = 0.5 * (lo + hi);
  const double v = value(phi);
  if (v < best) {
    best = v;
    arg = phi;
  }
  if (best_angle) *best_angle = std::fmod(arg + M_PI, M_PI / 2.0);
  return best;
}

GlueGraph steiner_cross_competitor(const GlueGraph& sigma, const Vec2& x, double r) {
  if (r <= 0.0) throw Error(ErrorCode::Precondition, "need r > 0");
  if (!graph_escapes_ball(sigma, x, r))
    throw Error(ErrorCode::WouldDisconnectAll, "Sigma lies entirely inside the ball");
  const auto exits = circle_intersection_points(sigma, x, r);
  if (exits.size() != 4)
    throw Error(ErrorCode::Precondition, "need exactly four circle crossings");

  const double eps = cross_flatness(sigma, x, r);

  ClippedOutside clip = remove_ball(sigma, x, r);
  GlueGraph g = std::move(clip.graph);

  const std::array<Vec2, 4> terminals{exits[0], exits[1], exits[2], exits[3]};
  GlueGraph tree = steiner_connection_4(terminals);
  std::vector<int> tmap(tree.vertices.size());
  for (std::size_t w = 0; w < tree.vertices.size(); ++w) tmap[w] = g.add_vertex(tree.vertices[w]);
  for (const auto& te : tree.edges) g.add_edge(tmap[te[0]], tmap[te[1]]);

  // wall arcs around the exit points, sized by the cross flatness
  const double half = std::asin(std::min(eps, 1.0));
  if (half > 1e-9) {
    const int n_side = std::max(2, static_cast<int>(std::ceil(half / 0.05)));
    for (const auto& exit : exits) {
      const double base = std::atan2((exit - x).y(), (exit - x).x());
      int prev_pos = -1, prev_neg = -1;
      for (int k = 0; k <= n_side; ++k) {
        const double da = half * k / n_side;
        const int vp =
            g.add_vertex(x + r * Vec2(std::cos(base + da), std::sin(base + da)));
        const int vn =
            g.add_vertex(x + r * Vec2(std::cos(base - da), std::sin(base - da)));
        if (prev_pos >= 0) g.add_edge(prev_pos, vp);
        if (prev_neg >= 0) g.add_edge(prev_neg, vn);
        prev_pos = vp;
        prev_neg = vn;
      }
    }
  }
  return normalize(g);
}

}  // namespace pcl
