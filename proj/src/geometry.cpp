#include "pcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "pcl/errors.hpp"

namespace pcl {

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double t, u;
  if (segments_cross(a, b, c, d, t, u)) return 0.0;
  double m = point_segment_dist(a, c, d);
  m = std::min(m, point_segment_dist(b, c, d));
  m = std::min(m, point_segment_dist(c, a, b));
  m = std::min(m, point_segment_dist(d, a, b));
  return m;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double& t,
                    double& u) {
  const Vec2 r = b - a;
  const Vec2 s = d - c;
  const double denom = cross2(r, s);
  if (denom == 0.0) return false;
  t = cross2(c - a, s) / denom;
  u = cross2(c - a, r) / denom;
  const double eps = 1e-12;
  return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
}

int segment_circle_params(const Vec2& a, const Vec2& b, const Vec2& c, double r,
                          std::array<double, 2>& t) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double qa = d.squaredNorm();
  if (qa <= 0.0) return 0;
  const double qb = 2.0 * f.dot(d);
  const double qc = f.squaredNorm() - r * r;
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return 0;
  disc = std::sqrt(disc);
  const double t0 = (-qb - disc) / (2.0 * qa);
  const double t1 = (-qb + disc) / (2.0 * qa);
  int n = 0;
  if (t0 >= 0.0 && t0 <= 1.0) t[n++] = t0;
  if (t1 > t0 && t1 >= 0.0 && t1 <= 1.0) t[n++] = t1;
  return n;
}

namespace {

// Signed area of the region bounded by the chord [p,q] and the center,
// clipped to the disk of radius r around the origin.
double chord_area(Vec2 p, Vec2 q, double r) {
  auto sector = [&](const Vec2& u, const Vec2& v) {
    // signed angle from u to v in (-pi, pi]
    double ang = std::atan2(cross2(u, v), u.dot(v));
    return 0.5 * r * r * ang;
  };
  auto tri = [](const Vec2& u, const Vec2& v) { return 0.5 * cross2(u, v); };

  const bool pin = p.squaredNorm() <= r * r;
  const bool qin = q.squaredNorm() <= r * r;
  std::array<double, 2> ts;
  const int n = segment_circle_params(p, q, Vec2(0, 0), r, ts);

  if (pin && qin) return tri(p, q);
  if (pin && !qin) {
    const Vec2 e = p + ts[n - 1] * (q - p);
    return tri(p, e) + sector(e, q);
  }
  if (!pin && qin) {
    const Vec2 e = p + ts[0] * (q - p);
    return sector(p, e) + tri(e, q);
  }
  // both endpoints outside: the chord may still cut through the disk
  if (n == 2) {
    const Vec2 e0 = p + ts[0] * (q - p);
    const Vec2 e1 = p + ts[1] * (q - p);
    return sector(p, e0) + tri(e0, e1) + sector(e1, q);
  }
  return sector(p, q);
}

}  // namespace

double polygon_disk_area(const std::vector<Vec2>& poly, const Vec2& c, double r) {
  if (poly.size() < 3 || r <= 0.0) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i] - c;
    const Vec2 q = poly[(i + 1) % poly.size()] - c;
    area += chord_area(p, q, r);
  }
  return std::abs(area);
}

// ---------------------------------------------------------------------------
// PolygonalDomain

namespace {

bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p) {
  // even-odd crossing test
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xi = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < xi) inside = !inside;
    }
  }
  return inside;
}

double loop_signed_area(const std::vector<Vec2>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    s += cross2(loop[i], loop[(i + 1) % loop.size()]);
  return 0.5 * s;
}

}  // namespace

bool PolygonalDomain::contains(const Vec2& p) const {
  if (loops.empty()) return false;
  if (!point_in_loop(loops[0], p)) return false;
  for (std::size_t k = 1; k < loops.size(); ++k)
    if (point_in_loop(loops[k], p)) return false;
  return true;
}

double PolygonalDomain::distance_to_boundary(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& loop : loops)
    for (std::size_t i = 0; i < loop.size(); ++i)
      d = std::min(d, point_segment_dist(p, loop[i], loop[(i + 1) % loop.size()]));
  return d;
}

PolygonalDomain make_polygon(std::vector<std::vector<Vec2>> loops) {
  if (loops.empty() || loops[0].size() < 3)
    throw Error(ErrorCode::Precondition, "domain needs an outer loop with >= 3 vertices");
  if (loop_signed_area(loops[0]) < 0.0) std::reverse(loops[0].begin(), loops[0].end());
  for (std::size_t k = 1; k < loops.size(); ++k)
    if (loop_signed_area(loops[k]) > 0.0) std::reverse(loops[k].begin(), loops[k].end());
  PolygonalDomain dom;
  dom.loops = std::move(loops);
  for (const auto& loop : dom.loops)
    for (const auto& v : loop) dom.bbox.extend(v);
  return dom;
}

PolygonalDomain make_disk(const Vec2& center, double radius, int segments) {
  std::vector<Vec2> loop;
  loop.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * M_PI * k / segments;
    loop.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a));
  }
  return make_polygon({loop});
}

PolygonalDomain make_rectangle(const Vec2& lo, const Vec2& hi) {
  return make_polygon({{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())}});
}

// ---------------------------------------------------------------------------
// GlueGraph

GlueGraph make_graph(const std::vector<Vec2>& vertices,
                     const std::vector<std::array<int, 2>>& edges) {
  GlueGraph g;
  for (const auto& v : vertices) g.add_vertex(v);
  for (const auto& e : edges) {
    if (e[0] < 0 || e[1] < 0 || e[0] >= static_cast<int>(vertices.size()) ||
        e[1] >= static_cast<int>(vertices.size()))
      throw Error(ErrorCode::Precondition, "edge index out of range");
    g.add_edge(e[0], e[1]);
  }
  return g;
}

GlueGraph make_segment(const Vec2& a, const Vec2& b) { return make_graph({a, b}, {{0, 1}}); }

GlueGraph make_cross(const Vec2& center, double arm, double angle) {
  const Vec2 dx(std::cos(angle), std::sin(angle));
  const Vec2 dy(-dx.y(), dx.x());
  GlueGraph g;
  const int c = g.add_vertex(center);
  const int e = g.add_vertex(center + arm * dx);
  const int w = g.add_vertex(center - arm * dx);
  const int n = g.add_vertex(center + arm * dy);
  const int s = g.add_vertex(center - arm * dy);
  g.add_edge(c, e);
  g.add_edge(c, w);
  g.add_edge(c, n);
  g.add_edge(c, s);
  return g;
}

double total_length(const GlueGraph& g) {
  double len = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) len += g.edge_length(static_cast<int>(e));
  return len;
}

bool is_connected(const GlueGraph& g) {
  if (g.vertices.empty()) return true;
  std::vector<std::vector<int>> adj(g.vertices.size());
  for (const auto& e : g.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::vector<char> seen(g.vertices.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
  }
  return count == g.vertices.size();
}

int degree(const GlueGraph& g, int vertex) {
  int d = 0;
  for (const auto& e : g.edges) d += (e[0] == vertex) + (e[1] == vertex);
  return d;
}

double graph_diameter_bound(const GlueGraph& g) {
  if (g.vertices.empty()) return 0.0;
  Eigen::AlignedBox2d box;
  for (const auto& v : g.vertices) box.extend(v);
  return box.diagonal().norm();
}

double tau_geo(const GlueGraph& g) {
  const double diag = graph_diameter_bound(g);
  return 1e-9 * std::max(diag, 1e-3);
}

double distance_to_graph(const GlueGraph& g, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  std::vector<char> on_edge(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    d = std::min(d, point_segment_dist(p, g.vertices[e[0]], g.vertices[e[1]]));
    on_edge[e[0]] = on_edge[e[1]] = 1;
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!on_edge[v]) d = std::min(d, (p - g.vertices[v]).norm());
  return d;
}

std::vector<Vec2> sample_graph(const GlueGraph& g, double delta) {
  std::vector<Vec2> samples;
  std::vector<char> on_edge(g.vertices.size(), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Vec2 a = g.edge_a(static_cast<int>(e));
    const Vec2 b = g.edge_b(static_cast<int>(e));
    on_edge[g.edges[e][0]] = on_edge[g.edges[e][1]] = 1;
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / std::max(delta, 1e-300))));
    for (int k = 0; k <= n; ++k) samples.push_back(a + (static_cast<double>(k) / n) * (b - a));
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!on_edge[v]) samples.push_back(g.vertices[v]);
  return samples;
}

Vec2 point_at_arclength(const GlueGraph& g, double s) {
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double len = g.edge_length(static_cast<int>(e));
    if (s <= len || e + 1 == g.edges.size()) {
      const double t = len > 0.0 ? std::clamp(s / len, 0.0, 1.0) : 0.0;
      return g.edge_a(static_cast<int>(e)) + t * (g.edge_b(static_cast<int>(e)) - g.edge_a(static_cast<int>(e)));
    }
    s -= len;
  }
  if (!g.vertices.empty()) return g.vertices[0];
  throw Error(ErrorCode::EmptySet, "point_at_arclength on empty graph");
}

std::vector<std::vector<int>> find_loops(const GlueGraph& g) {
  const int nv = static_cast<int>(g.vertices.size());
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (neighbor, edge)
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    adj[g.edges[e][0]].push_back({g.edges[e][1], static_cast<int>(e)});
    adj[g.edges[e][1]].push_back({g.edges[e][0], static_cast<int>(e)});
  }
  std::vector<int> parent(nv, -1), parent_edge(nv, -1), depth(nv, 0);
  std::vector<char> visited(nv, 0), tree_edge(g.edges.size(), 0);
  std::vector<std::vector<int>> cycles;

  for (int root = 0; root < nv; ++root) {
    if (visited[root]) continue;
    visited[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& [w, e] : adj[v]) {
        if (!visited[w]) {
          visited[w] = 1;
          parent[w] = v;
          parent_edge[w] = e;
          depth[w] = depth[v] + 1;
          tree_edge[e] = 1;
          q.push(w);
        }
      }
    }
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (tree_edge[e]) continue;
    // fundamental cycle: tree paths from both endpoints to their LCA
    int a = g.edges[e][0], b = g.edges[e][1];
    std::vector<int> left, right;
    while (depth[a] > depth[b]) {
      left.push_back(parent_edge[a]);
      a = parent[a];
    }
    while (depth[b] > depth[a]) {
      right.push_back(parent_edge[b]);
      b = parent[b];
    }
    while (a != b) {
      left.push_back(parent_edge[a]);
      right.push_back(parent_edge[b]);
      a = parent[a];
      b = parent[b];
    }
    std::vector<int> cycle;
    cycle.push_back(static_cast<int>(e));
    cycle.insert(cycle.end(), right.begin(), right.end());
    std::reverse(left.begin(), left.end());
    cycle.insert(cycle.end(), left.begin(), left.end());
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

// ---------------------------------------------------------------------------
// normalize

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);  // smaller index (older id) wins
  }
};

// One pass: merge near-coincident vertices, drop degenerate/duplicate edges,
// split edges at pairwise crossings and at vertices sitting on their interior.
// Returns true when anything changed.
bool normalize_pass(GlueGraph& g, double tau) {
  bool changed = false;
  const int nv = static_cast<int>(g.vertices.size());

  // vertex merge
  UnionFind uf(nv);
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j)
      if ((g.vertices[i] - g.vertices[j]).norm() <= tau) uf.unite(i, j);

  std::vector<int> remap(nv, -1);
  GlueGraph out;
  out.next_id = g.next_id;
  for (int i = 0; i < nv; ++i) {
    if (uf.find(i) == i) {
      remap[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(g.vertices[i]);
      out.vertex_ids.push_back(g.vertex_ids[i]);
    }
  }
  for (int i = 0; i < nv; ++i) remap[i] = remap[uf.find(i)];
  if (out.vertices.size() != g.vertices.size()) changed = true;

  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    int a = remap[g.edges[e][0]];
    int b = remap[g.edges[e][1]];
    if (a == b) {
      changed = true;
      continue;
    }
    if ((out.vertices[a] - out.vertices[b]).norm() <= tau) {
      changed = true;
      continue;
    }
    auto key = std::minmax(a, b);
    if (!seen.insert({key.first, key.second}).second) {
      changed = true;
      continue;
    }
    out.edges.push_back({a, b});
    out.edge_ids.push_back(g.edge_ids[e]);
    out.edge_source.push_back(g.edge_source[e]);
  }

  // split points per edge: edge-edge crossings and T-junctions
  const int ne = static_cast<int>(out.edges.size());
  std::vector<std::vector<double>> cuts(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec2 a = out.edge_a(e), b = out.edge_b(e);
    for (int f = e + 1; f < ne; ++f) {
      double t, u;
      if (segments_cross(a, b, out.edge_a(f), out.edge_b(f), t, u)) {
        cuts[e].push_back(t);
        cuts[f].push_back(u);
      }
    }
    const double len = (b - a).norm();
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      if (static_cast<int>(v) == out.edges[e][0] || static_cast<int>(v) == out.edges[e][1])
        continue;
      if (point_segment_dist(out.vertices[v], a, b) <= tau) {
        const double t = (out.vertices[v] - a).dot(b - a) / ((b - a).squaredNorm());
        if (t * len > tau && (1.0 - t) * len > tau) cuts[e].push_back(t);
      }
    }
  }

  GlueGraph result;
  result.next_id = out.next_id;
  result.vertices = out.vertices;
  result.vertex_ids = out.vertex_ids;
  for (int e = 0; e < ne; ++e) {
    if (cuts[e].empty()) {
      result.edges.push_back(out.edges[e]);
      result.edge_ids.push_back(out.edge_ids[e]);
      result.edge_source.push_back(out.edge_source[e]);
      continue;
    }
    changed = true;
    auto& ts = cuts[e];
    ts.push_back(0.0);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             ts.end());
    const Vec2 a = out.edge_a(e), b = out.edge_b(e);
    int prev = out.edges[e][0];
    for (std::size_t k = 1; k < ts.size(); ++k) {
      int nxt;
      if (k + 1 == ts.size()) {
        nxt = out.edges[e][1];
      } else {
        nxt = result.add_vertex(a + ts[k] * (b - a));
      }
      result.edges.push_back({prev, nxt});
      result.edge_ids.push_back(result.next_id++);
      result.edge_source.push_back(out.edge_source[e]);
      prev = nxt;
    }
  }
  g = std::move(result);
  return changed;
}

}  // namespace

GlueGraph normalize(const GlueGraph& g) {
  GlueGraph out = g;
  const double tau = tau_geo(g);
  for (int pass = 0; pass < 16; ++pass) {
    if (!normalize_pass(out, tau)) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ball clips

BallClip clip_to_ball(const GlueGraph& g, const Vec2& x, double r) {
  BallClip clip;
  const double tau = tau_geo(g);
  std::vector<char> on_edge(g.vertices.size(), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Vec2 a = g.edge_a(static_cast<int>(e));
    const Vec2 b = g.edge_b(static_cast<int>(e));
    on_edge[g.edges[e][0]] = on_edge[g.edges[e][1]] = 1;
    const bool ain = (a - x).norm() <= r;
    const bool bin = (b - x).norm() <= r;
    std::array<double, 2> ts;
    const int n = segment_circle_params(a, b, x, r, ts);
    double t0 = 0.0, t1 = 1.0;
    if (ain && bin) {
      // whole edge inside
    } else if (ain && !bin) {
      t1 = n > 0 ? ts[n - 1] : 0.0;
    } else if (!ain && bin) {
      t0 = n > 0 ? ts[0] : 1.0;
    } else {
      if (n == 2) {
        t0 = ts[0];
        t1 = ts[1];
      } else if (n == 1) {
        // grazing contact
        clip.points.push_back(a + ts[0] * (b - a));
        continue;
      } else {
        continue;
      }
    }
    if (t1 <= t0) continue;
    const Vec2 p0 = a + t0 * (b - a);
    const Vec2 p1 = a + t1 * (b - a);
    if ((p1 - p0).norm() <= tau)
      clip.points.push_back(p0);
    else
      clip.segments.push_back({p0, p1});
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!on_edge[v] && (g.vertices[v] - x).norm() <= r) clip.points.push_back(g.vertices[v]);
  return clip;
}

std::vector<Vec2> circle_intersection_points(const GlueGraph& g, const Vec2& x, double s) {
  const double tau = tau_geo(g);
  std::vector<Vec2> hits;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Vec2 a = g.edge_a(static_cast<int>(e));
    const Vec2 b = g.edge_b(static_cast<int>(e));
    std::array<double, 2> ts;
    const int n = segment_circle_params(a, b, x, s, ts);
    for (int k = 0; k < n; ++k) hits.push_back(a + ts[k] * (b - a));
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (std::abs((g.vertices[v] - x).norm() - s) <= tau) hits.push_back(g.vertices[v]);
  std::vector<Vec2> unique;
  for (const auto& h : hits) {
    bool dup = false;
    for (const auto& u : unique)
      if ((h - u).norm() <= std::max(tau, 1e-12 * s)) dup = true;
    if (!dup) unique.push_back(h);
  }
  return unique;
}

double length_in_ball(const GlueGraph& g, const Vec2& x, double r) {
  double len = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Vec2 a = g.edge_a(static_cast<int>(e));
    const Vec2 b = g.edge_b(static_cast<int>(e));
    const bool ain = (a - x).norm() < r;
    const bool bin = (b - x).norm() < r;
    std::array<double, 2> ts;
    const int n = segment_circle_params(a, b, x, r, ts);
    double t0 = 0.0, t1 = 1.0;
    if (ain && bin) {
    } else if (ain && !bin) {
      t1 = n > 0 ? ts[n - 1] : 0.0;
    } else if (!ain && bin) {
      t0 = n > 0 ? ts[0] : 1.0;
    } else if (n == 2) {
      t0 = ts[0];
      t1 = ts[1];
    } else {
      continue;
    }
    if (t1 > t0) len += (t1 - t0) * (b - a).norm();
  }
  return len;
}

}  // namespace pcl
