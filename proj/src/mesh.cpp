#include "pcl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "pcl/errors.hpp"
#include "pcl/log.hpp"
#include "pcl/rng.hpp"

namespace pcl {

namespace {

constexpr std::int64_t kBoundarySource = -2;

long double orient_ld(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// p strictly inside the circumcircle of CCW triangle (a,b,c)
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double adx = a.x() - p.x(), ady = a.y() - p.y();
  const long double bdx = b.x() - p.x(), bdy = b.y() - p.y();
  const long double cdx = c.x() - p.x(), cdy = c.y() - p.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  return det > 0.0L;
}

// Incremental Bowyer-Watson triangulation with a super triangle.
class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbor opposite v[k], -1 on the hull
    bool alive = true;
  };

  explicit Delaunay(const std::vector<Vec2>& points) : pts_(points) {
    Eigen::AlignedBox2d box;
    for (const auto& p : pts_) box.extend(p);
    const Vec2 c = box.center();
    const double R = std::max(box.diagonal().norm(), 1e-6) * 16.0;
    super_ = static_cast<int>(pts_.size());
    pts_.push_back(c + R * Vec2(0.0, 2.0));
    pts_.push_back(c + R * Vec2(-1.7320508, -1.0));
    pts_.push_back(c + R * Vec2(1.7320508, -1.0));
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
    insert_all();
  }

  const std::vector<Vec2>& points() const { return pts_; }
  int super_base() const { return super_; }
  std::vector<Tri>& triangles() { return tris_; }

  // Forces segment (a,b) to be an edge by flipping the edges that cross it.
  void recover_edge(int a, int b) {
    for (int guard = 0; guard < 10000; ++guard) {
      if (edge_exists(a, b)) return;
      int t = -1, side = -1;
      if (!find_crossing(a, b, t, side))
        throw Error(ErrorCode::MeshFailure, "constraint lost and no crossing edge found");
      try_flip(t, side);
    }
    throw Error(ErrorCode::MeshFailure, "constraint recovery did not terminate");
  }

  // Local Delaunay restoration by flips, skipping the constrained edge set.
  void restore_delaunay(const std::set<std::pair<int, int>>& constrained) {
    std::queue<int> dirty;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive) dirty.push(static_cast<int>(t));
    long flips = 0;
    const long cap = 64L * static_cast<long>(pts_.size()) + 4096;
    while (!dirty.empty() && flips < cap) {
      const int t = dirty.front();
      dirty.pop();
      if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) continue;
      for (int k = 0; k < 3; ++k) {
        const int u = tris_[t].nb[k];
        if (u < 0 || !tris_[u].alive) continue;
        const int va = tris_[t].v[(k + 1) % 3];
        const int vb = tris_[t].v[(k + 2) % 3];
        if (constrained.count(std::minmax(va, vb))) continue;
        const int opp = opposite_vertex(u, t);
        if (opp < 0) continue;
        if (in_circumcircle(pts_[tris_[t].v[0]], pts_[tris_[t].v[1]], pts_[tris_[t].v[2]],
                            pts_[opp])) {
          if (flip(t, k)) {
            ++flips;
            dirty.push(t);
            dirty.push(u);
            break;
          }
        }
      }
    }
  }

 private:
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  int super_ = 0;
  int last_ = 0;

  void insert_all() {
    // Morton-sorted insertion keeps the locate walks short and is
    // deterministic for fixed input order.
    Eigen::AlignedBox2d box;
    const int n = super_;
    for (int i = 0; i < n; ++i) box.extend(pts_[i]);
    const Vec2 lo = box.min();
    const Vec2 span = box.diagonal().cwiseMax(Vec2(1e-12, 1e-12));
    auto morton = [&](const Vec2& p) {
      auto spread = [](std::uint32_t x) {
        std::uint64_t v = x;
        v = (v | (v << 16)) & 0x0000FFFF0000FFFFULL;
        v = (v | (v << 8)) & 0x00FF00FF00FF00FFULL;
        v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0FULL;
        v = (v | (v << 2)) & 0x3333333333333333ULL;
        v = (v | (v << 1)) & 0x5555555555555555ULL;
        return v;
      };
      const auto qx = static_cast<std::uint32_t>(65535.0 * (p.x() - lo.x()) / span.x());
      const auto qy = static_cast<std::uint32_t>(65535.0 * (p.y() - lo.y()) / span.y());
      return spread(qx) | (spread(qy) << 1);
    };
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return morton(pts_[i]) < morton(pts_[j]); });
    for (int i : order) insert(i);
  }

  bool edge_exists(int a, int b) const {
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      for (int k = 0; k < 3; ++k) {
        const int va = t.v[k], vb = t.v[(k + 1) % 3];
        if ((va == a && vb == b) || (va == b && vb == a)) return true;
      }
    }
    return false;
  }

  int opposite_vertex(int t, int nb) const {
    for (int k = 0; k < 3; ++k)
      if (tris_[t].nb[k] == nb) return tris_[t].v[k];
    return -1;
  }

  // flips the edge opposite corner k of triangle t; false when the quad is
  // not strictly convex
  bool flip(int t, int k) {
    const int u = tris_[t].nb[k];
    if (u < 0) return false;
    int ku = -1;
    for (int m = 0; m < 3; ++m)
      if (tris_[u].nb[m] == t) ku = m;
    if (ku < 0) return false;
    const int p = tris_[t].v[k];
    const int q = tris_[u].v[ku];
    const int a = tris_[t].v[(k + 1) % 3];
    const int b = tris_[t].v[(k + 2) % 3];
    if (orient_ld(pts_[p], pts_[a], pts_[q]) <= 0.0L) return false;
    if (orient_ld(pts_[q], pts_[b], pts_[p]) <= 0.0L) return false;

    const int ta = tris_[t].nb[(k + 2) % 3];  // neighbor across (p,a)
    const int tb = tris_[t].nb[(k + 1) % 3];  // neighbor across (b,p)
    int ua = -1, ub = -1;                     // u's neighbors across (a,q) and (q,b)
    for (int m = 0; m < 3; ++m) {
      if (tris_[u].v[m] == b) ua = tris_[u].nb[m];
      if (tris_[u].v[m] == a) ub = tris_[u].nb[m];
    }
    // rebuild: t = (p, a, q), u = (q, b, p)
    tris_[t].v = {p, a, q};
    tris_[u].v = {q, b, p};
    tris_[t].nb = {ua, u, ta};
    tris_[u].nb = {tb, t, ub};
    fix_neighbor(ua, u, t);
    fix_neighbor(tb, t, u);
    return true;
  }

  void fix_neighbor(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int k = 0; k < 3; ++k)
      if (tris_[t].nb[k] == old_nb) {
        tris_[t].nb[k] = new_nb;
        return;
      }
  }

  // walks from `last_` to a triangle containing p
  int locate(const Vec2& p) {
    int t = last_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
      for (std::size_t i = tris_.size(); i-- > 0;)
        if (tris_[i].alive) {
          t = static_cast<int>(i);
          break;
        }
    }
    for (int guard = 0; guard < 4 * static_cast<int>(tris_.size()) + 64; ++guard) {
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int a = tris_[t].v[(k + 1) % 3];
        const int b = tris_[t].v[(k + 2) % 3];
        if (orient_ld(pts_[a], pts_[b], p) < 0.0L) {
          next = tris_[t].nb[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw Error(ErrorCode::MeshFailure, "point location walk did not terminate");
  }

  void insert(int pi) {
    const Vec2& p = pts_[pi];
    const int seed = locate(p);
    // cavity: BFS over triangles whose circumcircle contains p
    std::vector<int> bad;
    std::vector<char> in_bad(tris_.size(), 0);
    std::queue<int> q;
    q.push(seed);
    in_bad[seed] = 1;
    while (!q.empty()) {
      const int t = q.front();
      q.pop();
      bad.push_back(t);
      for (int k = 0; k < 3; ++k) {
        const int u = tris_[t].nb[k];
        if (u < 0 || in_bad[u] || !tris_[u].alive) continue;
        if (in_circumcircle(pts_[tris_[u].v[0]], pts_[tris_[u].v[1]], pts_[tris_[u].v[2]], p)) {
          in_bad[u] = 1;
          q.push(u);
        }
      }
    }
    struct BEdge {
      int a, b, outer;
    };
    std::vector<BEdge> boundary;
    for (int t : bad) {
      for (int k = 0; k < 3; ++k) {
        const int u = tris_[t].nb[k];
        if (u >= 0 && in_bad[u]) continue;
        boundary.push_back({tris_[t].v[(k + 1) % 3], tris_[t].v[(k + 2) % 3], u});
      }
    }
    for (int t : bad) tris_[t].alive = false;

    std::map<int, int> fan;  // first vertex of boundary edge -> new triangle
    std::vector<int> created;
    for (const auto& e : boundary) {
      Tri nt;
      nt.v = {e.a, e.b, pi};
      nt.nb = {-1, -1, e.outer};
      const int idx = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      created.push_back(idx);
      if (e.outer >= 0) {
        // repoint only the slot whose opposite edge is (a,b)
        for (int k = 0; k < 3; ++k) {
          const int wa = tris_[e.outer].v[(k + 1) % 3];
          const int wb = tris_[e.outer].v[(k + 2) % 3];
          if ((wa == e.a && wb == e.b) || (wa == e.b && wb == e.a)) {
            tris_[e.outer].nb[k] = idx;
            break;
          }
        }
      }
      fan[e.a] = idx;
    }
    // neighbors around the fan: triangle (a,b,pi) touches (b,*,pi) across
    // edge (b,pi) and (*,a,pi) across edge (pi,a)
    std::map<int, int> fan_by_second;
    for (int idx : created) fan_by_second[tris_[idx].v[1]] = idx;
    for (int idx : created) {
      const int a = tris_[idx].v[0];
      const int b = tris_[idx].v[1];
      tris_[idx].nb[0] = fan.count(b) ? fan[b] : -1;
      tris_[idx].nb[1] = fan_by_second.count(a) ? fan_by_second[a] : -1;
    }
    last_ = created.empty() ? last_ : created.back();
  }

  // a triangle edge properly crossing segment (a,b), as (triangle, corner)
  bool find_crossing(int a, int b, int& t_out, int& k_out) const {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      for (int k = 0; k < 3; ++k) {
        const int va = tris_[t].v[(k + 1) % 3];
        const int vb = tris_[t].v[(k + 2) % 3];
        if (va == a || va == b || vb == a || vb == b) continue;
        double s, u;
        if (segments_cross(pts_[a], pts_[b], pts_[va], pts_[vb], s, u)) {
          t_out = static_cast<int>(t);
          k_out = k;
          return true;
        }
      }
    }
    return false;
  }

  void try_flip(int t, int k) {
    if (flip(t, k)) return;
    // blocked by a non-convex quad: flip something else crossing first
    const int u = tris_[t].nb[k];
    if (u < 0) throw Error(ErrorCode::MeshFailure, "constraint crossing on hull");
    for (int m = 0; m < 3; ++m)
      if (flip(u, m)) return;
    for (int m = 0; m < 3; ++m)
      if (m != k && flip(t, m)) return;
    throw Error(ErrorCode::MeshFailure, "locked configuration in edge recovery");
  }
};

double lattice_jitter(std::uint64_t i, std::uint64_t j, std::uint64_t axis) {
  const std::uint64_t h = hash_mix(hash_combine(hash_combine(i, j), axis));
  return (h >> 11) * 0x1.0p-53 - 0.5;
}

}  // namespace

double ConstrainedMesh::min_angle_deg() const {
  double worst = 180.0;
  for (const auto& tr : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Vec2& a = nodes[tr[k]];
      const Vec2& b = nodes[tr[(k + 1) % 3]];
      const Vec2& c = nodes[tr[(k + 2) % 3]];
      const Vec2 u = (b - a).normalized();
      const Vec2 v = (c - a).normalized();
      worst = std::min(worst, std::acos(std::clamp(u.dot(v), -1.0, 1.0)) * 180.0 / M_PI);
    }
  }
  return worst;
}

int ConstrainedMesh::locate(const Vec2& p) const {
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tr = triangles[t];
    const Vec2& a = nodes[tr[0]];
    const Vec2& b = nodes[tr[1]];
    const Vec2& c = nodes[tr[2]];
    const double eps = -1e-12;
    if (cross2(b - a, p - a) >= eps && cross2(c - b, p - b) >= eps &&
        cross2(a - c, p - c) >= eps)
      return static_cast<int>(t);
  }
  return -1;
}

ConstrainedMesh build_mesh(const PolygonalDomain& domain, const GlueGraph& glue, double h) {
  if (h <= 0.0) throw Error(ErrorCode::Precondition, "mesh size must be positive");
  const double tau = 1e-9 * std::max(domain.bbox_diagonal(), 1e-6);

  for (const auto& v : glue.vertices)
    if (!domain.contains(v) && domain.distance_to_boundary(v) > tau)
      throw Error(ErrorCode::GlueOutsideDomain, "glue vertex outside the domain closure");
  for (std::size_t e = 0; e < glue.edges.size(); ++e) {
    const Vec2 a = glue.edge_a(static_cast<int>(e)), b = glue.edge_b(static_cast<int>(e));
    const int n = std::max(2, static_cast<int>(std::ceil((b - a).norm() / (0.5 * h))));
    for (int k = 1; k < n; ++k) {
      const Vec2 p = a + (static_cast<double>(k) / n) * (b - a);
      if (!domain.contains(p) && domain.distance_to_boundary(p) > tau)
        throw Error(ErrorCode::GlueOutsideDomain, "glue edge leaves the domain");
    }
  }

  // PSLG: boundary loops plus glue, merged and split as one planar graph
  GlueGraph pslg;
  for (const auto& loop : domain.loops) {
    std::vector<int> idx;
    for (const auto& p : loop) idx.push_back(pslg.add_vertex(p));
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const int e = pslg.add_edge(idx[k], idx[(k + 1) % loop.size()]);
      pslg.edge_source[e] = kBoundarySource;
    }
  }
  const int glue_base = static_cast<int>(pslg.vertices.size());
  for (const auto& v : glue.vertices) pslg.add_vertex(v);
  for (std::size_t e = 0; e < glue.edges.size(); ++e) {
    const int ei = pslg.add_edge(glue_base + glue.edges[e][0], glue_base + glue.edges[e][1]);
    pslg.edge_source[ei] = glue.edge_source[e];
  }
  pslg = normalize(pslg);

  // subdivide PSLG edges to length <= h
  GlueGraph fine;
  fine.vertices = pslg.vertices;
  fine.vertex_ids = pslg.vertex_ids;
  fine.next_id = pslg.next_id;
  for (std::size_t e = 0; e < pslg.edges.size(); ++e) {
    const Vec2 a = pslg.edge_a(static_cast<int>(e)), b = pslg.edge_b(static_cast<int>(e));
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h)));
    int prev = pslg.edges[e][0];
    for (int k = 1; k <= n; ++k) {
      const int nxt = k == n ? pslg.edges[e][1]
                             : fine.add_vertex(a + (static_cast<double>(k) / n) * (b - a));
      const int ei = fine.add_edge(prev, nxt);
      fine.edge_source[ei] = pslg.edge_source[e];
      prev = nxt;
    }
  }

  // interior lattice, hexagonal rows with deterministic jitter
  std::vector<Vec2> points = fine.vertices;
  const int n_pslg = static_cast<int>(points.size());
  const Vec2 lo = domain.bbox.min();
  const Vec2 hi = domain.bbox.max();
  const double dy = h * 0.8660254037844386;
  const double clearance = 0.55 * h;
  const long rows = std::lround(std::ceil((hi.y() - lo.y()) / dy));
  const long cols = std::lround(std::ceil((hi.x() - lo.x()) / h));
  for (long j = 0; j <= rows; ++j) {
    for (long i = 0; i <= cols; ++i) {
      Vec2 p(lo.x() + i * h + (j % 2 ? 0.5 * h : 0.0), lo.y() + j * dy);
      p.x() += 0.02 * h * lattice_jitter(i, j, 0);
      p.y() += 0.02 * h * lattice_jitter(i, j, 1);
      if (!domain.contains(p)) continue;
      bool clear = domain.distance_to_boundary(p) >= clearance;
      if (clear && !glue.vertices.empty()) clear = distance_to_graph(glue, p) >= clearance;
      if (clear) points.push_back(p);
    }
  }

  Delaunay dt(points);

  std::set<std::pair<int, int>> constrained;
  for (std::size_t e = 0; e < fine.edges.size(); ++e) {
    const int a = fine.edges[e][0], b = fine.edges[e][1];
    dt.recover_edge(a, b);
    constrained.insert(std::minmax(a, b));
  }
  dt.restore_delaunay(constrained);

  ConstrainedMesh mesh;
  mesh.h = h;
  const auto& pts = dt.points();
  std::vector<int> remap(pts.size(), -1);
  auto want = [&](const Delaunay::Tri& t) {
    if (!t.alive) return false;
    for (int k = 0; k < 3; ++k)
      if (t.v[k] >= dt.super_base()) return false;
    const Vec2 c = (pts[t.v[0]] + pts[t.v[1]] + pts[t.v[2]]) / 3.0;
    return domain.contains(c);
  };
  for (const auto& t : dt.triangles()) {
    if (!want(t)) continue;
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      if (remap[t.v[k]] < 0) {
        remap[t.v[k]] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(pts[t.v[k]]);
      }
      tri[k] = remap[t.v[k]];
    }
    if (cross2(mesh.nodes[tri[1]] - mesh.nodes[tri[0]],
               mesh.nodes[tri[2]] - mesh.nodes[tri[0]]) < 0.0)
      std::swap(tri[1], tri[2]);
    mesh.triangles.push_back(tri);
  }
  if (mesh.triangles.empty()) throw Error(ErrorCode::MeshFailure, "no interior triangles");

  mesh.dirichlet_mask.assign(mesh.nodes.size(), 0);
  for (int v = 0; v < n_pslg; ++v)
    if (remap[v] >= 0) mesh.dirichlet_mask[remap[v]] = 1;

  for (std::size_t e = 0; e < fine.edges.size(); ++e) {
    if (fine.edge_source[e] == kBoundarySource) continue;
    const int a = remap[fine.edges[e][0]];
    const int b = remap[fine.edges[e][1]];
    if (a < 0 || b < 0)
      throw Error(ErrorCode::MeshFailure, "glue edge lost during classification");
    mesh.glue_mesh_edges.push_back({a, b});
    mesh.glue_edge_source.push_back(fine.edge_source[e]);
  }

  mesh.tri_area.resize(mesh.triangles.size());
  mesh.tri_grad.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2& p0 = mesh.nodes[tr[0]];
    const Vec2& p1 = mesh.nodes[tr[1]];
    const Vec2& p2 = mesh.nodes[tr[2]];
    const double a2 = cross2(p1 - p0, p2 - p0);
    if (a2 <= 0.0) throw Error(ErrorCode::MeshFailure, "degenerate element");
    mesh.tri_area[t] = 0.5 * a2;
    auto rot90 = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
    mesh.tri_grad[t].col(0) = rot90(p2 - p1) / a2;
    mesh.tri_grad[t].col(1) = rot90(p0 - p2) / a2;
    mesh.tri_grad[t].col(2) = rot90(p1 - p0) / a2;
  }

  if (mesh.free_count() == 0)
    PCL_WARN("mesh has no free nodes (glue covers the whole domain?)");
  const double worst = mesh.min_angle_deg();
  if (worst < 20.0) PCL_INFO("mesh quality: min angle %.2f deg below 20", worst);
  return mesh;
}

}  // namespace pcl
