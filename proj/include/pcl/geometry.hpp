#ifndef PCL_GEOMETRY_HPP
#define PCL_GEOMETRY_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace pcl {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 <= 0.0) return a;
  double t = (p - a).dot(d) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * d;
}

inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - closest_point_on_segment(p, a, b)).norm();
}

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Proper interior crossing of [a,b] and [c,d]; fills the parameters along both
// segments. Shared endpoints and collinear overlaps do not count.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double& t,
                    double& u);

// Parameters t in [0,1] where [a,b] meets the circle |x - c| = r, ascending.
// A tangency (double root) is reported once.
int segment_circle_params(const Vec2& a, const Vec2& b, const Vec2& c, double r,
                          std::array<double, 2>& t);

// Area of the intersection of a simple polygon with the disk |x - c| <= r.
// Signed angular sweep: each polygon edge contributes chord and sector pieces.
double polygon_disk_area(const std::vector<Vec2>& poly, const Vec2& c, double r);

inline double triangle_disk_area(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& center,
                                 double r) {
  return polygon_disk_area({a, b, c}, center, r);
}

// ---------------------------------------------------------------------------
// Domain

// Closed polygonal approximation of the open set the membrane lives on.
// loops[0] is the outer boundary (counterclockwise); the remaining loops are
// holes (clockwise), pairwise disjoint and inside the outer loop.
struct PolygonalDomain {
  std::vector<std::vector<Vec2>> loops;
  Eigen::AlignedBox2d bbox;

  bool contains(const Vec2& p) const;
  double distance_to_boundary(const Vec2& p) const;
  double bbox_diagonal() const { return bbox.diagonal().norm(); }
};

PolygonalDomain make_polygon(std::vector<std::vector<Vec2>> loops);
PolygonalDomain make_disk(const Vec2& center, double radius, int segments);
PolygonalDomain make_rectangle(const Vec2& lo, const Vec2& hi);

// ---------------------------------------------------------------------------
// Glue graph

// Embedded planar graph of straight segments; the optimization variable.
// Vertices and edges carry immutable ids; `edge_source` tracks, through
// normalization splits, which original edge a sub-edge came from.
struct GlueGraph {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::int64_t> vertex_ids;
  std::vector<std::int64_t> edge_ids;
  std::vector<std::int64_t> edge_source;
  std::int64_t next_id = 0;

  int add_vertex(const Vec2& p) {
    vertices.push_back(p);
    vertex_ids.push_back(next_id++);
    return static_cast<int>(vertices.size()) - 1;
  }
  int add_edge(int i, int j, std::int64_t source = -1) {
    edges.push_back({i, j});
    edge_ids.push_back(next_id++);
    edge_source.push_back(source < 0 ? edge_ids.back() : source);
    return static_cast<int>(edges.size()) - 1;
  }
  bool empty() const { return vertices.empty(); }
  Vec2 edge_a(int e) const { return vertices[edges[e][0]]; }
  Vec2 edge_b(int e) const { return vertices[edges[e][1]]; }
  double edge_length(int e) const { return (edge_b(e) - edge_a(e)).norm(); }
};

GlueGraph make_graph(const std::vector<Vec2>& vertices,
                     const std::vector<std::array<int, 2>>& edges);
GlueGraph make_segment(const Vec2& a, const Vec2& b);
// Four radii meeting at `center`, axis aligned after rotation by `angle`.
GlueGraph make_cross(const Vec2& center, double arm, double angle = 0.0);

double total_length(const GlueGraph& g);
// Single component; the empty graph counts as connected.
bool is_connected(const GlueGraph& g);
int degree(const GlueGraph& g, int vertex);
double graph_diameter_bound(const GlueGraph& g);  // bbox diagonal
// Snap tolerance tied to the embedded scale: 1e-9 * bbox diagonal.
double tau_geo(const GlueGraph& g);

double distance_to_graph(const GlueGraph& g, const Vec2& p);
// Arclength-uniform samples at spacing <= delta (each edge keeps both ends);
// isolated vertices are included as single samples.
std::vector<Vec2> sample_graph(const GlueGraph& g, double delta);
// Point at arclength s along the concatenated edges, s in [0, total_length].
Vec2 point_at_arclength(const GlueGraph& g, double s);

// Cycle basis: one closed edge sequence per independent loop, empty iff the
// graph is a topological forest.
std::vector<std::vector<int>> find_loops(const GlueGraph& g);

// Merges vertices within tau_geo, splits crossing edges and T-junctions,
// drops degenerate and duplicate edges. Idempotent; preserves the embedded
// point set within tau_geo and preserves connectivity.
GlueGraph normalize(const GlueGraph& g);

// Pieces of the graph inside the closed ball: clipped sub-segments plus
// isolated touch points (degree-0 vertices in the ball, grazing contacts).
struct BallClip {
  std::vector<std::array<Vec2, 2>> segments;
  std::vector<Vec2> points;
  bool empty() const { return segments.empty() && points.empty(); }
};
BallClip clip_to_ball(const GlueGraph& g, const Vec2& x, double r);

// Total length of the graph inside the open ball (exact chord clipping).
double length_in_ball(const GlueGraph& g, const Vec2& x, double r);

// Intersection points of the graph with the circle of radius s around x,
// deduplicated within tau_geo (shared endpoints and grazings count once).
std::vector<Vec2> circle_intersection_points(const GlueGraph& g, const Vec2& x, double s);

}  // namespace pcl

#endif
