#ifndef PCL_COMPETITORS_HPP
#define PCL_COMPETITORS_HPP

#include "pcl/flatness.hpp"
#include "pcl/geometry.hpp"

namespace pcl {

// Circle competitor: removes the part of the graph inside B_r(x) and glues in
// an inscribed n_arc-gon; every clipped stub on the circle is reconnected to
// its nearest polygon vertex. Agrees with the input outside the closed ball.
// Throws WouldDisconnectAll when the graph lives entirely inside the ball.
GlueGraph competitor_cut_circle(const GlueGraph& sigma, const Vec2& x, double r, int n_arc);

inline int default_n_arc(double r, double h_sigma) {
  return std::max(16, static_cast<int>(std::ceil(2.0 * M_PI * r / std::max(h_sigma, 1e-12))));
}

// Chord competitor: replaces the part inside B_r(x) by the best-line chord
// plus two wall arcs of angular half-width arcsin(beta_wall); stubs attach to
// the nearest wall vertex. Requires flatness(sigma,x,r).beta <= beta_wall.
GlueGraph competitor_cut_chord(const GlueGraph& sigma, const Vec2& x, double r,
                               double beta_wall);

// Same construction with a caller-chosen chord angle; no flatness gate. Used
// to sample admissible perturbations around the best line.
GlueGraph competitor_cut_chord_at_angle(const GlueGraph& sigma, const Vec2& x, double r,
                                        double beta_wall, double theta);

// Normalized Hausdorff distance of the clipped graph to the best cross (two
// perpendicular chords) through x; the minimizing arm angle lands in
// [0, pi/2).
double cross_flatness(const GlueGraph& sigma, const Vec2& x, double r,
                      double* best_angle = nullptr);

// Quadruple-point competitor: removes the ball around a cross-like site and
// reconnects the four exit points by their minimal Steiner tree, plus wall
// arcs sized by the cross flatness. Exactly four circle crossings required.
GlueGraph steiner_cross_competitor(const GlueGraph& sigma, const Vec2& x, double r);

// Minimal Steiner tree of four points with at most two Steiner points. Both
// hull-pair topologies are solved in closed form (120-degree condition via
// the equilateral third-point construction); the minimum spanning tree backs
// up degenerate and non-convex inputs.
GlueGraph steiner_connection_4(const std::array<Vec2, 4>& points);

// Euclidean MST over an arbitrary point set (Kruskal on all pairs).
GlueGraph minimum_spanning_tree(const std::vector<Vec2>& points);

// Fermat point of a triangle; coincides with a vertex when its angle >= 120.
Vec2 fermat_point(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace pcl

#endif
