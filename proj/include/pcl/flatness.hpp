#ifndef PCL_FLATNESS_HPP
#define PCL_FLATNESS_HPP

#include <span>

#include "pcl/geometry.hpp"

namespace pcl {

inline constexpr double kTolBeta = 5e-3;
inline constexpr double kTolLen = 1e-6;

// Discrete Hausdorff distance between nonempty finite point samplings:
// max of the two directed max-min distances. Empty input is an error
// (the +infinity convention is not represented as a number).
double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b);

// Scale-free flatness of the graph inside a closed ball: beta is the
// normalized Hausdorff distance to the best chord through the center,
// 0 for a spanning straight segment, sqrt(2) for a lone point on the circle.
struct FlatnessReport {
  Vec2 center;
  double radius = 0.0;
  double beta = 0.0;
  double best_line_angle = 0.0;  // radians in [0, pi)
};

// Minimizes over line angle: coarse scan seeded golden-section refinement.
// The graph-to-chord direction is exact (clipped pieces are segments, so the
// maximum sits at piece endpoints); the chord-to-graph direction uses dense
// samples with local refinement. Throws EmptyIntersection when the ball
// misses the graph.
FlatnessReport flatness(const GlueGraph& sigma, const Vec2& x, double r);

// H^1(Sigma cap B_r(x)) / r by exact segment-disk clipping.
// Requires x on Sigma within tau_geo, else NotOnSigma.
double ahlfors_ratio(const GlueGraph& sigma, const Vec2& x, double r);

// Number of transversal intersection points of the graph edges with the
// circle of radius s around x; tangential grazings within tau_geo count once.
int count_circle_intersections(const GlueGraph& sigma, const Vec2& x, double s);

// d_H between clipped pieces and the union of the full chords of B_r(x) at
// the given angles (each chord passes through x). The piece-to-chord
// direction is exact; the reverse direction is sampled and refined.
double hausdorff_to_chord_union(const BallClip& clip, const Vec2& x, double r,
                                std::span<const double> angles);

}  // namespace pcl

#endif
