#include <doctest.h>

#include "oracles.hpp"
#include "pcl/errors.hpp"
#include "pcl/flatness.hpp"
#include "pcl/rng.hpp"

using namespace pcl;

TEST_CASE("hausdorff_distance basics") {
  GlueGraph seg = make_segment(Vec2(0, 0), Vec2(1, 0));
  auto s = sample_graph(seg, 0.01);
  CHECK(hausdorff_distance(s, s) == 0.0);

  std::vector<Vec2> a{Vec2(0, 0)};
  std::vector<Vec2> b{Vec2(3, 4)};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(5.0));

  // unit segment vs its left endpoint: distance 1 up to sampling resolution
  const double ds = 0.01;
  CHECK(hausdorff_distance(s, a) == doctest::Approx(1.0).epsilon(ds));

  CHECK_THROWS_AS((void)hausdorff_distance({}, s), Error);
}

TEST_CASE("hausdorff_distance agrees with brute force and is a metric") {
  Rng rng(11);
  for (int it = 0; it < 25; ++it) {
    auto randset = [&](int n) {
      std::vector<Vec2> v;
      for (int k = 0; k < n; ++k) v.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
      return v;
    };
    const auto A = randset(3 + static_cast<int>(rng.uniform_index(20)));
    const auto B = randset(3 + static_cast<int>(rng.uniform_index(20)));
    const auto C = randset(3 + static_cast<int>(rng.uniform_index(20)));
    const double ab = hausdorff_distance(A, B);
    CHECK(ab == doctest::Approx(oracle::brute_hausdorff(A, B)).epsilon(1e-12));
    // symmetry, nonnegativity, triangle inequality
    CHECK(ab == doctest::Approx(hausdorff_distance(B, A)));
    CHECK(ab >= 0.0);
    CHECK(ab <= hausdorff_distance(A, C) + hausdorff_distance(C, B) + 1e-12);
    CHECK(hausdorff_distance(A, A) == 0.0);
  }
}

TEST_CASE("flatness of a straight segment through the center is zero") {
  for (double theta0 : {0.0, 0.3, 1.2, 2.9}) {
    const Vec2 d(std::cos(theta0), std::sin(theta0));
    GlueGraph g = make_segment(Vec2(-2.0 * d), Vec2(2.0 * d));
    const FlatnessReport rep = flatness(g, Vec2(0, 0), 1.0);
    CHECK(rep.beta < kTolBeta);
    const double dt = std::min(std::abs(rep.best_line_angle - std::fmod(theta0, M_PI)),
                               M_PI - std::abs(rep.best_line_angle - std::fmod(theta0, M_PI)));
    CHECK(dt < 2e-3);
  }
}

TEST_CASE("flatness of a lone point on the circle is sqrt(2)") {
  GlueGraph g;
  g.add_vertex(Vec2(1, 0));
  const FlatnessReport rep = flatness(g, Vec2(0, 0), 1.0);
  CHECK(rep.beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("flatness when Sigma meets the ball only at its center is 1") {
  // oracle: for any line through x the farthest chord point sits at distance r
  GlueGraph g;
  g.add_vertex(Vec2(0.25, -0.5));
  const FlatnessReport rep = flatness(g, Vec2(0.25, -0.5), 0.7);
  CHECK(rep.beta == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flatness range and rigid-motion invariance") {
  Rng rng(21);
  for (int it = 0; it < 10; ++it) {
    GlueGraph g;
    Vec2 p(0, 0);
    int prev = g.add_vertex(p);
    for (int k = 0; k < 5; ++k) {
      p += Vec2(rng.uniform(0.2, 0.6), rng.uniform(-0.3, 0.3));
      const int v = g.add_vertex(p);
      g.add_edge(prev, v);
      prev = v;
    }
    const Vec2 x = g.vertices[2];
    const double r = 0.8;
    const FlatnessReport rep = flatness(g, x, r);
    CHECK(rep.beta >= 0.0);
    CHECK(rep.beta <= std::sqrt(2.0) + kTolBeta);

    // rotate and translate everything
    const double ang = rng.uniform(0, 2 * M_PI);
    const Vec2 shift(rng.uniform(-3, 3), rng.uniform(-3, 3));
    Eigen::Rotation2D<double> rot(ang);
    GlueGraph g2 = g;
    for (auto& v : g2.vertices) v = rot * v + shift;
    const FlatnessReport rep2 = flatness(g2, rot * x + shift, r);
    CHECK(rep2.beta == doctest::Approx(rep.beta).epsilon(0.0).scale(1.0).epsilon(kTolBeta));
  }
}

TEST_CASE("flatness scaling inequality on random graphs") {
  // beta(x, kr) <= (2/k) beta(x, r) + tol
  Rng rng(31);
  int checked = 0;
  for (int it = 0; it < 40; ++it) {
    GlueGraph g;
    Vec2 p(0, 0);
    int prev = g.add_vertex(p);
    for (int k = 0; k < 6; ++k) {
      p += Vec2(rng.uniform(0.1, 0.5), rng.uniform(-0.4, 0.4));
      const int v = g.add_vertex(p);
      g.add_edge(prev, v);
      prev = v;
    }
    const Vec2 x = g.vertices[rng.uniform_index(g.vertices.size())];
    const double r = rng.uniform(0.2, 1.0);
    const double kappa = rng.uniform(0.3, 0.9);
    const FlatnessReport big = flatness(g, x, r);
    const FlatnessReport small = flatness(g, x, kappa * r);
    CHECK(small.beta <= 2.0 / kappa * big.beta + kTolBeta);
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("flatness empty intersection throws") {
  GlueGraph g = make_segment(Vec2(5, 5), Vec2(6, 5));
  CHECK_THROWS_AS((void)flatness(g, Vec2(0, 0), 1.0), Error);
}

TEST_CASE("ahlfors_ratio reference configurations") {
  // long segment, interior point, small radius: diameter chord, ratio 2
  GlueGraph seg = make_segment(Vec2(-5, 0), Vec2(5, 0));
  CHECK(ahlfors_ratio(seg, Vec2(0, 0), 0.5) == doctest::Approx(2.0).epsilon(1e-9));

  // cross at its center: four radii
  GlueGraph cross = make_cross(Vec2(0, 0), 2.0);
  CHECK(ahlfors_ratio(cross, Vec2(0, 0), 0.5) == doctest::Approx(4.0).epsilon(1e-9));

  // endpoint of a segment: one radius
  CHECK(ahlfors_ratio(seg, Vec2(-5, 0), 0.5) == doctest::Approx(1.0).epsilon(1e-9));

  // off the graph
  CHECK_THROWS_AS((void)ahlfors_ratio(seg, Vec2(0, 1), 0.5), Error);

  // lower bound for connected graphs escaping the ball
  Rng rng(41);
  for (int it = 0; it < 15; ++it) {
    GlueGraph g;
    Vec2 p(0, 0);
    int prev = g.add_vertex(p);
    for (int k = 0; k < 6; ++k) {
      p += Vec2(rng.uniform(-0.6, 0.8), rng.uniform(-0.6, 0.6));
      const int v = g.add_vertex(p);
      g.add_edge(prev, v);
      prev = v;
    }
    const double diam = graph_diameter_bound(g);
    const double r = rng.uniform(0.05, 0.45) * diam;
    const double s = rng.uniform(0.0, total_length(g));
    const Vec2 x = point_at_arclength(g, s);
    if (r >= diam / 2) continue;
    const double ratio = ahlfors_ratio(g, x, r);
    CHECK(ratio >= 1.0 - kTolLen);
  }
}

TEST_CASE("count_circle_intersections") {
  GlueGraph diam = make_segment(Vec2(-1, 0), Vec2(1, 0));
  CHECK(count_circle_intersections(diam, Vec2(0, 0), 0.5) == 2);
  CHECK(count_circle_intersections(diam, Vec2(0, 0), 2.0) == 0);  // circle beyond the segment

  GlueGraph cross = make_cross(Vec2(0, 0), 1.0);
  CHECK(count_circle_intersections(cross, Vec2(0, 0), 0.5) == 4);

  GlueGraph far = make_segment(Vec2(10, 10), Vec2(11, 10));
  CHECK(count_circle_intersections(far, Vec2(0, 0), 1.0) == 0);

  // tangential grazing counts once
  GlueGraph tang = make_segment(Vec2(-1, 1), Vec2(1, 1));
  CHECK(count_circle_intersections(tang, Vec2(0, 0), 1.0) == 1);

  // shared vertex on the circle between two edges counts once
  GlueGraph bent = make_graph({Vec2(1, 0), Vec2(2, 1), Vec2(2, -1)}, {{1, 0}, {0, 2}});
  CHECK(count_circle_intersections(bent, Vec2(0, 0), 1.0) == 1);
}
