#include <doctest.h>

#include "oracles.hpp"
#include "pcl/competitors.hpp"
#include "pcl/errors.hpp"
#include "pcl/rng.hpp"

using namespace pcl;

TEST_CASE("cut_circle on a diameter: length arithmetic") {
  const double R = 2.0, r = 0.5;
  GlueGraph g = make_segment(Vec2(-R, 0), Vec2(R, 0));
  const int n_arc = 256;
  GlueGraph out = competitor_cut_circle(g, Vec2(0, 0), r, n_arc);
  CHECK(is_connected(out));
  // 2R - 2r of segment + polygonized circle 2*pi*r
  const double expect = 2 * R - 2 * r + 2 * M_PI * r;
  CHECK(total_length(out) == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("cut_circle keeps the graph outside the ball intact") {
  GlueGraph g = make_graph({Vec2(-2, 0), Vec2(0, 0), Vec2(2, 0), Vec2(0, 1.5)},
                           {{0, 1}, {1, 2}, {1, 3}});
  GlueGraph out = competitor_cut_circle(g, Vec2(0, 0), 0.5, 32);
  CHECK(is_connected(out));
  // sample far parts: all must still be on the output
  for (const Vec2& p : {Vec2(-2, 0), Vec2(-1, 0), Vec2(1.5, 0), Vec2(0, 1.0)})
    CHECK(distance_to_graph(out, p) < 1e-9);
  // nothing of the output lies strictly inside the cut ball except the arc
  for (const auto& v : out.vertices) CHECK((v - Vec2(0, 0)).norm() > 0.5 - 1e-6);
}

TEST_CASE("cut_circle on a 3-star produces one loop") {
  GlueGraph star = make_graph({Vec2(0, 0), Vec2(2, 0), Vec2(-1, 1.8), Vec2(-1, -1.8)},
                              {{0, 1}, {0, 2}, {0, 3}});
  GlueGraph out = competitor_cut_circle(star, Vec2(0, 0), 0.5, 64);
  CHECK(is_connected(out));
  // cycle rank by brute force: E - V + components
  const int rank = static_cast<int>(out.edges.size()) - static_cast<int>(out.vertices.size()) + 1;
  CHECK(rank == 1);
  CHECK(find_loops(out).size() == 1);
}

TEST_CASE("cut_circle error when Sigma is swallowed") {
  GlueGraph g = make_segment(Vec2(-0.1, 0), Vec2(0.1, 0));
  CHECK_THROWS_AS((void)competitor_cut_circle(g, Vec2(0, 0), 1.0, 16), Error);
}

TEST_CASE("cut_chord on a diameter reproduces the chord") {
  GlueGraph g = make_segment(Vec2(-3, 0), Vec2(3, 0));
  const double r = 1.0, beta_wall = 0.02;
  GlueGraph out = competitor_cut_chord(g, Vec2(0, 0), r, beta_wall);
  CHECK(is_connected(out));
  // wall length bound: <= 5 r beta_wall (paper's arcsine estimate), here 0.1
  const double wall_budget = 5.0 * beta_wall * r;
  CHECK(total_length(out) <= total_length(g) + wall_budget + 1e-9);
  CHECK(total_length(out) >= total_length(g) - 1e-9);
}

TEST_CASE("cut_chord on a slightly bent polyline shortens up to the wall") {
  // bend of height 0.02 over the ball of radius 1
  GlueGraph g = make_graph({Vec2(-3, 0), Vec2(0, 0.02), Vec2(3, 0)}, {{0, 1}, {1, 2}});
  const double r = 1.0;
  const double beta = flatness(g, Vec2(0, 0.0), r).beta;
  CHECK(beta < 0.05);
  GlueGraph out = competitor_cut_chord(g, Vec2(0, 0.0), r, 0.05);
  CHECK(is_connected(out));
  CHECK(total_length(out) <= total_length(g) + 5.0 * 0.05 * r + 1e-9);
}

TEST_CASE("cut_chord precondition failures") {
  GlueGraph far = make_segment(Vec2(5, 5), Vec2(6, 6));
  CHECK_THROWS_AS((void)competitor_cut_chord(far, Vec2(0, 0), 1.0, 0.1), Error);
  // a cross is nowhere near flat
  GlueGraph cross = make_cross(Vec2(0, 0), 2.0);
  CHECK_THROWS_AS((void)competitor_cut_chord(cross, Vec2(0, 0), 1.0, 0.05), Error);
}

TEST_CASE("steiner_connection_4 of the inscribed cross points") {
  const double r = 1.0;
  const std::array<Vec2, 4> pts{Vec2(r, 0), Vec2(-r, 0), Vec2(0, r), Vec2(0, -r)};
  GlueGraph tree = steiner_connection_4(pts);
  CHECK(is_connected(tree));
  CHECK(find_loops(tree).empty());
  const double expect = std::sqrt(2.0) * (std::sqrt(3.0) + 1.0) * r;  // 3.863703...
  CHECK(total_length(tree) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(total_length(tree) == doctest::Approx(3.863703).epsilon(1e-6));
  // all four terminals are on the tree
  for (const auto& p : pts) CHECK(distance_to_graph(tree, p) < 1e-12);
}

TEST_CASE("steiner_connection_4 of the unit square") {
  const std::array<Vec2, 4> pts{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  GlueGraph tree = steiner_connection_4(pts);
  // closed form 1 + sqrt(3), cross-checked against numeric descent
  CHECK(total_length(tree) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-9));
  CHECK(total_length(tree) == doctest::Approx(oracle::steiner4_descent_length(pts)).epsilon(1e-5));
}

TEST_CASE("steiner_connection_4 collinear fallback") {
  const std::array<Vec2, 4> pts{Vec2(0, 0), Vec2(1, 0), Vec2(2.5, 0), Vec2(4, 0)};
  GlueGraph tree = steiner_connection_4(pts);
  CHECK(total_length(tree) == doctest::Approx(4.0));
  CHECK(is_connected(tree));
}

TEST_CASE("steiner_connection_4 coincident points degenerate") {
  const std::array<Vec2, 4> pts{Vec2(0, 0), Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)};
  GlueGraph tree = steiner_connection_4(pts);
  CHECK(is_connected(tree));
  CHECK(distance_to_graph(tree, Vec2(0, 0)) < 1e-12);
  CHECK(distance_to_graph(tree, Vec2(1, 1)) < 1e-12);
}

TEST_CASE("steiner_connection_4 against descent oracle on random quadruples") {
  Rng rng(55);
  for (int it = 0; it < 20; ++it) {
    std::array<Vec2, 4> pts;
    for (auto& p : pts) p = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    GlueGraph tree = steiner_connection_4(pts);
    CHECK(is_connected(tree));
    const double len = total_length(tree);
    const double mst = oracle::mst_length({pts.begin(), pts.end()});
    CHECK(len <= mst + 1e-9);
    CHECK(len >= std::sqrt(3.0) / 2.0 * mst - 1e-9);
    // never beats the branch-and-descent oracle by more than its own noise
    const double descent = oracle::steiner4_descent_length(pts);
    CHECK(len >= descent - 1e-4);
  }
}

TEST_CASE("fermat_point") {
  // equilateral triangle: the centroid
  const Vec2 a(0, 0), b(1, 0), c(0.5, std::sqrt(3.0) / 2.0);
  const Vec2 f = fermat_point(a, b, c);
  CHECK((f - Vec2(0.5, std::sqrt(3.0) / 6.0)).norm() < 1e-9);
  // obtuse (>=120 degrees) vertex wins
  const Vec2 g = fermat_point(Vec2(0, 0), Vec2(1, 0.01), Vec2(-1, 0.01));
  CHECK((g - Vec2(0, 0)).norm() < 1e-12);
}
