#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "hull_lab/geometry.hpp"

using namespace hull_lab;
using geometry::PointSet;

namespace {

// Brute-force distance to a 3-point hull over a dense barycentric grid;
// independent of the projection code under test.
double barycentric_distance(Vec2 q, Vec2 a, Vec2 b, Vec2 c, int steps = 400) {
  double best = 1e300;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps - i; ++j) {
      const double la = double(i) / steps, lb = double(j) / steps, lc = 1.0 - la - lb;
      const Vec2 p = la * a + lb * b + lc * c;
      best = std::min(best, dist(p, q));
    }
  return best;
}

PointSet random_cloud(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return PointSet::plane(pts);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("point set validation") {
  CHECK_THROWS_AS(PointSet(2, {{1.0}}), DimensionMismatchError);
  CHECK_THROWS_AS(PointSet(2, {{1.0, std::nan("")}}), Error);
  CHECK_THROWS_AS(PointSet(2, {}), Error);
}

TEST_CASE("monotone chain drops interior and collinear points") {
  const PointSet ps(2, {{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}});
  const auto hull = geometry::convex_hull_2d(ps);
  REQUIRE(hull.hull_vertices.size() == 3);
  // counterclockwise and strictly convex
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec2 a = hull.hull_vertices[i];
    const Vec2 b = hull.hull_vertices[(i + 1) % 3];
    const Vec2 c = hull.hull_vertices[(i + 2) % 3];
    CHECK(cross(b - a, c - b) > 0.0);
  }

  const PointSet collinear(2, {{0, 0}, {0.25, 0.25}, {1, 1}, {0.5, 0.5}});
  CHECK(geometry::convex_hull_2d(collinear).hull_vertices.size() == 2);

  const PointSet single(2, {{0.5, -0.25}});
  CHECK(geometry::convex_hull_2d(single).hull_vertices.size() == 1);
}

TEST_CASE("endpoint images of the arc give a segment hull") {
  const PointSet ends(2, {{1, 0}, {-1, 0}});
  const auto hull = geometry::convex_hull_2d(ends);
  REQUIRE(hull.hull_vertices.size() == 2);
}

TEST_CASE("all circle samples are hull vertices") {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 100; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / 100;
    pts.push_back({std::cos(t), std::sin(t)});
  }
  // Extremality oracle: the outward normal at p strictly separates p from
  // every other sample.
  for (int i = 0; i < 100; ++i) {
    double other = -2.0;
    for (int j = 0; j < 100; ++j) {
      if (j == i) continue;
      other = std::max(other, pts[i][0] * pts[j][0] + pts[i][1] * pts[j][1]);
    }
    CHECK(1.0 > other + 1e-4);
  }
  const auto hull = geometry::convex_hull_2d(PointSet(2, pts));
  CHECK(hull.hull_vertices.size() == 100);
}

TEST_CASE("hull idempotence") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const PointSet ps = random_cloud(rng, 40);
    const auto h1 = geometry::convex_hull_2d(ps);
    const auto h2 = geometry::convex_hull_2d(PointSet::plane(h1.hull_vertices));
    REQUIRE(h1.hull_vertices.size() == h2.hull_vertices.size());
    // same vertex set (cyclic order may rotate)
    for (const Vec2& v : h1.hull_vertices) {
      const bool found = std::any_of(h2.hull_vertices.begin(), h2.hull_vertices.end(),
                                     [&](Vec2 w) { return dist(v, w) < 1e-12; });
      CHECK(found);
    }
  }
}

TEST_CASE("hull distances against frozen and brute-force oracles") {
  const PointSet tri(2, {{1, 0}, {0, 1}, {0, 0}});
  const double in[2] = {0.2, 0.2};
  CHECK(geometry::hull_distance(in, tri, 1e-10) <= 1e-7);

  const PointSet ends(2, {{1, 0}, {-1, 0}});
  const double above[2] = {0, 1};
  CHECK(geometry::hull_distance(above, ends, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));

  const double right[2] = {2, 0};
  const double got = geometry::hull_distance(right, tri, 1e-10);
  CHECK(got == doctest::Approx(1.0).epsilon(1e-9));
  const double brute = barycentric_distance({2, 0}, {1, 0}, {0, 1}, {0, 0});
  CHECK(got == doctest::Approx(brute).epsilon(1e-2));
}

TEST_CASE("containment: centroid, vertices, and outside points") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const PointSet ps = random_cloud(rng, 12);
    double cx = 0, cy = 0;
    for (const auto& p : ps.points) {
      cx += p[0];
      cy += p[1];
    }
    const double centroid[2] = {cx / ps.size(), cy / ps.size()};
    CHECK(geometry::contains(centroid, ps, 1e-9));
    const double vertex[2] = {ps.points[0][0], ps.points[0][1]};
    CHECK(geometry::contains(vertex, ps, 1e-9));
  }
  const PointSet seg(2, {{1, 0}, {-1, 0}});
  const double off[2] = {0, 0.5};
  CHECK_FALSE(geometry::contains(off, seg, 1e-9));
}

TEST_CASE("separation witnesses satisfy their inequalities") {
  SUBCASE("segment case") {
    const PointSet seg(2, {{1, 0}, {-1, 0}});
    const double q[2] = {0, 1};
    const auto w = geometry::separate(q, seg, 1e-9);
    CHECK(w.direction[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(w.direction[1] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(w.threshold == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(w.margin == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("triangle case") {
    const PointSet tri(2, {{0, 0}, {1, 0}, {0, 1}});
    const double q[2] = {2, 0};
    const auto w = geometry::separate(q, tri, 1e-9);
    CHECK(w.direction[0] == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(w.threshold == doctest::Approx(-1.5).epsilon(1e-7));
    CHECK(w.margin == doctest::Approx(0.5).epsilon(1e-7));
  }
  SUBCASE("square by symmetry") {
    const PointSet sq(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const double q[2] = {0, -5};
    const auto w = geometry::separate(q, sq, 1e-9);
    CHECK(w.direction[1] == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("contained point is rejected") {
    const PointSet tri(2, {{0, 0}, {1, 0}, {0, 1}});
    const double q[2] = {0.25, 0.25};
    CHECK_THROWS_AS(geometry::separate(q, tri, 1e-9), NoSeparationError);
  }
  SUBCASE("random witnesses verify by direct inner products") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> far(1.5, 4.0), sign(0, 1);
    int done = 0;
    while (done < 25) {
      const PointSet ps = random_cloud(rng, 15);
      const double q[2] = {far(rng) * (sign(rng) < 0.5 ? -1 : 1),
                           far(rng) * (sign(rng) < 0.5 ? -1 : 1)};
      const auto w = geometry::separate(q, ps, 1e-9);
      double unit = 0;
      for (double d : w.direction) unit += d * d;
      CHECK(std::sqrt(unit) == doctest::Approx(1.0).epsilon(1e-12));
      for (const auto& b : ps.points)
        CHECK(w.direction[0] * b[0] + w.direction[1] * b[1] >= w.threshold - 1e-12);
      CHECK(w.direction[0] * q[0] + w.direction[1] * q[1] <= w.threshold - w.margin + 1e-12);
      ++done;
    }
  }
}

TEST_CASE("polygon and distance membership agree away from the boundary") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> wide(-1.5, 1.5);
  const double tol = 1e-7;
  int accepted = 0;
  while (accepted < 300) {
    const PointSet ps = random_cloud(rng, 10);
    const Vec2 q = {wide(rng), wide(rng)};
    const auto hull = geometry::convex_hull_2d(ps);
    const double margin = geometry::signed_polygon_margin(q, hull.hull_vertices);
    if (std::fabs(margin) <= 10 * tol) continue;
    ++accepted;
    const double qv[2] = {q.x, q.y};
    CHECK((geometry::hull_distance(qv, ps, tol / 4) <= tol) == (margin > 0));
  }
}

TEST_CASE("distance is monotone under adding generators") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double tol = 1e-9;
  for (int rep = 0; rep < 30; ++rep) {
    auto base = random_cloud(rng, 8);
    auto bigger = base.points;
    for (int k = 0; k < 4; ++k) bigger.push_back({u(rng), u(rng)});
    const double q[2] = {u(rng) * 3, u(rng) * 3};
    const double d1 = geometry::hull_distance(q, base, tol);
    const double d2 = geometry::hull_distance(q, PointSet(2, bigger), tol);
    CHECK(d2 <= d1 + tol);
  }
}

TEST_CASE("projection works beyond the plane") {
  // 3D tetrahedron corner cloud: distance from an outside point along z.
  const PointSet ps(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const double q[3] = {0, 0, 2};
  CHECK(geometry::hull_distance(q, ps, 1e-10) == doctest::Approx(1.0).epsilon(1e-8));
  const auto w = geometry::separate(q, ps, 1e-9);
  CHECK(w.direction[2] == doctest::Approx(-1.0).epsilon(1e-7));
}

}  // TEST_SUITE
