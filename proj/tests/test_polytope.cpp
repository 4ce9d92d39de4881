#include "okflow/polytope.hpp"

#include "okflow/errors.hpp"
#include "okflow/qlinalg.hpp"
#include "okflow/rng.hpp"

#include <doctest.h>

#include <algorithm>

namespace {

using namespace okflow;

QVec pt(std::initializer_list<Rat> xs) { return QVec(xs); }

TEST_CASE("hull of named point sets") {
  QPolytope seg = QPolytope::convex_hull({pt({Rat(0)}), pt({Rat(1)}), pt({Rat(3)})});
  CHECK(seg.vertices() == std::vector<QVec>{pt({Rat(0)}), pt({Rat(3)})});
  CHECK(seg.full_dimensional());

  QPolytope point = QPolytope::convex_hull({pt({Rat(0), Rat(0)})});
  CHECK(point.dim() == 0);
  CHECK(point.vertices().size() == 1);

  QPolytope tri = QPolytope::convex_hull(
      {pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(1)}), pt({Rat(1, 4), Rat(1, 4)})});
  CHECK(tri.vertices().size() == 3);
  CHECK(std::find(tri.vertices().begin(), tri.vertices().end(), pt({Rat(1, 4), Rat(1, 4)})) == tri.vertices().end());

  CHECK_THROWS_AS(QPolytope::convex_hull({}), input_error);
}

TEST_CASE("lower-dimensional hulls keep extreme points and reject volume") {
  // Segment embedded in the plane.
  QPolytope seg = QPolytope::convex_hull(
      {pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(1)}), pt({Rat(3), Rat(3)}), pt({Rat(2), Rat(2)})});
  CHECK(seg.dim() == 1);
  CHECK(seg.vertices() == std::vector<QVec>{pt({Rat(0), Rat(0)}), pt({Rat(3), Rat(3)})});
  CHECK_THROWS_WITH_AS(seg.normalized_volume(), "degenerate polytope", input_error);
}

TEST_CASE("normalized volumes of named polytopes") {
  CHECK(QPolytope::convex_hull({pt({Rat(0)}), pt({Rat(3)})}).normalized_volume() == 3);

  QPolytope simplex2 = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(1)})});
  CHECK(simplex2.normalized_volume() == 1);

  QPolytope simplex3 = QPolytope::convex_hull({pt({Rat(0), Rat(0), Rat(0)}), pt({Rat(1), Rat(0), Rat(0)}),
                                               pt({Rat(0), Rat(1), Rat(0)}), pt({Rat(0), Rat(0), Rat(1)})});
  CHECK(simplex3.normalized_volume() == 1);

  QPolytope stretched = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(5)})});
  CHECK(stretched.normalized_volume() == 5);

  QPolytope square = QPolytope::convex_hull(
      {pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(1)}), pt({Rat(1), Rat(1)})});
  CHECK(square.normalized_volume() == 2);
  CHECK(square.euclidean_volume() == 1);

  // 3-cube: normalized volume 3! = 6.
  std::vector<QVec> cube;
  for (int m = 0; m < 8; ++m) cube.push_back(pt({Rat(m & 1), Rat((m >> 1) & 1), Rat((m >> 2) & 1)}));
  CHECK(QPolytope::convex_hull(cube).normalized_volume() == 6);
}

TEST_CASE("dimension four is supported") {
  std::vector<QVec> simplex{pt({Rat(0), Rat(0), Rat(0), Rat(0)})};
  for (int i = 0; i < 4; ++i) {
    QVec e(4, Rat(0));
    e[i] = 1;
    simplex.push_back(e);
  }
  CHECK(QPolytope::convex_hull(simplex).normalized_volume() == 1);

  // Cross-polytope conv{+-e_i}: Euclidean volume 2^4/4!, normalized 16.
  std::vector<QVec> cross;
  for (int i = 0; i < 4; ++i)
    for (int s : {-1, 1}) {
      QVec e(4, Rat(0));
      e[i] = s;
      cross.push_back(e);
    }
  QPolytope p = QPolytope::convex_hull(cross);
  CHECK(p.vertices().size() == 8);
  CHECK(p.normalized_volume() == 16);

  std::vector<QVec> too_big{QVec(5, Rat(0))};
  CHECK_THROWS_AS(QPolytope::convex_hull(too_big), input_error);
}

TEST_CASE("containment tests") {
  QPolytope outer = QPolytope::convex_hull({pt({Rat(0)}), pt({Rat(3)})});
  QPolytope inner = QPolytope::convex_hull({pt({Rat(1)}), pt({Rat(2)})});
  CHECK(outer.contains_in_interior(inner));
  CHECK(outer.contains(inner));

  QPolytope unit = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(1)})});
  CHECK_FALSE(unit.contains_in_interior(unit)); // shared boundary
  CHECK(unit.contains(unit));

  QPolytope wide = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(2)})});
  // The closed unit corner simplex touches the boundary of wide; only an
  // epsilon-translated copy sits in the interior (facet check 2x + y < 2).
  CHECK_FALSE(wide.contains_in_interior(unit));
  QPolytope shifted = QPolytope::convex_hull({pt({Rat(1, 100), Rat(1, 100)}), pt({Rat(91, 100), Rat(1, 100)}),
                                              pt({Rat(1, 100), Rat(91, 100)})});
  CHECK(wide.contains_in_interior(shifted));
}

TEST_CASE("delta_k scaling") {
  QPolytope d1 = delta_k({{0}, {1}, {3}}, 1);
  CHECK(d1.vertices() == std::vector<QVec>{pt({Rat(0)}), pt({Rat(3)})});

  QPolytope d2 = delta_k({{0}, {2}, {6}}, 2);
  CHECK(d2 == d1);

  QPolytope d2b = delta_k({{0}, {1}, {2}, {3}, {4}, {5}, {6}}, 2);
  CHECK(d2b == d1);

  CHECK_THROWS_AS(delta_k({{0}}, 0), input_error);
}

TEST_CASE("volume_gap") {
  QPolytope seg3 = QPolytope::convex_hull({pt({Rat(0)}), pt({Rat(3)})});
  QPolytope seg2 = QPolytope::convex_hull({pt({Rat(0)}), pt({Rat(2)})});
  CHECK(volume_gap(seg3, seg3) == 0);
  CHECK(volume_gap(seg3, seg2) == 1);

  QPolytope big = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(3)})});
  QPolytope small = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1), Rat(0)}), pt({Rat(0), Rat(2)})});
  CHECK(volume_gap(big, small) == Rat(1, 2));

  CHECK_THROWS_AS(volume_gap(small, big), input_error);
  try {
    volume_gap(small, big);
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("separating vertex") != std::string::npos);
  }
}

TEST_CASE("hull idempotence and volume invariance under unimodular maps") {
  Rng rng(23);
  for (int round = 0; round < 15; ++round) {
    std::size_t n = static_cast<std::size_t>(rng.next_int(1, 3));
    std::vector<QVec> pts;
    std::size_t count = static_cast<std::size_t>(rng.next_int(static_cast<std::int64_t>(n) + 1, 8));
    for (std::size_t i = 0; i < count; ++i) {
      QVec p(n);
      for (auto& x : p) x = Rat(rng.next_int(-4, 4));
      pts.push_back(p);
    }
    QPolytope p = QPolytope::convex_hull(pts);
    CHECK(QPolytope::convex_hull(p.vertices()) == p);
    if (!p.full_dimensional()) continue;

    // Random unimodular map: a product of shears, with an integer shift.
    IntMat w = IntMat::identity(n);
    for (int step = 0; step < 4; ++step) {
      IntMat e = IntMat::identity(n);
      if (n > 1) {
        std::size_t i = static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(n) - 1));
        std::size_t j = static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(n) - 1));
        if (i != j) e.at(i, j) = Int(rng.next_int(-2, 2));
      }
      w = w * e;
    }
    QVec shift(n);
    for (auto& x : shift) x = Rat(rng.next_int(-3, 3));
    UnimodularAffineMap map{w, shift};
    map.validate();

    std::vector<QVec> mapped;
    for (const auto& v : p.vertices()) mapped.push_back(apply_unimodular(map, v));
    CHECK(QPolytope::convex_hull(mapped).normalized_volume() == p.normalized_volume());
  }
}

TEST_CASE("triangulation simplices tile the volume") {
  QPolytope square = QPolytope::convex_hull(
      {pt({Rat(0), Rat(0)}), pt({Rat(2), Rat(0)}), pt({Rat(0), Rat(2)}), pt({Rat(2), Rat(2)})});
  auto tri = square.triangulate();
  Rat sum = 0;
  for (const auto& s : tri) {
    REQUIRE(s.size() == 3);
    QMat edges{{s[1][0] - s[0][0], s[1][1] - s[0][1]}, {s[2][0] - s[0][0], s[2][1] - s[0][1]}};
    sum += rat_abs(qmat_det(edges));
  }
  CHECK(sum == square.normalized_volume());
}

TEST_CASE("nested value sets have monotone hull volumes") {
  std::vector<LatticeVector> small{{0, 0}, {2, 1}, {1, 3}};
  std::vector<LatticeVector> large = small;
  large.push_back({3, 3});
  large.push_back({0, 2});
  QPolytope ps = hull_of_lattice_points(small);
  QPolytope pl = hull_of_lattice_points(large);
  CHECK(pl.contains(ps));
  CHECK(ps.normalized_volume() <= pl.normalized_volume());
}

TEST_CASE("polytope JSON round trip") {
  QPolytope p = QPolytope::convex_hull({pt({Rat(0), Rat(0)}), pt({Rat(1, 2), Rat(0)}), pt({Rat(0), Rat(7, 3)})});
  QPolytope q = QPolytope::from_json(p.to_json());
  CHECK(p == q);
  CHECK(q.normalized_volume() == p.normalized_volume());
}

} // namespace
