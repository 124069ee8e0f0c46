#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gff/error.hpp"
#include "gff/lattice.hpp"

using namespace gff;

namespace {

// Brute-force reading of the inner region: L-infinity distance to the
// boundary ring at least lN.
std::size_t brute_inner_count(int n, double l) {
  std::size_t count = 0;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      if (std::min({a - 1, n - a, b - 1, n - b}) >= l * n) ++count;
  return count;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::precondition;
}

} // namespace

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("1/4") == Rational{1, 4});
  CHECK(Rational::parse("0.25") == Rational{1, 4});
  CHECK(Rational::parse("3/9") == Rational{1, 3});
  CHECK(Rational::parse(".3") == Rational{3, 10});
  CHECK_THROWS_AS(Rational::parse("abc"), Error);
}

TEST_CASE("make_domain") {
  SUBCASE("N=3, l=0.3 keeps only the center") {
    auto d = make_domain(3, Rational::parse("0.3"));
    REQUIRE(d.inner_sites().size() == 1);
    CHECK(d.inner_sites().front() == Point{2, 2});
  }
  SUBCASE("N=8, l=1/4 matches enumeration") {
    auto d = make_domain(8, {1, 4});
    CHECK(d.inner_sites().size() == brute_inner_count(8, 0.25));
    CHECK(d.inner_sites().size() == 16);
  }
  SUBCASE("inner region agrees with enumeration across sizes") {
    for (int n : {3, 5, 8, 17, 64, 100})
      for (auto l : {Rational{1, 4}, Rational{1, 10}, Rational{3, 10}, Rational{2, 5}}) {
        if (brute_inner_count(n, l.value()) == 0) {
          CHECK(code_of([&] { make_domain(n, l); }) == ErrorCode::invalid_margin);
          continue;
        }
        auto d = make_domain(n, l);
        CHECK(d.inner_sites().size() == brute_inner_count(n, l.value()));
      }
  }
  SUBCASE("invalid margins") {
    CHECK(code_of([] { make_domain(3, Rational::parse("0.6")); }) == ErrorCode::invalid_margin);
    CHECK(code_of([] { make_domain(10, {1, 2}); }) == ErrorCode::invalid_margin);
    CHECK(code_of([] { make_domain(10, {0, 1}); }) == ErrorCode::invalid_margin);
    CHECK(code_of([] { make_domain(2, {1, 4}); }) == ErrorCode::precondition);
  }
  SUBCASE("boundary and interior split V_N") {
    auto d = make_domain(9, {1, 4});
    CHECK(d.boundary_sites().size() + d.interior_sites().size() == d.site_count());
    for (const auto& p : d.sites()) CHECK(d.on_boundary(p) != d.is_interior(p));
    for (std::size_t i = 0; i < d.site_count(); ++i) CHECK(d.index(d.point(i)) == i);
    for (const auto& p : d.inner_sites()) CHECK(d.is_interior(p));
  }
}

TEST_CASE("disk") {
  auto d = make_domain(16, {1, 4});
  CHECK(disk(d, {8, 8}, 0.0) == std::vector<Point>{{8, 8}});
  CHECK(disk(d, {8, 8}, 1.0).size() == 5);
  std::size_t brute = 0;
  for (int a = 1; a <= 16; ++a)
    for (int b = 1; b <= 16; ++b)
      if ((a - 8) * (a - 8) + (b - 8) * (b - 8) <= 6.25) ++brute;
  CHECK(brute == 21);
  CHECK(disk(d, {8, 8}, 2.5).size() == brute);
  // clipped at the corner
  CHECK(disk(d, {1, 1}, 1.0).size() == 3);
}

TEST_CASE("partition") {
  SUBCASE("alpha = 0 is the singleton partition") {
    auto d = make_domain(20, {1, 4});
    auto p = partition(d, 0.0);
    CHECK(p.boxes.size() == d.inner_sites().size());
    for (const auto& b : p.boxes) CHECK(b.size() == 1);
  }
  SUBCASE("N=256, alpha=1/2") {
    auto d = make_domain(256, {1, 4});
    auto p = partition(d, 0.5);
    CHECK(p.side == 16);
    CHECK(p.boxes.size() == 64);
  }
  SUBCASE("alpha near 1 gives one box") {
    auto d = make_domain(256, {1, 4});
    auto p = partition(d, 0.999);
    REQUIRE(p.boxes.size() == 1);
    CHECK(p.boxes.front() == d.inner_box());
  }
  SUBCASE("tiles cover V_N^l exactly once") {
    for (int n : {37, 64, 101})
      for (double alpha : {0.2, 0.5, 0.7}) {
        auto d = make_domain(n, {1, 5});
        auto p = partition(d, alpha);
        std::map<Point, int> hits;
        for (const auto& b : p.boxes) {
          CHECK(b.height <= p.side);
          CHECK(b.width <= p.side);
          for (int a = 0; a < b.height; ++a)
            for (int c = 0; c < b.width; ++c) ++hits[{b.lo.x1 + a, b.lo.x2 + c}];
        }
        CHECK(hits.size() == d.inner_sites().size());
        for (const auto& p2 : d.inner_sites()) CHECK(hits[p2] == 1);
      }
  }
  SUBCASE("sides are even and clipped tiles sit at the high edge") {
    auto d = make_domain(100, {1, 4});
    auto p = partition(d, 0.5);
    CHECK(p.side % 2 == 0);
    for (const auto& b : p.boxes) {
      if (b.height < p.side) CHECK(b.lo.x1 + b.height - 1 == d.inner_hi());
      if (b.width < p.side) CHECK(b.lo.x2 + b.width - 1 == d.inner_hi());
    }
  }
}

TEST_CASE("build_hierarchy") {
  SUBCASE("N=4096, alpha=3/4, K=3") {
    auto d = make_domain(4096, {1, 4});
    auto h = build_hierarchy(d, 0.75, 3);
    REQUIRE(h.levels.size() == 4);
    CHECK(h.levels[0].alpha == doctest::Approx(0.75));
    CHECK(h.levels[1].alpha == doctest::Approx(0.5));
    CHECK(h.levels[2].alpha == doctest::Approx(0.25));
    CHECK(h.levels[3].alpha == 0.0);
    for (std::size_t lvl = 1; lvl < h.levels.size(); ++lvl) {
      const auto& level = h.levels[lvl];
      const auto& prev = h.levels[lvl - 1];
      std::vector<int> per_parent(prev.boxes.size(), 0);
      for (std::size_t i = 0; i < level.boxes.size(); ++i) {
        const Box& parent = prev.boxes[level.parent[i]];
        const Box& child = level.boxes[i];
        CHECK(parent.contains(child));
        // concentric half-side square, in 4x scaled cell coordinates
        CHECK(4 * child.lo.x1 >= 4 * parent.lo.x1 + parent.height);
        CHECK(4 * (child.lo.x1 + child.height) <= 4 * parent.lo.x1 + 3 * parent.height);
        CHECK(4 * child.lo.x2 >= 4 * parent.lo.x2 + parent.width);
        CHECK(4 * (child.lo.x2 + child.width) <= 4 * parent.lo.x2 + 3 * parent.width);
        ++per_parent[level.parent[i]];
      }
      const double expected = std::pow(4096.0, 2 * 0.75 / 3) / 4;
      for (int c : per_parent) CHECK(c == doctest::Approx(expected));
    }
  }
  SUBCASE("level 1 is the partition at alpha_1") {
    auto d = make_domain(300, {1, 4});
    auto h = build_hierarchy(d, 0.8, 2);
    CHECK(h.levels[0].boxes == partition(d, 0.8).boxes);
    // every child is nested in exactly one parent
    for (std::size_t lvl = 1; lvl < h.levels.size(); ++lvl)
      for (std::size_t i = 0; i < h.levels[lvl].boxes.size(); ++i) {
        int owners = 0;
        for (const auto& b : h.levels[lvl - 1].boxes) owners += b.contains(h.levels[lvl].boxes[i]) ? 1 : 0;
        CHECK(owners == 1);
      }
  }
  SUBCASE("per-parent counts within rounding on an uneven size") {
    auto d = make_domain(1000, {1, 4});
    auto h = build_hierarchy(d, 0.9, 3);
    const auto& l1 = h.levels[1];
    const int cs = l1.side;
    std::vector<int> per_parent(h.levels[0].boxes.size(), 0);
    for (auto p : l1.parent) ++per_parent[p];
    for (std::size_t p = 0; p < per_parent.size(); ++p) {
      const Box& b = h.levels[0].boxes[p];
      if (!b.is_square()) continue;
      const double span = b.height / 2.0 / cs;
      CHECK(per_parent[p] >= static_cast<int>(std::floor(span - 1)) * static_cast<int>(std::floor(span - 1)));
      CHECK(per_parent[p] <= static_cast<int>(std::ceil(span)) * static_cast<int>(std::ceil(span)));
    }
  }
  SUBCASE("too small lattice") {
    auto d = make_domain(16, {1, 4});
    CHECK(code_of([&] { build_hierarchy(d, 0.9, 8); }) == ErrorCode::too_small_lattice);
  }
  SUBCASE("range checks") {
    auto d = make_domain(64, {1, 4});
    CHECK(code_of([&] { build_hierarchy(d, 0.4, 3); }) == ErrorCode::precondition);
    CHECK(code_of([&] { build_hierarchy(d, 0.7, 1); }) == ErrorCode::precondition);
  }
}
