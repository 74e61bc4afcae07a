#include <catch2/catch_amalgamated.hpp>

#include "photloc/lattice.hpp"

using namespace photloc;

TEST_CASE("box enumeration counts") {
  CHECK(enumerate_box(1, 0).size() == 1);
  CHECK(enumerate_box(1, 2).size() == 5);
  CHECK(enumerate_box(2, 1).size() == 9);
  CHECK(enumerate_box(3, 2).size() == 125);
}

TEST_CASE("single point box") {
  const LatticeBox b(1, 0);
  CHECK(b.site_at(0) == Site{0});
}

TEST_CASE("index_of inverts site_at") {
  const LatticeBox b(2, 3);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index_of(b.site_at(i)) == i);
}

TEST_CASE("enumeration is lexicographic and deterministic") {
  const LatticeBox a(2, 2), b(2, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.site_at(i) == b.site_at(i));
  // lexicographic: first site is (-2,-2), last is (2,2)
  CHECK(a.site_at(0) == Site{-2, -2});
  CHECK(a.site_at(1) == Site{-2, -1});
  CHECK(a.site_at(a.size() - 1) == Site{2, 2});
}

TEST_CASE("nested boxes share sites") {
  const LatticeBox small(2, 2), big(2, 3);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(big.contains(small.site_at(i)));
}

TEST_CASE("l1 distance") {
  CHECK(l1_distance({0, 0}, {0, 1}) == 1);
  CHECK(l1_distance({0}, {0}) == 0);
  CHECK(l1_distance({2, -1}, {-1, 1}) == 5);
  CHECK_THROWS_AS(l1_distance({0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("box preconditions") {
  CHECK_THROWS_AS(LatticeBox(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBox(1, -1), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBox(12, 10), std::invalid_argument);  // size overflow
}

TEST_CASE("index_of rejects outside sites") {
  const LatticeBox b(1, 2);
  CHECK_THROWS_AS(b.index_of(Site{3}), std::invalid_argument);
}
