#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>

#include "photloc/disorder.hpp"
#include "photloc/stats.hpp"

using namespace photloc;

TEST_CASE("fields are reproducible from their keys") {
  const LatticeBox box(2, 4);
  const auto a = DisorderField::sample(box, 1.5, 99, 7);
  const auto b = DisorderField::sample(box, 1.5, 99, 7);
  CHECK(a.values() == b.values());
  const auto c = DisorderField::sample(box, 1.5, 99, 8);
  CHECK(a.values() != c.values());
}

TEST_CASE("nested boxes agree on shared sites") {
  const LatticeBox small(1, 8), big(1, 32);
  const auto fs = DisorderField::sample(small, 1.0, 5, 3);
  const auto fb = DisorderField::sample(big, 1.0, 5, 3);
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(fs.at(i) == fb.at(big.index_of(small.site_at(i))));
}

TEST_CASE("field statistics match the uniform law") {
  const double rho0 = 0.7;
  const LatticeBox box(1, 50000);  // 100001 sites
  const auto f = DisorderField::sample(box, rho0, 20260809, 0);
  const MeanSe ms = mean_se(f.values());
  const double sigma = (2.0 * rho0 / std::sqrt(12.0)) / std::sqrt(double(box.size()));
  CHECK(std::abs(ms.mean - rho0) < 3.0 * sigma);
  CHECK(*std::min_element(f.values().begin(), f.values().end()) >= 0.0);
  CHECK(*std::max_element(f.values().begin(), f.values().end()) <= 2.0 * rho0);
}

TEST_CASE("resample_site changes exactly one value") {
  const LatticeBox box(1, 4);
  const auto f = DisorderField::sample(box, 1.0, 1, 1);
  const Site x{2};
  const auto g = resample_site(f, box, x, 0.0);
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (i == box.index_of(x))
      CHECK(g.at(i) == 0.0);
    else
      CHECK(g.at(i) == f.at(i));
  }
  const auto same = resample_site(f, box, x, f.at(box.index_of(x)));
  CHECK(same.values() == f.values());
  CHECK_THROWS_AS(resample_site(f, box, x, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(resample_site(f, box, x, -0.1), std::invalid_argument);
}

TEST_CASE("rho_hat stream is independent of the field stream") {
  const LatticeBox box(1, 2);
  const auto f = DisorderField::sample(box, 1.0, 11, 0);
  const double rh = draw_rho_hat(1.0, 11, 0, box.site_at(0));
  CHECK(rh != f.at(0));
  CHECK(rh >= 0.0);
  CHECK(rh <= 2.0);
  CHECK(rh == draw_rho_hat(1.0, 11, 0, box.site_at(0)));
}

TEST_CASE("rho0 must be positive") {
  const LatticeBox box(1, 1);
  CHECK_THROWS_AS(DisorderField::sample(box, 0.0, 1, 0), std::invalid_argument);
}
