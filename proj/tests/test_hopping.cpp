#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "photloc/hopping.hpp"

using namespace photloc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent oracle for lambda(T) of a kernel with constant S(s) = S:
// grid search with step 1e-3 refined by bisection on the log-derivative.
double lambda_oracle_const_S(double S) {
  auto f = [S](double s) { return std::pow(S / (1.0 - s), 1.0 / s); };
  double best_s = 0.5, best = f(0.5);
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    if (f(s) < best) {
      best = f(s);
      best_s = s;
    }
  }
  // d/ds log f = 0  <=>  s/(1-s) = log(S/(1-s)); bisect on the sign of the difference
  auto g = [S](double s) { return s / (1.0 - s) - std::log(S / (1.0 - s)); };
  double lo = best_s - 1e-3, hi = best_s + 1e-3;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0)
      hi = mid;
    else
      lo = mid;
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("laplacian matrix elements") {
  const auto k1 = HoppingKernel::laplacian(1);
  CHECK(k1.element(Site{0}) == 2.0);
  CHECK(k1.element(Site{1}) == -1.0);
  CHECK(k1.element(Site{-1}) == -1.0);
  CHECK(k1.element(Site{2}) == 0.0);
  CHECK(HoppingKernel::laplacian(3).element(Site{0, 0, 0}) == 6.0);
  CHECK(k1.row_abs_sum() == 4.0);
}

TEST_CASE("half laplacian d=1 matches the closed-form Fourier coefficients") {
  // t(n) = 4 / (pi (1 - 4 n^2)), the Fourier coefficients of 2|sin(k/2)|
  const auto k = HoppingKernel::half_laplacian(1, 50, 4096);
  for (int n : {0, 1, 2, 3, 10, 50}) {
    const double closed = 4.0 / (std::numbers::pi * (1.0 - 4.0 * double(n) * n));
    CHECK_THAT(k.element(Site{n}), WithinAbs(closed, 1e-6));
  }
  CHECK_THAT(k.element(Site{0}), WithinAbs(4.0 / std::numbers::pi, 1e-6));
  CHECK(k.element(Site{3}) == k.element(Site{-3}));
}

TEST_CASE("half laplacian d=1 decay envelope") {
  const auto k = HoppingKernel::half_laplacian(1, 50, 4096);
  // fit c over 1 <= |dx| <= 10, then the envelope must hold out to 50
  double c = 0.0;
  for (int n = 1; n <= 10; ++n)
    c = std::max(c, std::abs(k.element(Site{n})) * double(n) * n);
  for (int n = 11; n <= 50; ++n)
    CHECK(std::abs(k.element(Site{n})) * double(n) * n <= c * (1 + 1e-12));
  CHECK(k.tail_constant() > 0.0);
}

TEST_CASE("half laplacian Parseval identity") {
  // sum_dx t(dx)^2 = (2pi)^-d Int h(k) dk = 2d, up to the truncated tail
  const auto k1 = HoppingKernel::half_laplacian(1, 50, 4096);
  double s1 = 0.0;
  for (const auto& [dx, v] : k1.support()) s1 += v * v;
  CHECK_THAT(s1, WithinAbs(2.0, 1e-5));

  const auto k2 = HoppingKernel::half_laplacian(2, 8, 512);
  double s2 = 0.0;
  for (const auto& [dx, v] : k2.support()) s2 += v * v;
  CHECK_THAT(s2, WithinAbs(4.0, 1e-3));
}

TEST_CASE("half laplacian d=2 symmetries") {
  const auto k = HoppingKernel::half_laplacian(2, 5, 256);
  CHECK(k.element(Site{2, 1}) == k.element(Site{-2, 1}));
  CHECK(k.element(Site{2, 1}) == k.element(Site{2, -1}));
  CHECK_THAT(k.element(Site{2, 1}), WithinAbs(k.element(Site{1, 2}), 1e-12));
  CHECK(k.element(Site{0, 0}) > 0.0);
}

TEST_CASE("summability of the laplacian is 2d for every s") {
  for (double s : {0.1, 0.5, 0.9}) {
    CHECK_THAT(summability(HoppingKernel::laplacian(1), s).S_of_s, WithinAbs(2.0, 1e-14));
    CHECK_THAT(summability(HoppingKernel::laplacian(2), s).S_of_s, WithinAbs(4.0, 1e-14));
  }
  CHECK(summability(HoppingKernel::laplacian(2), 0.5).finite);
  CHECK(summability(HoppingKernel::laplacian(2), 0.5).tail_bound == 0.0);
}

TEST_CASE("half laplacian summability converges in the truncation radius") {
  // s = 0.9 > d/(d+1) = 1/2, so S(s) converges as R grows. Exact tail
  // arithmetic on a_n = 4/(pi(1-4n^2)) puts the R: 50 -> 100 relative change
  // at 1.0583e-2 (and 7.27e-3 for s = 0.95); freeze both.
  const auto k50 = HoppingKernel::half_laplacian(1, 50, 4096);
  const auto k100 = HoppingKernel::half_laplacian(1, 100, 4096);
  const double a = summability(k50, 0.9).S_of_s;
  const double b = summability(k100, 0.9).S_of_s;
  CHECK_THAT(std::abs(a - b) / b, WithinAbs(0.010583, 2e-4));
  const double a95 = summability(k50, 0.95).S_of_s;
  const double b95 = summability(k100, 0.95).S_of_s;
  CHECK(std::abs(a95 - b95) / b95 < 0.01);
  CHECK(summability(k50, 0.9).finite);
  CHECK(summability(k50, 0.9).tail_bound > 0.0);
  // the tail bound must cover the observed truncation gap
  CHECK(summability(k50, 0.9).tail_bound >= b - a);
  // below the threshold the infinite sum diverges
  CHECK_FALSE(summability(k50, 0.4).finite);
}

TEST_CASE("lambda_T against the refined oracle") {
  const auto grid = default_s_grid();
  const auto k1 = lambda_T(HoppingKernel::laplacian(1), grid);
  const double oracle1 = lambda_oracle_const_S(2.0);
  CHECK_THAT(oracle1, WithinAbs(14.561003906540535, 1e-9));  // frozen
  CHECK_THAT(k1.lambda, WithinRel(oracle1, 1e-5));
  CHECK_THAT(k1.s_star, WithinAbs(0.6266353856584612, 2e-3));

  const auto k2 = lambda_T(HoppingKernel::laplacian(2), grid);
  CHECK_THAT(k2.lambda, WithinRel(lambda_oracle_const_S(4.0), 1e-5));
}

TEST_CASE("lambda_T on a single-point grid is the evaluation") {
  const double g[] = {0.5};
  const auto r = lambda_T(HoppingKernel::laplacian(1), g);
  CHECK_THAT(r.lambda, WithinAbs(16.0, 1e-12));  // (2*2)^2
  CHECK(r.s_star == 0.5);
}

TEST_CASE("lambda_T is monotone under grid refinement") {
  std::vector<double> coarse, fine;
  for (int i = 1; i < 10; ++i) coarse.push_back(i / 10.0);
  for (int i = 1; i < 100; ++i) fine.push_back(i / 100.0);
  const auto k = HoppingKernel::laplacian(1);
  CHECK(lambda_T(k, fine).lambda <= lambda_T(k, coarse).lambda);
}

TEST_CASE("r_zs values") {
  const auto k = HoppingKernel::laplacian(1);
  CHECK(r_zs(k, 0.3, 5.0, 5.0, 1.0) == 0.0);                       // z = Omega
  CHECK_THAT(r_zs(k, 0.5, 6.0, 5.0, 1.0), WithinAbs(4.0, 1e-12));  // (1/.5)*1*2
}

TEST_CASE("r_zs dips below one exactly inside the localization interval") {
  const auto k = HoppingKernel::laplacian(1);
  const auto grid = default_s_grid();
  const double lam = lambda_T(k, grid).lambda;
  const double omega = 1.0, g2r = 1.0;
  auto rmin = [&](double z) {
    double m = 1e300;
    for (double s : grid) m = std::min(m, r_zs(k, s, z, omega, g2r));
    return m;
  };
  CHECK(rmin(omega + 0.5 * g2r / lam) < 1.0);
  CHECK(rmin(omega + 2.0 * g2r / lam) >= 1.0);
}

TEST_CASE("custom kernel table round trip") {
  std::istringstream in("0 1.5\n1 -0.25\n-1 -0.25\n# comment\n2 0.0625\n-2 0.0625\n");
  const auto k = HoppingKernel::from_table(in, 1);
  CHECK(k.element(Site{0}) == 1.5);
  CHECK(k.element(Site{2}) == 0.0625);
  CHECK(k.range() == 2);
  CHECK_THAT(summability(k, 0.5).S_of_s, WithinAbs(2.0 * 0.5 + 2.0 * 0.25, 1e-14));
}

TEST_CASE("asymmetric custom kernel is rejected") {
  std::istringstream in("0 1.0\n1 -0.5\n");
  CHECK_THROWS_AS(HoppingKernel::from_table(in, 1), std::invalid_argument);
  std::istringstream in2("1 -0.5\n-1 -0.4\n");
  CHECK_THROWS_AS(HoppingKernel::from_table(in2, 1), std::invalid_argument);
}

TEST_CASE("kernel preconditions") {
  CHECK_THROWS_AS(HoppingKernel::laplacian(0), std::invalid_argument);
  CHECK_THROWS_AS(HoppingKernel::half_laplacian(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(summability(HoppingKernel::laplacian(1), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(summability(HoppingKernel::laplacian(1), 0.0), std::invalid_argument);
}
