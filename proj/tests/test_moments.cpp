#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "photloc/moments.hpp"

using namespace photloc;
using Catch::Matchers::WithinAbs;

namespace {

MomentConfig panel(double z, double s = 0.5, int L = 8, int n = 400) {
  MomentConfig c;
  c.dim = 1;
  c.half_side = L;
  c.g = 1.0;
  c.omega = 1.0;
  c.rho0 = 1.0;
  c.z = z;
  c.s = s;
  c.n_realizations = n;
  c.master_seed = 20260809;
  c.threads = 1;
  return c;
}

constexpr double kLambda1d = 14.561003906540535;  // lambda(T), 1D Laplacian

}  // namespace

TEST_CASE("moment estimates are reproducible and thread-count independent") {
  const auto kernel = HoppingKernel::laplacian(1);
  auto cfg = panel(1.0 - 0.2 / kLambda1d, 0.5, 4, 120);
  const auto a = estimate_moments(cfg, kernel);
  const auto b = estimate_moments(cfg, kernel);
  cfg.threads = 3;
  const auto c = estimate_moments(cfg, kernel);
  REQUIRE(a.per_site.size() == b.per_site.size());
  for (std::size_t i = 0; i < a.per_site.size(); ++i) {
    CHECK(a.per_site[i].mean == b.per_site[i].mean);
    CHECK(a.per_site[i].mean == c.per_site[i].mean);
    CHECK(a.per_site[i].mom == c.per_site[i].mom);
    CHECK(a.per_site[i].se == c.per_site[i].se);
  }
}

TEST_CASE("a priori fractional moment bounds hold at 3 SE") {
  const auto kernel = HoppingKernel::laplacian(1);
  for (double zrel : {0.1, 0.4}) {
    const auto est = estimate_moments(panel(1.0 - zrel / kLambda1d), kernel);
    const auto rep = apriori_bound_check(est, 1.0, 1.0, 1.0);
    INFO("zrel " << zrel << " worst margin " << rep.worst_margin);
    CHECK(rep.all_pass);
  }
}

TEST_CASE("moments shrink when the coupling scale grows") {
  // doubling g^2 rho0 at fixed z-offset must not increase per-site means
  const auto kernel = HoppingKernel::laplacian(1);
  auto weak = panel(1.0 - 0.01);
  auto strong = weak;
  strong.g = std::sqrt(2.0);
  const auto ew = estimate_moments(weak, kernel);
  const auto es = estimate_moments(strong, kernel);
  for (std::size_t i = 0; i < ew.per_site.size(); ++i) {
    const double slack =
        3.0 * std::sqrt(ew.per_site[i].se * ew.per_site[i].se +
                        es.per_site[i].se * es.per_site[i].se);
    CHECK(es.per_site[i].mean <= ew.per_site[i].mean + slack);
  }
}

TEST_CASE("summed moment bound over a box ladder") {
  const auto kernel = HoppingKernel::laplacian(1);
  const double z = 1.0 - 0.2 / kLambda1d;
  const auto sel = select_s(kernel, z, 1.0, 1.0, default_s_grid());
  REQUIRE(sel.localized_regime);
  std::vector<MomentEstimate> ladder;
  for (int L : {4, 8}) ladder.push_back(estimate_moments(panel(z, sel.s, L), kernel));
  const auto rep = summed_moment_check(ladder, kernel, 1.0, 1.0, 1.0);
  CHECK(rep.in_regime);
  CHECK(rep.pass);
  CHECK(rep.lhs > 0.0);
  CHECK(rep.lhs <= rep.rhs + 3.0 * rep.aggregate_se);
}

TEST_CASE("summed moment check reports out-of-regime energies") {
  const auto kernel = HoppingKernel::laplacian(1);
  const double z = 1.0 - 3.0 / kLambda1d;  // |z-Omega| > g^2 rho0 / lambda
  std::vector<MomentEstimate> ladder{estimate_moments(panel(z, 0.5, 4, 120), kernel)};
  const auto rep = summed_moment_check(ladder, kernel, 1.0, 1.0, 1.0);
  CHECK_FALSE(rep.in_regime);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("summed moment check refuses degenerate samples") {
  MomentEstimate e;
  e.s = 0.5;
  e.z = 0.9;
  e.dim = 1;
  e.half_side = 1;
  e.n = 100;
  e.per_site = {{0.1, 0.0, 0.1}, {0.1, 0.0, 0.1}, {0.1, 0.0, 0.1}};
  std::vector<MomentEstimate> ladder{e};
  CHECK_THROWS_AS(summed_moment_check(ladder, HoppingKernel::laplacian(1), 1.0, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("select_s localization flag follows the interval") {
  const auto kernel = HoppingKernel::laplacian(1);
  const auto grid = default_s_grid();
  const double lam = lambda_T(kernel, grid).lambda;
  const auto inside = select_s(kernel, 1.0 + 0.5 / lam, 1.0, 1.0, grid);
  CHECK(inside.localized_regime);
  CHECK(inside.r < 1.0);
  const auto outside = select_s(kernel, 1.0 + 2.0 / lam, 1.0, 1.0, grid);
  CHECK_FALSE(outside.localized_regime);
  const auto at_res = select_s(kernel, 1.0, 1.0, 1.0, grid);
  CHECK(at_res.localized_regime);
  CHECK(at_res.r == 0.0);
}

TEST_CASE("deep localization decay profile") {
  const auto kernel = HoppingKernel::laplacian(1);
  auto cfg = panel(1.0 - 0.05 / kLambda1d, 0.5, 16, 400);
  const auto est = estimate_moments(cfg, kernel);
  const auto prof = decay_profile(est);
  CHECK(prof.slope < 0.0);
  CHECK(prof.r2 >= 0.9);
  CHECK(prof.bins_used >= 5);
}

TEST_CASE("free chain shows no exponential decay") {
  // deterministic contrast: |G| for T - z at a band-interior z oscillates
  // instead of decaying; no bound is asserted, only the contrast
  const LatticeBox box(1, 16);
  const Eigen::MatrixXd T = hopping_matrix(box, HoppingKernel::laplacian(1));
  const double z = 1.7;  // inside [0,4]
  Eigen::MatrixXd A = T - z * Eigen::MatrixXd::Identity(box.size(), box.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(box.size());
  rhs(16) = 1.0;
  const Eigen::VectorXd G = A.lu().solve(rhs);
  double near = 0.0, far = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const int dist = std::abs(int(i) - 16);
    if (dist <= 2) near = std::max(near, std::abs(G(i)));
    if (dist >= 8) far = std::max(far, std::abs(G(i)));
  }
  CHECK(far >= 0.1 * near);
}

TEST_CASE("decay profile needs dynamic range") {
  MomentEstimate e;
  e.s = 0.5;
  e.z = 0.9;
  e.dim = 1;
  e.half_side = 4;
  e.x0 = 4;
  e.n = 100;
  e.per_site.assign(9, {0.0, 1e-3, 0.0});  // all bins below the noise floor
  e.per_site[4] = {1.0, 1e-3, 1.0};
  CHECK_THROWS_AS(decay_profile(e), numerical_guard_error);
}

TEST_CASE("estimator preconditions") {
  const auto kernel = HoppingKernel::laplacian(1);
  auto cfg = panel(0.9);
  cfg.n_realizations = 50;
  CHECK_THROWS_AS(estimate_moments(cfg, kernel), std::invalid_argument);
  cfg = panel(1.0);  // z = Omega
  CHECK_THROWS_AS(estimate_moments(cfg, kernel), numerical_guard_error);
  cfg = panel(0.9, 1.0);
  CHECK_THROWS_AS(estimate_moments(cfg, kernel), std::invalid_argument);
}
