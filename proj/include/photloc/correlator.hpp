#pragma once

// Weighted eigenfunction correlators and dynamics probes.
//
//   W(E)   = min{ (|E-Omega|/g^2 rho0)^eps, chi_I(E) },
//            I = (Omega - g^2 rho0/lambda(T), Omega + g^2 rho0/lambda(T))
//   W_g(E) = W(E) (1 + g^2 rho0 / (E-Omega)^2)
//
//   Q_Lambda(y,x;W)      = sum_E W(E)  || pi_y P({E}) pi_x^dagger ||
//   Qtilde(y,x;W)        = sum_E W_g(E) |phi_E(y,x)|
//   Qtilde(y,x;W,s)      = sum_E W_g(E) |phi_E(y,x)|^s |phi_E(x,x)|^{1-s}
//
// plus spectral time evolution, the dynamical-localization probe
// sum_y sup_t ||pi_y P(I) e^{-itH} pi_x^dagger||^2 over a finite time grid
// (a lower bound to the true sup), and the finite-horizon RAGE time average.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "photloc/greens.hpp"
#include "photloc/parallel.hpp"
#include "photloc/spectral.hpp"
#include "photloc/stats.hpp"

namespace photloc {

struct WeightSpec {
  double omega = 0.0;
  double g2rho0 = 0.0;
  double epsilon = 0.5;
  double interval_radius = 0.0;  // g^2 rho0 / lambda(T)

  static WeightSpec make(double omega, double g2rho0, double epsilon, double lambdaT) {
    if (!(g2rho0 > 0.0)) throw std::invalid_argument("WeightSpec: g^2 rho0 must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("WeightSpec: epsilon must be positive");
    if (!(lambdaT > 0.0)) throw std::invalid_argument("WeightSpec: lambda(T) must be positive");
    return {omega, g2rho0, epsilon, g2rho0 / lambdaT};
  }

  bool inside(double E) const { return std::abs(E - omega) < interval_radius; }
};

inline double weight(double E, const WeightSpec& w) {
  const double d = std::abs(E - w.omega);
  if (d >= w.interval_radius) return 0.0;
  return std::min(std::pow(d / w.g2rho0, w.epsilon), 1.0);
}

inline double weight_g(double E, const WeightSpec& w) {
  const double W = weight(E, w);
  if (W == 0.0) return 0.0;
  const double d = E - w.omega;
  return W * (1.0 + w.g2rho0 / (d * d));
}

namespace detail {

inline double spectral_norm_2x2(const Eigen::Matrix2d& M) {
  // largest singular value of a real 2x2
  const double a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  const double f = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(f * f - 4.0 * det * det, 0.0));
  return std::sqrt(0.5 * (f + disc));
}

inline double spectral_norm_sq_2x2c(const Eigen::Matrix2cd& M) {
  const double p = std::norm(M(0, 0)) + std::norm(M(1, 0));
  const double q = std::norm(M(0, 1)) + std::norm(M(1, 1));
  const std::complex<double> r =
      std::conj(M(0, 0)) * M(0, 1) + std::conj(M(1, 0)) * M(1, 1);
  const double disc = std::sqrt(std::max(0.25 * (p - q) * (p - q) + std::norm(r), 0.0));
  return 0.5 * (p + q) + disc;
}

}  // namespace detail

inline double correlator_Q(const SpectralData& S, const ExcitonHamiltonian& H,
                           const WeightSpec& w, std::size_t y, std::size_t x) {
  const std::size_t n = H.sites();
  double q = 0.0;
  for (std::size_t c = 0; c < S.clusters.size(); ++c) {
    const double E = S.cluster_energy(c);
    const double W = weight(E, w);
    if (W == 0.0) continue;
    q += W * detail::spectral_norm_2x2(projector_block(S, c, y, x, n).block);
  }
  return q;
}

inline double correlator_Qtilde(const SpectralData& S, const ExcitonHamiltonian& H,
                                const WeightSpec& w, std::size_t y, std::size_t x) {
  double q = 0.0;
  for (std::size_t c = 0; c < S.clusters.size(); ++c) {
    const double E = S.cluster_energy(c);
    const double Wg = weight_g(E, w);
    if (Wg == 0.0) continue;
    q += Wg * std::abs(phi_E(S, c, y, x));
  }
  return q;
}

inline double correlator_Qtilde_s(const SpectralData& S, const ExcitonHamiltonian& H,
                                  const WeightSpec& w, double s, std::size_t y,
                                  std::size_t x) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("correlator_Qtilde_s: s must lie in (0,1)");
  double q = 0.0;
  for (std::size_t c = 0; c < S.clusters.size(); ++c) {
    const double E = S.cluster_energy(c);
    const double Wg = weight_g(E, w);
    if (Wg == 0.0) continue;
    const double pyx = std::abs(phi_E(S, c, y, x));
    const double pxx = std::abs(phi_E(S, c, x, x));
    q += Wg * std::pow(pyx, s) * std::pow(pxx, 1.0 - s);
  }
  return q;
}

struct CorrelatorTable {
  std::size_t x0 = 0;
  double s = 0.0;
  std::vector<double> Q, Qt, Qts;  // by site index y
};

inline CorrelatorTable build_correlator_table(const SpectralData& S,
                                              const ExcitonHamiltonian& H,
                                              const WeightSpec& w, std::size_t x0,
                                              double s) {
  const std::size_t n = H.sites();
  CorrelatorTable t;
  t.x0 = x0;
  t.s = s;
  t.Q.assign(n, 0.0);
  t.Qt.assign(n, 0.0);
  t.Qts.assign(n, 0.0);
  for (std::size_t c = 0; c < S.clusters.size(); ++c) {
    const double E = S.cluster_energy(c);
    const double W = weight(E, w);
    if (W == 0.0) continue;
    const double Wg = weight_g(E, w);
    // Z = P_c pi_{x0}^dagger as a (2N x 2) slab computed once per cluster
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2 * n, 2);
    for (int j : S.clusters[c]) {
      const auto v = S.eigenvectors.col(j);
      Z.col(0) += v * v(x0);
      Z.col(1) += v * v(n + x0);
    }
    const double pxx = std::abs(Z(x0, 0));
    for (std::size_t y = 0; y < n; ++y) {
      Eigen::Matrix2d B;
      B << Z(y, 0), Z(y, 1), Z(n + y, 0), Z(n + y, 1);
      t.Q[y] += W * detail::spectral_norm_2x2(B);
      const double pyx = std::abs(Z(y, 0));
      t.Qt[y] += Wg * pyx;
      t.Qts[y] += Wg * std::pow(pyx, s) * std::pow(pxx, 1.0 - s);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// disorder-averaged correlator vs Green's-function bound:
//   E[Q_Lambda(y,x;W)] <= Int_I E[|G(y,x,E)|^s] |(E-Omega)/(2 g^2 rho0)|^{1-s} W_g(E) dE
// LHS and RHS use the same realizations (matching seeds); the energy
// integral is a trapezoid on I with the resonance window excised, and the
// difference against a coarser grid is reported as the quadrature error.
// ---------------------------------------------------------------------------

struct CorrGreenConfig {
  int dim = 1;
  int half_side = 12;
  double g = 1.0;
  double omega = 1.0;
  double rho0 = 1.0;
  double epsilon = 0.5;
  double s = 0.5;
  double lambdaT = 0.0;
  int n_realizations = 2000;
  int energy_points = 40;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (y, x0) site indices
};

struct CorrGreenRow {
  std::size_t y = 0, x = 0;
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  double quad_err = 0.0;
  double excised = 0.0;
  bool pass = false;
};

namespace detail {

inline std::vector<double> trapezoid_nodes(double lo, double hi, int interior) {
  std::vector<double> nodes(interior + 2);
  const double h = (hi - lo) / (interior + 1);
  for (int k = 0; k < interior + 2; ++k) nodes[k] = lo + h * k;
  return nodes;
}

}  // namespace detail

inline std::vector<CorrGreenRow> correlator_green_bound_check(
    const CorrGreenConfig& cfg, const HoppingKernel& kernel) {
  if (cfg.pairs.empty())
    throw std::invalid_argument("correlator_green_bound_check: no site pairs");
  const WeightSpec w =
      WeightSpec::make(cfg.omega, cfg.g * cfg.g * cfg.rho0, cfg.epsilon, 1.0);
  // interval_radius must come from lambda(T) supplied by the caller
  WeightSpec ws = w;
  if (!(cfg.lambdaT > 0.0))
    throw std::invalid_argument("correlator_green_bound_check: lambdaT required");
  ws.interval_radius = w.g2rho0 / cfg.lambdaT;

  const LatticeBox box(cfg.dim, cfg.half_side);
  const std::size_t n = box.size();
  const double eps_res = resonance_window(cfg.g, cfg.rho0);
  const double lo = cfg.omega - ws.interval_radius, hi = cfg.omega + ws.interval_radius;
  const auto nodes_f = detail::trapezoid_nodes(lo, hi, cfg.energy_points);
  const auto nodes_c = detail::trapezoid_nodes(lo, hi, cfg.energy_points / 2);
  std::vector<double> nodes(nodes_f);
  nodes.insert(nodes.end(), nodes_c.begin(), nodes_c.end());

  const std::size_t np = cfg.pairs.size();
  const std::size_t x0 = cfg.pairs[0].second;
  for (const auto& [y, x] : cfg.pairs)
    if (x != x0)
      throw std::invalid_argument("correlator_green_bound_check: pairs must share x0");

  const int N = cfg.n_realizations;
  // per-realization slabs: Q values per pair, |G|^s per (node, pair)
  std::vector<std::vector<double>> qv(np, std::vector<double>(N));
  std::vector<std::vector<std::vector<double>>> gv(
      nodes.size(), std::vector<std::vector<double>>(np, std::vector<double>(N)));
  parallel_for(N, cfg.threads, [&](std::size_t r) {
    const DisorderField field = DisorderField::sample(box, cfg.rho0, cfg.master_seed, r);
    const ExcitonHamiltonian H = assemble_H(box, kernel, field, cfg.g, cfg.omega);
    const SpectralData S = diagonalize(H);
    for (std::size_t p = 0; p < np; ++p)
      qv[p][r] = correlator_Q(S, H, ws, cfg.pairs[p].first, cfg.pairs[p].second);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double E = nodes[k];
      if (std::abs(E - cfg.omega) < eps_res || E <= lo || E >= hi) {
        for (std::size_t p = 0; p < np; ++p) gv[k][p][r] = 0.0;
        continue;
      }
      const GreensSample gs = greens_via_K(H, E, x0);
      for (std::size_t p = 0; p < np; ++p)
        gv[k][p][r] = std::pow(std::abs(gs.values(cfg.pairs[p].first)), cfg.s);
    }
  });

  auto integrate = [&](std::span<const double> nd, std::size_t offset, std::size_t p,
                       double* se_out, double* excised_out) {
    const double h = nd[1] - nd[0];
    double acc = 0.0, se2 = 0.0, excised = 0.0;
    double prev_f = 0.0;
    for (std::size_t k = 0; k < nd.size(); ++k) {
      const double E = nd[k];
      const double wgt = (k == 0 || k + 1 == nd.size()) ? 0.5 * h : h;
      if (E <= lo || E >= hi) continue;  // W vanishes at the endpoints
      const double fac = std::pow(std::abs((E - cfg.omega) / (2.0 * ws.g2rho0)),
                                  1.0 - cfg.s) *
                         weight_g(E, ws);
      if (std::abs(E - cfg.omega) < eps_res) {
        excised += wgt * prev_f;  // estimate for the skipped window
        continue;
      }
      const MeanSe ms = mean_se(gv[offset + k][p]);
      acc += wgt * ms.mean * fac;
      se2 += wgt * wgt * fac * fac * ms.se * ms.se;
      prev_f = ms.mean * fac;
    }
    if (se_out) *se_out = std::sqrt(se2);
    if (excised_out) *excised_out = excised;
    return acc;
  };

  std::vector<CorrGreenRow> rows;
  for (std::size_t p = 0; p < np; ++p) {
    CorrGreenRow row;
    row.y = cfg.pairs[p].first;
    row.x = cfg.pairs[p].second;
    const MeanSe lm = mean_se(qv[p]);
    row.lhs = lm.mean;
    row.lhs_se = lm.se;
    double se = 0.0, exc = 0.0;
    row.rhs = integrate(std::span(nodes_f), 0, p, &se, &exc);
    row.rhs_se = se;
    row.excised = exc;
    const double coarse = integrate(std::span(nodes_c), nodes_f.size(), p, nullptr, nullptr);
    row.quad_err = std::abs(row.rhs - coarse);
    row.pass = row.lhs <= row.rhs + 3.0 * (row.lhs_se + row.rhs_se) + row.quad_err + row.excised;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

struct TimeGrid {
  double dt = 0.1;
  int steps = 10000;  // grid is t = 0, dt, ..., steps*dt
};

// dt = dt_factor / spectral radius, horizon T_max; the sup over this grid is
// reported as a lower bound to the true sup.
inline TimeGrid make_time_grid(const SpectralData& S, double dt_factor = 0.1,
                               double t_max = 1e3) {
  const double scale = std::max(S.spectral_radius(), 1e-12);
  TimeGrid g;
  g.dt = dt_factor / scale;
  g.steps = static_cast<int>(std::ceil(t_max / g.dt));
  return g;
}

// e^{-itH} pi_{x0}^dagger as a (2N x 2) complex slab
inline Eigen::MatrixXcd evolve(const SpectralData& S, std::size_t x0, double t,
                               std::size_t n_sites) {
  const Eigen::Index m = S.eigenvalues.size();
  Eigen::MatrixXcd phase(m, 2);
  for (Eigen::Index j = 0; j < m; ++j) {
    const std::complex<double> e =
        std::exp(std::complex<double>(0.0, -t * S.eigenvalues(j)));
    phase(j, 0) = e * S.eigenvectors(x0, j);
    phase(j, 1) = e * S.eigenvectors(n_sites + x0, j);
  }
  return S.eigenvectors * phase;
}

struct DynamicsProbe {
  std::vector<double> per_site;  // sup over grid of || pi_y P(I) e^{-itH} pi_x^dagger ||^2
  double total = 0.0;
  int modes_in_window = 0;
};

inline DynamicsProbe dyn_loc_sum(const SpectralData& S, double E_lo, double E_hi,
                                 std::size_t x0, const TimeGrid& grid,
                                 std::size_t n_sites) {
  std::vector<int> sel;
  for (Eigen::Index j = 0; j < S.eigenvalues.size(); ++j)
    if (S.eigenvalues(j) > E_lo && S.eigenvalues(j) < E_hi) sel.push_back(static_cast<int>(j));
  DynamicsProbe probe;
  probe.per_site.assign(n_sites, 0.0);
  probe.modes_in_window = static_cast<int>(sel.size());
  if (sel.empty()) return probe;
  const Eigen::Index m = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXd V(2 * n_sites, m);
  Eigen::VectorXd lam(m);
  Eigen::MatrixXd C(m, 2);
  for (Eigen::Index j = 0; j < m; ++j) {
    V.col(j) = S.eigenvectors.col(sel[j]);
    lam(j) = S.eigenvalues(sel[j]);
    C(j, 0) = S.eigenvectors(x0, sel[j]);
    C(j, 1) = S.eigenvectors(n_sites + x0, sel[j]);
  }
  Eigen::MatrixXcd ph(m, 2);
  for (int step = 0; step <= grid.steps; ++step) {
    const double t = grid.dt * step;
    for (Eigen::Index j = 0; j < m; ++j) {
      const std::complex<double> e = std::exp(std::complex<double>(0.0, -t * lam(j)));
      ph(j, 0) = e * C(j, 0);
      ph(j, 1) = e * C(j, 1);
    }
    const Eigen::MatrixXcd A = V * ph;  // (2N x 2)
    for (std::size_t y = 0; y < n_sites; ++y) {
      Eigen::Matrix2cd B;
      B << A(y, 0), A(y, 1), A(n_sites + y, 0), A(n_sites + y, 1);
      const double v = detail::spectral_norm_sq_2x2c(B);
      if (v > probe.per_site[y]) probe.per_site[y] = v;
    }
  }
  probe.total = pairwise_sum(probe.per_site);
  return probe;
}

// (1/T) Int_0^T || chi_{outside inner box} e^{-itH} P(K) psi ||^2 dt, with the
// time integral done analytically: same-cluster terms persist, cross terms
// pick up sin(D T)/(D T).
inline double rage_time_average(const SpectralData& S, const LatticeBox& box,
                                double K_lo, double K_hi, const Eigen::VectorXd& psi,
                                int L_inner, double T) {
  const std::size_t n = box.size();
  if (psi.size() != static_cast<Eigen::Index>(2 * n))
    throw std::invalid_argument("rage_time_average: psi has wrong dimension");
  if (L_inner >= box.half_side())
    throw std::invalid_argument("rage_time_average: inner box must be strictly inside");
  std::vector<int> sel;
  std::vector<int> cluster_of(S.eigenvalues.size(), -1);
  for (std::size_t c = 0; c < S.clusters.size(); ++c)
    for (int j : S.clusters[c]) cluster_of[j] = static_cast<int>(c);
  for (Eigen::Index j = 0; j < S.eigenvalues.size(); ++j)
    if (S.eigenvalues(j) > K_lo && S.eigenvalues(j) < K_hi) sel.push_back(static_cast<int>(j));
  if (sel.empty()) return 0.0;

  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < n; ++i) {
    const Site& x = box.site_at(i);
    bool in = true;
    for (int c : x) in = in && std::abs(c) <= L_inner;
    if (!in) {
      outside.push_back(i);      // photon component
      outside.push_back(n + i);  // atom component
    }
  }

  const Eigen::Index m = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXd Vout(outside.size(), m);
  Eigen::VectorXd coef(m), lam(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    coef(j) = S.eigenvectors.col(sel[j]).dot(psi);
    lam(j) = S.eigenvalues(sel[j]);
    for (std::size_t r = 0; r < outside.size(); ++r)
      Vout(r, j) = S.eigenvectors(outside[r], sel[j]);
  }
  const Eigen::MatrixXd overlap = Vout.transpose() * Vout;  // <chi v_j, chi v_k>
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      double f = 1.0;
      if (cluster_of[sel[j]] != cluster_of[sel[k]]) {
        const double d = (lam(j) - lam(k)) * T;
        f = std::sin(d) / d;
      }
      acc += coef(j) * coef(k) * overlap(j, k) * f;
    }
  }
  return acc;
}

// T -> infinity limit of the average: sum over clusters of
// || chi P_c P(K) psi ||^2
inline double rage_infinite_horizon(const SpectralData& S, const LatticeBox& box,
                                    double K_lo, double K_hi,
                                    const Eigen::VectorXd& psi, int L_inner) {
  const std::size_t n = box.size();
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < n; ++i) {
    const Site& x = box.site_at(i);
    bool in = true;
    for (int c : x) in = in && std::abs(c) <= L_inner;
    if (!in) {
      outside.push_back(i);
      outside.push_back(n + i);
    }
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < S.clusters.size(); ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
    bool any = false;
    for (int j : S.clusters[c]) {
      if (!(S.eigenvalues(j) > K_lo && S.eigenvalues(j) < K_hi)) continue;
      v += S.eigenvectors.col(j) * S.eigenvectors.col(j).dot(psi);
      any = true;
    }
    if (!any) continue;
    double out = 0.0;
    for (std::size_t r : outside) out += v(r) * v(r);
    acc += out;
  }
  return acc;
}

}  // namespace photloc
