#pragma once

// Finite-volume one-excitation Hamiltonian
//
//   H_Lambda = [ T_Lambda      g sqrt(rho) ]
//              [ g sqrt(rho)   Omega I     ]
//
// in the ordered basis (photon at each site, then atom at each site), and
// the reduced energy-dependent operator
//
//   K_Lambda(E) = T_Lambda + g^2/(E - Omega) rho_Lambda,
//
// which shares eigenvalues with H_Lambda away from Omega. K diverges at the
// resonance, so every reduced-operator evaluation excludes a small window
// |E - Omega| < eps_res.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "photloc/disorder.hpp"
#include "photloc/hopping.hpp"
#include "photloc/lattice.hpp"

namespace photloc {

inline double resonance_window(double g, double rho0) {
  return 1e-8 * std::max(1.0, g * g * rho0);
}

inline Eigen::MatrixXd hopping_matrix(const LatticeBox& box, const HoppingKernel& kernel) {
  if (kernel.dim() != box.dim())
    throw std::invalid_argument("hopping_matrix: kernel/box dimension mismatch");
  const std::size_t n = box.size();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  // plain truncation pi_Lambda T pi_Lambda^dagger: keep entries with both
  // endpoints inside the box
  for (std::size_t i = 0; i < n; ++i) {
    const Site& x = box.site_at(i);
    for (const auto& [dx, v] : kernel.support()) {
      if (v == 0.0) continue;
      Site y(x);
      for (int c = 0; c < box.dim(); ++c) y[c] += dx[c];
      if (!box.contains(y)) continue;
      T(i, box.index_of(y)) = v;
    }
  }
  return T;
}

struct ExcitonHamiltonian {
  LatticeBox box;
  HoppingKernel kernel;
  DisorderField field;
  double g = 0.0;
  double omega = 0.0;
  Eigen::MatrixXd matrix;  // 2N x 2N, exactly symmetric

  std::size_t sites() const { return box.size(); }
  double eps_res() const { return resonance_window(g, field.rho0()); }
  // a.s. bound on the coupling block norm
  double coupling_bound() const { return g * std::sqrt(2.0 * field.rho0()); }
};

inline ExcitonHamiltonian assemble_H(const LatticeBox& box, const HoppingKernel& kernel,
                                     const DisorderField& field, double g, double omega) {
  if (!(g > 0.0)) throw std::invalid_argument("assemble_H: g must be positive");
  if (!(omega > 0.0)) throw std::invalid_argument("assemble_H: omega must be positive");
  if (field.size() != box.size())
    throw std::invalid_argument("assemble_H: field/box size mismatch");
  const std::size_t n = box.size();
  ExcitonHamiltonian H{box, kernel, field, g, omega, Eigen::MatrixXd::Zero(2 * n, 2 * n)};
  H.matrix.topLeftCorner(n, n) = hopping_matrix(box, kernel);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = g * std::sqrt(field.at(i));
    H.matrix(i, n + i) = c;
    H.matrix(n + i, i) = c;
    H.matrix(n + i, n + i) = omega;
  }
  return H;
}

struct ReducedOperator {
  double energy = 0.0;
  Eigen::MatrixXd matrix;  // N x N symmetric
};

inline ReducedOperator assemble_K(const ExcitonHamiltonian& H, double E) {
  if (std::abs(E - H.omega) < H.eps_res())
    throw numerical_guard_error("assemble_K: E inside the resonance window around Omega");
  const std::size_t n = H.sites();
  ReducedOperator K{E, H.matrix.topLeftCorner(n, n)};
  const double c = H.g * H.g / (E - H.omega);
  for (std::size_t i = 0; i < n; ++i) K.matrix(i, i) += c * H.field.at(i);
  return K;
}

// K with the density at one site replaced by rho_hat (rank-one diagonal
// modification).
inline ReducedOperator assemble_K_hat(const ExcitonHamiltonian& H, double E,
                                      std::size_t site_index, double rho_hat) {
  if (!(rho_hat >= 0.0 && rho_hat <= 2.0 * H.field.rho0()))
    throw std::invalid_argument("assemble_K_hat: rho_hat outside [0, 2 rho0]");
  ReducedOperator K = assemble_K(H, E);
  const double c = H.g * H.g / (E - H.omega);
  K.matrix(site_index, site_index) += c * (rho_hat - H.field.at(site_index));
  return K;
}

inline ReducedOperator assemble_K_hat(const ExcitonHamiltonian& H, double E,
                                      const Site& x, double rho_hat) {
  return assemble_K_hat(H, E, H.box.index_of(x), rho_hat);
}

}  // namespace photloc
