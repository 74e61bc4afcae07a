#pragma once

// Dense symmetric eigendecomposition with verified residuals, degeneracy
// clustering, and the eigenprojection machinery: 2x2 site blocks
// pi_y P({E}) pi_x^dagger, the photon amplitudes phi_E(y,x), their
// normalization identity, and the spectrum envelope check.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "photloc/hamiltonian.hpp"

namespace photloc {

struct SpectralData {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  std::vector<std::vector<int>> clusters;

  double spectral_radius() const {
    return eigenvalues.size() == 0
               ? 0.0
               : std::max(std::abs(eigenvalues(0)),
                          std::abs(eigenvalues(eigenvalues.size() - 1)));
  }

  double cluster_energy(std::size_t c) const {
    double s = 0.0;
    for (int j : clusters.at(c)) s += eigenvalues(j);
    return s / static_cast<double>(clusters[c].size());
  }
};

namespace detail {

inline std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXd& ev,
                                                         double rel_tol = 1e-9) {
  std::vector<std::vector<int>> out;
  const Eigen::Index n = ev.size();
  if (n == 0) return out;
  const double diam = ev(n - 1) - ev(0);
  const double tol = rel_tol * diam;
  out.push_back({0});
  for (Eigen::Index i = 1; i < n; ++i) {
    if (ev(i) - ev(i - 1) <= tol)
      out.back().push_back(static_cast<int>(i));
    else
      out.push_back({static_cast<int>(i)});
  }
  return out;
}

}  // namespace detail

inline SpectralData diagonalize_matrix(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw numerical_guard_error("diagonalize: eigensolver did not converge");
  SpectralData S;
  S.eigenvalues = es.eigenvalues();
  S.eigenvectors = es.eigenvectors();
  S.clusters = detail::cluster_eigenvalues(S.eigenvalues);
  // verify the decomposition before anything downstream consumes it
  const double scale = std::max(S.spectral_radius(), 1e-300);
  const double res =
      (M * S.eigenvectors - S.eigenvectors * S.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
  if (res > 1e-10 * scale)
    throw numerical_guard_error("diagonalize: eigenpair residual too large");
  const Eigen::MatrixXd gram =
      S.eigenvectors.transpose() * S.eigenvectors -
      Eigen::MatrixXd::Identity(M.rows(), M.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-10)
    throw numerical_guard_error("diagonalize: eigenvectors not orthonormal");
  return S;
}

inline SpectralData diagonalize(const ExcitonHamiltonian& H) {
  return diagonalize_matrix(H.matrix);
}

struct ProjectorBlock {
  double energy = 0.0;
  Eigen::Matrix2d block;  // pi_y P({E}) pi_x^dagger
  double phi = 0.0;       // <e_{1,y}, P({E}) e_{1,x}>
};

// Component layout of the eigenvector columns: rows [0,N) photon, [N,2N) atom.
inline ProjectorBlock projector_block(const SpectralData& S, std::size_t cluster,
                                      std::size_t y, std::size_t x, std::size_t n_sites) {
  ProjectorBlock out;
  out.energy = S.cluster_energy(cluster);
  out.block.setZero();
  for (int j : S.clusters.at(cluster)) {
    const auto v = S.eigenvectors.col(j);
    const double vy[2] = {v(y), v(n_sites + y)};
    const double vx[2] = {v(x), v(n_sites + x)};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out.block(a, b) += vy[a] * vx[b];
  }
  out.phi = out.block(0, 0);
  return out;
}

inline double phi_E(const SpectralData& S, std::size_t cluster, std::size_t y,
                    std::size_t x) {
  double s = 0.0;
  for (int j : S.clusters.at(cluster)) s += S.eigenvectors(y, j) * S.eigenvectors(x, j);
  return s;
}

// Max entrywise deviation of the block from the rank-one structure
//   [[1, a_x], [a_y, a_y a_x]] * phi_E(y,x),  a_u = g sqrt(rho(u))/(E-Omega).
inline double projector_structure_residual(const SpectralData& S,
                                           const ExcitonHamiltonian& H,
                                           std::size_t cluster, std::size_t y,
                                           std::size_t x) {
  const std::size_t n = H.sites();
  const ProjectorBlock pb = projector_block(S, cluster, y, x, n);
  const double E = pb.energy;
  const double ay = H.g * std::sqrt(H.field.at(y)) / (E - H.omega);
  const double ax = H.g * std::sqrt(H.field.at(x)) / (E - H.omega);
  Eigen::Matrix2d ref;
  ref << 1.0, ax, ay, ay * ax;
  ref *= pb.phi;
  return (pb.block - ref).cwiseAbs().maxCoeff();
}

// | sum_y (1 + g^2 rho(y)/(E-Omega)^2) phi_E(y,x)^2  -  phi_E(x,x) |
inline double normalization_identity_residual(const SpectralData& S,
                                              const ExcitonHamiltonian& H,
                                              std::size_t cluster, std::size_t x) {
  const std::size_t n = H.sites();
  const double E = S.cluster_energy(cluster);
  if (std::abs(E - H.omega) < H.eps_res())
    throw numerical_guard_error("normalization identity: cluster inside resonance window");
  double lhs = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    const double p = phi_E(S, cluster, y, x);
    const double w = 1.0 + H.g * H.g * H.field.at(y) / ((E - H.omega) * (E - H.omega));
    lhs += w * p * p;
  }
  return std::abs(lhs - phi_E(S, cluster, x, x));
}

// Every eigenvalue must lie in
//   [-B - c, B + c] U [Omega - c, Omega + c],
// B = row-sum bound on ||T||, c = g sqrt(2 rho0). Deterministic since
// rho <= 2 rho0 for every realization.
inline bool spectrum_envelope_check(const SpectralData& S, const ExcitonHamiltonian& H) {
  const double B = H.kernel.row_abs_sum();
  const double c = H.coupling_bound();
  const double slack = 1e-10 * std::max(1.0, S.spectral_radius());
  for (Eigen::Index i = 0; i < S.eigenvalues.size(); ++i) {
    const double E = S.eigenvalues(i);
    const bool in_main = E >= -B - c - slack && E <= B + c + slack;
    const bool in_atom = E >= H.omega - c - slack && E <= H.omega + c + slack;
    if (!in_main && !in_atom) return false;
  }
  return true;
}

}  // namespace photloc
