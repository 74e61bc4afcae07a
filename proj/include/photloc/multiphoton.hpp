#pragma once

// Bosonic n-excitation Hamiltonians as tensor sums
//   H_n = sum_k I x ... x H x ... x I
// on the full tensor product (no symmetrization), the Minkowski-sum
// spectrum check, and the explicit species-major two-excitation layout.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "photloc/hamiltonian.hpp"
#include "photloc/spectral.hpp"

namespace photloc {

constexpr std::size_t kTensorBudget = 4096;  // max total dimension

struct TensorSumHamiltonian {
  int n = 0;
  Eigen::MatrixXd matrix;  // (2N)^n x (2N)^n
};

namespace detail {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

}  // namespace detail

inline TensorSumHamiltonian build_tensor_sum(const ExcitonHamiltonian& H, int n) {
  if (n < 2) throw std::invalid_argument("build_tensor_sum: n must be >= 2");
  const std::size_t d1 = static_cast<std::size_t>(H.matrix.rows());
  std::size_t dim = 1;
  for (int k = 0; k < n; ++k) {
    if (dim > kTensorBudget / d1)
      throw std::invalid_argument("build_tensor_sum: (2N)^n exceeds the memory budget");
    dim *= d1;
  }
  TensorSumHamiltonian out;
  out.n = n;
  out.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd term = (k == 0) ? H.matrix : Eigen::MatrixXd::Identity(d1, d1);
    for (int j = 1; j < n; ++j)
      term = detail::kron(term, (j == k) ? H.matrix
                                         : Eigen::MatrixXd::Identity(d1, d1));
    out.matrix += term;
  }
  return out;
}

// max |sorted eigenvalues of H_n - sorted multiset of n-fold eigenvalue sums|
inline double minkowski_check(const ExcitonHamiltonian& H, int n) {
  const TensorSumHamiltonian Hn = build_tensor_sum(H, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> big(Hn.matrix);
  if (big.info() != Eigen::Success)
    throw numerical_guard_error("minkowski_check: eigensolver failure");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> base(H.matrix);
  if (base.info() != Eigen::Success)
    throw numerical_guard_error("minkowski_check: eigensolver failure");
  std::vector<double> sums{0.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(sums.size() * base.eigenvalues().size());
    for (double s : sums)
      for (Eigen::Index j = 0; j < base.eigenvalues().size(); ++j)
        next.push_back(s + base.eigenvalues()(j));
    sums.swap(next);
  }
  std::sort(sums.begin(), sums.end());
  double dev = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i)
    dev = std::max(dev, std::abs(sums[i] - big.eigenvalues()(static_cast<Eigen::Index>(i))));
  return dev;
}

// Two-excitation matrix assembled directly in the species-major basis
// (photon-photon, atom_x-photon, photon-atom_y, atom-atom blocks):
//   [ Tx+Ty          g sqrt(rho)_x   g sqrt(rho)_y   0             ]
//   [ g sqrt(rho)_x  Ty + Omega      0               g sqrt(rho)_y ]
//   [ g sqrt(rho)_y  0               Tx + Omega      g sqrt(rho)_x ]
//   [ 0              g sqrt(rho)_y   g sqrt(rho)_x   2 Omega       ]
// with Tx = T (x) I, Ty = I (x) T, sqrt(rho)_x = diag (x) I, etc.
inline Eigen::MatrixXd two_excitation_reference(const ExcitonHamiltonian& H) {
  const std::size_t n = H.sites();
  const Eigen::MatrixXd T = H.matrix.topLeftCorner(n, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) R(i, i) = H.g * std::sqrt(H.field.at(i));
  const Eigen::MatrixXd Tx = detail::kron(T, I);
  const Eigen::MatrixXd Ty = detail::kron(I, T);
  const Eigen::MatrixXd Rx = detail::kron(R, I);
  const Eigen::MatrixXd Ry = detail::kron(I, R);
  const Eigen::MatrixXd Inn = Eigen::MatrixXd::Identity(n * n, n * n);
  const std::size_t m = n * n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(4 * m, 4 * m);
  out.block(0, 0, m, m) = Tx + Ty;
  out.block(0, m, m, m) = Rx;
  out.block(0, 2 * m, m, m) = Ry;
  out.block(m, 0, m, m) = Rx;
  out.block(m, m, m, m) = Ty + H.omega * Inn;
  out.block(m, 3 * m, m, m) = Ry;
  out.block(2 * m, 0, m, m) = Ry;
  out.block(2 * m, 2 * m, m, m) = Tx + H.omega * Inn;
  out.block(2 * m, 3 * m, m, m) = Rx;
  out.block(3 * m, m, m, m) = Ry;
  out.block(3 * m, 2 * m, m, m) = Rx;
  out.block(3 * m, 3 * m, m, m) = 2.0 * H.omega * Inn;
  return out;
}

// max |P^T H_2 P - reference| where P permutes the Kronecker ordering
// (species*N + site per factor) into the species-major ordering used above.
inline double two_excitation_layout_residual(const ExcitonHamiltonian& H) {
  const TensorSumHamiltonian H2 = build_tensor_sum(H, 2);
  const std::size_t n = H.sites();
  const std::size_t dim = 4 * n * n;
  std::vector<std::size_t> perm(dim);  // species-major index -> kron index
  for (std::size_t sp = 0; sp < 4; ++sp) {
    const std::size_t s1 = sp % 2, s2 = sp / 2;  // (photon,photon),(atom,photon),...
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t species_major = sp * n * n + i * n + j;
        const std::size_t kron_index = (s1 * n + i) * (2 * n) + (s2 * n + j);
        perm[species_major] = kron_index;
      }
  }
  const Eigen::MatrixXd ref = two_excitation_reference(H);
  double dev = 0.0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      dev = std::max(dev, std::abs(H2.matrix(perm[a], perm[b]) - ref(a, b)));
  return dev;
}

}  // namespace photloc
