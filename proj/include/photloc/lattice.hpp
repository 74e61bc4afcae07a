#pragma once

// Finite boxes Lambda_L = [-L,L]^d in Z^d with a fixed lexicographic site
// enumeration. The enumeration order defines the row/column layout of every
// matrix built downstream, so it must never change.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace photloc {

using Site = std::vector<int>;

// Thrown when an operation's numerical guard trips (resonance window,
// singular solve, excessive Monte Carlo rejections, quadrature noise, ...).
// Input/validation problems use std::invalid_argument instead.
struct numerical_guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LatticeBox {
 public:
  static constexpr std::size_t kMaxSites = 1u << 22;

  LatticeBox(int dim, int half_side) : d_(dim), L_(half_side) {
    if (dim < 1) throw std::invalid_argument("LatticeBox: dimension must be >= 1");
    if (half_side < 0) throw std::invalid_argument("LatticeBox: half-side must be >= 0");
    const std::size_t side = 2 * static_cast<std::size_t>(half_side) + 1;
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) {
      if (n > kMaxSites / side)
        throw std::invalid_argument("LatticeBox: (2L+1)^d exceeds the configured maximum");
      n *= side;
    }
    sites_.reserve(n);
    Site s(dim, -half_side);
    while (true) {
      sites_.push_back(s);
      int k = dim - 1;
      while (k >= 0 && s[k] == half_side) s[k--] = -half_side;
      if (k < 0) break;
      ++s[k];
    }
  }

  int dim() const { return d_; }
  int half_side() const { return L_; }
  std::size_t size() const { return sites_.size(); }
  const Site& site_at(std::size_t i) const { return sites_.at(i); }
  const std::vector<Site>& sites() const { return sites_; }

  bool contains(const Site& x) const {
    if (static_cast<int>(x.size()) != d_) return false;
    for (int c : x)
      if (c < -L_ || c > L_) return false;
    return true;
  }

  // Lexicographic rank; first coordinate most significant.
  std::size_t index_of(const Site& x) const {
    if (!contains(x))
      throw std::invalid_argument("LatticeBox::index_of: site outside box");
    const std::size_t side = 2 * static_cast<std::size_t>(L_) + 1;
    std::size_t idx = 0;
    for (int i = 0; i < d_; ++i) idx = idx * side + static_cast<std::size_t>(x[i] + L_);
    return idx;
  }

 private:
  int d_;
  int L_;
  std::vector<Site> sites_;
};

inline LatticeBox enumerate_box(int dim, int half_side) { return LatticeBox(dim, half_side); }

inline int l1_distance(const Site& a, const Site& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l1_distance: dimension mismatch");
  int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace photloc
