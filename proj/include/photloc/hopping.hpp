#pragma once

// Translation-invariant hopping kernels T(x,y) = t(y-x) and the derived
// quantities S(s), lambda(T), r_{z,s}.
//
// The half Laplacian is defined through its Fourier symbol
//   h(k) = 4 sum_i sin^2(k_i/2),     t(dx) = (2pi)^-d Int h(k)^(1/2) e^{ik.dx} dk,
// evaluated by the uniform trapezoid rule (the integrand is 2pi-periodic, so
// the rule is an inverse DFT of the sampled symbol). Elements beyond the
// truncation radius are dropped; the neglected tail of S(s) is reported as a
// bound via the |t(dx)| <= c_d/|dx|^{d+1} decay estimate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photloc/lattice.hpp"

namespace photloc {

enum class KernelKind { laplacian, half_laplacian, custom };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::laplacian: return "laplacian";
    case KernelKind::half_laplacian: return "half_laplacian";
    case KernelKind::custom: return "custom";
  }
  return "?";
}

class HoppingKernel {
 public:
  static constexpr double kImagTol = 1e-10;

  static HoppingKernel laplacian(int d) {
    if (d < 1) throw std::invalid_argument("laplacian: dimension must be >= 1");
    HoppingKernel k;
    k.kind_ = KernelKind::laplacian;
    k.d_ = d;
    k.range_ = 1;
    Site z(d, 0);
    k.table_[z] = 2.0 * d;
    for (int i = 0; i < d; ++i) {
      Site e(d, 0);
      e[i] = 1;
      k.table_[e] = -1.0;
      e[i] = -1;
      k.table_[e] = -1.0;
    }
    k.tail_constant_ = 0.0;  // exact finite range
    return k;
  }

  static int default_range(int d) { return d == 1 ? 50 : 20; }

  static HoppingKernel half_laplacian(int d, int range = -1, int quad_points = 4096) {
    if (d < 1 || d > 2)
      throw std::invalid_argument("half_laplacian: implemented for d = 1, 2");
    if (range < 0) range = default_range(d);
    if (range < 1) throw std::invalid_argument("half_laplacian: range must be >= 1");
    if (quad_points < 16)
      throw std::invalid_argument("half_laplacian: quadrature too coarse");
    HoppingKernel k;
    k.kind_ = KernelKind::half_laplacian;
    k.d_ = d;
    k.range_ = range;
    if (d == 1) {
      k.fill_half_laplacian_1d(quad_points);
    } else {
      k.fill_half_laplacian_2d(quad_points);
    }
    k.fit_tail_constant();
    return k;
  }

  // Text table: one entry per line, "dx_1 ... dx_d value"; '#' comments.
  // The table must be exactly symmetric under dx -> -dx.
  static HoppingKernel from_table(std::istream& in, int d) {
    if (d < 1) throw std::invalid_argument("custom kernel: dimension must be >= 1");
    HoppingKernel k;
    k.kind_ = KernelKind::custom;
    k.d_ = d;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      Site dx(d);
      bool any = false;
      for (int i = 0; i < d; ++i) {
        if (!(ls >> dx[i])) {
          if (i == 0 && !any) goto next_line;  // blank line
          throw std::invalid_argument("custom kernel: malformed line: " + line);
        }
        any = true;
      }
      {
        double v;
        if (!(ls >> v)) throw std::invalid_argument("custom kernel: missing value: " + line);
        if (k.table_.count(dx))
          throw std::invalid_argument("custom kernel: duplicate displacement");
        k.table_[dx] = v;
      }
    next_line:;
    }
    if (k.table_.empty()) throw std::invalid_argument("custom kernel: empty table");
    for (const auto& [dx, v] : k.table_) {
      Site m(dx);
      for (int& c : m) c = -c;
      auto it = k.table_.find(m);
      if (it == k.table_.end() || it->second != v)
        throw std::invalid_argument("custom kernel: table is not symmetric under dx -> -dx");
      k.range_ = std::max(k.range_, linf(dx));
    }
    k.fit_tail_constant();
    return k;
  }

  static HoppingKernel from_table_file(const std::string& path, int d) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("custom kernel: cannot open " + path);
    return from_table(in, d);
  }

  KernelKind kind() const { return kind_; }
  int dim() const { return d_; }
  int range() const { return range_; }
  double tail_constant() const { return tail_constant_; }

  double element(const Site& dx) const {
    auto it = table_.find(dx);
    return it == table_.end() ? 0.0 : it->second;
  }

  double diagonal() const { return element(Site(d_, 0)); }

  // (displacement, value) pairs in lexicographic displacement order.
  const std::map<Site, double>& support() const { return table_; }

  // sum_dx |t(dx)| including the diagonal; bounds the operator norm of T.
  double row_abs_sum() const {
    double s = 0.0;
    for (const auto& [dx, v] : table_) s += std::abs(v);
    return s;
  }

 private:
  static int linf(const Site& x) {
    int m = 0;
    for (int c : x) m = std::max(m, std::abs(c));
    return m;
  }

  void fill_half_laplacian_1d(int n) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> sym(n);
    for (int j = 0; j < n; ++j) {
      const double k = two_pi * j / n;
      sym[j] = 2.0 * std::abs(std::sin(0.5 * k));
    }
    for (int dx = 0; dx <= range_; ++dx) {
      double re = 0.0, im = 0.0;
      for (int j = 0; j < n; ++j) {
        const double k = two_pi * j / n;
        re += sym[j] * std::cos(k * dx);
        im += sym[j] * std::sin(k * dx);
      }
      re /= n;
      im /= n;
      if (std::abs(im) > kImagTol)
        throw numerical_guard_error("half_laplacian: quadrature imaginary part " +
                                    std::to_string(im));
      table_[Site{dx}] = re;
      table_[Site{-dx}] = re;
    }
  }

  void fill_half_laplacian_2d(int n) {
    const double two_pi = 2.0 * std::numbers::pi;
    const int R = range_;
    // Stage 1: partial transform over k2 for every k1 row.
    // A[j1][dx2] = sum_j2 sqrt(h(k1,k2)) e^{i k2 dx2}; h is even in k2, so
    // A is real, but we keep the sine part as a quadrature-noise check.
    std::vector<double> cre((R + 1), 0.0), cim((R + 1), 0.0);
    std::vector<std::vector<double>> Are(n, std::vector<double>(R + 1));
    std::vector<std::vector<double>> Aim(n, std::vector<double>(R + 1));
    std::vector<double> c2(n), s2v(n), row(n);
    for (int j2 = 0; j2 < n; ++j2) {
      const double k2 = two_pi * j2 / n;
      c2[j2] = std::cos(k2);
      s2v[j2] = 4.0 * std::sin(0.5 * k2) * std::sin(0.5 * k2);
    }
    for (int j1 = 0; j1 < n; ++j1) {
      const double k1 = two_pi * j1 / n;
      const double h1 = 4.0 * std::sin(0.5 * k1) * std::sin(0.5 * k1);
      for (int j2 = 0; j2 < n; ++j2) row[j2] = std::sqrt(h1 + s2v[j2]);
      for (int dx2 = 0; dx2 <= R; ++dx2) {
        double re = 0.0, im = 0.0;
        for (int j2 = 0; j2 < n; ++j2) {
          const double k2 = two_pi * j2 / n;
          re += row[j2] * std::cos(k2 * dx2);
          im += row[j2] * std::sin(k2 * dx2);
        }
        Are[j1][dx2] = re;
        Aim[j1][dx2] = im;
      }
    }
    // Stage 2: transform over k1.
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (int dx1 = 0; dx1 <= R; ++dx1) {
      for (int dx2 = 0; dx2 <= R; ++dx2) {
        double re = 0.0, im = 0.0;
        for (int j1 = 0; j1 < n; ++j1) {
          const double k1 = two_pi * j1 / n;
          const double c = std::cos(k1 * dx1), s = std::sin(k1 * dx1);
          re += c * Are[j1][dx2] - s * Aim[j1][dx2];
          im += c * Aim[j1][dx2] + s * Are[j1][dx2];
        }
        re *= inv;
        im *= inv;
        if (std::abs(im) > kImagTol)
          throw numerical_guard_error("half_laplacian: quadrature imaginary part " +
                                      std::to_string(im));
        // h(k) is even in each k_i, so the element depends only on |dx_i|.
        for (int s1 : {-1, 1})
          for (int s2 : {-1, 1}) table_[Site{s1 * dx1, s2 * dx2}] = re;
      }
    }
  }

  void fit_tail_constant() {
    double c = 0.0;
    for (const auto& [dx, v] : table_) {
      double r2 = 0.0;
      for (int x : dx) r2 += static_cast<double>(x) * x;
      if (r2 == 0.0) continue;
      c = std::max(c, std::abs(v) * std::pow(std::sqrt(r2), d_ + 1));
    }
    tail_constant_ = c;
  }

  KernelKind kind_ = KernelKind::custom;
  int d_ = 1;
  int range_ = 0;
  double tail_constant_ = 0.0;
  std::map<Site, double> table_;
};

struct SummabilityReport {
  double s = 0.0;
  double S_of_s = 0.0;   // sum over the kernel support of |t(dx)|^s, dx != 0
  bool finite = true;    // convergence of the full-lattice sum
  double tail_bound = 0.0;  // bound on the neglected tail (infinite-range kernels)
};

namespace detail {

// sum over l-infinity shells m > R of (shell site count) * m^{-p},
// an upper bound for sum_{|dx|>R} |dx|^{-p} since |dx|_2 >= |dx|_inf.
inline double shell_tail(int d, double p, int R) {
  const double dim_ok = (d == 1) ? 1.0 : 2.0;
  if (p <= dim_ok) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  int m = R + 1;
  for (; m <= R + 100000; ++m) {
    const double count = (d == 1) ? 2.0 : 8.0 * m;
    const double term = count * std::pow(static_cast<double>(m), -p);
    acc += term;
    if (term < 1e-18 * (acc + 1e-300)) break;
  }
  // integral remainder
  const double M = m;
  acc += (d == 1) ? 2.0 * std::pow(M, 1.0 - p) / (p - 1.0)
                  : 8.0 * std::pow(M, 2.0 - p) / (p - 2.0);
  return acc;
}

}  // namespace detail

inline SummabilityReport summability(const HoppingKernel& k, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("summability: s must lie in (0,1)");
  SummabilityReport r;
  r.s = s;
  double acc = 0.0;
  for (const auto& [dx, v] : k.support()) {
    bool origin = true;
    for (int c : dx) origin = origin && (c == 0);
    if (origin || v == 0.0) continue;
    acc += std::pow(std::abs(v), s);
  }
  r.S_of_s = acc;
  if (k.kind() == KernelKind::half_laplacian) {
    const int d = k.dim();
    r.finite = s > static_cast<double>(d) / (d + 1);
    r.tail_bound = std::pow(k.tail_constant(), s) *
                   detail::shell_tail(d, (d + 1) * s, k.range());
  } else {
    r.finite = true;
    r.tail_bound = 0.0;
  }
  return r;
}

struct LambdaResult {
  double lambda = 0.0;
  double s_star = 0.0;
};

// min over the grid of [S(s)/(1-s)]^(1/s); the paper defines lambda(T) as an
// infimum with no closed form, so the grid is the contract.
inline LambdaResult lambda_T(const HoppingKernel& k, std::span<const double> s_grid) {
  if (s_grid.empty()) throw std::invalid_argument("lambda_T: empty s grid");
  LambdaResult best;
  best.lambda = std::numeric_limits<double>::infinity();
  for (double s : s_grid) {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("lambda_T: grid values must lie in (0,1)");
    const double S = summability(k, s).S_of_s;
    const double v = std::pow(S / (1.0 - s), 1.0 / s);
    if (v < best.lambda) {
      best.lambda = v;
      best.s_star = s;
    }
  }
  return best;
}

inline std::vector<double> default_s_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 999; ++i) g.push_back(i / 1000.0);
  return g;
}

inline double r_zs(const HoppingKernel& k, double s, double z, double omega,
                   double g2rho0) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("r_zs: s must lie in (0,1)");
  if (!(g2rho0 > 0.0)) throw std::invalid_argument("r_zs: g^2 rho0 must be positive");
  const double S = summability(k, s).S_of_s;
  return 1.0 / (1.0 - s) * std::pow(std::abs(z - omega) / g2rho0, s) * S;
}

}  // namespace photloc
