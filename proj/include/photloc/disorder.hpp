#pragma once

// I.i.d. atomic densities rho(x) uniform on [0, 2 rho0], one value per site,
// keyed deterministically by (master seed, realization, site).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "photloc/lattice.hpp"
#include "photloc/rng.hpp"

namespace photloc {

class DisorderField {
 public:
  static DisorderField sample(const LatticeBox& box, double rho0,
                              std::uint64_t master_seed, std::uint64_t realization) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("DisorderField: rho0 must be positive");
    DisorderField f;
    f.rho0_ = rho0;
    f.master_seed_ = master_seed;
    f.realization_ = realization;
    f.values_.resize(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
      f.values_[i] =
          2.0 * rho0 * site_uniform(master_seed, RngStream::disorder_field, realization,
                                    box.site_at(i));
    return f;
  }

  double rho0() const { return rho0_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t realization() const { return realization_; }
  std::size_t size() const { return values_.size(); }
  double at(std::size_t i) const { return values_.at(i); }
  const std::vector<double>& values() const { return values_; }

  // Identical field except at one site (the section 6 construction).
  DisorderField with_value(std::size_t i, double rho_hat) const {
    if (!(rho_hat >= 0.0 && rho_hat <= 2.0 * rho0_))
      throw std::invalid_argument("resample_site: value outside [0, 2 rho0]");
    DisorderField f(*this);
    f.values_.at(i) = rho_hat;
    return f;
  }

 private:
  double rho0_ = 0.0;
  std::uint64_t master_seed_ = 0;
  std::uint64_t realization_ = 0;
  std::vector<double> values_;
};

inline DisorderField sample_field(const LatticeBox& box, double rho0,
                                  std::uint64_t master_seed, std::uint64_t realization) {
  return DisorderField::sample(box, rho0, master_seed, realization);
}

inline DisorderField resample_site(const DisorderField& f, const LatticeBox& box,
                                   const Site& x, double rho_hat) {
  return f.with_value(box.index_of(x), rho_hat);
}

// Auxiliary replacement density rho_hat, uniform on [0, 2 rho0] and
// independent of the field values (separate stream).
inline double draw_rho_hat(double rho0, std::uint64_t master_seed,
                           std::uint64_t realization, const Site& x) {
  return 2.0 * rho0 * site_uniform(master_seed, RngStream::rho_hat, realization, x);
}

}  // namespace photloc
