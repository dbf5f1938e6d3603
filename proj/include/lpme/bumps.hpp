#ifndef LPME_BUMPS_HPP
#define LPME_BUMPS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lpme/density.hpp"
#include "lpme/packing.hpp"

namespace lpme {

/// Antisymmetric bump on [0,1]: nonnegative on [0,1/2], its mirror image
/// negated on [1/2,1], vanishing with its first beta-1 derivatives at
/// 0, 1/2 and 1, with |g^{(beta)}| <= 1 binding.
///   beta = 1: tent  g(x) = min(x, 1/2 - x) on [0,1/2]        (c_half = 1/16)
///   beta = 2: quartic g(x) = 2 x^2 (1/2 - x)^2 on [0,1/2]    (c_half = 1/480)
struct BumpFunction {
  int beta;
  double c_half;

  double operator()(double x) const {
    if (x < 0.0 || x > 1.0)
      throw std::invalid_argument("BumpFunction: x outside [0,1]");
    const double sign = x <= 0.5 ? 1.0 : -1.0;
    const double u = x <= 0.5 ? x : x - 0.5;
    return sign * half_bump(u);
  }

  double half_bump(double u) const {
    if (beta == 1) return std::min(u, 0.5 - u);
    return 2.0 * u * u * (0.5 - u) * (0.5 - u);
  }
};

inline BumpFunction make_bump(int beta) {
  if (beta == 1) return BumpFunction{1, 1.0 / 16.0};
  if (beta == 2) return BumpFunction{2, 1.0 / 480.0};
  throw std::invalid_argument("make_bump: beta must be 1 or 2");
}

/// Localized copy g_{beta,j}(x) = k^{-beta} g_beta(k (x - (j-1)/k)) on bin j.
inline double localized_bump(const BumpFunction& g, int k, int j, double x) {
  const double lo = static_cast<double>(j - 1) / k;
  const double hi = static_cast<double>(j) / k;
  if (x < lo || x > hi) return 0.0;
  return std::pow(static_cast<double>(k), -g.beta) * g(k * (x - lo));
}

/// Packing of the smoothness class: f_nu = 1 + sum_j nu_j g_{beta,j} for nu
/// drawn from a sign packing of {-1,+1}^k.  Each member is a valid density
/// (|g_{beta,j}| <= k^{-beta}/4 keeps it positive).
struct DensityPacking {
  int beta;
  int k;
  PackingSet packing;
  BumpFunction bump;

  DensityPacking(int beta_in, PackingSet sign_packing)
      : beta(beta_in),
        k(sign_packing.dim),
        packing(std::move(sign_packing)),
        bump(make_bump(beta_in)) {
    if (packing.kind != PackingSet::Kind::kSign)
      throw std::invalid_argument("DensityPacking: needs a sign packing");
  }

  std::size_t size() const noexcept { return packing.vectors.size(); }

  DensityModel member(std::size_t index) const {
    if (index >= packing.vectors.size())
      throw std::out_of_range("DensityPacking: member index");
    const std::vector<int> nu = packing.vectors[index];
    const BumpFunction g = bump;
    const int kk = k;
    return DensityModel::analytic(
        [nu, g, kk](double x) {
          double v = 1.0;
          const int j = std::min(kk, 1 + static_cast<int>(x * kk));
          v += nu[j - 1] * localized_bump(g, kk, j, x);
          return v;
        },
        "density_packing_member");
  }
};

inline DensityModel density_packing_member(const PackingSet& packing,
                                           std::size_t index, int beta,
                                           int k) {
  if (packing.dim != k)
    throw std::invalid_argument("density_packing_member: k mismatch");
  DensityPacking dp(beta, packing);
  return dp.member(index);
}

}  // namespace lpme

#endif  // LPME_BUMPS_HPP
