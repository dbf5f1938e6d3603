#ifndef LPME_CHANNELS_HPP
#define LPME_CHANNELS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpme/basis.hpp"
#include "lpme/rng.hpp"
#include "lpme/simplex.hpp"

namespace lpme {

enum class Mechanism {
  kRandomizedResponse,
  kLaplaceMultinomial,
  kLaplaceHistogram,
  kHalfspaceSeries,
  kNaiveLaplaceSeries,
};

inline const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::kRandomizedResponse: return "randomized_response";
    case Mechanism::kLaplaceMultinomial: return "laplace_multinomial";
    case Mechanism::kLaplaceHistogram: return "laplace_histogram";
    case Mechanism::kHalfspaceSeries: return "halfspace_series";
    case Mechanism::kNaiveLaplaceSeries: return "naive_laplace_series";
  }
  return "?";
}

inline Mechanism mechanism_from_name(const std::string& s) {
  if (s == "randomized_response") return Mechanism::kRandomizedResponse;
  if (s == "laplace_multinomial") return Mechanism::kLaplaceMultinomial;
  if (s == "laplace_histogram") return Mechanism::kLaplaceHistogram;
  if (s == "halfspace_series") return Mechanism::kHalfspaceSeries;
  if (s == "naive_laplace_series") return Mechanism::kNaiveLaplaceSeries;
  throw std::invalid_argument("unknown mechanism: " + s);
}

/// dims is d for multinomial mechanisms and the bin/truncation level k for
/// the density mechanisms.
struct ChannelConfig {
  Mechanism mechanism;
  PrivacyBudget epsilon;
  int dims;
  double basis_bound = kTrigBasisBound;

  ChannelConfig(Mechanism m, PrivacyBudget eps, int dims_in,
                double b0 = kTrigBasisBound)
      : mechanism(m), epsilon(eps), dims(dims_in), basis_bound(b0) {
    if (dims < 1) throw std::invalid_argument("ChannelConfig: dims < 1");
    if (b0 <= 0.0) throw std::invalid_argument("ChannelConfig: basis_bound <= 0");
  }
};

/// One private view Z_i.  For the halfspace mechanism, amplitude records the
/// realized payload magnitude Bbar.
struct PrivatizedRecord {
  Mechanism mechanism;
  std::vector<double> payload;
  double amplitude = 0.0;
};

/// Unbiasedness constant of the halfspace sampling channel.  With ties on
/// <z, tau~> = 0 split evenly between the two branches, conditioning on the
/// Rademacher inner-product distribution gives
///   c_k = E|S_k| / sqrt(k),   S_k = sum of k independent signs,
/// with the closed form E|S_k| = k 2^{1-k} C(k-1, floor((k-1)/2)) evaluated
/// in log space so it stays finite for any k.  c_1 = 1 and c_k -> sqrt(2/pi).
struct ChannelConstant {
  int k;
  double c_k;
};

inline ChannelConstant compute_ck(int k) {
  if (k < 1) throw std::invalid_argument("compute_ck: k < 1");
  const int m = (k - 1) / 2;
  const double log_binom = std::lgamma(static_cast<double>(k)) -
                           std::lgamma(static_cast<double>(m + 1)) -
                           std::lgamma(static_cast<double>(k - m));
  const double mean_abs =
      std::exp(std::log(static_cast<double>(k)) +
               (1.0 - k) * std::log(2.0) + log_binom);
  return ChannelConstant{k, mean_abs / std::sqrt(static_cast<double>(k))};
}

/// Payload magnitude Bbar = B0 sqrt(k) (e^eps + 1) / (c_k (e^eps - 1)) that
/// makes the halfspace channel exactly unbiased for the basis vector.
inline double halfspace_amplitude(const ChannelConfig& cfg) {
  const double e = std::exp(cfg.epsilon.epsilon);
  const int k = cfg.dims;
  return cfg.basis_bound * std::sqrt(static_cast<double>(k)) * (e + 1.0) /
         (compute_ck(k).c_k * (e - 1.0));
}

inline double rr_keep_probability(double epsilon) {
  const double e = std::exp(epsilon / 2.0);
  return e / (1.0 + e);
}

/// Bitwise randomized response: encode x as the basis vector e_x, keep each
/// bit with probability e^{eps/2}/(1 + e^{eps/2}), flip otherwise.
inline PrivatizedRecord randomized_response(int x, const ChannelConfig& cfg,
                                            RngStream& rng) {
  if (cfg.mechanism != Mechanism::kRandomizedResponse)
    throw std::invalid_argument("randomized_response: wrong mechanism tag");
  if (x < 1 || x > cfg.dims)
    throw std::out_of_range("randomized_response: category out of range");
  const double keep = rr_keep_probability(cfg.epsilon.epsilon);
  PrivatizedRecord rec{cfg.mechanism, std::vector<double>(cfg.dims, 0.0)};
  for (int j = 0; j < cfg.dims; ++j) {
    const double bit = (j + 1 == x) ? 1.0 : 0.0;
    rec.payload[j] = rng.bernoulli(keep) ? bit : 1.0 - bit;
  }
  return rec;
}

/// x + W with W_j iid Laplace(eps/2); valid for any x with x >= 0 and
/// ||x||_1 <= 1 (simplex point or one-hot bin indicator).
inline PrivatizedRecord laplace_perturb(const std::vector<double>& x,
                                        const ChannelConfig& cfg,
                                        RngStream& rng) {
  if (cfg.mechanism != Mechanism::kLaplaceMultinomial &&
      cfg.mechanism != Mechanism::kLaplaceHistogram)
    throw std::invalid_argument("laplace_perturb: wrong mechanism tag");
  if (static_cast<int>(x.size()) != cfg.dims)
    throw std::invalid_argument("laplace_perturb: dimension mismatch");
  double l1 = 0.0;
  for (double v : x) {
    if (v < 0.0) throw std::invalid_argument("laplace_perturb: x < 0");
    l1 += v;
  }
  if (l1 > 1.0 + 1e-9)
    throw std::invalid_argument("laplace_perturb: ||x||_1 > 1");
  const double rate = cfg.epsilon.epsilon / 2.0;
  PrivatizedRecord rec{cfg.mechanism, x};
  for (double& v : rec.payload) v += rng.laplace(rate);
  return rec;
}

/// Bin index in {1..k} for the partition X_j = [(j-1)/k, j/k), X_k closed.
inline int histogram_bin(double x, int k) {
  if (k < 1) throw std::invalid_argument("histogram_bin: k < 1");
  if (x < 0.0 || x > 1.0)
    throw std::out_of_range("histogram_bin: x outside [0,1]");
  const int j = 1 + static_cast<int>(x * static_cast<double>(k));
  return j > k ? k : j;
}

inline std::vector<double> one_hot_bin(double x, int k) {
  std::vector<double> v(k, 0.0);
  v[histogram_bin(x, k) - 1] = 1.0;
  return v;
}

/// Laplace histogram channel: one-hot bin indicator plus Laplace(eps/2) noise.
inline PrivatizedRecord laplace_histogram_channel(double x,
                                                  const ChannelConfig& cfg,
                                                  RngStream& rng) {
  if (cfg.mechanism != Mechanism::kLaplaceHistogram)
    throw std::invalid_argument("laplace_histogram_channel: wrong mechanism tag");
  return laplace_perturb(one_hot_bin(x, cfg.dims), cfg, rng);
}

/// First k truncated basis coefficients tau_j = phi_j(x), positions 1..k.
/// Harmonics come from the angle-addition recurrence (two multiplies per
/// frequency instead of a libm call), agreeing with trig_basis_eval to
/// roughly k ulps.
inline std::vector<double> basis_vector(double x, int k) {
  if (k < 1) throw std::invalid_argument("basis_vector: k < 1");
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("basis_vector: x outside [0,1]");
  std::vector<double> tau(k);
  tau[0] = 1.0;
  if (k == 1) return tau;
  const double c1 = std::cos(2.0 * M_PI * x);
  const double s1 = std::sin(2.0 * M_PI * x);
  const double root2 = std::sqrt(2.0);
  double cm = c1, sm = s1;
  for (int j = 2; j <= k; j += 2) {
    tau[j - 1] = root2 * cm;
    if (j + 1 <= k) tau[j] = root2 * sm;
    const double cn = cm * c1 - sm * s1;
    sm = sm * c1 + cm * s1;
    cm = cn;
  }
  return tau;
}

namespace detail {

/// Branch sign for a candidate z against tau~: +1 strictly inside the
/// halfspace, -1 strictly outside, ties resolved by a fair coin so both
/// branches hold exactly 2^{k-1} (fractional) outcomes and the worst-case
/// likelihood ratio stays e^eps for every k.
inline int halfspace_branch(std::int64_t inner, RngStream& rng) {
  if (inner > 0) return 1;
  if (inner < 0) return -1;
  return rng.rademacher();
}

}  // namespace detail

/// Halfspace sampling channel for tau in the box [-B0, B0]^k: randomize tau
/// to a corner tau~, flip T ~ Bernoulli(e^eps/(e^eps+1)), then draw z uniform
/// on the halfspace {<z, tau~> > 0} when T = 1 and on its complement when
/// T = 0, by rejection (acceptance probability exactly 1/2).
inline PrivatizedRecord halfspace_series_tau(const std::vector<double>& tau,
                                             const ChannelConfig& cfg,
                                             RngStream& rng) {
  const int k = cfg.dims;
  if (static_cast<int>(tau.size()) != k)
    throw std::invalid_argument("halfspace_series: dimension mismatch");
  const double b0 = cfg.basis_bound;
  std::vector<int> sigma(k);
  for (int j = 0; j < k; ++j) {
    if (std::fabs(tau[j]) > b0 + 1e-12)
      throw std::invalid_argument("halfspace_series: tau outside the box");
    sigma[j] = rng.bernoulli(0.5 + tau[j] / (2.0 * b0)) ? 1 : -1;
  }
  const double e = std::exp(cfg.epsilon.epsilon);
  const int want = rng.bernoulli(e / (e + 1.0)) ? 1 : -1;
  const double amplitude = halfspace_amplitude(cfg);
  std::vector<int> zeta(k);
  for (;;) {
    // One u64 supplies all k proposal signs.
    const std::uint64_t bits = rng.next_u64();
    std::int64_t inner = 0;
    for (int j = 0; j < k; ++j) {
      zeta[j] = ((bits >> j) & 1) ? 1 : -1;
      inner += zeta[j] * sigma[j];
    }
    if (detail::halfspace_branch(inner, rng) == want) break;
  }
  PrivatizedRecord rec{cfg.mechanism, std::vector<double>(k), amplitude};
  for (int j = 0; j < k; ++j) rec.payload[j] = amplitude * zeta[j];
  return rec;
}

inline PrivatizedRecord halfspace_series_channel(double x,
                                                 const ChannelConfig& cfg,
                                                 RngStream& rng) {
  if (cfg.mechanism != Mechanism::kHalfspaceSeries)
    throw std::invalid_argument("halfspace_series_channel: wrong mechanism tag");
  return halfspace_series_tau(basis_vector(x, cfg.dims), cfg, rng);
}

/// Truncated basis vector plus iid Laplace(eps/(2 B0 k)) noise; every
/// coordinate lives in [-B0, B0], so the l1 gap between two inputs is at most
/// 2 B0 k and the channel is eps-private.
inline PrivatizedRecord naive_laplace_series_channel(double x,
                                                     const ChannelConfig& cfg,
                                                     RngStream& rng) {
  if (cfg.mechanism != Mechanism::kNaiveLaplaceSeries)
    throw std::invalid_argument("naive_laplace_series_channel: wrong mechanism tag");
  const int k = cfg.dims;
  const double rate = cfg.epsilon.epsilon / (2.0 * cfg.basis_bound * k);
  PrivatizedRecord rec{cfg.mechanism, basis_vector(x, k)};
  for (double& v : rec.payload) v += rng.laplace(rate);
  return rec;
}

// ---------------------------------------------------------------------------
// Exact output distributions (enumeration-sized instances), shared by the
// privacy auditor and the oracle tests.
// ---------------------------------------------------------------------------

/// P(Z = z | X = x) for randomized response; z given as a bit mask over d
/// coordinates, bit j set iff payload_j = 1.
inline double rr_exact_prob(std::uint64_t z_mask, int x,
                            const ChannelConfig& cfg) {
  const double keep = rr_keep_probability(cfg.epsilon.epsilon);
  double p = 1.0;
  for (int j = 0; j < cfg.dims; ++j) {
    const bool bit_in = (j + 1 == x);
    const bool bit_out = (z_mask >> j) & 1;
    p *= (bit_in == bit_out) ? keep : 1.0 - keep;
  }
  return p;
}

/// P(Z = Bbar * zeta | tau) for the halfspace channel, by summation over the
/// 2^k randomized corners tau~; zeta in {-1, +1}^k.
inline double halfspace_exact_prob(const std::vector<int>& zeta,
                                   const std::vector<double>& tau,
                                   const ChannelConfig& cfg) {
  const int k = cfg.dims;
  if (k > 24) throw std::invalid_argument("halfspace_exact_prob: k too large");
  const double b0 = cfg.basis_bound;
  const double e = std::exp(cfg.epsilon.epsilon);
  const double pt = e / (e + 1.0);
  const double denom = std::pow(2.0, k);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    double p_sigma = 1.0;
    std::int64_t inner = 0;
    for (int j = 0; j < k; ++j) {
      const int s = ((mask >> j) & 1) ? 1 : -1;
      p_sigma *= 0.5 + s * tau[j] / (2.0 * b0);
      inner += s * zeta[j];
    }
    double q;
    if (inner > 0)
      q = 2.0 * pt / denom;
    else if (inner < 0)
      q = 2.0 * (1.0 - pt) / denom;
    else
      q = 1.0 / denom;  // tie mass splits evenly, independent of T
    total += p_sigma * q;
  }
  return total;
}

}  // namespace lpme

#endif  // LPME_CHANNELS_HPP
