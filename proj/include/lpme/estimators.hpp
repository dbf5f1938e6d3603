#ifndef LPME_ESTIMATORS_HPP
#define LPME_ESTIMATORS_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "lpme/channels.hpp"
#include "lpme/density.hpp"
#include "lpme/simplex.hpp"

namespace lpme {

namespace detail {

inline void check_records(std::span<const PrivatizedRecord> records,
                          Mechanism expected, int dims) {
  if (records.empty()) throw std::invalid_argument("estimator: no records");
  for (const auto& r : records) {
    if (r.mechanism != expected)
      throw std::invalid_argument("estimator: mixed mechanisms");
    if (static_cast<int>(r.payload.size()) != dims)
      throw std::invalid_argument("estimator: mixed dimensions");
  }
}

inline std::vector<double> payload_mean(std::span<const PrivatizedRecord> records) {
  std::vector<double> mean(records.front().payload.size(), 0.0);
  for (const auto& r : records)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r.payload[j];
  const double inv = 1.0 / static_cast<double>(records.size());
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace detail

/// Debiased randomized-response mean before projection:
///   theta_part = mean(Z - 1/(1+e^{eps/2})) * (e^{eps/2}+1)/(e^{eps/2}-1).
inline std::vector<double> rr_multinomial_partial(
    std::span<const PrivatizedRecord> records, const ChannelConfig& cfg) {
  detail::check_records(records, Mechanism::kRandomizedResponse, cfg.dims);
  const double e = std::exp(cfg.epsilon.epsilon / 2.0);
  if (e - 1.0 <= 0.0)
    throw std::invalid_argument("rr_multinomial_estimate: epsilon = 0 leaves the unbiasing factor undefined");
  std::vector<double> part = detail::payload_mean(records);
  const double shift = 1.0 / (1.0 + e);
  const double gain = (e + 1.0) / (e - 1.0);
  for (double& v : part) v = (v - shift) * gain;
  return part;
}

inline SimplexVector rr_multinomial_estimate(
    std::span<const PrivatizedRecord> records, const ChannelConfig& cfg) {
  auto w = project_simplex(rr_multinomial_partial(records, cfg), 1.0);
  return SimplexVector(std::move(w));
}

inline SimplexVector laplace_multinomial_estimate(
    std::span<const PrivatizedRecord> records, const ChannelConfig& cfg) {
  detail::check_records(records, Mechanism::kLaplaceMultinomial, cfg.dims);
  auto w = project_simplex(detail::payload_mean(records), 1.0);
  return SimplexVector(std::move(w));
}

/// Non-private baseline: empirical category frequencies.
inline SimplexVector mle_multinomial_estimate(std::span<const int> raw_samples,
                                              int d) {
  if (raw_samples.empty()) throw std::invalid_argument("mle: no samples");
  std::vector<double> freq(d, 0.0);
  for (int x : raw_samples) {
    if (x < 1 || x > d) throw std::out_of_range("mle: category out of range");
    freq[x - 1] += 1.0;
  }
  for (double& v : freq) v /= static_cast<double>(raw_samples.size());
  return SimplexVector(std::move(freq));
}

/// Private histogram: theta = Pi_{k Delta_k}((k/n) sum Z_i); nonnegative with
/// unit integral by construction.
inline DensityModel histogram_density_estimate(
    std::span<const PrivatizedRecord> records, int k) {
  detail::check_records(records, Mechanism::kLaplaceHistogram, k);
  std::vector<double> mean = detail::payload_mean(records);
  for (double& v : mean) v *= static_cast<double>(k);
  return DensityModel::piecewise_constant(
      project_simplex(mean, static_cast<double>(k)));
}

/// Non-private histogram baseline: bin counts scaled to a density.
inline DensityModel classical_histogram_estimate(std::span<const double> raw,
                                                 int k) {
  if (raw.empty()) throw std::invalid_argument("histogram: no samples");
  std::vector<double> counts(k, 0.0);
  for (double x : raw) counts[histogram_bin(x, k) - 1] += 1.0;
  const double scale = static_cast<double>(k) / static_cast<double>(raw.size());
  for (double& v : counts) v *= scale;
  return DensityModel::piecewise_constant(std::move(counts));
}

/// Series estimator from halfspace records: coefficients are the plain
/// payload averages; deliberately unprojected (may go negative).
inline DensityModel series_density_estimate(
    std::span<const PrivatizedRecord> records, int k) {
  detail::check_records(records, Mechanism::kHalfspaceSeries, k);
  return DensityModel::series(detail::payload_mean(records));
}

inline DensityModel naive_series_density_estimate(
    std::span<const PrivatizedRecord> records, int k) {
  detail::check_records(records, Mechanism::kNaiveLaplaceSeries, k);
  return DensityModel::series(detail::payload_mean(records));
}

/// Non-private orthogonal-series baseline: empirical basis coefficients
/// theta_j = (1/n) sum phi_j(X_i).
inline DensityModel classical_series_estimate(std::span<const double> raw,
                                              int k) {
  if (raw.empty()) throw std::invalid_argument("series: no samples");
  std::vector<double> coeffs(k, 0.0);
  for (double x : raw)
    for (int j = 1; j <= k; ++j) coeffs[j - 1] += trig_basis_eval(j, x);
  for (double& v : coeffs) v /= static_cast<double>(raw.size());
  return DensityModel::series(std::move(coeffs));
}

}  // namespace lpme

#endif  // LPME_ESTIMATORS_HPP
