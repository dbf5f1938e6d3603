#ifndef LPME_BOUNDS_HPP
#define LPME_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lpme/packing.hpp"

namespace lpme {

/// Largest epsilon for which the variational information-bound constant
/// C_eps = 4 / (e^{-eps} - 2 (e^eps - 1)) is positive: log((1 + sqrt(3))/2).
inline const double kInfoBoundEpsilonMax = std::log(0.5 + 0.5 * std::sqrt(3.0));

inline double info_bound_constant(double epsilon) {
  if (epsilon < 0.0 || epsilon > kInfoBoundEpsilonMax)
    throw std::invalid_argument("info_bound_constant: epsilon outside validity range");
  return 4.0 / (std::exp(-epsilon) - 2.0 * (std::exp(epsilon) - 1.0));
}

/// Le Cam two-point bound: delta_sq * (1/2 - tv/2), floored at zero.
inline double lecam_bound(double delta_sq, double tv) {
  if (tv < 0.0 || tv > 1.0) throw std::invalid_argument("lecam_bound: tv outside [0,1]");
  return std::max(0.0, delta_sq * 0.5 * (1.0 - tv));
}

/// Fano bound: delta * (1 - (info + log 2)/log_card), floored at zero.
inline double fano_bound(double delta_metric_value, double info,
                         double log_card) {
  if (log_card <= std::log(2.0))
    throw std::invalid_argument("fano_bound: log cardinality must exceed log 2");
  return std::max(0.0,
                  delta_metric_value * (1.0 - (info + std::log(2.0)) / log_card));
}

/// Symmetrized-KL contraction across a private channel:
///   KL(M_nu || M_nu') + KL(M_nu' || M_nu)
///     <= 4 (e^eps - 1)^2 sum_i tv_i^2.
inline double kl_pair_bound(double epsilon, const std::vector<double>& tv_list) {
  const double factor = std::exp(epsilon) - 1.0;
  double s = 0.0;
  for (double tv : tv_list) {
    if (tv < 0.0 || tv > 1.0)
      throw std::invalid_argument("kl_pair_bound: tv outside [0,1]");
    s += tv * tv;
  }
  return 4.0 * factor * factor * s;
}

/// Mutual-information bound for the simplex packing chain:
///   I <= C_eps n (delta^2/s^2) lambda_max(cov) d (e^eps - e^-eps)^2 / 4,
/// with the measured covariance norm standing in for the unstated universal
/// constant.
inline double info_bound_multinomial(double n, double epsilon, double delta,
                                     int s, const PackingSet& packing) {
  if (packing.kind != PackingSet::Kind::kBinaryWeighted)
    throw std::invalid_argument("info_bound_multinomial: needs a binary packing");
  const double c_eps = info_bound_constant(epsilon);
  const double kappa2 =
      std::pow(std::exp(epsilon) - std::exp(-epsilon), 2) / 4.0;
  return c_eps * n * (delta * delta) / (double(s) * double(s)) *
         packing.cov_lambda_max * packing.dim * kappa2;
}

/// The 2k x 2k interleaved matrix M = avg_nu [1,-1]^T (x) nu nu^T (x) [1,-1]
/// from the density information chain; its quadratic form is
/// (x - y)^T (avg nu nu^T) (x - y) on the split u = (x interleaved with y).
inline Eigen::MatrixXd density_kronecker_matrix(const PackingSet& sign_packing) {
  if (sign_packing.kind != PackingSet::Kind::kSign)
    throw std::invalid_argument("density_kronecker_matrix: needs a sign packing");
  const int k = sign_packing.dim;
  const Eigen::MatrixXd second = packing_moment_matrix(sign_packing);
  Eigen::MatrixXd m(2 * k, 2 * k);
  for (int i = 0; i < 2 * k; ++i)
    for (int j = 0; j < 2 * k; ++j) {
      const double sign_i = (i % 2 == 0) ? 1.0 : -1.0;
      const double sign_j = (j % 2 == 0) ? 1.0 : -1.0;
      m(i, j) = sign_i * sign_j * second(i / 2, j / 2);
    }
  return m;
}

/// Mutual-information bound for the bump-density packing:
///   I <= C_eps n (c_half^2 / k^{2beta+2}) kappa^2 2k lambda_max(M),
/// kappa = (e^eps - e^-eps)/2; decays as k^{-(2beta+1)}.
inline double info_bound_density(double n, double epsilon, int k, int beta,
                                 const PackingSet& sign_packing,
                                 double c_half) {
  if (sign_packing.dim != k)
    throw std::invalid_argument("info_bound_density: packing dimension mismatch");
  const double c_eps = info_bound_constant(epsilon);
  const double kappa = 0.5 * (std::exp(epsilon) - std::exp(-epsilon));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      density_kronecker_matrix(sign_packing));
  const double lambda = solver.eigenvalues().maxCoeff();
  return c_eps * n * (c_half * c_half) /
         std::pow(static_cast<double>(k), 2.0 * beta + 2.0) * kappa * kappa *
         2.0 * k * lambda;
}

/// Theoretical rates with unit constants, reported as exponent/argument
/// pairs alongside the evaluated values.
struct RatePrediction {
  double private_lower = 0.0;
  double private_upper = 0.0;
  double classical = 0.0;
  double naive_series = 0.0;  // density only
  double private_exponent = 0.0;
  double classical_exponent = 0.0;
  double naive_exponent = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"private_lower", private_lower},
                          {"private_upper", private_upper},
                          {"classical", classical},
                          {"naive_series", naive_series},
                          {"private_exponent", private_exponent},
                          {"classical_exponent", classical_exponent},
                          {"naive_exponent", naive_exponent}};
  }
};

inline RatePrediction predict_rates_multinomial(int d, double n,
                                                double epsilon) {
  if (n < 1.0 || epsilon <= 0.0)
    throw std::invalid_argument("predict_rates: need n >= 1, epsilon > 0");
  const double ne2 = n * epsilon * epsilon;
  RatePrediction r;
  r.private_lower = std::min({1.0, 1.0 / std::sqrt(ne2), d / ne2});
  r.private_upper = std::min(1.0, d / ne2);
  r.classical = (1.0 / n) * (1.0 - 1.0 / d);
  r.private_exponent = -1.0;
  r.classical_exponent = -1.0;
  return r;
}

inline RatePrediction predict_rates_density(int beta, double n,
                                            double epsilon) {
  if (n < 1.0 || epsilon <= 0.0)
    throw std::invalid_argument("predict_rates: need n >= 1, epsilon > 0");
  const double ne2 = n * epsilon * epsilon;
  const double b = static_cast<double>(beta);
  RatePrediction r;
  r.private_exponent = -2.0 * b / (2.0 * b + 2.0);
  r.classical_exponent = -2.0 * b / (2.0 * b + 1.0);
  r.naive_exponent = -2.0 * b / (2.0 * b + 3.0);
  r.private_lower = std::min(1.0, std::pow(ne2, r.private_exponent));
  r.private_upper = r.private_lower;
  r.classical = std::min(1.0, std::pow(n, r.classical_exponent));
  r.naive_series = std::min(1.0, std::pow(ne2, r.naive_exponent));
  return r;
}

}  // namespace lpme

#endif  // LPME_BOUNDS_HPP
