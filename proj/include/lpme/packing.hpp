#ifndef LPME_PACKING_HPP
#define LPME_PACKING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lpme/rng.hpp"

namespace lpme {

/// Finite family of hypercube vectors with measured (never assumed)
/// separation and covariance-norm certificates.
struct PackingSet {
  enum class Kind { kBinaryWeighted, kSign };

  Kind kind;
  int dim = 0;     // d for binary, k for sign
  int weight = 0;  // s, binary kind only
  std::vector<std::vector<int>> vectors;  // entries in {0,1} or {-1,+1}

  // Certification metadata, filled by verification.
  int min_l1_separation = 0;
  double cov_lambda_max = 0.0;  // lambda_max(cov) binary, lambda_max(E vv^T) sign
  double log_cardinality = 0.0;
  double c2 = 0.0;  // cov_lambda_max normalized by s/d (binary) or raw (sign)

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"kind", kind == Kind::kBinaryWeighted ? "binary_weighted" : "sign"},
        {"dim", dim},
        {"weight", weight},
        {"cardinality", vectors.size()},
        {"min_l1_separation", min_l1_separation},
        {"cov_lambda_max", cov_lambda_max},
        {"log_cardinality", log_cardinality},
        {"c2", c2}};
  }
};

namespace detail {

inline int pairwise_min_l1(const std::vector<std::vector<int>>& vecs) {
  int best = 1 << 30;
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = a + 1; b < vecs.size(); ++b) {
      int dist = 0;
      for (std::size_t j = 0; j < vecs[a].size(); ++j)
        dist += std::abs(vecs[a][j] - vecs[b][j]);
      best = std::min(best, dist);
    }
  return best;
}

inline double lambda_max_sym(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace detail

/// Covariance of a uniform draw from the set (binary kind) or the second
/// moment matrix (sign kind), as a dense matrix.
inline Eigen::MatrixXd packing_moment_matrix(const PackingSet& p) {
  const int d = p.dim;
  const double inv = 1.0 / static_cast<double>(p.vectors.size());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& v : p.vectors) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = v[j];
    second += inv * x * x.transpose();
    mean += inv * x;
  }
  if (p.kind == PackingSet::Kind::kBinaryWeighted)
    return second - mean * mean.transpose();
  return second;  // sign packings certify E[vv^T] directly
}

/// Re-measure separation and covariance norm from scratch and stamp the
/// certificate.  Constructors never return an uncertified set.
inline void certify_packing(PackingSet& p) {
  if (p.vectors.size() < 2)
    throw std::invalid_argument("certify_packing: fewer than 2 vectors");
  p.min_l1_separation = detail::pairwise_min_l1(p.vectors);
  p.cov_lambda_max = detail::lambda_max_sym(packing_moment_matrix(p));
  p.log_cardinality = std::log(static_cast<double>(p.vectors.size()));
  if (p.kind == PackingSet::Kind::kBinaryWeighted)
    p.c2 = p.cov_lambda_max * p.dim / p.weight;
  else
    p.c2 = p.cov_lambda_max;
}

inline constexpr int kPackingSampleCap = 1 << 16;  // K_max for the sampler

namespace detail {

inline std::vector<int> random_weight_s_vector(int d, int s, RngStream& rng) {
  // Partial Fisher-Yates over the index set.
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  std::vector<int> v(d, 0);
  for (int i = 0; i < s; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(d - i));
    std::swap(idx[i], idx[j]);
    v[idx[i]] = 1;
  }
  return v;
}

inline void enumerate_weight_s(int d, int s, std::vector<int>& current,
                               int next, int remaining,
                               std::vector<std::vector<int>>& out,
                               std::size_t cap) {
  if (out.size() >= cap) return;
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  if (d - next < remaining) return;
  for (int i = next; i <= d - remaining; ++i) {
    current[i] = 1;
    enumerate_weight_s(d, s, current, i + 1, remaining - 1, out, cap);
    current[i] = 0;
    if (out.size() >= cap) return;
  }
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

/// Weight-s hypercube packing.  s <= 4 (or any case with a small enough
/// slice) enumerates the whole weight-s slice, whose covariance is
/// (s/d - s^2/d^2) I exactly.  For s in 4N the probabilistic construction
/// samples K = ceil((d/(6t))^{3t/2}) slice vectors (t = s/4), capped at
/// K_max, and retries with a fresh stream until the t-separation and a
/// covariance-norm threshold hold.  Other s reduce by concatenating ones.
inline PackingSet build_weighted_packing(int d, int s, RngStream& rng,
                                         int max_retries = 32,
                                         double c2_threshold = 4.0) {
  if (s < 1 || s > d)
    throw std::invalid_argument("build_weighted_packing: need 1 <= s <= d");

  PackingSet p;
  p.kind = PackingSet::Kind::kBinaryWeighted;
  p.dim = d;
  p.weight = s;

  const double log_slice = detail::log_binomial(d, s);
  if (s <= 4 && log_slice <= std::log(double(kPackingSampleCap))) {
    std::vector<int> current(d, 0);
    detail::enumerate_weight_s(d, s, current, 0, s, p.vectors,
                               kPackingSampleCap);
    certify_packing(p);
    return p;
  }

  if (s % 4 != 0) {
    // Concatenation reduction: pack d' = d - r coordinates at weight s - r
    // and pin the trailing r coordinates to one.
    const int r = s - 4 * (s / 4);
    if (s - r < 1 || d - r < s - r)
      throw std::invalid_argument("build_weighted_packing: reduction infeasible");
    PackingSet inner = build_weighted_packing(d - r, s - r, rng, max_retries,
                                              c2_threshold);
    for (auto& v : inner.vectors) {
      v.resize(d, 1);
      p.vectors.push_back(std::move(v));
    }
    certify_packing(p);
    return p;
  }

  const int t = s / 4;
  const double log_k = 1.5 * t * std::log(double(d) / (6.0 * t));
  std::size_t target = kPackingSampleCap;
  if (log_k < std::log(double(kPackingSampleCap)))
    target = static_cast<std::size_t>(std::ceil(std::exp(std::max(log_k, 0.0))));
  target = std::max<std::size_t>(target, 2);

  std::string last_violation;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    RngStream local(rng.seed(),
                    derive_stream_id(rng.stream_id(), 0x7061636bULL, attempt));
    p.vectors.clear();
    for (std::size_t i = 0; i < target; ++i)
      p.vectors.push_back(detail::random_weight_s_vector(d, s, local));
    certify_packing(p);
    if (p.min_l1_separation <= t) {
      last_violation = "min l1 separation " +
                       std::to_string(p.min_l1_separation) + " <= t = " +
                       std::to_string(t);
      continue;
    }
    if (p.c2 > c2_threshold) {
      last_violation = "covariance c2 " + std::to_string(p.c2) +
                       " above threshold";
      continue;
    }
    return p;
  }
  throw std::runtime_error("build_weighted_packing: retries exhausted (" +
                           last_violation + ")");
}

/// Sign-vector packing by random coding: keep uniform draws at Hamming
/// distance >= k/4 (l1 >= k/2) from everything kept so far, until
/// min(ceil(e^{k/16}), 1024) vectors or the sampling budget runs out.
inline PackingSet build_sign_packing(int k, RngStream& rng,
                                     std::size_t sample_budget = 200000) {
  if (k < 2) throw std::invalid_argument("build_sign_packing: k < 2");
  const std::size_t target = std::min<std::size_t>(
      1024, static_cast<std::size_t>(std::ceil(std::exp(k / 16.0))));
  PackingSet p;
  p.kind = PackingSet::Kind::kSign;
  p.dim = k;
  const int min_hamming = (k + 3) / 4;  // ceil(k/4)
  for (std::size_t tries = 0;
       tries < sample_budget && p.vectors.size() < std::max<std::size_t>(target, 2);
       ++tries) {
    std::vector<int> v(k);
    for (int j = 0; j < k; ++j) v[j] = rng.rademacher();
    bool ok = true;
    for (const auto& u : p.vectors) {
      int hamming = 0;
      for (int j = 0; j < k; ++j) hamming += (u[j] != v[j]);
      if (hamming < min_hamming) {
        ok = false;
        break;
      }
    }
    if (ok) p.vectors.push_back(std::move(v));
  }
  if (p.vectors.size() < 2)
    throw std::runtime_error("build_sign_packing: budget exhausted below 2 vectors");
  certify_packing(p);
  return p;
}

}  // namespace lpme

#endif  // LPME_PACKING_HPP
