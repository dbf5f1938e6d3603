#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lpme/audit.hpp"
#include "lpme/channels.hpp"
#include "lpme/rng.hpp"

namespace {

using lpme::ChannelConfig;
using lpme::Mechanism;
using lpme::PrivacyBudget;
using lpme::RngStream;

std::vector<double> unit_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = double(i) / (points - 1);
  return g;
}

TEST(MechanismNames, RoundTrip) {
  for (Mechanism m :
       {Mechanism::kRandomizedResponse, Mechanism::kLaplaceMultinomial,
        Mechanism::kLaplaceHistogram, Mechanism::kHalfspaceSeries,
        Mechanism::kNaiveLaplaceSeries})
    EXPECT_EQ(lpme::mechanism_from_name(lpme::mechanism_name(m)), m);
  EXPECT_THROW(lpme::mechanism_from_name("nope"), std::invalid_argument);
}

TEST(ChannelConstant, MatchesExhaustiveEnumeration) {
  // Oracle: E|S_k| by direct enumeration of all 2^k sign vectors.
  for (int k = 1; k <= 16; ++k) {
    double mean_abs = 0.0;
    for (std::uint64_t m = 0; m < (1ULL << k); ++m) {
      const std::int64_t s = 2 * std::int64_t(std::popcount(m)) - k;
      mean_abs += std::fabs(double(s));
    }
    mean_abs /= double(1ULL << k);
    const double oracle = mean_abs / std::sqrt(double(k));
    EXPECT_NEAR(lpme::compute_ck(k).c_k, oracle, 1e-12) << "k=" << k;
  }
}

TEST(ChannelConstant, RangeAndLimit) {
  EXPECT_NEAR(lpme::compute_ck(1).c_k, 1.0, 1e-15);
  double prev_scaled = 0.0;
  for (int k = 1; k <= 64; ++k) {
    const double ck = lpme::compute_ck(k).c_k;
    EXPECT_GT(ck, 0.0);
    EXPECT_LE(ck, 1.0 + 1e-15);
    // E|S_k| = c_k sqrt(k) is nondecreasing in k.
    const double scaled = ck * std::sqrt(double(k));
    EXPECT_GE(scaled + 1e-12, prev_scaled);
    prev_scaled = scaled;
  }
  // c_k -> sqrt(2/pi) from above.
  EXPECT_NEAR(lpme::compute_ck(2048).c_k, std::sqrt(2.0 / std::numbers::pi),
              1e-3);
}

TEST(RandomizedResponse, ExactKeepProbability) {
  // At eps = 2 ln 3, e^{eps/2} = 3, so keep = 3/4.
  EXPECT_NEAR(lpme::rr_keep_probability(2.0 * std::log(3.0)), 0.75, 1e-12);
}

TEST(RandomizedResponse, ExactPmfSumsToOne) {
  const ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(1.3),
                          6);
  for (int x = 1; x <= 6; ++x) {
    double total = 0.0;
    for (std::uint64_t z = 0; z < (1ULL << 6); ++z)
      total += lpme::rr_exact_prob(z, x, cfg);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(RandomizedResponse, EmpiricalMatchesExactPmf) {
  const ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(1.0),
                          3);
  RngStream rng(21, 0);
  const int n = 200000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    const auto rec = lpme::randomized_response(2, cfg, rng);
    std::uint64_t mask = 0;
    for (int j = 0; j < 3; ++j)
      if (rec.payload[j] > 0.5) mask |= (1ULL << j);
    ++counts[mask];
  }
  for (std::uint64_t z = 0; z < 8; ++z) {
    const double p = lpme::rr_exact_prob(z, 2, cfg);
    const double sd = std::sqrt(p * (1.0 - p) / n);
    EXPECT_NEAR(double(counts[z]) / n, p, 5.0 * sd) << "z=" << z;
  }
}

TEST(RandomizedResponse, InputValidation) {
  const ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(1.0),
                          4);
  RngStream rng(1, 1);
  EXPECT_THROW(lpme::randomized_response(0, cfg, rng), std::out_of_range);
  EXPECT_THROW(lpme::randomized_response(5, cfg, rng), std::out_of_range);
  const ChannelConfig wrong(Mechanism::kLaplaceMultinomial, PrivacyBudget(1.0),
                            4);
  EXPECT_THROW(lpme::randomized_response(1, wrong, rng),
               std::invalid_argument);
}

TEST(LaplacePerturb, NoiseVarianceIsEightOverEpsSq) {
  const double eps = 0.8;
  const ChannelConfig cfg(Mechanism::kLaplaceMultinomial, PrivacyBudget(eps),
                          3);
  RngStream rng(31, 0);
  const std::vector<double> p{0.2, 0.3, 0.5};
  const int n = 300000;
  std::vector<double> sum(3, 0.0), sumsq(3, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto rec = lpme::laplace_perturb(p, cfg, rng);
    for (int j = 0; j < 3; ++j) {
      sum[j] += rec.payload[j];
      sumsq[j] += rec.payload[j] * rec.payload[j];
    }
  }
  const double target = 8.0 / (eps * eps);
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / n;
    const double var = sumsq[j] / n - mean * mean;
    EXPECT_NEAR(mean, p[j], 0.05);
    EXPECT_NEAR(var, target, 0.05 * target);
  }
}

TEST(LaplacePerturb, RejectsBadInput) {
  const ChannelConfig cfg(Mechanism::kLaplaceMultinomial, PrivacyBudget(1.0),
                          2);
  RngStream rng(1, 2);
  EXPECT_THROW(lpme::laplace_perturb({-0.1, 0.5}, cfg, rng),
               std::invalid_argument);
  EXPECT_THROW(lpme::laplace_perturb({0.8, 0.8}, cfg, rng),
               std::invalid_argument);
  EXPECT_THROW(lpme::laplace_perturb({0.5}, cfg, rng), std::invalid_argument);
}

TEST(HistogramBin, EdgeCases) {
  EXPECT_EQ(lpme::histogram_bin(0.0, 4), 1);
  EXPECT_EQ(lpme::histogram_bin(0.249, 4), 1);
  EXPECT_EQ(lpme::histogram_bin(0.25, 4), 2);
  EXPECT_EQ(lpme::histogram_bin(0.999, 4), 4);
  EXPECT_EQ(lpme::histogram_bin(1.0, 4), 4);
  EXPECT_THROW(lpme::histogram_bin(-0.01, 4), std::out_of_range);
}

TEST(BasisVector, MatchesDirectEvaluation) {
  for (int k : {1, 2, 3, 7, 16, 33}) {
    for (int g = 0; g <= 200; ++g) {
      const double x = g / 200.0;
      const auto tau = lpme::basis_vector(x, k);
      ASSERT_EQ(int(tau.size()), k);
      for (int j = 1; j <= k; ++j)
        ASSERT_NEAR(tau[j - 1], lpme::trig_basis_eval(j, x), 1e-11)
            << "k=" << k << " j=" << j << " x=" << x;
    }
  }
}

TEST(HalfspaceAmplitude, ClosedForm) {
  const ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(1.0), 4,
                          std::numbers::sqrt2);
  const double e = std::exp(1.0);
  const double want = std::numbers::sqrt2 * 2.0 * (e + 1.0) /
                      (lpme::compute_ck(4).c_k * (e - 1.0));
  EXPECT_NEAR(lpme::halfspace_amplitude(cfg), want, 1e-12);
}

TEST(HalfspaceChannel, ExactPmfSumsToOne) {
  const ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(1.2), 3);
  for (double x : {0.1, 0.37, 0.92}) {
    const auto tau = lpme::basis_vector(x, 3);
    double total = 0.0;
    std::vector<int> zeta(3);
    for (std::uint64_t zm = 0; zm < 8; ++zm) {
      for (int j = 0; j < 3; ++j) zeta[j] = ((zm >> j) & 1) ? 1 : -1;
      total += lpme::halfspace_exact_prob(zeta, tau, cfg);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(HalfspaceChannel, EmpiricalMatchesExactPmf) {
  const ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(1.0), 3);
  RngStream rng(41, 0);
  const double x = 0.31;
  const int n = 200000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    const auto rec = lpme::halfspace_series_channel(x, cfg, rng);
    std::uint64_t mask = 0;
    for (int j = 0; j < 3; ++j)
      if (rec.payload[j] > 0.0) mask |= (1ULL << j);
    ++counts[mask];
  }
  const auto tau = lpme::basis_vector(x, 3);
  std::vector<int> zeta(3);
  for (std::uint64_t zm = 0; zm < 8; ++zm) {
    for (int j = 0; j < 3; ++j) zeta[j] = ((zm >> j) & 1) ? 1 : -1;
    const double p = lpme::halfspace_exact_prob(zeta, tau, cfg);
    const double sd = std::sqrt(p * (1.0 - p) / n);
    EXPECT_NEAR(double(counts[zm]) / n, p, 5.0 * sd) << "zeta_mask=" << zm;
  }
}

TEST(HalfspaceChannel, UnbiasedForBasisVector) {
  // E[Z] = tau exactly; Monte Carlo check within 4 sigma per coordinate.
  for (int k : {1, 3, 5, 8}) {
    const ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(1.0),
                            k);
    RngStream rng(51, std::uint64_t(k));
    const double x = 0.217;
    const auto tau = lpme::basis_vector(x, k);
    const int n = 400000;
    std::vector<double> sum(k, 0.0);
    double amplitude = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto rec = lpme::halfspace_series_channel(x, cfg, rng);
      amplitude = rec.amplitude;
      for (int j = 0; j < k; ++j) sum[j] += rec.payload[j];
    }
    const double sd = amplitude / std::sqrt(double(n));
    for (int j = 0; j < k; ++j)
      EXPECT_NEAR(sum[j] / n, tau[j], 4.0 * sd) << "k=" << k << " j=" << j;
  }
}

TEST(NaiveSeriesChannel, UnbiasedAndCorrectVariance) {
  const double eps = 1.0;
  const int k = 4;
  const ChannelConfig cfg(Mechanism::kNaiveLaplaceSeries, PrivacyBudget(eps),
                          k);
  RngStream rng(61, 0);
  const double x = 0.43;
  const auto tau = lpme::basis_vector(x, k);
  const int n = 300000;
  std::vector<double> sum(k, 0.0), sumsq(k, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto rec = lpme::naive_laplace_series_channel(x, cfg, rng);
    for (int j = 0; j < k; ++j) {
      sum[j] += rec.payload[j];
      sumsq[j] += rec.payload[j] * rec.payload[j];
    }
  }
  const double rate = eps / (2.0 * cfg.basis_bound * k);
  const double target_var = 2.0 / (rate * rate);
  for (int j = 0; j < k; ++j) {
    const double mean = sum[j] / n;
    const double var = sumsq[j] / n - mean * mean;
    EXPECT_NEAR(mean, tau[j], 0.1);
    EXPECT_NEAR(var, target_var, 0.05 * target_var);
  }
}

TEST(Audit, RandomizedResponseIsTight) {
  for (double eps : {0.25, 1.0, 2.0}) {
    const ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(eps),
                            5);
    const auto report = lpme::audit_channel(cfg, {});
    EXPECT_TRUE(report.pass);
    // The worst-case ratio of bitwise randomized response is exactly eps.
    EXPECT_NEAR(report.max_log_ratio, eps, 1e-9) << "eps=" << eps;
  }
}

TEST(Audit, HalfspaceIsTight) {
  for (double eps : {0.25, 1.0, 2.0}) {
    for (int k : {2, 3, 4}) {
      const ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(eps),
                              k);
      const auto report = lpme::audit_channel(cfg, unit_grid(21));
      EXPECT_TRUE(report.pass) << "eps=" << eps << " k=" << k;
      EXPECT_NEAR(report.max_log_ratio, eps, 1e-9)
          << "eps=" << eps << " k=" << k;
    }
  }
}

TEST(Audit, LaplaceMechanismsWithinBudget) {
  for (double eps : {0.5, 1.0}) {
    const ChannelConfig lm(Mechanism::kLaplaceMultinomial, PrivacyBudget(eps),
                           6);
    const auto rm = lpme::audit_channel(lm, {});
    EXPECT_TRUE(rm.pass);
    EXPECT_NEAR(rm.max_log_ratio, eps, 1e-6);  // l1 gap 2, rate eps/2

    const ChannelConfig lh(Mechanism::kLaplaceHistogram, PrivacyBudget(eps),
                           5);
    const auto rh = lpme::audit_channel(lh, unit_grid(41));
    EXPECT_TRUE(rh.pass);
    EXPECT_NEAR(rh.max_log_ratio, eps, 1e-6);

    const ChannelConfig ns(Mechanism::kNaiveLaplaceSeries, PrivacyBudget(eps),
                           4);
    const auto rn = lpme::audit_channel(ns, unit_grid(41));
    EXPECT_TRUE(rn.pass);
    EXPECT_GT(rn.max_log_ratio, 0.0);
    EXPECT_LE(rn.max_log_ratio, eps + 1e-9);
  }
}

TEST(Audit, ReportSerializes) {
  const ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(1.0),
                          3);
  const auto report = lpme::audit_channel(cfg, {});
  const auto j = report.to_json();
  EXPECT_EQ(j.at("mechanism"), "randomized_response");
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_TRUE(j.contains("witness"));
}

}  // namespace
