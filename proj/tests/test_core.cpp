#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lpme/basis.hpp"
#include "lpme/density.hpp"
#include "lpme/rng.hpp"
#include "lpme/simplex.hpp"

namespace {

using lpme::DensityModel;
using lpme::RngStream;

TEST(Rng, Reproducible) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer) {
  RngStream a(42, 7), b(42, 8), c(43, 7);
  int eq_ab = 0, eq_ac = 0;
  for (int i = 0; i < 256; ++i) {
    const auto x = a.next_u64();
    eq_ab += (x == b.next_u64());
    eq_ac += (x == c.next_u64());
  }
  EXPECT_LE(eq_ab, 1);
  EXPECT_LE(eq_ac, 1);
}

TEST(Rng, UniformRangeAndMean) {
  RngStream rng(1, 1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean 1/2, sd of the mean = 1/sqrt(12 n) ~ 6.5e-4; allow 5 sigma.
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Rng, UniformOpenNeverZeroOrOne) {
  RngStream rng(2, 9);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, LaplaceMomentsMatchRate) {
  // Laplace(rate) has mean 0 and variance 2 / rate^2.
  const double rate = 1.5;
  RngStream rng(3, 3);
  const int n = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = rng.laplace(rate);
    sum += w;
    sumsq += w * w;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  const double target = 2.0 / (rate * rate);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, target, 0.05 * target);
}

TEST(Rng, UniformBelowCoversRange) {
  RngStream rng(4, 4);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 600);
}

TEST(Rng, RademacherBalanced) {
  RngStream rng(5, 5);
  long s = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += rng.rademacher();
  EXPECT_LT(std::fabs(double(s)), 5.0 * std::sqrt(double(n)));
}

TEST(Rng, DeriveStreamIdInjectiveOnSmallGrid) {
  std::vector<std::uint64_t> ids;
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b)
      for (std::uint64_t c = 0; c < 8; ++c)
        for (std::uint64_t d = 0; d < 8; ++d)
          ids.push_back(lpme::derive_stream_id(a, b, c, d));
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::adjacent_find(ids.begin(), ids.end()), ids.end());
}

TEST(PrivacyBudget, RejectsNonPositive) {
  EXPECT_THROW(lpme::PrivacyBudget(0.0), std::invalid_argument);
  EXPECT_THROW(lpme::PrivacyBudget(-1.0), std::invalid_argument);
  EXPECT_NO_THROW(lpme::PrivacyBudget(0.1));
  EXPECT_TRUE(lpme::PrivacyBudget(0.25).in_theorem_range());
  EXPECT_FALSE(lpme::PrivacyBudget(1.0).in_theorem_range());
}

TEST(SimplexVector, Validation) {
  EXPECT_NO_THROW(lpme::SimplexVector({0.25, 0.25, 0.5}));
  EXPECT_THROW(lpme::SimplexVector({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(lpme::SimplexVector({-0.1, 1.1}), std::invalid_argument);
}

// Independent oracle for the simplex projection: bisect on the KKT threshold
// theta with sum_i max(v_i - theta, 0) = scale.
std::vector<double> project_simplex_oracle(const std::vector<double>& v,
                                           double scale) {
  double lo = *std::min_element(v.begin(), v.end()) - scale - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(x - mid, 0.0);
    (s > scale ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    w[i] = std::max(v[i] - theta, 0.0);
  return w;
}

TEST(ProjectSimplex, MatchesBisectionOracle) {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + int(rng.uniform_below(30));
    std::vector<double> v(d);
    for (double& x : v) x = 20.0 * (rng.uniform() - 0.5);
    const double scale = trial % 3 == 0 ? 1.0 : 0.1 + 3.0 * rng.uniform();
    const auto got = lpme::project_simplex(v, scale);
    const auto want = project_simplex_oracle(v, scale);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      ASSERT_GE(got[i], 0.0);
      ASSERT_NEAR(got[i], want[i], 1e-9);
      sum += got[i];
    }
    ASSERT_NEAR(sum, scale, 1e-9);
  }
}

TEST(ProjectSimplex, FixedPointOnSimplex) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const auto w = lpme::project_simplex(p);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(w[i], p[i], 1e-12);
}

TEST(ProjectSimplex, MinimizesDistanceAgainstPerturbations) {
  RngStream rng(12, 0);
  std::vector<double> v{1.3, -0.4, 0.9, 0.05, -2.0};
  const auto w = lpme::project_simplex(v);
  const double base = lpme::l2_norm_sq(v, w);
  for (int t = 0; t < 500; ++t) {
    // Move mass between two coordinates, staying on the simplex.
    auto u = w;
    const int i = int(rng.uniform_below(u.size()));
    const int j = int(rng.uniform_below(u.size()));
    if (i == j) continue;
    const double delta = std::min(u[i], 0.2 * rng.uniform());
    u[i] -= delta;
    u[j] += delta;
    EXPECT_GE(lpme::l2_norm_sq(v, u) + 1e-12, base);
  }
}

TEST(TrigBasis, Orthonormal) {
  for (int i = 1; i <= 9; ++i) {
    for (int j = i; j <= 9; ++j) {
      const double ip = lpme::simpson(
          [&](double t) {
            return lpme::trig_basis_eval(i, t) * lpme::trig_basis_eval(j, t);
          },
          0.0, 1.0, 4096);
      const double want = (i == j) ? 1.0 : 0.0;
      EXPECT_NEAR(ip, want, 1e-6) << "i=" << i << " j=" << j;
    }
  }
}

TEST(TrigBasis, UniformBound) {
  for (int j = 1; j <= 12; ++j)
    for (int g = 0; g <= 1000; ++g)
      ASSERT_LE(std::fabs(lpme::trig_basis_eval(j, g / 1000.0)),
                lpme::kTrigBasisBound + 1e-12);
}

TEST(TrigBasis, ArgumentChecks) {
  EXPECT_THROW(lpme::trig_basis_eval(-1, 0.5), std::invalid_argument);
  EXPECT_THROW(lpme::trig_basis_eval(2, 1.5), std::invalid_argument);
}

TEST(Simpson, ExactOnCubics) {
  const double got =
      lpme::simpson([](double x) { return x * x * x - 2.0 * x + 1.0; }, 0.0,
                    2.0, 2);
  EXPECT_NEAR(got, 4.0 - 4.0 + 2.0, 1e-12);
}

TEST(DensityModel, PiecewiseEvaluation) {
  const auto m = DensityModel::piecewise_constant({2.0, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(m(0.0), 2.0);
  EXPECT_DOUBLE_EQ(m(0.34), 0.5);
  EXPECT_DOUBLE_EQ(m(1.0), 0.5);
}

TEST(DensityModel, SeriesMatchesDirectSum) {
  const std::vector<double> coef{1.0, 0.3, -0.2, 0.1};
  const auto m = DensityModel::series(coef);
  for (int g = 0; g <= 100; ++g) {
    const double x = g / 100.0;
    double want = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j)
      want += coef[j] * lpme::trig_basis_eval(int(j + 1), x);
    ASSERT_NEAR(m(x), want, 1e-12);
  }
}

TEST(L2Distance, ParsevalMatchesQuadrature) {
  const auto f = DensityModel::series({1.0, 0.3, -0.2, 0.1});
  const auto g = DensityModel::series({1.0, -0.1, 0.4});
  const double parseval = lpme::l2_distance_squared(f, g);
  const auto fa = DensityModel::analytic([&](double x) { return f(x); });
  const auto ga = DensityModel::analytic([&](double x) { return g(x); });
  const double quad = lpme::l2_distance_squared(fa, ga);
  EXPECT_NEAR(parseval, quad, 1e-6);
  // Direct coefficient arithmetic.
  const double direct =
      0.4 * 0.4 + 0.6 * 0.6 + 0.1 * 0.1;
  EXPECT_NEAR(parseval, direct, 1e-12);
}

TEST(L2Distance, PiecewisePairExact) {
  const auto f = DensityModel::piecewise_constant({2.0, 0.0});
  const auto g = DensityModel::piecewise_constant({1.0, 1.0, 1.0});
  // |f-g|^2 = 1 on [0,1/2), 1 on [1/2,1]: integral 1.
  EXPECT_NEAR(lpme::l2_distance_squared(f, g), 1.0, 1e-12);
  const double quad = lpme::l2_distance_squared(
      f, DensityModel::analytic([](double) { return 1.0; }));
  EXPECT_NEAR(quad, 1.0, 1e-9);
}

TEST(L2Distance, MixedPiecewiseVsSeries) {
  const auto f = DensityModel::piecewise_constant({1.5, 0.5});
  const auto g = DensityModel::series({1.0});
  // |f-g| = 1/2 everywhere: integral of 1/4.
  EXPECT_NEAR(lpme::l2_distance_squared(f, g), 0.25, 1e-9);
}

TEST(SeriesCoefficient, RecoversCoefficients) {
  const std::vector<double> coef{1.0, 0.25, -0.3, 0.05, 0.0, 0.12};
  const auto f = DensityModel::series(coef);
  for (std::size_t j = 1; j <= coef.size(); ++j)
    EXPECT_NEAR(lpme::series_coefficient(f, int(j)), coef[j - 1], 1e-8);
  EXPECT_NEAR(lpme::series_coefficient(f, 9), 0.0, 1e-8);
}

TEST(SobolevClass, Validation) {
  EXPECT_NO_THROW(lpme::SobolevClass(1, 1.0));
  EXPECT_THROW(lpme::SobolevClass(0, 1.0), std::invalid_argument);
  EXPECT_THROW(lpme::SobolevClass(2, 0.0), std::invalid_argument);
}

}  // namespace
