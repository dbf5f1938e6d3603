#ifndef LPME_HARNESS_HPP
#define LPME_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lpme/bounds.hpp"
#include "lpme/channels.hpp"
#include "lpme/density.hpp"
#include "lpme/estimators.hpp"
#include "lpme/rng.hpp"

namespace lpme {

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

/// Declarative Monte Carlo sweep over (mechanism, n, epsilon).  Mechanisms may
/// be private channels or the non-private baselines "mle",
/// "classical_histogram", "classical_series".
struct ExperimentSpec {
  std::string problem;  // "multinomial" | "density"
  std::vector<std::string> mechanisms;
  std::vector<std::int64_t> n_grid;
  std::vector<double> epsilon_grid;
  int d = 10;     // multinomial categories
  int beta = 1;   // density smoothness
  int trials = 100;
  std::uint64_t seed = 1;
  std::string truth = "uniform";          // named density, or "simplex"
  std::vector<double> truth_simplex;      // multinomial truth; empty = uniform
  std::vector<int> naive_k_grid = {2, 10, 14, 18};
  int workers = 1;

  void validate() const {
    if (problem != "multinomial" && problem != "density")
      throw std::invalid_argument("ExperimentSpec: unknown problem " + problem);
    if (mechanisms.empty())
      throw std::invalid_argument("ExperimentSpec: no mechanisms");
    if (n_grid.empty()) throw std::invalid_argument("ExperimentSpec: empty n_grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw std::invalid_argument("ExperimentSpec: n < 1");
      if (i > 0 && n_grid[i] <= n_grid[i - 1])
        throw std::invalid_argument("ExperimentSpec: n_grid not strictly increasing");
    }
    if (epsilon_grid.empty())
      throw std::invalid_argument("ExperimentSpec: empty epsilon_grid");
    for (double e : epsilon_grid)
      if (!(e > 0.0)) throw std::invalid_argument("ExperimentSpec: epsilon <= 0");
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials < 1");
    if (d < 2) throw std::invalid_argument("ExperimentSpec: d < 2");
    if (beta < 1) throw std::invalid_argument("ExperimentSpec: beta < 1");
    if (workers < 1) throw std::invalid_argument("ExperimentSpec: workers < 1");
    if (!truth_simplex.empty() &&
        static_cast<int>(truth_simplex.size()) != d)
      throw std::invalid_argument("ExperimentSpec: truth_simplex size != d");
  }

  static ExperimentSpec from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    s.problem = j.at("problem").get<std::string>();
    s.mechanisms = j.at("mechanisms").get<std::vector<std::string>>();
    s.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
    s.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
    if (j.contains("d")) s.d = j.at("d").get<int>();
    if (j.contains("beta")) s.beta = j.at("beta").get<int>();
    if (j.contains("trials")) s.trials = j.at("trials").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("truth")) {
      if (j.at("truth").is_array()) {
        s.truth = "simplex";
        s.truth_simplex = j.at("truth").get<std::vector<double>>();
      } else {
        s.truth = j.at("truth").get<std::string>();
      }
    }
    if (j.contains("naive_k_grid"))
      s.naive_k_grid = j.at("naive_k_grid").get<std::vector<int>>();
    if (j.contains("workers")) s.workers = j.at("workers").get<int>();
    s.validate();
    return s;
  }
};

/// One aggregated measurement: mse_mean is squared l2 (multinomial) or
/// squared L2 (density) risk averaged over trials.
struct ResultRow {
  std::string mechanism;
  std::string problem;
  std::int64_t n = 0;
  int dims = 0;
  double epsilon = 0.0;
  int beta = 0;  // 0 for multinomial rows
  int trials = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double wall_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Named test densities (unit-interval, closed-form or Newton inverse CDF)
// ---------------------------------------------------------------------------

struct TestDensity {
  std::string name;
  DensityModel model;
  std::function<double(RngStream&)> sample;
};

/// "uniform": f = 1.
/// "tent": f(x) = 3/4 + (1/2 - |x - 1/2|), 1-Lipschitz, quadratic inverse CDF.
/// "cosine": f(x) = 1 + (1/4) sqrt(2) cos(2 pi x), inside the beta=2 ball.
inline TestDensity make_test_density(const std::string& name) {
  if (name == "uniform") {
    return TestDensity{name, DensityModel::series({1.0}),
                       [](RngStream& rng) { return rng.uniform(); }};
  }
  if (name == "tent") {
    auto model = DensityModel::analytic(
        [](double x) { return 0.75 + (0.5 - std::fabs(x - 0.5)); }, "tent");
    auto sample = [](RngStream& rng) {
      const double u = rng.uniform();
      // F(x) = 3x/4 + x^2/2 on [0, 1/2]; mirror for the upper half.
      const auto inv_low = [](double v) {
        return -0.75 + std::sqrt(0.5625 + 2.0 * v);
      };
      const double x = (u <= 0.5) ? inv_low(u) : 1.0 - inv_low(1.0 - u);
      return std::clamp(x, 0.0, 1.0);
    };
    return TestDensity{name, std::move(model), std::move(sample)};
  }
  if (name == "shifted_cosine") {
    // One phase-shifted harmonic: energy splits across the cosine and sine
    // coordinates (weights 16 a^2 + 81 b^2 = 0.994 <= 1, inside the beta=2
    // ball), so truncation at one coefficient leaves an order-1e-2 tail.
    const double a = 0.05, b = 0.1085;
    auto model = DensityModel::series({1.0, a, b});
    const double ca = a * std::sqrt(2.0), cb = b * std::sqrt(2.0);
    auto sample = [ca, cb](RngStream& rng) {
      const double u = rng.uniform();
      double x = u;
      for (int it = 0; it < 64; ++it) {
        const double fx = x +
                          (ca * std::sin(2.0 * M_PI * x) -
                           cb * (std::cos(2.0 * M_PI * x) - 1.0)) /
                              (2.0 * M_PI) -
                          u;
        if (std::fabs(fx) < 1e-14) break;
        x -= fx / (1.0 + ca * std::cos(2.0 * M_PI * x) +
                   cb * std::sin(2.0 * M_PI * x));
        x = std::clamp(x, 0.0, 1.0);
      }
      return x;
    };
    return TestDensity{name, std::move(model), std::move(sample)};
  }
  if (name == "cosine") {
    const double a = 0.25 * std::sqrt(2.0);
    auto model = DensityModel::series({1.0, 0.25});
    auto sample = [a](RngStream& rng) {
      const double u = rng.uniform();
      // Newton on F(x) = x + a sin(2 pi x)/(2 pi); f >= 1 - a > 0.6.
      double x = u;
      for (int it = 0; it < 64; ++it) {
        const double fx = x + a * std::sin(2.0 * M_PI * x) / (2.0 * M_PI) - u;
        if (std::fabs(fx) < 1e-14) break;
        x -= fx / (1.0 + a * std::cos(2.0 * M_PI * x));
        x = std::clamp(x, 0.0, 1.0);
      }
      return x;
    };
    return TestDensity{name, std::move(model), std::move(sample)};
  }
  throw std::invalid_argument("unknown test density: " + name);
}

// ---------------------------------------------------------------------------
// Truncation / bin rules
// ---------------------------------------------------------------------------

inline int histogram_bins_rule(std::int64_t n, double epsilon) {
  return std::max<int>(
      1, static_cast<int>(std::llround(std::pow(double(n) * epsilon * epsilon, 0.25))));
}

inline int series_truncation_rule(std::int64_t n, double epsilon, int beta) {
  return std::max<int>(
      1, static_cast<int>(std::llround(std::pow(double(n) * epsilon * epsilon,
                                                1.0 / (2.0 * beta + 2.0)))));
}

inline int classical_histogram_bins_rule(std::int64_t n) {
  return std::max<int>(1, static_cast<int>(std::llround(std::pow(double(n), 1.0 / 3.0))));
}

inline int classical_series_truncation_rule(std::int64_t n, int beta) {
  return std::max<int>(
      1, static_cast<int>(std::llround(std::pow(double(n), 1.0 / (2.0 * beta + 1.0)))));
}

// ---------------------------------------------------------------------------
// Single-trial replications
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_classical_mechanism(const std::string& m) {
  return m == "mle" || m == "classical_histogram" || m == "classical_series";
}

/// Every private estimator here is a function of the payload mean alone, so a
/// trial accumulates the running mean and feeds the estimator one averaged
/// record instead of materializing n of them.
inline PrivatizedRecord mean_record(Mechanism m, std::vector<double> sum,
                                    std::int64_t n, double amplitude) {
  for (double& v : sum) v /= static_cast<double>(n);
  return PrivatizedRecord{m, std::move(sum), amplitude};
}

inline int sample_category(const std::vector<double>& cumulative,
                           RngStream& rng) {
  const double u = rng.uniform();
  const auto it =
      std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const int idx = static_cast<int>(it - cumulative.begin()) + 1;
  return std::min<int>(idx, static_cast<int>(cumulative.size()));
}

inline double multinomial_trial(const std::string& mechanism,
                                const std::vector<double>& truth,
                                const std::vector<double>& cumulative,
                                std::int64_t n, double epsilon,
                                RngStream& rng) {
  const int d = static_cast<int>(truth.size());
  std::vector<double> theta;
  if (mechanism == "mle") {
    std::vector<int> raw(n);
    for (auto& x : raw) x = sample_category(cumulative, rng);
    theta = mle_multinomial_estimate(raw, d).coords;
  } else if (mechanism == "randomized_response") {
    ChannelConfig cfg(Mechanism::kRandomizedResponse, PrivacyBudget(epsilon), d);
    std::vector<double> sum(d, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto rec = randomized_response(sample_category(cumulative, rng), cfg, rng);
      for (int j = 0; j < d; ++j) sum[j] += rec.payload[j];
    }
    const auto rec = mean_record(cfg.mechanism, std::move(sum), n, 0.0);
    theta = rr_multinomial_estimate(std::span(&rec, 1), cfg).coords;
  } else if (mechanism == "laplace_multinomial") {
    ChannelConfig cfg(Mechanism::kLaplaceMultinomial, PrivacyBudget(epsilon), d);
    std::vector<double> sum(d, 0.0);
    std::vector<double> one_hot(d, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const int x = sample_category(cumulative, rng);
      one_hot[x - 1] = 1.0;
      const auto rec = laplace_perturb(one_hot, cfg, rng);
      one_hot[x - 1] = 0.0;
      for (int j = 0; j < d; ++j) sum[j] += rec.payload[j];
    }
    const auto rec = mean_record(cfg.mechanism, std::move(sum), n, 0.0);
    theta = laplace_multinomial_estimate(std::span(&rec, 1), cfg).coords;
  } else {
    throw std::invalid_argument("multinomial sweep: bad mechanism " + mechanism);
  }
  return l2_norm_sq(theta, truth);
}

inline double density_trial(const std::string& mechanism,
                            const TestDensity& truth, std::int64_t n,
                            double epsilon, int k, RngStream& rng) {
  DensityModel estimate = DensityModel::series({1.0});
  if (mechanism == "classical_histogram" || mechanism == "classical_series") {
    std::vector<double> raw(n);
    for (auto& x : raw) x = truth.sample(rng);
    estimate = (mechanism == "classical_histogram")
                   ? classical_histogram_estimate(raw, k)
                   : classical_series_estimate(raw, k);
  } else if (mechanism == "laplace_histogram") {
    ChannelConfig cfg(Mechanism::kLaplaceHistogram, PrivacyBudget(epsilon), k);
    std::vector<double> sum(k, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto rec = laplace_histogram_channel(truth.sample(rng), cfg, rng);
      for (int j = 0; j < k; ++j) sum[j] += rec.payload[j];
    }
    const auto rec = mean_record(cfg.mechanism, std::move(sum), n, 0.0);
    estimate = histogram_density_estimate(std::span(&rec, 1), k);
  } else if (mechanism == "halfspace_series") {
    ChannelConfig cfg(Mechanism::kHalfspaceSeries, PrivacyBudget(epsilon), k);
    const double amplitude = halfspace_amplitude(cfg);
    std::vector<double> sum(k, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto rec = halfspace_series_channel(truth.sample(rng), cfg, rng);
      for (int j = 0; j < k; ++j) sum[j] += rec.payload[j];
    }
    const auto rec = mean_record(cfg.mechanism, std::move(sum), n, amplitude);
    estimate = series_density_estimate(std::span(&rec, 1), k);
  } else if (mechanism == "naive_laplace_series") {
    ChannelConfig cfg(Mechanism::kNaiveLaplaceSeries, PrivacyBudget(epsilon), k);
    std::vector<double> sum(k, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto rec = naive_laplace_series_channel(truth.sample(rng), cfg, rng);
      for (int j = 0; j < k; ++j) sum[j] += rec.payload[j];
    }
    const auto rec = mean_record(cfg.mechanism, std::move(sum), n, 0.0);
    estimate = naive_series_density_estimate(std::span(&rec, 1), k);
  } else {
    throw std::invalid_argument("density sweep: bad mechanism " + mechanism);
  }
  return l2_distance_squared(estimate, truth.model);
}

struct CellSpec {
  std::string mechanism;
  std::size_t mech_idx = 0;
  std::int64_t n = 0;
  std::size_t n_idx = 0;
  double epsilon = 0.0;
  std::size_t eps_idx = 0;
  int dims = 0;
  bool scan_candidate = false;  // naive best-k scan entry
};

inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

/// Runs trials for every (mechanism, n, epsilon) cell.  Each trial owns an
/// RngStream keyed by (mechanism, bins, n index, epsilon index, trial), so the
/// output is independent of worker count and scheduling.  Non-private
/// baselines are computed once and replicated across the epsilon grid; the
/// naive Laplace series is run over spec.naive_k_grid and reported at the
/// per-(n, epsilon) best truncation.
inline std::vector<ResultRow> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const bool density_problem = spec.problem == "density";

  std::vector<double> truth_vec;
  std::vector<double> cumulative;
  TestDensity truth_density{"uniform", DensityModel::series({1.0}), {}};
  if (density_problem) {
    truth_density = make_test_density(spec.truth);
  } else {
    truth_vec = spec.truth_simplex.empty()
                    ? std::vector<double>(spec.d, 1.0 / spec.d)
                    : spec.truth_simplex;
    (void)SimplexVector(truth_vec);  // validates
    cumulative = truth_vec;
    for (std::size_t i = 1; i < cumulative.size(); ++i)
      cumulative[i] += cumulative[i - 1];
  }

  std::vector<detail::CellSpec> cells;
  for (std::size_t mi = 0; mi < spec.mechanisms.size(); ++mi) {
    const std::string& mech = spec.mechanisms[mi];
    const bool classical = detail::is_classical_mechanism(mech);
    for (std::size_t ei = 0; ei < spec.epsilon_grid.size(); ++ei) {
      if (classical && ei > 0) break;  // replicated after aggregation
      for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
        detail::CellSpec cell;
        cell.mechanism = mech;
        cell.mech_idx = mi;
        cell.n = spec.n_grid[ni];
        cell.n_idx = ni;
        cell.epsilon = spec.epsilon_grid[ei];
        cell.eps_idx = ei;
        if (!density_problem) {
          cell.dims = spec.d;
          cells.push_back(cell);
        } else if (mech == "laplace_histogram") {
          cell.dims = histogram_bins_rule(cell.n, cell.epsilon);
          cells.push_back(cell);
        } else if (mech == "halfspace_series") {
          cell.dims = series_truncation_rule(cell.n, cell.epsilon, spec.beta);
          cells.push_back(cell);
        } else if (mech == "classical_histogram") {
          cell.dims = classical_histogram_bins_rule(cell.n);
          cells.push_back(cell);
        } else if (mech == "classical_series") {
          cell.dims = classical_series_truncation_rule(cell.n, spec.beta);
          cells.push_back(cell);
        } else if (mech == "naive_laplace_series") {
          for (int k : spec.naive_k_grid) {
            cell.dims = k;
            cell.scan_candidate = true;
            cells.push_back(cell);
          }
        } else {
          throw std::invalid_argument("run_sweep: mechanism " + mech +
                                      " not valid for problem " + spec.problem);
        }
      }
    }
  }

  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  std::vector<double> errors(cells.size() * trials, 0.0);
  std::vector<double> task_ms(cells.size() * trials, 0.0);
  detail::parallel_for(
      cells.size() * trials, spec.workers, [&](std::size_t task) {
        const auto& cell = cells[task / trials];
        const std::size_t trial = task % trials;
        RngStream rng(
            spec.seed,
            derive_stream_id(cell.mech_idx,
                             (std::uint64_t(cell.dims) << 32) | cell.n_idx,
                             cell.eps_idx, trial));
        const auto start = std::chrono::steady_clock::now();
        errors[task] =
            density_problem
                ? detail::density_trial(cell.mechanism, truth_density, cell.n,
                                        cell.epsilon, cell.dims, rng)
                : detail::multinomial_trial(cell.mechanism, truth_vec,
                                            cumulative, cell.n, cell.epsilon,
                                            rng);
        task_ms[task] = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      });

  std::vector<ResultRow> rows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> best_scan;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    ResultRow row;
    row.mechanism = cell.mechanism;
    row.problem = spec.problem;
    row.n = cell.n;
    row.dims = cell.dims;
    row.epsilon = cell.epsilon;
    row.beta = density_problem ? spec.beta : 0;
    row.trials = spec.trials;
    double mean = 0.0, wall = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      mean += errors[c * trials + t];
      wall += task_ms[c * trials + t];
    }
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double dlt = errors[c * trials + t] - mean;
      var += dlt * dlt;
    }
    var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
    row.mse_mean = mean;
    row.mse_stderr = std::sqrt(var / static_cast<double>(trials));
    row.wall_ms = wall;
    if (cell.scan_candidate) {
      const auto key = std::make_pair(cell.n_idx, cell.eps_idx);
      const auto it = best_scan.find(key);
      if (it == best_scan.end()) {
        best_scan[key] = rows.size();
        rows.push_back(std::move(row));
      } else if (row.mse_mean < rows[it->second].mse_mean) {
        const double prior_wall = rows[it->second].wall_ms + row.wall_ms;
        rows[it->second] = std::move(row);
        rows[it->second].wall_ms = prior_wall;
      } else {
        rows[it->second].wall_ms += row.wall_ms;
      }
    } else {
      rows.push_back(std::move(row));
    }
  }

  // Replicate the epsilon-independent baselines across the grid.
  std::vector<ResultRow> replicated;
  for (const auto& row : rows) {
    if (detail::is_classical_mechanism(row.mechanism)) {
      for (std::size_t ei = 1; ei < spec.epsilon_grid.size(); ++ei) {
        ResultRow copy = row;
        copy.epsilon = spec.epsilon_grid[ei];
        replicated.push_back(std::move(copy));
      }
    }
  }
  rows.insert(rows.end(), replicated.begin(), replicated.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return std::tie(a.mechanism, a.epsilon, a.n) <
                            std::tie(b.mechanism, b.epsilon, b.n);
                   });
  return rows;
}

// ---------------------------------------------------------------------------
// Slope fitting
// ---------------------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// OLS of log(mse_mean) on log(n).  Rows with nonpositive mse are excluded.
inline SlopeFit fit_loglog_slope(const std::vector<ResultRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.mse_mean <= 0.0) continue;  // excluded: log undefined
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.mse_mean));
  }
  const int m = static_cast<int>(xs.size());
  if (m < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 usable rows");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate n values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.points_used = m;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.stderr_ = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
  return fit;
}

/// Expected log-log exponent and Monte Carlo tolerance per mechanism.
struct SlopeCheck {
  std::string mechanism;
  double epsilon = 0.0;
  double expected_exponent = 0.0;
  double measured = 0.0;
  double stderr_ = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  nlohmann::json to_json() const {
    return nlohmann::json{{"mechanism", mechanism},
                          {"epsilon", epsilon},
                          {"expected_exponent", expected_exponent},
                          {"measured", measured},
                          {"stderr", stderr_},
                          {"tolerance", tolerance},
                          {"pass", pass}};
  }
};

inline std::pair<double, double> expected_slope(const std::string& problem,
                                                const std::string& mechanism,
                                                int beta) {
  const double b = static_cast<double>(beta);
  if (problem == "multinomial") return {-1.0, 0.1};
  if (mechanism == "laplace_histogram") return {-2.0 * b / (2.0 * b + 2.0), 0.07};
  if (mechanism == "halfspace_series") return {-2.0 * b / (2.0 * b + 2.0), 0.08};
  if (mechanism == "classical_histogram")
    return {-2.0 * b / (2.0 * b + 1.0), 0.07};
  if (mechanism == "classical_series") return {-2.0 * b / (2.0 * b + 1.0), 0.08};
  if (mechanism == "naive_laplace_series")
    return {-2.0 * b / (2.0 * b + 3.0), 0.08};
  throw std::invalid_argument("expected_slope: unknown mechanism " + mechanism);
}

/// Fits one slope per (mechanism, epsilon) group with at least four distinct
/// sample sizes.  The naive series scan only certifies that its rate is no
/// faster than predicted, so its check is one-sided.
inline std::vector<SlopeCheck> make_slope_checks(
    const std::vector<ResultRow>& rows, const std::string& problem, int beta) {
  std::map<std::pair<std::string, double>, std::vector<ResultRow>> groups;
  for (const auto& r : rows) groups[{r.mechanism, r.epsilon}].push_back(r);
  std::vector<SlopeCheck> checks;
  for (const auto& [key, group] : groups) {
    std::vector<std::int64_t> ns;
    for (const auto& r : group) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 4) continue;
    const auto fit = fit_loglog_slope(group);
    const auto [expected, tol] = expected_slope(problem, key.first, beta);
    SlopeCheck check;
    check.mechanism = key.first;
    check.epsilon = key.second;
    check.expected_exponent = expected;
    check.measured = fit.slope;
    check.stderr_ = fit.stderr_;
    check.tolerance = tol;
    check.pass = key.first == "naive_laplace_series"
                     ? fit.slope >= expected - tol
                     : std::fabs(fit.slope - expected) <= tol;
    checks.push_back(std::move(check));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// Effective sample size
// ---------------------------------------------------------------------------

struct EffectiveSampleSize {
  double epsilon = 0.0;
  std::int64_t n = 0;
  double n_prime = 0.0;
  double ratio = 0.0;  // n_prime / n

  nlohmann::json to_json() const {
    return nlohmann::json{{"epsilon", epsilon},
                          {"n", n},
                          {"n_prime", n_prime},
                          {"ratio", ratio}};
  }
};

/// For each private row, interpolates (log n, log mse) on the classical curve
/// to find the classical sample size n' with matching risk; the theory says
/// n'/n tracks epsilon^2 (over d for the multinomial problem) up to constants.
inline std::vector<EffectiveSampleSize> effective_sample_size_report(
    const std::vector<ResultRow>& private_rows,
    const std::vector<ResultRow>& classical_rows) {
  std::vector<std::pair<double, double>> curve;  // (log mse desc by n, log n)
  {
    std::vector<ResultRow> sorted = classical_rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const ResultRow& a, const ResultRow& b) { return a.n < b.n; });
    for (const auto& r : sorted)
      if (r.mse_mean > 0.0)
        curve.emplace_back(std::log(r.mse_mean),
                           std::log(static_cast<double>(r.n)));
  }
  if (curve.size() < 2)
    throw std::invalid_argument("effective_sample_size: classical curve too short");

  std::vector<EffectiveSampleSize> out;
  for (const auto& r : private_rows) {
    if (r.mse_mean <= 0.0) continue;
    const double target = std::log(r.mse_mean);
    // Walk the (decreasing in n) classical mse curve for a bracketing segment.
    std::optional<double> log_np;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      const double y0 = curve[i].first, y1 = curve[i + 1].first;
      if ((target <= y0 && target >= y1) || (target >= y0 && target <= y1)) {
        const double t = (y1 == y0) ? 0.5 : (target - y0) / (y1 - y0);
        log_np = curve[i].second + t * (curve[i + 1].second - curve[i].second);
        break;
      }
    }
    if (!log_np) continue;  // outside the overlapping mse range
    EffectiveSampleSize e;
    e.epsilon = r.epsilon;
    e.n = r.n;
    e.n_prime = std::exp(*log_np);
    e.ratio = e.n_prime / static_cast<double>(r.n);
    out.push_back(e);
  }
  if (out.empty())
    throw std::invalid_argument("effective_sample_size: no overlapping mse range");
  return out;
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string results_csv_string(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "mechanism,problem,n,dims,epsilon,beta,trials,mse_mean,mse_stderr,wall_ms\n";
  for (const auto& r : rows) {
    os << r.mechanism << ',' << r.problem << ',' << r.n << ',' << r.dims << ','
       << detail::format_sig17(r.epsilon) << ',' << r.beta << ',' << r.trials
       << ',' << detail::format_sig17(r.mse_mean) << ','
       << detail::format_sig17(r.mse_stderr) << ','
       << detail::format_sig17(r.wall_ms) << '\n';
  }
  return os.str();
}

inline std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("results csv: empty input");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10)
      throw std::invalid_argument("results csv: malformed row: " + line);
    ResultRow r;
    r.mechanism = fields[0];
    r.problem = fields[1];
    r.n = std::stoll(fields[2]);
    r.dims = std::stoi(fields[3]);
    r.epsilon = std::stod(fields[4]);
    r.beta = std::stoi(fields[5]);
    r.trials = std::stoi(fields[6]);
    r.mse_mean = std::stod(fields[7]);
    r.mse_stderr = std::stod(fields[8]);
    r.wall_ms = std::stod(fields[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ResultRow> parse_results_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_results_csv(in);
}

/// Writes results.csv, summary.json, and plot.gp under out_dir.  Returns true
/// iff every embedded slope check passed.
inline bool emit_outputs(const std::vector<ResultRow>& rows,
                         const std::vector<SlopeCheck>& fits,
                         const ExperimentSpec& spec, const std::string& out_dir) {
  if (rows.empty()) throw std::invalid_argument("emit_outputs: no rows");

  {
    std::ofstream csv(out_dir + "/results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + out_dir + "/results.csv");
    csv << results_csv_string(rows);
  }

  bool all_pass = true;
  nlohmann::json summary;
  summary["problem"] = spec.problem;
  summary["seed"] = spec.seed;
  summary["trials"] = spec.trials;
  summary["fits"] = nlohmann::json::array();
  for (const auto& f : fits) {
    summary["fits"].push_back(f.to_json());
    all_pass = all_pass && f.pass;
  }
  summary["predicted_rates"] = nlohmann::json::array();
  for (double eps : spec.epsilon_grid) {
    for (std::int64_t n : spec.n_grid) {
      const RatePrediction pred =
          spec.problem == "multinomial"
              ? predict_rates_multinomial(spec.d, double(n), eps)
              : predict_rates_density(spec.beta, double(n), eps);
      nlohmann::json entry = pred.to_json();
      entry["n"] = n;
      entry["epsilon"] = eps;
      summary["predicted_rates"].push_back(std::move(entry));
    }
  }
  summary["pass"] = all_pass;
  {
    std::ofstream js(out_dir + "/summary.json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + out_dir + "/summary.json");
    js << summary.dump(2) << '\n';
  }

  {
    std::ofstream gp(out_dir + "/plot.gp", std::ios::binary);
    if (!gp) throw std::runtime_error("cannot write " + out_dir + "/plot.gp");
    gp << "# gnuplot script for results.csv (data-only contract; any plotting\n"
          "# tool that reads the CSV may be substituted)\n"
          "set datafile separator ','\n"
          "set logscale xy\n"
          "set xlabel 'n'\n"
          "set ylabel 'mean squared error'\n"
          "set key outside\n"
          "set terminal pngcairo size 900,600\n"
          "set output 'rates.png'\n";
    std::vector<std::pair<std::string, double>> groups;
    for (const auto& r : rows) {
      const auto g = std::make_pair(r.mechanism, r.epsilon);
      if (std::find(groups.begin(), groups.end(), g) == groups.end())
        groups.push_back(g);
    }
    gp << "plot ";
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (i > 0) gp << ", \\\n     ";
      gp << "'results.csv' using 3:((strcol(1) eq '" << groups[i].first
         << "' && column(5) == " << detail::format_sig17(groups[i].second)
         << ") ? column(8) : 1/0) with linespoints title '" << groups[i].first
         << " eps=" << detail::format_sig17(groups[i].second) << "'";
    }
    gp << '\n';
  }
  return all_pass;
}

}  // namespace lpme

#endif  // LPME_HARNESS_HPP
