// Command-line driver: Monte Carlo sweeps, privacy audits, lower-bound
// evaluation, and slope fitting over emitted CSV artifacts.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpme/audit.hpp"
#include "lpme/bounds.hpp"
#include "lpme/bumps.hpp"
#include "lpme/harness.hpp"
#include "lpme/packing.hpp"

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> trials;
};

lpme::ExperimentSpec load_spec(const std::string& config_path,
                               const std::string& problem,
                               const GlobalFlags& flags) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config " + config_path);
  nlohmann::json j = nlohmann::json::parse(in);
  j["problem"] = problem;
  auto spec = lpme::ExperimentSpec::from_json(j);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.workers) spec.workers = *flags.workers;
  if (flags.trials) spec.trials = *flags.trials;
  spec.validate();
  return spec;
}

int run_sweep_command(const std::string& config_path, const std::string& out_dir,
                      const std::string& problem, const GlobalFlags& flags) {
  const auto spec = load_spec(config_path, problem, flags);
  std::filesystem::create_directories(out_dir);
  const auto rows = lpme::run_sweep(spec);
  const auto checks = lpme::make_slope_checks(rows, spec.problem, spec.beta);
  const bool pass = lpme::emit_outputs(rows, checks, spec, out_dir);
  for (const auto& c : checks) {
    std::printf("[%s] %s eps=%g slope=%.4f expected=%.4f tol=%.2f\n",
                c.pass ? "PASS" : "FAIL", c.mechanism.c_str(), c.epsilon,
                c.measured, c.expected_exponent, c.tolerance);
  }
  std::printf("wrote %s/{results.csv,summary.json,plot.gp}\n", out_dir.c_str());
  return pass ? 0 : 1;
}

std::vector<double> unit_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = double(i) / (points - 1);
  return g;
}

int run_audit_command(const std::string& mechanism, double epsilon, int dims,
                      const std::string& out_path) {
  lpme::ChannelConfig cfg(lpme::mechanism_from_name(mechanism),
                          lpme::PrivacyBudget(epsilon), dims);
  const auto report = lpme::audit_channel(cfg, unit_grid(101));
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << report.to_json().dump(2) << '\n';
  }
  std::printf("[%s] %s eps=%g max_log_ratio=%.12f\n",
              report.pass ? "PASS" : "FAIL", mechanism.c_str(), epsilon,
              report.max_log_ratio);
  return report.pass ? 0 : 1;
}

int run_bounds_command(const std::string& problem, double n, double epsilon,
                       int d, int beta, int k, double delta,
                       std::uint64_t seed, const std::string& out_path) {
  nlohmann::json out;
  out["problem"] = problem;
  out["n"] = n;
  out["epsilon"] = epsilon;
  out["epsilon_info_bound_max"] = lpme::kInfoBoundEpsilonMax;
  bool pass = true;
  lpme::RngStream rng(seed, lpme::derive_stream_id(0xb0, 0, 0, 0));

  if (problem == "multinomial") {
    out["predicted_rates"] =
        lpme::predict_rates_multinomial(d, n, epsilon).to_json();
    const int s = d >= 8 ? 4 * (d / 8) : std::max(1, d / 2);
    auto packing = lpme::build_weighted_packing(d, s, rng);
    out["packing"] = packing.to_json();
    pass = packing.vectors.size() >= 2 && packing.min_l1_separation >= 1;
    if (epsilon <= lpme::kInfoBoundEpsilonMax) {
      const double info =
          lpme::info_bound_multinomial(n, epsilon, delta, s, packing);
      out["info_bound"] = info;
      // theta_nu = uniform + (delta/s) nu gives squared l2 separation
      // (delta/s)^2 ||nu - nu'||_1; Fano tests half that distance.
      const double delta_metric = delta * delta / (double(s) * s) *
                                  packing.min_l1_separation / 4.0;
      if (packing.log_cardinality > std::log(2.0))
        out["fano_lower"] =
            lpme::fano_bound(delta_metric, info, packing.log_cardinality);
    } else {
      out["info_bound_skipped"] = "epsilon outside C_eps validity range";
    }
  } else if (problem == "density") {
    out["predicted_rates"] =
        lpme::predict_rates_density(beta, n, epsilon).to_json();
    auto packing = lpme::build_sign_packing(k, rng);
    out["packing"] = packing.to_json();
    pass = packing.vectors.size() >= 2 &&
           packing.min_l1_separation >= std::max(1, k / 2);
    const auto bump = lpme::make_bump(beta);
    const double g_l2_sq = lpme::simpson(
        [&](double x) { return bump(x) * bump(x); }, 0.0, 1.0, 4096);
    out["c_half"] = bump.c_half;
    if (epsilon <= lpme::kInfoBoundEpsilonMax) {
      const double info =
          lpme::info_bound_density(n, epsilon, k, beta, packing, bump.c_half);
      out["info_bound"] = info;
      // ||f_nu - f_nu'||^2 = 4 k^{-2 beta - 1} ||g||^2 Hamming(nu, nu').
      const double sep_sq = 4.0 *
                            std::pow(double(k), -2.0 * beta - 1.0) * g_l2_sq *
                            (packing.min_l1_separation / 2.0);
      if (packing.log_cardinality > std::log(2.0))
        out["fano_lower"] =
            lpme::fano_bound(sep_sq / 4.0, info, packing.log_cardinality);
    } else {
      out["info_bound_skipped"] = "epsilon outside C_eps validity range";
    }
  } else {
    throw std::runtime_error("bounds: unknown problem " + problem);
  }

  out["pass"] = pass;
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << out.dump(2) << '\n';
  }
  std::printf("[%s] bounds %s n=%g eps=%g\n", pass ? "PASS" : "FAIL",
              problem.c_str(), n, epsilon);
  return pass ? 0 : 1;
}

int run_slope_command(const std::string& csv_path, const std::string& mechanism,
                      double epsilon) {
  const auto all = lpme::parse_results_csv_file(csv_path);
  std::vector<lpme::ResultRow> rows;
  for (const auto& r : all)
    if (r.mechanism == mechanism &&
        std::fabs(r.epsilon - epsilon) <= 1e-9 * std::max(1.0, epsilon))
      rows.push_back(r);
  if (rows.empty()) throw std::runtime_error("slope: no matching rows");
  const auto fit = lpme::fit_loglog_slope(rows);
  const auto [expected, tol] =
      lpme::expected_slope(rows.front().problem, mechanism, std::max(1, rows.front().beta));
  const bool pass = mechanism == "naive_laplace_series"
                        ? fit.slope >= expected - tol
                        : std::fabs(fit.slope - expected) <= tol;
  std::printf("[%s] %s eps=%g slope=%.6f stderr=%.6f r2=%.6f expected=%.4f\n",
              pass ? "PASS" : "FAIL", mechanism.c_str(), epsilon, fit.slope,
              fit.stderr_, fit.r2, expected);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally private multinomial and density estimation toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  std::uint64_t seed_val = 1;
  int workers_val = 1, trials_val = 100;
  app.add_option("--seed", seed_val, "RNG seed")
      ->each([&](const std::string&) { flags.seed = seed_val; });
  app.add_option("--workers", workers_val, "worker threads")
      ->each([&](const std::string&) { flags.workers = workers_val; });
  app.add_option("--trials", trials_val, "Monte Carlo trials per cell")
      ->each([&](const std::string&) { flags.trials = trials_val; });

  std::string config_path, out_dir;
  auto* multinomial = app.add_subcommand("multinomial", "simplex estimation sweep");
  multinomial->add_option("--config", config_path, "sweep config JSON")->required();
  multinomial->add_option("--out", out_dir, "output directory")->required();
  auto* density = app.add_subcommand("density", "density estimation sweep");
  density->add_option("--config", config_path, "sweep config JSON")->required();
  density->add_option("--out", out_dir, "output directory")->required();

  std::string audit_mechanism, audit_out;
  double audit_epsilon = 1.0;
  int audit_dims = 2;
  auto* audit = app.add_subcommand("audit", "worst-case likelihood-ratio audit");
  audit->add_option("--mechanism", audit_mechanism, "channel name")->required();
  audit->add_option("--epsilon", audit_epsilon, "privacy parameter")->required();
  audit->add_option("--dims", audit_dims, "categories / bins / truncation")->required();
  audit->add_option("--out", audit_out, "report JSON path");

  std::string bounds_problem, bounds_out;
  double bounds_n = 1000.0, bounds_epsilon = 0.25, bounds_delta = 0.5;
  int bounds_d = 10, bounds_beta = 1, bounds_k = 8;
  auto* bounds = app.add_subcommand("bounds", "minimax lower-bound evaluation");
  bounds->add_option("--problem", bounds_problem, "multinomial|density")->required();
  bounds->add_option("--n", bounds_n, "sample size")->required();
  bounds->add_option("--epsilon", bounds_epsilon, "privacy parameter")->required();
  bounds->add_option("--d", bounds_d, "simplex dimension");
  bounds->add_option("--beta", bounds_beta, "smoothness");
  bounds->add_option("--k", bounds_k, "packing dimension");
  bounds->add_option("--delta", bounds_delta, "packing perturbation scale");
  bounds->add_option("--out", bounds_out, "bounds JSON path");

  std::string slope_in, slope_mechanism;
  double slope_epsilon = 1.0;
  auto* slope = app.add_subcommand("slope", "log-log rate fit from results.csv");
  slope->add_option("--in", slope_in, "results.csv path")->required();
  slope->add_option("--mechanism", slope_mechanism, "mechanism name")->required();
  slope->add_option("--epsilon", slope_epsilon, "privacy parameter")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (multinomial->parsed())
      return run_sweep_command(config_path, out_dir, "multinomial", flags);
    if (density->parsed())
      return run_sweep_command(config_path, out_dir, "density", flags);
    if (audit->parsed())
      return run_audit_command(audit_mechanism, audit_epsilon, audit_dims,
                               audit_out);
    if (bounds->parsed())
      return run_bounds_command(bounds_problem, bounds_n, bounds_epsilon,
                                bounds_d, bounds_beta, bounds_k, bounds_delta,
                                flags.seed.value_or(1), bounds_out);
    if (slope->parsed())
      return run_slope_command(slope_in, slope_mechanism, slope_epsilon);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
