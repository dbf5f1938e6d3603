#ifndef LPME_AUDIT_HPP
#define LPME_AUDIT_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpme/channels.hpp"

namespace lpme {

/// Result of a worst-case likelihood-ratio scan over input pairs and output
/// events.  For the discrete mechanisms the scan is an exact enumeration; for
/// the Laplace mechanisms output events are density evaluations on a grid, a
/// spot-check of the closed-form ratio bound.
struct AuditReport {
  std::string mechanism;
  double epsilon = 0.0;
  double max_log_ratio = 0.0;
  std::string witness_input;
  std::string witness_input_prime;
  std::string witness_event;
  bool pass = false;

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"mechanism", mechanism},
        {"epsilon", epsilon},
        {"max_log_ratio", max_log_ratio},
        {"witness",
         {{"input", witness_input},
          {"input_prime", witness_input_prime},
          {"output_event", witness_event}}},
        {"pass", pass}};
  }
};

namespace detail {

struct RatioTracker {
  double best = -1.0;
  std::string in_a, in_b, event;

  void offer(double ratio, const std::string& a, const std::string& b,
             const std::string& ev) {
    if (ratio > best) {
      best = ratio;
      in_a = a;
      in_b = b;
      event = ev;
    }
  }
};

inline std::string vec_to_string(const std::vector<double>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "]";
  return os.str();
}

/// max_z sum_j (|z_j - b_j| - |z_j - a_j|) over a per-coordinate output grid;
/// the Laplace log-ratio for inputs a, b is rate times this value.
inline double laplace_grid_gap(const std::vector<double>& a,
                               const std::vector<double>& b, double lo,
                               double hi, int grid_points) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double best = -1e300;
    for (int g = 0; g < grid_points; ++g) {
      const double z = lo + (hi - lo) * g / (grid_points - 1);
      best = std::max(best, std::fabs(z - b[j]) - std::fabs(z - a[j]));
    }
    total += best;
  }
  return total;
}

}  // namespace detail

inline constexpr int kAuditEnumerationCapRR = 16;   // d for randomized response
inline constexpr int kAuditEnumerationCapHS = 4;    // k for halfspace series
inline constexpr int kAuditGridPoints = 101;

/// Worst-case log-likelihood-ratio audit.  input_grid holds raw samples
/// (x in [0,1] for the density mechanisms; ignored by randomized response and
/// laplace_multinomial, which audit all category corners).  Passes iff the
/// measured maximum is at most epsilon + tolerance.
inline AuditReport audit_channel(const ChannelConfig& cfg,
                                 const std::vector<double>& input_grid,
                                 double tolerance = 1e-9) {
  const double eps = cfg.epsilon.epsilon;
  detail::RatioTracker tracker;

  switch (cfg.mechanism) {
    case Mechanism::kRandomizedResponse: {
      const int d = cfg.dims;
      if (d > kAuditEnumerationCapRR)
        throw std::invalid_argument("audit_channel: d exceeds enumeration cap");
      for (std::uint64_t z = 0; z < (1ULL << d); ++z) {
        for (int x = 1; x <= d; ++x) {
          for (int xp = 1; xp <= d; ++xp) {
            if (x == xp) continue;
            const double r = std::log(rr_exact_prob(z, x, cfg)) -
                             std::log(rr_exact_prob(z, xp, cfg));
            tracker.offer(r, "e_" + std::to_string(x), "e_" + std::to_string(xp),
                          "z_mask=" + std::to_string(z));
          }
        }
      }
      break;
    }
    case Mechanism::kHalfspaceSeries: {
      const int k = cfg.dims;
      if (k > kAuditEnumerationCapHS)
        throw std::invalid_argument("audit_channel: k exceeds enumeration cap");
      // Inputs: all box corners plus the realizable basis vectors on the grid.
      std::vector<std::vector<double>> inputs;
      for (std::uint64_t m = 0; m < (1ULL << k); ++m) {
        std::vector<double> tau(k);
        for (int j = 0; j < k; ++j)
          tau[j] = ((m >> j) & 1) ? cfg.basis_bound : -cfg.basis_bound;
        inputs.push_back(tau);
      }
      for (double x : input_grid) inputs.push_back(basis_vector(x, k));
      std::vector<int> zeta(k);
      for (std::uint64_t zm = 0; zm < (1ULL << k); ++zm) {
        for (int j = 0; j < k; ++j) zeta[j] = ((zm >> j) & 1) ? 1 : -1;
        for (std::size_t a = 0; a < inputs.size(); ++a) {
          for (std::size_t b = 0; b < inputs.size(); ++b) {
            if (a == b) continue;
            const double r =
                std::log(halfspace_exact_prob(zeta, inputs[a], cfg)) -
                std::log(halfspace_exact_prob(zeta, inputs[b], cfg));
            tracker.offer(r, detail::vec_to_string(inputs[a]),
                          detail::vec_to_string(inputs[b]),
                          "zeta_mask=" + std::to_string(zm));
          }
        }
      }
      break;
    }
    case Mechanism::kLaplaceMultinomial:
    case Mechanism::kLaplaceHistogram: {
      const int d = cfg.dims;
      const double rate = eps / 2.0;
      const double scale = 1.0 / rate;
      std::vector<std::vector<double>> inputs;
      if (cfg.mechanism == Mechanism::kLaplaceMultinomial) {
        for (int x = 0; x < d; ++x) {
          std::vector<double> e(d, 0.0);
          e[x] = 1.0;
          inputs.push_back(e);
        }
      } else {
        for (double x : input_grid) inputs.push_back(one_hot_bin(x, d));
      }
      for (std::size_t a = 0; a < inputs.size(); ++a) {
        for (std::size_t b = 0; b < inputs.size(); ++b) {
          if (a == b) continue;
          const double gap = detail::laplace_grid_gap(
              inputs[a], inputs[b], -5.0 * scale, 1.0 + 5.0 * scale,
              kAuditGridPoints);
          tracker.offer(rate * gap, detail::vec_to_string(inputs[a]),
                        detail::vec_to_string(inputs[b]), "grid argmax");
        }
      }
      break;
    }
    case Mechanism::kNaiveLaplaceSeries: {
      const int k = cfg.dims;
      const double rate = eps / (2.0 * cfg.basis_bound * k);
      const double scale = 1.0 / rate;
      std::vector<std::vector<double>> inputs;
      for (double x : input_grid) inputs.push_back(basis_vector(x, k));
      for (std::size_t a = 0; a < inputs.size(); ++a) {
        for (std::size_t b = 0; b < inputs.size(); ++b) {
          if (a == b) continue;
          const double gap = detail::laplace_grid_gap(
              inputs[a], inputs[b], -cfg.basis_bound - 5.0 * scale,
              cfg.basis_bound + 5.0 * scale, kAuditGridPoints);
          tracker.offer(rate * gap, detail::vec_to_string(inputs[a]),
                        detail::vec_to_string(inputs[b]), "grid argmax");
        }
      }
      break;
    }
  }

  AuditReport report;
  report.mechanism = mechanism_name(cfg.mechanism);
  report.epsilon = eps;
  report.max_log_ratio = tracker.best;
  report.witness_input = tracker.in_a;
  report.witness_input_prime = tracker.in_b;
  report.witness_event = tracker.event;
  report.pass = tracker.best <= eps + tolerance;
  return report;
}

}  // namespace lpme

#endif  // LPME_AUDIT_HPP
