#ifndef LPME_SIMPLEX_HPP
#define LPME_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lpme {

inline constexpr double kSimplexSumTol = 1e-12;

/// Privacy parameter epsilon > 0.  The lower-bound theorems are stated for
/// epsilon <= 1/4; mechanisms accept any positive value.
struct PrivacyBudget {
  double epsilon;

  explicit PrivacyBudget(double eps) : epsilon(eps) {
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw std::invalid_argument("PrivacyBudget: epsilon must be positive and finite");
  }

  bool in_theorem_range() const noexcept { return epsilon <= 0.25; }
};

/// Point of the probability simplex Delta_d.
struct SimplexVector {
  std::vector<double> coords;

  explicit SimplexVector(std::vector<double> c) : coords(std::move(c)) {
    double sum = 0.0;
    for (double v : coords) {
      if (v < 0.0) throw std::invalid_argument("SimplexVector: negative coordinate");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kSimplexSumTol)
      throw std::invalid_argument("SimplexVector: coordinates do not sum to 1");
  }

  std::size_t dim() const noexcept { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
};

/// Euclidean projection onto scale * Delta_d by sort-and-threshold: find the
/// theta with sum_i max(v_i - theta, 0) = scale and clip.  O(d log d).
inline std::vector<double> project_simplex(const std::vector<double>& v,
                                           double scale = 1.0) {
  if (v.empty()) throw std::invalid_argument("project_simplex: empty vector");
  if (!(scale > 0.0)) throw std::invalid_argument("project_simplex: scale <= 0");
  const std::size_t d = v.size();
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < d; ++i) {
    cumsum += u[i];
    const double cand = (cumsum - scale) / static_cast<double>(i + 1);
    if (u[i] - cand > 0.0) {
      rho = i + 1;
      theta = cand;
    }
  }
  (void)rho;
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = std::max(v[i] - theta, 0.0);
  return w;
}

inline double l2_norm_sq(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l2_norm_sq: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace lpme

#endif  // LPME_SIMPLEX_HPP
