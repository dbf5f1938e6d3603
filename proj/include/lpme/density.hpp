#ifndef LPME_DENSITY_HPP
#define LPME_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpme/basis.hpp"

namespace lpme {

/// Composite Simpson quadrature of f over [a, b] with the given number of
/// panels (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int panels = 4096) {
  if (panels < 2) panels = 2;
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    const double x = a + h * i;
    s += (i % 2 == 1 ? 4.0 : 2.0) * f(x);
  }
  return s * h / 3.0;
}

/// A function on [0,1] in one of three representations: piecewise constant
/// over k equal bins, a truncated trigonometric series (coefficients indexed
/// from the constant basis function), or a raw evaluator.  The first two are
/// what the estimators produce; the analytic form carries test densities and
/// packing members.
class DensityModel {
 public:
  enum class Kind { kPiecewiseConstant, kSeries, kAnalytic };

  static DensityModel piecewise_constant(std::vector<double> bin_values) {
    if (bin_values.empty())
      throw std::invalid_argument("DensityModel: no bins");
    DensityModel m;
    m.kind_ = Kind::kPiecewiseConstant;
    m.values_ = std::move(bin_values);
    return m;
  }

  /// coefficients[j-1] multiplies basis position j (position 1 = constant).
  static DensityModel series(std::vector<double> coefficients) {
    if (coefficients.empty())
      throw std::invalid_argument("DensityModel: no coefficients");
    DensityModel m;
    m.kind_ = Kind::kSeries;
    m.values_ = std::move(coefficients);
    return m;
  }

  static DensityModel analytic(std::function<double(double)> f,
                               std::string name = "") {
    DensityModel m;
    m.kind_ = Kind::kAnalytic;
    m.eval_ = std::move(f);
    m.name_ = std::move(name);
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t bins() const noexcept { return values_.size(); }

  double operator()(double x) const {
    if (x < 0.0 || x > 1.0)
      throw std::invalid_argument("DensityModel: x outside [0,1]");
    switch (kind_) {
      case Kind::kPiecewiseConstant: {
        const std::size_t k = values_.size();
        std::size_t j = static_cast<std::size_t>(x * static_cast<double>(k));
        if (j >= k) j = k - 1;  // x == 1 belongs to the last bin
        return values_[j];
      }
      case Kind::kSeries: {
        double s = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j)
          s += values_[j] * trig_basis_eval(static_cast<int>(j + 1), x);
        return s;
      }
      case Kind::kAnalytic:
        return eval_(x);
    }
    return 0.0;
  }

 private:
  DensityModel() = default;

  Kind kind_ = Kind::kAnalytic;
  std::vector<double> values_;
  std::function<double(double)> eval_;
  std::string name_;
};

namespace detail {

inline double l2_piecewise_pair(const std::vector<double>& a,
                                const std::vector<double>& b) {
  // Exact integral over the merged bin grid.
  const std::size_t ka = a.size(), kb = b.size();
  std::vector<double> edges{0.0};
  for (std::size_t i = 1; i < ka; ++i) edges.push_back(double(i) / double(ka));
  for (std::size_t i = 1; i < kb; ++i) edges.push_back(double(i) / double(kb));
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    std::size_t ja = std::min<std::size_t>(ka - 1, std::size_t(mid * ka));
    std::size_t jb = std::min<std::size_t>(kb - 1, std::size_t(mid * kb));
    const double diff = a[ja] - b[jb];
    total += diff * diff * (edges[i + 1] - edges[i]);
  }
  return total;
}

}  // namespace detail

/// Squared L^2 distance on [0,1].  Exact per-piece for two piecewise-constant
/// models, Parseval in coefficient space for two series over the same basis,
/// Simpson quadrature otherwise (panels aligned with bin breakpoints so the
/// integrand stays smooth per panel).
inline double l2_distance_squared(const DensityModel& f, const DensityModel& g,
                                  int panels = 4096) {
  using Kind = DensityModel::Kind;
  if (f.kind() == Kind::kPiecewiseConstant && g.kind() == Kind::kPiecewiseConstant)
    return detail::l2_piecewise_pair(f.values(), g.values());
  if (f.kind() == Kind::kSeries && g.kind() == Kind::kSeries) {
    const std::size_t n = std::max(f.values().size(), g.values().size());
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double fa = j < f.values().size() ? f.values()[j] : 0.0;
      const double fb = j < g.values().size() ? g.values()[j] : 0.0;
      s += (fa - fb) * (fa - fb);
    }
    return s;
  }
  // Mixed case: integrate the squared difference piecewise between every bin
  // breakpoint of either argument.
  std::vector<double> edges{0.0, 1.0};
  for (const DensityModel* m : {&f, &g}) {
    if (m->kind() == Kind::kPiecewiseConstant) {
      const std::size_t k = m->bins();
      for (std::size_t i = 1; i < k; ++i)
        edges.push_back(double(i) / double(k));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto diff2 = [&](double x) {
    const double d = f(x) - g(x);
    return d * d;
  };
  double total = 0.0;
  const int per_piece =
      std::max(16, panels / static_cast<int>(edges.size() - 1));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    total += simpson(diff2, edges[i], edges[i + 1], per_piece);
  return total;
}

/// Basis coefficient <f, phi_j> (position-indexed, j >= 1) by quadrature.
inline double series_coefficient(const DensityModel& f, int j,
                                 int panels = 8192) {
  return simpson([&](double x) { return f(x) * trig_basis_eval(j, x); }, 0.0,
                 1.0, panels);
}

}  // namespace lpme

#endif  // LPME_DENSITY_HPP
