#ifndef LPME_BASIS_HPP
#define LPME_BASIS_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lpme {

/// Uniform bound of the trigonometric basis: sup_j sup_t |phi_j(t)| = sqrt(2).
inline constexpr double kTrigBasisBound = std::numbers::sqrt2;

/// Orthonormal trigonometric basis of L^2([0,1]):
///   phi_0(t) = 1,
///   phi_{2j}(t)   = sqrt(2) cos(2 pi j t),   j >= 1,
///   phi_{2j+1}(t) = sqrt(2) sin(2 pi j t),   j >= 1.
/// Index 1 aliases the constant so that positions 1..k enumerate the first k
/// distinct basis functions with the constant first (the indexing every
/// series routine here uses).
inline double trig_basis_eval(int j, double t) {
  if (j < 0) throw std::invalid_argument("trig_basis_eval: negative index");
  if (t < 0.0 || t > 1.0)
    throw std::invalid_argument("trig_basis_eval: t outside [0,1]");
  if (j <= 1) return 1.0;
  const double freq = static_cast<double>(j / 2);
  const double arg = 2.0 * std::numbers::pi * freq * t;
  return (j % 2 == 0) ? std::numbers::sqrt2 * std::cos(arg)
                      : std::numbers::sqrt2 * std::sin(arg);
}

/// Smoothness class F_beta[C]: densities whose basis coefficients satisfy
/// sum_j j^{2 beta} theta_j^2 <= C^2.
struct SobolevClass {
  int beta;
  double radius;
  double basis_bound = kTrigBasisBound;

  SobolevClass(int beta_in, double radius_in)
      : beta(beta_in), radius(radius_in) {
    if (beta < 1) throw std::invalid_argument("SobolevClass: beta < 1");
    if (radius <= 0.0) throw std::invalid_argument("SobolevClass: radius <= 0");
  }
};

}  // namespace lpme

#endif  // LPME_BASIS_HPP
