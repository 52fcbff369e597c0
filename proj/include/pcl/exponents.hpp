#ifndef PCL_EXPONENTS_HPP
#define PCL_EXPONENTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcl {

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

// Minimal integrability of the force for the energy to be finite.
// For p = 2 any q > 1 works; we return the open bound.
inline double q0_threshold(double p) {
  if (p < 2.0) return 2.0 * p / (3.0 * p - 2.0);
  if (p == 2.0) return 1.0;
  return 1.0;
}

inline bool q0_satisfied(double p, double q) {
  if (p == 2.0) return q > 1.0;
  if (p > 2.0) return q >= 1.0;
  return q >= q0_threshold(p);
}

// Integrability above which the linear-in-r energy bound (and hence a
// positive decay exponent) is available.
inline double q1_threshold(double p) {
  if (p >= 2.0) return 2.0 * p / (2.0 * p - 1.0);
  return 2.0 * p / (3.0 * p - 3.0);
}

inline bool q1_strict(double p, double q) { return q > q1_threshold(p); }

// Decay increment of the Dirichlet-replacement estimate; positive iff q > q1.
inline double alpha_exponent(double p, double q) {
  const double pp = conjugate_exponent(p);
  if (std::isinf(q)) return p >= 2.0 ? 1.0 + pp : 3.0 * (p - 1.0);
  if (p >= 2.0) return 1.0 + pp - 2.0 * pp / q;
  return 3.0 * (p - 1.0) - 2.0 * p / q;
}

// Lower-bound rate for the local energy decay (the 1+b law). The iteration
// also caps b by ln(3/4)/ln(a) with a < 1/2, so b never exceeds
// ln(4/3)/ln(2); the cap keeps the reported target conservative.
inline double decay_b(double p, double q) {
  const double cap = std::log(4.0 / 3.0) / std::log(2.0);
  return std::min(alpha_exponent(p, q) / 2.0, cap);
}

}  // namespace pcl

#endif
