#pragma once

// Internal wrappers around boost::math distribution tails. Kept private to
// the library sources; only two-sided p-values ever leave this file.

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace rashlab::prob {

inline double student_t_two_sided(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

inline double chi_squared_upper(double x, double df) {
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

inline double normal_two_sided(double z) {
  const boost::math::normal dist;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z))));
}

}  // namespace rashlab::prob
