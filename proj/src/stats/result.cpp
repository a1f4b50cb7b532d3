#include "refwhy/stats/result.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace refwhy::stats {

namespace {
double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }
}  // namespace

double chi_squared_sf(double x, double df) {
    if (df <= 0 || x <= 0) return 1.0;
    boost::math::chi_squared_distribution<double> d(df);
    return clamp01(boost::math::cdf(boost::math::complement(d, x)));
}

double normal_sf(double z) {
    if (std::isinf(z)) return z > 0 ? 0.0 : 1.0;
    boost::math::normal_distribution<double> d;
    return clamp01(boost::math::cdf(boost::math::complement(d, z)));
}

double student_t_two_sided(double t, double df) {
    if (std::isinf(t)) return 0.0;
    boost::math::students_t_distribution<double> d(df);
    return clamp01(2 * boost::math::cdf(boost::math::complement(d, std::fabs(t))));
}

}  // namespace refwhy::stats
