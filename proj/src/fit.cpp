#include "ksns/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace ksns {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matched samples, >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    const double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ym = sy / n;
    for (size_t i = 0; i < x.size(); ++i) {
        const double p = f.intercept + f.slope * x[i];
        ss_res += (y[i] - p) * (y[i] - p);
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    f.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

double fitted_decay_exponent(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> ly(y.size());
    for (size_t i = 0; i < y.size(); ++i)
        ly[i] = std::log(std::max(y[i], 1e-300));
    return -linear_fit(t, ly).slope;
}

} // namespace ksns
