#pragma once

#include <vector>

namespace ksns {

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Decay exponent alpha of y ~ C e^{-alpha t} by least squares on log y.
double fitted_decay_exponent(const std::vector<double>& t, const std::vector<double>& y);

} // namespace ksns
