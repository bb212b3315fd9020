#ifndef QDYN_FIT_HPP
#define QDYN_FIT_HPP

#include <span>

namespace qdyn {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct PowerLawFit {
    double exponent = 0.0;
    double amplitude = 0.0;      // y ~ amplitude * x^exponent
    double exponent_stderr = 0.0;
    double residual_rms = 0.0;   // in log space
};

/// Least-squares fit of log y against log x; requires positive data.
PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y);

}  // namespace qdyn

#endif
