// Independent reference computations used by the tests: closed forms and
// low-tech numerics (finite differences, characteristics, image sums) that
// never touch the library's transform or eigensolver paths.
#ifndef QDYN_TESTS_ORACLES_HPP
#define QDYN_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;

/// Free 1D Gaussian packet evolved in closed form; sigma is the
/// position-space standard deviation at t = 0 and k0 the mean momentum.
/// `images` adds periodic copies at x +- m L for comparison on a torus.
inline Complex free_gaussian(double x, double t, double sigma, double k0, double x0, double mu,
                             double L = 0.0, int images = 0) {
    const Complex s(sigma * sigma, t / (2.0 * mu));
    const Complex pref = std::pow(sigma * sigma / (2.0 * std::numbers::pi), 0.25) / std::sqrt(s);
    Complex acc = 0.0;
    for (int m = -images; m <= images; ++m) {
        const double xx = x + m * L - x0;
        const double drift = k0 * t / mu;
        acc += pref * std::exp(Complex(0.0, k0 * xx - 0.5 * k0 * k0 * t / mu) -
                               (xx - drift) * (xx - drift) / (4.0 * s));
    }
    return acc;
}

/// Position-space standard deviation of the evolved packet.
inline double free_gaussian_width(double t, double sigma, double mu) {
    const double spread = t / (2.0 * sigma * mu);
    return std::sqrt(sigma * sigma + spread * spread);
}

/// || (x/t - p/mu) psi(t) || for the free packet launched at the origin:
/// Heisenberg evolution gives exactly ||x psi_0|| / t = sigma / t.
inline double free_gaussian_velocity_mismatch(double t, double sigma) { return sigma / t; }

/// Probability mass of the evolved packet inside |x| < R (error function).
inline double free_gaussian_ball_mass(double t, double sigma, double k0, double x0, double mu,
                                      double R) {
    const double center = x0 + k0 * t / mu;
    const double w = free_gaussian_width(t, sigma, mu);
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - center) / (w * std::sqrt(2.0))); };
    return cdf(R) - cdf(-R);
}

/// Periodic centered finite difference (1/i) dpsi/dx on a uniform lattice.
inline std::vector<Complex> momentum_fd(const std::vector<Complex>& psi, double spacing) {
    const std::size_t n = psi.size();
    std::vector<Complex> out(n);
    const Complex inv_i(0.0, -1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const Complex d = (psi[(j + 1) % n] - psi[(j + n - 1) % n]) / (2.0 * spacing);
        out[j] = inv_i * d;
    }
    return out;
}

/// d'Alembert solution on the circle for the massless wave equation with
/// qdot(0) = 0: mean of the two characteristics, arguments wrapped mod L.
inline double characteristics(const std::function<double(double)>& q0, double x, double t,
                              double c, double L) {
    auto wrap = [&](double u) {
        while (u < -L / 2.0) u += L;
        while (u >= L / 2.0) u -= L;
        return u;
    };
    return 0.5 * (q0(wrap(x - c * t)) + q0(wrap(x + c * t)));
}

/// Value of the truncated mean ergodic average on a single off-resonant
/// mode: |(1/T) int_0^T e^{i omega t} dt|.
inline double ergodic_mode_error(double omega, double T) {
    return std::abs(2.0 * std::sin(0.5 * omega * T) / (omega * T));
}

}  // namespace oracles

#endif
