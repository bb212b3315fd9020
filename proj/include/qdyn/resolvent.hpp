#ifndef QDYN_RESOLVENT_HPP
#define QDYN_RESOLVENT_HPP

#include <string>
#include <vector>

#include "qdyn/grid.hpp"
#include "qdyn/spectral.hpp"
#include "qdyn/types.hpp"

namespace qdyn::resolvent {

/// Solve (H - z) phi = psi by dense LU; verifies the residual against
/// 1e-9 * ||psi|| and rejects z sitting on the spectrum (singular solve).
Vec resolvent_apply(const Mat& H, Complex z, const Vec& psi);

/// Multiplier route: (symbol(k) - z)^{-1} pointwise in the dual basis;
/// exact for pure kinetic operators of any grid size.
Vec resolvent_apply(const FourierMultiplier& H0, Complex z, const Vec& psi);

/// <psi, (1/2 pi i)(R(lambda+i eps) - R(lambda-i eps)) psi> through two
/// linear solves: the Lorentzian-broadened spectral density at lambda.
double stone_density(const Mat& H, double lambda, double eps, const Vec& psi);

struct DensityScan {
    RVec lambdas;
    RVec values;
    double eps = 0.0;
    double integral = 0.0;       // trapezoid over the window
    bool window_warning = false; // integral deficit above 10%
};

/// stone_density swept over a lambda grid; the trapezoid integral must
/// recover ||psi||^2 up to the Lorentzian tail mass outside the window.
DensityScan density_scan(const Mat& H, const RVec& lambda_grid, double eps, const Vec& psi);

/// R(z) psi = +- i * int_0^{+-inf} e^{itz} e^{-itH} psi dt, the branch
/// fixed by sign(Im z). Trapezoid on the exponentially damped integrand;
/// preconditions: e^{-|Im z| T_max} below the tail budget and
/// dt (|z| + max|lambda|) < 0.5 so the fastest phase is resolved.
Vec fourier_laplace_resolvent(const spectral::Evolver& evolver, Complex z, const Vec& psi,
                              double T_max, double dt);

/// Same integral reported at several truncation times (for tail-decay
/// fits); checkpoints must be increasing.
std::vector<Vec> fourier_laplace_partials(const spectral::Evolver& evolver, Complex z,
                                          const Vec& psi, const std::vector<double>& T_checkpoints,
                                          double dt);

struct EquivalenceCheck {
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    double rate = 0.0;  // fitted convergence exponent where applicable
    bool pass = false;
    std::string detail;
};

struct EquivalenceReport {
    std::vector<EquivalenceCheck> checks;
    bool all_pass = false;
};

struct EquivalenceConfig {
    std::vector<double> lambda_set;   // eigenvalues probed by the ergodic average
    std::vector<Complex> z_set;       // resolvent points, Im z != 0
    double T = 100.0;                 // ergodic averaging time
    double eps = 0.05;                // Stone broadening
    double fl_T_max = 30.0;
    double fl_dt = 0.01;
    double tol_fourier_laplace = 1e-3;
    double tol_stone = 1e-8;
    int probe_count = 3;
    unsigned seed = 1234;
};

/// Aggregates the three time-dependent <-> time-independent bridges on one
/// operator: (a) ergodic average vs spectral projector, (b) Fourier-Laplace
/// quadrature vs direct resolvent solve, (c) Stone boundary values vs the
/// eigendecomposition-broadened measure.
EquivalenceReport equivalence_report(const Mat& H, const spectral::Evolver& evolver,
                                     const EquivalenceConfig& config);

}  // namespace qdyn::resolvent

#endif
