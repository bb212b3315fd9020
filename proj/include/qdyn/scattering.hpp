#ifndef QDYN_SCATTERING_HPP
#define QDYN_SCATTERING_HPP

#include <optional>
#include <vector>

#include "qdyn/clock.hpp"
#include "qdyn/fit.hpp"
#include "qdyn/grid.hpp"
#include "qdyn/nbody.hpp"
#include "qdyn/spectral.hpp"
#include "qdyn/types.hpp"

namespace qdyn::scattering {

/// Smooth compactly supported bump on the energy axis,
/// phi(lambda) = exp(1 - 1/(1 - u^2)) for u = (lambda - center)/halfwidth,
/// zero outside; values in [0, 1], support exactly the closed interval.
struct TestFunction {
    double center = 0.0;
    double halfwidth = 1.0;
    double operator()(double lambda) const;
};

/// L2 norm of psi restricted to the ball |x - origin| < R.
double escape_norm(const WaveFunction& psi, double R, std::span<const double> origin = {});

/// || phi(H) psi - phi(H0) psi ||, with phi(H) through the dense
/// eigendecomposition and phi(H0) through the kinetic symbol.
double energy_mismatch(const WaveFunction& psi, const TestFunction& phi,
                       const spectral::SpectralData& sd, const FourierMultiplier& kinetic);

/// sqrt(sum_axes ||(x_a/t - p_a/mu) psi||^2) at local time t (t of either
/// sign, nonzero); x is measured from `origin`.
double velocity_mismatch(const WaveFunction& psi, double t, double mu,
                         std::span<const double> origin = {});

/// Per-axis effective masses, for relative-motion grids with more than one
/// internal coordinate.
double velocity_mismatch(const WaveFunction& psi, double t, std::span<const double> mu_per_axis,
                         std::span<const double> origin = {});

struct CalibrationSeries {
    std::vector<double> times;
    std::vector<double> t_hat;          // mu <x> / <p>
    std::vector<double> relative_dev;   // |t_hat - t| / t
};

/// Reads the packet position/momentum means along a trajectory and forms
/// the mechanical time estimate mu<x>/<p>; rejected when <p> crosses zero.
CalibrationSeries local_time_calibration(const clock::Trajectory& traj, double mu, int axis = 0);

struct SeriesFit {
    PowerLawFit fit;
    bool monotone_decreasing = false;  // over the whole sampled grid
    std::size_t tail_monotone_from = 0;
};

struct DiagnosticSeries {
    std::vector<double> times;             // |t_m|, strictly increasing, t_min > 0
    int time_sign = +1;
    std::vector<double> escape;
    std::vector<double> energy;
    std::vector<double> velocity;
    SeriesFit escape_fit;
    SeriesFit energy_fit;
    SeriesFit velocity_fit;
    double continuum_weight = 1.0;         // of the initial packet, before filtering
    double phi_center = 0.0;
    double phi_halfwidth = 0.0;
};

enum class ContinuumFilter { require, off };

struct SuiteConfig {
    double radius = 10.0;
    // geometric time grid |t| in [t_min, t_max]
    double t_min = 5.0;
    double t_max = 40.0;
    int time_points = 8;
    int time_sign = +1;
    std::optional<TestFunction> phi;       // default: bump at the packet's mean kinetic energy
    ContinuumFilter filter = ContinuumFilter::require;
    double continuum_threshold = 0.99;
    double boundary_mass_limit = 1e-3;
    // split-operator fallback step for grids too large to densify
    double dt = 0.005;
};

/// The three asymptotic diagnostics for a scattering packet under one
/// relative-motion Hamiltonian: escape norm from the ball |x| < R, the
/// phi(H) vs phi(H0) mismatch, and the x/t vs p/mu velocity mismatch,
/// sampled on a geometric grid of local times with power-law fits.
/// mu_per_axis carries the frame's effective mass for each grid axis.
DiagnosticSeries run_asymptotics_suite(const nbody::HamiltonianOperator& H,
                                       std::span<const double> mu_per_axis,
                                       const WaveFunction& packet, const SuiteConfig& config,
                                       std::span<const double> origin = {});
DiagnosticSeries run_asymptotics_suite(const nbody::HamiltonianOperator& H, double mu,
                                       const WaveFunction& packet, const SuiteConfig& config,
                                       std::span<const double> origin = {});

}  // namespace qdyn::scattering

#endif
