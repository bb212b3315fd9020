#ifndef QDYN_CLOCK_HPP
#define QDYN_CLOCK_HPP

#include <functional>
#include <string>
#include <vector>

#include "qdyn/fit.hpp"
#include "qdyn/grid.hpp"
#include "qdyn/nbody.hpp"
#include "qdyn/spectral.hpp"
#include "qdyn/types.hpp"

namespace qdyn::clock {

enum class Method { split_operator, exact_diagonal, dispersive_exact, kg_leapfrog };

struct PropagatorConfig {
    Method method = Method::split_operator;
    double dt = 0.01;
    double t_final = 1.0;
    int record_every = 1;
    int time_sign = +1;  // e^{-i (sign t) H}; -1 runs the clock backwards
    double boundary_mass_limit = 1e-3;
    double boundary_fraction = 0.1;
    bool monitor_boundary = true;

    void validate() const;
    int total_steps() const;
};

/// Snapshots of a unitary evolution. Times carry the sign of the run
/// (monotone increasing forward, decreasing backward); every snapshot of a
/// Schrodinger-type method has unit norm within 1e-9.
struct Trajectory {
    std::vector<double> times;
    std::vector<WaveFunction> states;
    std::string generator;
};

/// Strang splitting e^{-i dt V/2} e^{-i dt T} e^{-i dt V/2}; exactly
/// unitary per step, global error O(dt^2).
Trajectory evolve_split_operator(const nbody::HamiltonianOperator& H, const WaveFunction& psi0,
                                 const PropagatorConfig& config);

/// psi(t) = sum_j e^{-i t lambda_j} <v_j, psi> v_j from a dense
/// eigendecomposition; exact in t up to the decomposition quality.
Trajectory evolve_exact_diagonal(const spectral::SpectralData& sd, const WaveFunction& psi0,
                                 const PropagatorConfig& config);
Trajectory evolve_exact_diagonal(const Mat& H, const WaveFunction& psi0,
                                 const PropagatorConfig& config);

/// Exact evolution under a pure Fourier multiplier: momentum amplitudes
/// pick up e^{-i omega(k) t}.
Trajectory evolve_dispersive(const FourierMultiplier& omega, const WaveFunction& psi0,
                             const PropagatorConfig& config);

/// Real scalar field and its time derivative with wave speed c and mass
/// parameter mu; energy(q, qdot) = (1/2) int (qdot^2 + c^2 |grad q|^2
/// + c^4 mu^2 q^2) dx is conserved by the exact flow.
struct FieldState {
    GridPtr grid;
    RVec q;
    RVec qdot;
    double c = 1.0;
    double mu = 0.0;
};

double field_energy(const FieldState& f);

struct FieldTrajectory {
    std::vector<double> times;
    std::vector<FieldState> states;
    std::vector<double> energies;
};

/// Second-order symplectic (kick-drift-kick) integration of
/// (1/c^2) d2q/dt2 = (Laplacian - c^2 mu^2) q with pseudospectral
/// Laplacian; requires dt <= 0.9 spacing / c.
FieldTrajectory evolve_klein_gordon(const FieldState& initial, const PropagatorConfig& config);

struct ResidualReport {
    double max_residual = 0.0;
    double convergence_order = 0.0;  // 0 when too few snapshots to coarsen
};

/// Centered-difference residual of (1/i) dpsi/dt + H psi over the interior
/// snapshots of a uniformly spaced trajectory, plus the observed order
/// under doubling of the difference step.
ResidualReport schrodinger_residual(const Trajectory& traj,
                                    const std::function<Vec(const Vec&)>& apply_H);

struct ClockTrace {
    std::vector<double> center;  // <x>(t)
    std::vector<double> width;   // sqrt(<x^2> - <x>^2)
    LinearFit center_fit;
    double width_growth = 0.0;   // width(T) / width(0)
};

struct TwoClocksReport {
    double k0 = 0.0;             // lattice-snapped mean momentum
    std::vector<double> times;
    ClockTrace half_laplacian;   // generator |k|
    ClockTrace schroedinger;     // generator k^2/2
};

/// Evolves the same packet under the two generators |k| and k^2/2 and
/// reports center trajectories and widths: constant unit speed for the
/// first clock, speed k0 with spreading width for the second.
TwoClocksReport two_clocks_compare(const WaveFunction& psi0, double t_final, int samples);

}  // namespace qdyn::clock

#endif
