#ifndef QDYN_NBODY_HPP
#define QDYN_NBODY_HPP

#include <map>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "qdyn/grid.hpp"
#include "qdyn/types.hpp"

namespace qdyn::nbody {

enum class PotentialKind { none, harmonic, gaussian_well, soft_coulomb, square_barrier };

/// Radial pair potential V(|x|) acting on a relative coordinate.
/// All catalog entries are real and bounded on the grid; soft_coulomb is
/// the regularized -q/sqrt(x^2 + a^2) with a > 0 enforced.
struct Potential {
    PotentialKind kind = PotentialKind::none;
    double a = 0.0;  // harmonic: omega | gaussian_well: depth | soft_coulomb: q | barrier: height
    double b = 0.0;  // gaussian_well: width | soft_coulomb: a | barrier: width

    static Potential none() { return {}; }
    static Potential harmonic(double omega);
    static Potential gaussian_well(double depth, double width);
    static Potential soft_coulomb(double q, double reg);
    static Potential square_barrier(double height, double width);

    double evaluate(double dist2) const;
    /// Whether V -> 0 away from the origin (needed by the bound/continuum
    /// classification; harmonic confinement does not qualify).
    bool decays_at_infinity() const;
    const char* name() const;
};

struct ParticleSystem {
    std::vector<double> masses;
    std::map<std::pair<int, int>, Potential> pair_potentials;  // keys i < j, 0-based
};

/// Coordinate change from particle positions to (center of mass, internal
/// coordinates) with the mass recursion for the internal effective masses:
/// 1/mu_i = 1/m_{i+1} + 1/(m_1 + ... + m_i).
struct JacobiFrame {
    RVec reduced_masses;  // mu_1 .. mu_{N-1}
    double total_mass = 0.0;
    RMat to_internal;     // (X_C, x_1..x_{N-1}) = to_internal * (r_1..r_N)
    RMat from_internal;   // inverse
    int particle_count() const { return static_cast<int>(to_internal.cols()); }
};

JacobiFrame jacobi_frame(const std::vector<double>& masses);

/// Self-adjoint Hamiltonian, either as kinetic Fourier multiplier plus a
/// local (diagonal) potential on a Grid, or as a dense Hermitian matrix.
class HamiltonianOperator {
public:
    struct GridForm {
        FourierMultiplier kinetic;
        RVec potential;  // diagonal in position representation
    };

    static HamiltonianOperator grid_operator(FourierMultiplier kinetic, RVec potential);
    static HamiltonianOperator dense(Mat matrix);

    bool is_grid() const { return std::holds_alternative<GridForm>(form_); }
    const GridForm& grid_form() const { return std::get<GridForm>(form_); }
    const Mat& matrix() const { return std::get<Mat>(form_); }
    GridPtr grid() const { return is_grid() ? grid_form().kinetic.grid : nullptr; }
    std::size_t dimension() const;

    /// H v; grid form expects position-representation amplitudes.
    Vec apply(const Vec& v) const;

private:
    std::variant<GridForm, Mat> form_;
};

/// Relative-motion Hamiltonian sum_i p_i^2/(2 mu_i) + V on a grid whose
/// axes are the internal coordinates (spatial_dim components each). Pair
/// potentials are rewritten through the frame: x_ij = r_i - r_j expressed
/// in internal coordinates (the center-of-mass column cancels).
HamiltonianOperator assemble_relative_hamiltonian(const JacobiFrame& frame, GridPtr grid,
                                                  const ParticleSystem& system);

/// Matrix of H in the lattice delta basis, M[a,b] = <delta_a, H delta_b>.
Mat densify(const HamiltonianOperator& H, std::size_t cap = 4096);

struct ComSeparationReport {
    RVec joint_spectrum;     // eigenvalues of the assembled two-coordinate operator
    RVec combined_spectrum;  // sorted pairwise sums of the 1D spectra
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool matched = false;
};

/// Two-body check of the kinetic decomposition: the spectrum of the joint
/// (center-of-mass x relative) operator must equal the multiset of sums of
/// the separately diagonalized 1D pieces. `perturb_mu` deliberately breaks
/// the frame for negative-control runs.
ComSeparationReport com_separation_check(const ParticleSystem& system, GridPtr axis_grid,
                                         double tolerance = 1e-8, double perturb_mu = 0.0);

}  // namespace qdyn::nbody

#endif
