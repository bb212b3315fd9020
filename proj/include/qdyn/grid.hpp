#ifndef QDYN_GRID_HPP
#define QDYN_GRID_HPP

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qdyn/types.hpp"

namespace qdyn {

/// Uniform periodic lattice in 1-3 dimensions with its discrete-Fourier
/// dual lattice. All axes share the same point count and physical extent.
/// Position coordinates are centered: x_j = -L/2 + j*h, so the domain is
/// [-L/2, L/2). Dual frequencies follow the DFT convention
/// (2*pi/L) * {0, 1, ..., n/2-1, -n/2, ..., -1}.
///
/// Immutable after construction and safe to share across threads; the
/// embedded FFTW plans are executed through the thread-safe new-array
/// interface.
class Grid {
public:
    static constexpr std::size_t default_size_cap = std::size_t{1} << 22;

    static std::shared_ptr<const Grid> make(int dims, int points_per_dim, double extent,
                                            std::size_t size_cap = default_size_cap);
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    int dims() const { return dims_; }
    int points_per_dim() const { return n_; }
    double extent() const { return extent_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }

    /// Per-axis dual frequencies, length n.
    const std::vector<double>& kvalues() const { return kvalues_; }
    /// Per-axis centered position values, length n.
    const std::vector<double>& xvalues() const { return xvalues_; }

    /// Index of `axis` within the flat row-major layout (last axis fastest).
    int axis_index(std::size_t flat, int axis) const {
        return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(n_));
    }

    /// Volume element h^dims of one lattice cell.
    double cell_volume() const { return cell_volume_; }

    /// Unnormalized multidimensional DFT; `in` and `out` must be distinct
    /// buffers of length size().
    void dft_forward(const Complex* in, Complex* out) const;
    void dft_backward(const Complex* in, Complex* out) const;

private:
    Grid(int dims, int n, double extent);

    int dims_;
    int n_;
    double extent_;
    double spacing_;
    double cell_volume_;
    std::size_t size_;
    std::vector<double> kvalues_;
    std::vector<double> xvalues_;
    std::array<std::size_t, 3> strides_{};
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

enum class Representation { position, momentum };

/// Complex amplitudes on a Grid, unit L2 norm after construction through
/// the packet factories or normalize(). The L2 inner product carries the
/// cell volume: <f,g> = h^d * sum conj(f_j) g_j.
struct WaveFunction {
    GridPtr grid;
    Vec amplitudes;
    Representation rep = Representation::position;
};

double norm(const WaveFunction& psi);
Complex inner(const WaveFunction& a, const WaveFunction& b);
WaveFunction normalized(WaveFunction psi);

/// Representation change, unitary (Parseval) and involutive within roundoff.
WaveFunction to_momentum(const WaveFunction& psi);
WaveFunction to_position(const WaveFunction& psi);

/// Multiplication by a real function of the dual lattice point; realizes
/// every function of the momentum operators (kinetic energies, |k|,
/// relativistic dispersion, spectral cutoffs ...). Symbol values must be
/// real and finite so the induced operator is self-adjoint.
struct FourierMultiplier {
    GridPtr grid;
    RVec symbol;

    /// Evaluate `f` over the dual lattice; f receives the k-vector of the
    /// lattice point (length dims).
    static FourierMultiplier from_function(GridPtr grid,
                                           const std::function<double(std::span<const double>)>& f);
};

/// (x_axis - origin) * psi, pointwise in position representation.
Vec apply_position(const WaveFunction& psi, int axis, double origin = 0.0);

/// Momentum operator along `axis`: exact spectral derivative (1/i) d/dx.
Vec apply_momentum(const WaveFunction& psi, int axis);

/// inverse-transform(symbol * transform(psi)).
Vec apply_multiplier(const FourierMultiplier& m, const WaveFunction& psi);
Vec apply_multiplier_raw(const FourierMultiplier& m, const Vec& position_amplitudes);

/// Gaussian packet exp(-(x-c)^2/(4 sigma^2) + i k0.(x-c)), normalized.
/// sigma is the position-space standard deviation of |psi|^2.
WaveFunction gaussian_packet(GridPtr grid, std::span<const double> center, double sigma,
                             std::span<const double> momentum);

/// Compactly supported bump exp(1 - 1/(1-u^2)), u = |x-c|/w, times a plane
/// phase; support is exactly the ball |x-c| < w.
WaveFunction bump_packet(GridPtr grid, std::span<const double> center, double halfwidth,
                         std::span<const double> momentum);

/// Normalized lattice plane wave with integer mode index per axis.
WaveFunction plane_wave(GridPtr grid, std::span<const int> mode);

/// Mass (squared L2 norm fraction) within the outer band of the domain:
/// any axis with |x| >= (1-fraction) * L/2. Used by the wrap-around monitor.
double boundary_band_mass(const WaveFunction& psi, double fraction = 0.1);

/// Snap a target wavenumber to the nearest dual-lattice value.
double snap_to_lattice(const Grid& grid, double k);

}  // namespace qdyn

#endif
