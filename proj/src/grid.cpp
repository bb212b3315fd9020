#include "qdyn/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace qdyn {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dims, int n, double extent)
    : dims_(dims), n_(n), extent_(extent), spacing_(extent / n) {
    size_ = 1;
    for (int a = 0; a < dims_; ++a) size_ *= static_cast<std::size_t>(n_);
    cell_volume_ = std::pow(spacing_, dims_);

    const double dk = 2.0 * std::numbers::pi / extent_;
    kvalues_.resize(n_);
    xvalues_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        kvalues_[j] = dk * (j < n_ / 2 ? j : j - n_);
        xvalues_[j] = -extent_ / 2.0 + spacing_ * j;
    }

    // row-major, last axis fastest
    std::size_t s = 1;
    for (int a = dims_ - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= static_cast<std::size_t>(n_);
    }

    std::vector<Complex> scratch_in(size_), scratch_out(size_);
    int nn[3] = {n_, n_, n_};
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft(dims_, nn, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                              reinterpret_cast<fftw_complex*>(scratch_out.data()), FFTW_FORWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft(dims_, nn, reinterpret_cast<fftw_complex*>(scratch_in.data()),
                              reinterpret_cast<fftw_complex*>(scratch_out.data()), FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_bwd_) throw Error("grid: FFT plan creation failed");
}

Grid::~Grid() {
    std::lock_guard lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::shared_ptr<const Grid> Grid::make(int dims, int points_per_dim, double extent,
                                       std::size_t size_cap) {
    if (dims < 1 || dims > 3) throw Error("grid: dims must be 1, 2 or 3");
    if (!power_of_two(points_per_dim) || points_per_dim < 8)
        throw Error("grid: n must be a power of two >= 8");
    if (!(extent > 0.0)) throw Error("grid: extent must be positive");
    std::size_t total = 1;
    for (int a = 0; a < dims; ++a) {
        total *= static_cast<std::size_t>(points_per_dim);
        if (total > size_cap) throw Error("grid: lattice size exceeds cap");
    }
    return std::shared_ptr<const Grid>(new Grid(dims, points_per_dim, extent));
}

void Grid::dft_forward(const Complex* in, Complex* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Grid::dft_backward(const Complex* in, Complex* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

namespace {

// grid-less wavefunctions carry abstract coefficient vectors (dense
// systems); their measure weight is 1
double measure_weight(const WaveFunction& psi) {
    if (!psi.grid) return 1.0;
    return psi.rep == Representation::position
               ? psi.grid->cell_volume()
               : std::pow(2.0 * std::numbers::pi / psi.grid->extent(), psi.grid->dims());
}

}  // namespace

double norm(const WaveFunction& psi) {
    return std::sqrt(measure_weight(psi)) * psi.amplitudes.norm();
}

Complex inner(const WaveFunction& a, const WaveFunction& b) {
    if (a.grid != b.grid) throw Error("inner: grid mismatch");
    if (a.rep != b.rep) throw Error("inner: representation mismatch");
    return measure_weight(a) * a.amplitudes.dot(b.amplitudes);
}

WaveFunction normalized(WaveFunction psi) {
    double nrm = norm(psi);
    if (nrm == 0.0) throw Error("normalize: zero wavefunction");
    psi.amplitudes /= nrm;
    return psi;
}

namespace {

// Momentum representation carries the continuum convention
//   psi_hat(k) = (h/sqrt(2 pi))^d * sum_j psi_j e^{-i k.x_j},
// with x_j centered at -L/2. Relative to the raw DFT that is a factor
// (h/sqrt(2 pi))^d and a per-axis sign (-1)^{j_a} from the half-domain
// shift (k_a L/2 = pi j_a on the dual lattice).
void centered_signs(const Grid& g, Vec& v) {
    const std::size_t sz = g.size();
    for (std::size_t i = 0; i < sz; ++i) {
        int parity = 0;
        for (int a = 0; a < g.dims(); ++a) parity += g.axis_index(i, a);
        if (parity & 1) v[static_cast<Eigen::Index>(i)] = -v[static_cast<Eigen::Index>(i)];
    }
}

}  // namespace

WaveFunction to_momentum(const WaveFunction& psi) {
    if (psi.rep != Representation::position) throw Error("to_momentum: already in momentum rep");
    const Grid& g = *psi.grid;
    WaveFunction out{psi.grid, Vec(psi.amplitudes.size()), Representation::momentum};
    g.dft_forward(psi.amplitudes.data(), out.amplitudes.data());
    const double scale =
        std::pow(g.spacing() / std::sqrt(2.0 * std::numbers::pi), g.dims());
    out.amplitudes *= scale;
    centered_signs(g, out.amplitudes);
    return out;
}

WaveFunction to_position(const WaveFunction& psi) {
    if (psi.rep != Representation::momentum) throw Error("to_position: already in position rep");
    const Grid& g = *psi.grid;
    Vec tmp = psi.amplitudes;
    centered_signs(g, tmp);
    WaveFunction out{psi.grid, Vec(tmp.size()), Representation::position};
    g.dft_backward(tmp.data(), out.amplitudes.data());
    out.amplitudes /= std::pow(g.spacing() / std::sqrt(2.0 * std::numbers::pi), g.dims()) *
                      static_cast<double>(g.size());
    return out;
}

FourierMultiplier FourierMultiplier::from_function(
    GridPtr grid, const std::function<double(std::span<const double>)>& f) {
    FourierMultiplier m;
    m.grid = grid;
    m.symbol.resize(static_cast<Eigen::Index>(grid->size()));
    const auto& kv = grid->kvalues();
    std::array<double, 3> k{};
    for (std::size_t i = 0; i < grid->size(); ++i) {
        for (int a = 0; a < grid->dims(); ++a) k[a] = kv[grid->axis_index(i, a)];
        double v = f(std::span<const double>(k.data(), grid->dims()));
        if (!std::isfinite(v))
            throw Error("multiplier: symbol must be finite at every lattice point");
        m.symbol[static_cast<Eigen::Index>(i)] = v;
    }
    return m;
}

Vec apply_position(const WaveFunction& psi, int axis, double origin) {
    if (psi.rep != Representation::position) throw Error("apply_position: needs position rep");
    if (axis < 0 || axis >= psi.grid->dims()) throw Error("apply_position: axis out of range");
    const Grid& g = *psi.grid;
    const auto& xv = g.xvalues();
    Vec out(psi.amplitudes.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[static_cast<Eigen::Index>(i)] =
            (xv[g.axis_index(i, axis)] - origin) * psi.amplitudes[static_cast<Eigen::Index>(i)];
    return out;
}

Vec apply_momentum(const WaveFunction& psi, int axis) {
    if (psi.rep != Representation::position) throw Error("apply_momentum: needs position rep");
    if (axis < 0 || axis >= psi.grid->dims()) throw Error("apply_momentum: axis out of range");
    const Grid& g = *psi.grid;
    Vec hat(psi.amplitudes.size());
    g.dft_forward(psi.amplitudes.data(), hat.data());
    const auto& kv = g.kvalues();
    for (std::size_t i = 0; i < g.size(); ++i)
        hat[static_cast<Eigen::Index>(i)] *= kv[g.axis_index(i, axis)];
    Vec out(psi.amplitudes.size());
    g.dft_backward(hat.data(), out.data());
    out /= static_cast<double>(g.size());
    return out;
}

Vec apply_multiplier_raw(const FourierMultiplier& m, const Vec& position_amplitudes) {
    const Grid& g = *m.grid;
    if (static_cast<std::size_t>(position_amplitudes.size()) != g.size())
        throw Error("apply_multiplier: size mismatch");
    Vec hat(position_amplitudes.size());
    g.dft_forward(position_amplitudes.data(), hat.data());
    hat.array() *= m.symbol.array();
    Vec out(position_amplitudes.size());
    g.dft_backward(hat.data(), out.data());
    out /= static_cast<double>(g.size());
    return out;
}

Vec apply_multiplier(const FourierMultiplier& m, const WaveFunction& psi) {
    if (psi.grid != m.grid) throw Error("apply_multiplier: grid mismatch");
    if (psi.rep == Representation::momentum) {
        Vec out = psi.amplitudes;
        out.array() *= m.symbol.array();
        return out;
    }
    return apply_multiplier_raw(m, psi.amplitudes);
}

namespace {

WaveFunction build_packet(GridPtr grid, std::span<const double> center,
                          std::span<const double> momentum,
                          const std::function<Complex(double r2, double phase)>& envelope) {
    const Grid& g = *grid;
    if (static_cast<int>(center.size()) != g.dims() ||
        static_cast<int>(momentum.size()) != g.dims())
        throw Error("packet: center/momentum dimension mismatch");
    WaveFunction psi{grid, Vec(static_cast<Eigen::Index>(g.size())), Representation::position};
    const auto& xv = g.xvalues();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r2 = 0.0, phase = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            double d = xv[g.axis_index(i, a)] - center[a];
            r2 += d * d;
            phase += momentum[a] * d;
        }
        psi.amplitudes[static_cast<Eigen::Index>(i)] = envelope(r2, phase);
    }
    return normalized(std::move(psi));
}

}  // namespace

WaveFunction gaussian_packet(GridPtr grid, std::span<const double> center, double sigma,
                             std::span<const double> momentum) {
    if (!(sigma > 0.0)) throw Error("gaussian_packet: sigma must be positive");
    return build_packet(grid, center, momentum, [sigma](double r2, double phase) {
        return std::exp(Complex(-r2 / (4.0 * sigma * sigma), phase));
    });
}

WaveFunction bump_packet(GridPtr grid, std::span<const double> center, double halfwidth,
                         std::span<const double> momentum) {
    if (!(halfwidth > 0.0)) throw Error("bump_packet: halfwidth must be positive");
    const double w2 = halfwidth * halfwidth;
    return build_packet(grid, center, momentum, [w2](double r2, double phase) -> Complex {
        double u2 = r2 / w2;
        if (u2 >= 1.0) return {0.0, 0.0};
        return std::exp(Complex(1.0 - 1.0 / (1.0 - u2), phase));
    });
}

WaveFunction plane_wave(GridPtr grid, std::span<const int> mode) {
    const Grid& g = *grid;
    if (static_cast<int>(mode.size()) != g.dims()) throw Error("plane_wave: mode dim mismatch");
    std::array<double, 3> k{};
    for (int a = 0; a < g.dims(); ++a) {
        int m = mode[a];
        if (m < -g.points_per_dim() / 2 || m >= g.points_per_dim() / 2)
            throw Error("plane_wave: mode index outside lattice");
        k[a] = 2.0 * std::numbers::pi / g.extent() * m;
    }
    WaveFunction psi{grid, Vec(static_cast<Eigen::Index>(g.size())), Representation::position};
    const auto& xv = g.xvalues();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dims(); ++a) phase += k[a] * xv[g.axis_index(i, a)];
        psi.amplitudes[static_cast<Eigen::Index>(i)] = std::exp(Complex(0.0, phase));
    }
    return normalized(std::move(psi));
}

double boundary_band_mass(const WaveFunction& psi, double fraction) {
    if (!psi.grid) throw Error("boundary_band_mass: wavefunction has no grid");
    if (psi.rep != Representation::position) throw Error("boundary_band_mass: needs position rep");
    const Grid& g = *psi.grid;
    const double edge = (1.0 - fraction) * g.extent() / 2.0;
    const auto& xv = g.xvalues();
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool outer = false;
        for (int a = 0; a < g.dims(); ++a)
            if (std::abs(xv[g.axis_index(i, a)]) >= edge) {
                outer = true;
                break;
            }
        if (outer) mass += std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]);
    }
    return mass * g.cell_volume();
}

double snap_to_lattice(const Grid& grid, double k) {
    const double dk = 2.0 * std::numbers::pi / grid.extent();
    return dk * std::round(k / dk);
}

}  // namespace qdyn
