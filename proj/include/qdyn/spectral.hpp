#ifndef QDYN_SPECTRAL_HPP
#define QDYN_SPECTRAL_HPP

#include <functional>
#include <memory>
#include <vector>

#include "qdyn/grid.hpp"
#include "qdyn/nbody.hpp"
#include "qdyn/types.hpp"

namespace qdyn::spectral {

enum class PairClass { unclassified, bound, continuum_proxy };

/// Complete orthonormal eigendecomposition of a Hermitian operator with a
/// bound/continuum tag per eigenpair (filled in by classify_subspaces).
struct SpectralData {
    RVec eigenvalues;   // ascending
    Mat eigenvectors;   // orthonormal columns
    std::vector<PairClass> classification;

    std::size_t count() const { return static_cast<std::size_t>(eigenvalues.size()); }
    /// f(H) v through the eigenbasis.
    Vec apply_function(const std::function<double(double)>& f, const Vec& v) const;
    Vec evolve(double t, const Vec& v) const;  // e^{-itH} v
};

/// Full eigendecomposition; rejects non-Hermitian input and enforces the
/// residual and orthonormality tolerances.
SpectralData diagonalize(const Mat& H, std::size_t cap = 4096);

/// Orthogonal projector presented by an orthonormal spanning set; zero
/// columns encode the rank-0 projector.
struct Projector {
    Mat basis;

    std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
    Vec apply(const Vec& v) const;
    Mat densify(std::size_t dim) const;
};

/// Projector onto eigenvectors with eigenvalue in (a, b].
Projector spectral_projector(const SpectralData& sd, double a, double b);

/// Projector onto the eigenspace of a single eigenvalue; eigenvalues
/// within cluster_tol of each other are treated as one degenerate level.
Projector point_projector(const SpectralData& sd, double lambda, double cluster_tol = 1e-9);

/// Abstract clock: applies e^{-itH} by phasing mode coefficients. Both the
/// eigendecomposition-backed and the Fourier-multiplier-backed clocks fit
/// this shape, which lets quadratures over time run in mode space.
class Evolver {
public:
    virtual ~Evolver() = default;
    virtual Vec to_modes(const Vec& v) const = 0;
    virtual Vec from_modes(const Vec& c) const = 0;
    virtual const RVec& mode_frequencies() const = 0;

    Vec evolve(double t, const Vec& v) const;
    double spectral_bound() const;
};

class SpectralEvolver : public Evolver {
public:
    explicit SpectralEvolver(SpectralData sd) : sd_(std::move(sd)) {}
    Vec to_modes(const Vec& v) const override { return sd_.eigenvectors.adjoint() * v; }
    Vec from_modes(const Vec& c) const override { return sd_.eigenvectors * c; }
    const RVec& mode_frequencies() const override { return sd_.eigenvalues; }

private:
    SpectralData sd_;
};

/// Clock generated by a pure Fourier multiplier; diagonalization-free
/// (modes are the DFT basis), so it provides a route through e^{-itH}
/// that is independent of any eigensolver.
class MultiplierEvolver : public Evolver {
public:
    explicit MultiplierEvolver(FourierMultiplier m) : m_(std::move(m)) {}
    Vec to_modes(const Vec& v) const override;
    Vec from_modes(const Vec& c) const override;
    const RVec& mode_frequencies() const override { return m_.symbol; }

private:
    FourierMultiplier m_;
};

/// Evolver with externally supplied behaviour (negative controls in tests).
class CallbackEvolver : public Evolver {
public:
    CallbackEvolver(std::function<Vec(const Vec&)> to, std::function<Vec(const Vec&)> from,
                    RVec freqs)
        : to_(std::move(to)), from_(std::move(from)), freqs_(std::move(freqs)) {}
    Vec to_modes(const Vec& v) const override { return to_(v); }
    Vec from_modes(const Vec& c) const override { return from_(c); }
    const RVec& mode_frequencies() const override { return freqs_; }

private:
    std::function<Vec(const Vec&)> to_, from_;
    RVec freqs_;
};

struct ErgodicResult {
    std::vector<Vec> averaged;  // (1/T) int_0^T e^{-it lambda} e^{itH} psi_i dt
    Projector projector;        // orthonormalized from the averaged vectors
    double quadrature_step = 0.0;
};

/// Long-time average of the phase-compensated clock applied to each probe;
/// converges to the eigenprojection at lambda at rate O(1/T). Trapezoid
/// quadrature, step bounded by pi / (4 max_j |lambda_j - lambda|).
ErgodicResult ergodic_projector(const Evolver& evolver, double lambda, double T,
                                const std::vector<Vec>& probes, double step = 0.0,
                                double rank_cutoff = 0.25);

struct Subspaces {
    Projector bound;
    Projector continuum;
    std::vector<double> spread;  // <|x|^2> per eigenpair
};

/// Finite-grid proxy for the bound/continuum split of a decaying
/// potential: bound means eigenvalue < -energy_tol and localization
/// <|x|^2> < (localization_radius)^2. Mutates sd.classification.
/// The defaults follow the grid geometry: radius L/4.
Subspaces classify_subspaces(SpectralData& sd, const nbody::HamiltonianOperator& H,
                             const nbody::ParticleSystem& system, double energy_tol = 1e-6,
                             double localization_radius = 0.0);

struct BeatSignal {
    std::vector<double> times;
    std::vector<double> values;         // |psi(t, x_probe)|^2
    std::vector<double> frequencies;    // spectrum bins (angular)
    std::vector<double> power;          // detrended power per bin
    double dominant_frequency = 0.0;
    double bin_width = 0.0;
};

/// Superposition sum_j a_j e^{-i E_j t} v_j(x_probe) sampled on a uniform
/// time grid; the dominant detrended frequency recovers the level gap.
BeatSignal beat_signal(const SpectralData& sd, const std::vector<int>& levels,
                       const std::vector<Complex>& coefficients, Eigen::Index probe_index,
                       double t_final, int samples);

}  // namespace qdyn::spectral

#endif
