#include "qdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qdyn::spectral {

Vec SpectralData::apply_function(const std::function<double(double)>& f, const Vec& v) const {
    Vec c = eigenvectors.adjoint() * v;
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= f(eigenvalues[j]);
    return eigenvectors * c;
}

Vec SpectralData::evolve(double t, const Vec& v) const {
    Vec c = eigenvectors.adjoint() * v;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        c[j] *= std::exp(Complex(0.0, -t * eigenvalues[j]));
    return eigenvectors * c;
}

SpectralData diagonalize(const Mat& H, std::size_t cap) {
    if (H.rows() != H.cols()) throw Error("diagonalize: matrix must be square");
    if (static_cast<std::size_t>(H.rows()) > cap) throw Error("diagonalize: size exceeds cap");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error("diagonalize: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    if (es.info() != Eigen::Success) throw Error("diagonalize: eigensolver failed");

    SpectralData sd;
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = es.eigenvectors();
    sd.classification.assign(sd.count(), PairClass::unclassified);
    return sd;
}

Vec Projector::apply(const Vec& v) const {
    if (rank() == 0) return Vec::Zero(v.size());
    return basis * (basis.adjoint() * v);
}

Mat Projector::densify(std::size_t dim) const {
    if (rank() == 0) return Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return basis * basis.adjoint();
}

Projector spectral_projector(const SpectralData& sd, double a, double b) {
    if (!(a < b)) throw Error("spectral_projector: need a < b");
    std::vector<Eigen::Index> sel;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
        if (sd.eigenvalues[j] > a && sd.eigenvalues[j] <= b) sel.push_back(j);
    Projector P;
    P.basis.resize(sd.eigenvectors.rows(), static_cast<Eigen::Index>(sel.size()));
    for (std::size_t c = 0; c < sel.size(); ++c)
        P.basis.col(static_cast<Eigen::Index>(c)) = sd.eigenvectors.col(sel[c]);
    return P;
}

Projector point_projector(const SpectralData& sd, double lambda, double cluster_tol) {
    std::vector<Eigen::Index> sel;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
        if (std::abs(sd.eigenvalues[j] - lambda) <= cluster_tol) sel.push_back(j);
    Projector P;
    P.basis.resize(sd.eigenvectors.rows(), static_cast<Eigen::Index>(sel.size()));
    for (std::size_t c = 0; c < sel.size(); ++c)
        P.basis.col(static_cast<Eigen::Index>(c)) = sd.eigenvectors.col(sel[c]);
    return P;
}

Vec Evolver::evolve(double t, const Vec& v) const {
    Vec c = to_modes(v);
    const RVec& w = mode_frequencies();
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] *= std::exp(Complex(0.0, -t * w[j]));
    return from_modes(c);
}

double Evolver::spectral_bound() const { return mode_frequencies().cwiseAbs().maxCoeff(); }

Vec MultiplierEvolver::to_modes(const Vec& v) const {
    const Grid& g = *m_.grid;
    Vec out(v.size());
    g.dft_forward(v.data(), out.data());
    return out;
}

Vec MultiplierEvolver::from_modes(const Vec& c) const {
    const Grid& g = *m_.grid;
    Vec out(c.size());
    g.dft_backward(c.data(), out.data());
    out /= static_cast<double>(g.size());
    return out;
}

ErgodicResult ergodic_projector(const Evolver& evolver, double lambda, double T,
                                const std::vector<Vec>& probes, double step,
                                double rank_cutoff) {
    if (!(T > 0.0)) throw Error("ergodic_projector: T must be positive");
    if (probes.empty()) throw Error("ergodic_projector: need at least one probe");

    const RVec& freqs = evolver.mode_frequencies();
    double spread = 0.0;
    for (Eigen::Index j = 0; j < freqs.size(); ++j)
        spread = std::max(spread, std::abs(freqs[j] - lambda));
    const double max_step = spread > 0.0 ? std::numbers::pi / (4.0 * spread) : T;
    if (step <= 0.0) step = max_step;
    if (step > max_step * (1.0 + 1e-12))
        throw Error("ergodic_projector: quadrature step too coarse for the spectral spread");

    const int steps = std::max(1, static_cast<int>(std::ceil(T / step)));
    const double h = T / steps;

    ErgodicResult result;
    result.quadrature_step = h;

    // trapezoid in mode space: phases e^{it(omega_j - lambda)}
    Mat averaged(probes[0].size(), static_cast<Eigen::Index>(probes.size()));
    for (std::size_t p = 0; p < probes.size(); ++p) {
        Vec c0 = evolver.to_modes(probes[p]);
        Vec acc = 0.5 * c0;  // t = 0 endpoint
        Vec cur = c0;
        Vec phase(freqs.size());
        for (Eigen::Index j = 0; j < freqs.size(); ++j)
            phase[j] = std::exp(Complex(0.0, h * (freqs[j] - lambda)));
        for (int s = 1; s <= steps; ++s) {
            cur.array() *= phase.array();
            acc += (s == steps ? 0.5 : 1.0) * cur;
        }
        acc *= h / T;
        averaged.col(static_cast<Eigen::Index>(p)) = evolver.from_modes(acc);
        result.averaged.push_back(averaged.col(static_cast<Eigen::Index>(p)));
    }

    Eigen::JacobiSVD<Mat> svd(averaged, Eigen::ComputeThinU);
    Eigen::Index keep = 0;
    for (Eigen::Index j = 0; j < svd.singularValues().size(); ++j)
        if (svd.singularValues()[j] > rank_cutoff) ++keep;
    result.projector.basis = svd.matrixU().leftCols(keep);
    return result;
}

Subspaces classify_subspaces(SpectralData& sd, const nbody::HamiltonianOperator& H,
                             const nbody::ParticleSystem& system, double energy_tol,
                             double localization_radius) {
    if (!H.is_grid()) throw Error("classify_subspaces: needs a grid-form Hamiltonian");
    for (const auto& [pair, pot] : system.pair_potentials)
        if (!pot.decays_at_infinity())
            throw Error(std::string("classify_subspaces: potential '") + pot.name() +
                        "' has no decay-to-zero tail; bound/continuum split undefined");

    const Grid& g = *H.grid();
    if (localization_radius <= 0.0) localization_radius = g.extent() / 4.0;
    const double r2max = localization_radius * localization_radius;

    Subspaces out;
    out.spread.resize(sd.count());
    std::vector<Eigen::Index> bound_idx, cont_idx;
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double x2 = 0.0;
            for (int a = 0; a < g.dims(); ++a) {
                double x = g.xvalues()[g.axis_index(i, a)];
                x2 += x * x;
            }
            r2 += x2 * std::norm(sd.eigenvectors(static_cast<Eigen::Index>(i), j));
        }
        out.spread[static_cast<std::size_t>(j)] = r2;
        bool is_bound = sd.eigenvalues[j] < -energy_tol && r2 < r2max;
        sd.classification[static_cast<std::size_t>(j)] =
            is_bound ? PairClass::bound : PairClass::continuum_proxy;
        (is_bound ? bound_idx : cont_idx).push_back(j);
    }

    auto collect = [&](const std::vector<Eigen::Index>& idx) {
        Projector P;
        P.basis.resize(sd.eigenvectors.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c)
            P.basis.col(static_cast<Eigen::Index>(c)) = sd.eigenvectors.col(idx[c]);
        return P;
    };
    out.bound = collect(bound_idx);
    out.continuum = collect(cont_idx);
    return out;
}

BeatSignal beat_signal(const SpectralData& sd, const std::vector<int>& levels,
                       const std::vector<Complex>& coefficients, Eigen::Index probe_index,
                       double t_final, int samples) {
    if (levels.size() != coefficients.size() || levels.empty())
        throw Error("beat_signal: levels/coefficients mismatch");
    if (probe_index < 0 || probe_index >= sd.eigenvectors.rows())
        throw Error("beat_signal: probe index out of range");
    if (samples < 4) throw Error("beat_signal: need at least 4 samples");
    double wsum = 0.0;
    for (const Complex& a : coefficients) wsum += std::norm(a);
    if (std::abs(wsum - 1.0) > 1e-8) throw Error("beat_signal: coefficients must have unit weight");

    double max_gap = 0.0, min_gap = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            double gap = std::abs(sd.eigenvalues[levels[i]] - sd.eigenvalues[levels[j]]);
            max_gap = std::max(max_gap, gap);
            if (gap > 0.0) min_gap = min_gap == 0.0 ? gap : std::min(min_gap, gap);
        }
    if (levels.size() >= 2 && min_gap == 0.0 && max_gap == 0.0) {
        // fully degenerate superposition: constant signal, allowed
    }
    const double dt = t_final / samples;
    if (max_gap > 0.0 && max_gap >= std::numbers::pi / dt)
        throw Error("beat_signal: sampling too coarse for the largest level gap (aliasing)");
    if (min_gap > 0.0 && min_gap < 2.0 * std::numbers::pi / t_final)
        throw Error("beat_signal: time grid too short to resolve the smallest gap");

    BeatSignal out;
    out.times.resize(static_cast<std::size_t>(samples));
    out.values.resize(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        double t = dt * s;
        Complex amp = 0.0;
        for (std::size_t i = 0; i < levels.size(); ++i)
            amp += coefficients[i] * std::exp(Complex(0.0, -t * sd.eigenvalues[levels[i]])) *
                   sd.eigenvectors(probe_index, levels[i]);
        out.times[static_cast<std::size_t>(s)] = t;
        out.values[static_cast<std::size_t>(s)] = std::norm(amp);
    }

    // detrended periodogram via direct DFT of the real series
    double mean = 0.0;
    for (double v : out.values) mean += v;
    mean /= samples;
    const int nbins = samples / 2;
    out.bin_width = 2.0 * std::numbers::pi / t_final;
    out.frequencies.resize(static_cast<std::size_t>(nbins));
    out.power.resize(static_cast<std::size_t>(nbins));
    double best = -1.0;
    for (int b = 0; b < nbins; ++b) {
        Complex acc = 0.0;
        for (int s = 0; s < samples; ++s)
            acc += (out.values[static_cast<std::size_t>(s)] - mean) *
                   std::exp(Complex(0.0, -2.0 * std::numbers::pi * b * s / samples));
        out.frequencies[static_cast<std::size_t>(b)] = out.bin_width * b;
        out.power[static_cast<std::size_t>(b)] = std::norm(acc);
        if (b > 0 && out.power[static_cast<std::size_t>(b)] > best) {
            best = out.power[static_cast<std::size_t>(b)];
            out.dominant_frequency = out.frequencies[static_cast<std::size_t>(b)];
        }
    }
    return out;
}

}  // namespace qdyn::spectral
