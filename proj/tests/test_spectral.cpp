#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdyn/clock.hpp"
#include "qdyn/spectral.hpp"

using namespace qdyn;
using namespace qdyn::spectral;
using std::numbers::pi;

namespace {

nbody::HamiltonianOperator well_op(GridPtr g, double depth, double width) {
    auto kin = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    RVec V(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i) {
        double x = g->xvalues()[g->axis_index(i, 0)];
        V[static_cast<Eigen::Index>(i)] =
            nbody::Potential::gaussian_well(depth, width).evaluate(x * x);
    }
    return nbody::HamiltonianOperator::grid_operator(kin, V);
}

nbody::ParticleSystem well_system(double depth, double width) {
    return {{2.0, 2.0}, {{{0, 1}, nbody::Potential::gaussian_well(depth, width)}}};
}

}  // namespace

TEST_CASE("diagonalize basics and invariants") {
    // diagonal matrix: eigenvalues are the entries, eigenvectors the basis
    Mat D = Mat::Zero(3, 3);
    D(0, 0) = 2.0;
    D(1, 1) = -1.0;
    D(2, 2) = 0.5;
    auto sd = diagonalize(D);
    CHECK(sd.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(sd.eigenvalues[2] == doctest::Approx(2.0));
    CHECK((sd.eigenvectors.adjoint() * sd.eigenvectors - Mat::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // residuals on a random Hermitian matrix
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat A(24, 24);
    for (Eigen::Index i = 0; i < 24; ++i)
        for (Eigen::Index j = 0; j < 24; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
    Mat H = 0.5 * (A + A.adjoint());
    auto sdh = diagonalize(H);
    for (Eigen::Index j = 0; j < 24; ++j)
        CHECK((H * sdh.eigenvectors.col(j) - sdh.eigenvalues[j] * sdh.eigenvectors.col(j))
                  .norm() < 1e-8);

    // non-Hermitian rejected
    Mat bad = A;
    CHECK_THROWS_AS(diagonalize(bad), Error);
}

TEST_CASE("free multiplier eigenvalues are the symbol multiset") {
    auto g = Grid::make(1, 64, 20.0);
    auto kin = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    auto H = nbody::HamiltonianOperator::grid_operator(kin, RVec::Zero(64));
    auto sd = diagonalize(nbody::densify(H));
    std::vector<double> sym(kin.symbol.data(), kin.symbol.data() + 64);
    std::sort(sym.begin(), sym.end());
    for (int i = 0; i < 64; ++i)
        CHECK(sd.eigenvalues[i] == doctest::Approx(sym[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("well spectrum is stable under domain doubling") {
    // shared spacing, doubled extent: the negative eigenvalues move only by
    // their boundary tails, which the domain is sized to suppress below 1e-6
    auto g1 = Grid::make(1, 512, 60.0);
    auto g2 = Grid::make(1, 1024, 120.0);
    auto sd1 = diagonalize(nbody::densify(well_op(g1, 5.0, 1.0)));
    auto sd2 = diagonalize(nbody::densify(well_op(g2, 5.0, 1.0)));
    int neg1 = 0, neg2 = 0;
    for (Eigen::Index j = 0; j < sd1.eigenvalues.size(); ++j)
        if (sd1.eigenvalues[j] < -1e-6) ++neg1;
    for (Eigen::Index j = 0; j < sd2.eigenvalues.size(); ++j)
        if (sd2.eigenvalues[j] < -1e-6) ++neg2;
    CHECK(neg1 >= 2);
    CHECK(neg1 == neg2);
    for (int j = 0; j < neg1; ++j)
        CHECK(std::abs(sd1.eigenvalues[j] - sd2.eigenvalues[j]) < 1e-6);
}

TEST_CASE("spectral projectors: intervals, additivity, completeness") {
    Mat D = Mat::Zero(4, 4);
    D(0, 0) = 0.0;
    D(1, 1) = 1.0;
    D(2, 2) = 2.0;
    D(3, 3) = 2.0;  // degenerate level
    auto sd = diagonalize(D);

    // the full axis gives the identity
    auto all = spectral_projector(sd, -10.0, 10.0);
    CHECK((all.densify(4) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    // disjoint intervals give orthogonal projectors
    auto low = spectral_projector(sd, -0.5, 0.5);
    auto high = spectral_projector(sd, 0.5, 3.0);
    CHECK((low.densify(4) * high.densify(4)).cwiseAbs().maxCoeff() < 1e-12);

    // additivity over adjacent intervals
    auto ab = spectral_projector(sd, -0.5, 1.5);
    auto bc = spectral_projector(sd, 1.5, 3.0);
    auto ac = spectral_projector(sd, -0.5, 3.0);
    CHECK((ab.densify(4) + bc.densify(4) - ac.densify(4)).cwiseAbs().maxCoeff() < 1e-12);

    // degenerate eigenvalue: rank-2 point projector
    auto p2 = point_projector(sd, 2.0);
    CHECK(p2.rank() == 2);

    // empty intersection: rank 0, not an error
    auto none = spectral_projector(sd, 5.0, 6.0);
    CHECK(none.rank() == 0);
    Vec v = Vec::Ones(4);
    CHECK(none.apply(v).norm() == 0.0);

    // completeness as a sum over point projectors
    Mat sum = Mat::Zero(4, 4);
    for (double lam : {0.0, 1.0, 2.0}) sum += point_projector(sd, lam).densify(4);
    CHECK((sum - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);

    // projector invariants
    Mat P = ab.densify(4);
    CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((P - P.adjoint()).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(spectral_projector(sd, 1.0, 1.0), Error);
}

TEST_CASE("f(H) through the eigenbasis equals the multiplier route") {
    auto g = Grid::make(1, 64, 20.0);
    auto kin = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    auto H = nbody::HamiltonianOperator::grid_operator(kin, RVec::Zero(64));
    auto sd = diagonalize(nbody::densify(H));

    auto f = [](double x) { return std::exp(-0.3 * x) * std::cos(x); };
    auto fm = FourierMultiplier::from_function(
        g, [&](std::span<const double> k) { return f(0.5 * k[0] * k[0]); });

    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(64);
    for (Eigen::Index i = 0; i < 64; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    v.normalize();

    Vec via_eigen = sd.apply_function(f, v);
    Vec via_symbol = apply_multiplier_raw(fm, v);
    CHECK((via_eigen - via_symbol).norm() < 1e-10);
}

TEST_CASE("ergodic average against the closed-form two-level oracle") {
    Mat H = Mat::Zero(2, 2);
    H(1, 1) = 1.0;
    SpectralEvolver ev(diagonalize(H));
    Vec psi(2);
    psi << Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0));
    Vec target(2);
    target << psi[0], Complex(0.0);

    for (double T : {25.0, 50.0, 100.0}) {
        auto erg = ergodic_projector(ev, 0.0, T, {psi});
        double err = (erg.averaged[0] - target).norm();
        // closed form of the surviving off-resonant mode, times the
        // trapezoid factor (h/2) cot(h/2) of the discrete average
        double h = erg.quadrature_step;
        double quad = 0.5 * h / std::tan(0.5 * h);
        double want = oracles::ergodic_mode_error(1.0, T) / std::sqrt(2.0) * quad;
        CHECK(err == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("ergodic projector converges at rate 1/T on a multi-level system") {
    // envelope fit over a non-resonant T ladder; incommensurate gaps keep
    // single-mode resonances from polluting the fit
    Mat H = Mat::Zero(4, 4);
    H(1, 1) = 1.0;
    H(2, 2) = std::sqrt(2.0);
    H(3, 3) = pi / 1.3;
    SpectralEvolver ev(diagonalize(H));
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec psi(4);
    for (Eigen::Index i = 0; i < 4; ++i) psi[i] = Complex(gauss(rng), gauss(rng));
    psi.normalize();
    auto sd = diagonalize(H);
    Vec target = point_projector(sd, 0.0).apply(psi);

    std::vector<double> Ts = {40.0, 90.0, 210.0, 470.0, 1050.0};
    std::vector<double> errs;
    for (double T : Ts) {
        auto erg = ergodic_projector(ev, 0.0, T, {psi});
        errs.push_back((erg.averaged[0] - target).norm());
    }
    auto fit = power_law_fit(Ts, errs);
    CHECK(fit.exponent == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("ergodic average fixes eigenvectors and kills non-eigenvalues") {
    Mat H = Mat::Zero(3, 3);
    H(1, 1) = 0.9;
    H(2, 2) = 2.3;
    auto sd = diagonalize(H);
    SpectralEvolver ev(sd);

    // probe already in the eigenspace: exact for every T
    Vec e1 = sd.eigenvectors.col(1);
    auto erg = ergodic_projector(ev, 0.9, 7.0, {e1});
    CHECK((erg.averaged[0] - e1).norm() < 1e-12);

    // lambda not an eigenvalue: the average vanishes like 1/T
    std::mt19937_64 rng(10);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec psi(3);
    for (Eigen::Index i = 0; i < 3; ++i) psi[i] = Complex(gauss(rng), gauss(rng));
    psi.normalize();
    double n1 = ergodic_projector(ev, 0.5, 50.0, {psi}).averaged[0].norm();
    double n2 = ergodic_projector(ev, 0.5, 500.0, {psi}).averaged[0].norm();
    CHECK(n1 < 0.2);
    CHECK(n2 < n1);
    CHECK(ergodic_projector(ev, 0.5, 500.0, {psi}).projector.rank() == 0);

    // coarse quadrature step rejected
    CHECK_THROWS_AS(ergodic_projector(ev, 0.0, 10.0, {psi}, 10.0), Error);
}

TEST_CASE("classify_subspaces") {
    auto g = Grid::make(1, 256, 40.0);

    // free case: the zero mode is not below -tol, so nothing is bound
    auto Hfree = well_op(g, 0.0, 1.0);
    auto sdf = diagonalize(nbody::densify(Hfree));
    nbody::ParticleSystem free_sys{{2.0, 2.0}, {}};
    auto subs = classify_subspaces(sdf, Hfree, free_sys);
    CHECK(subs.bound.rank() == 0);
    CHECK(subs.continuum.rank() == 256);

    // depth sweep: bound count non-increasing, eventually zero
    std::vector<double> depths = {5.0, 1.5, 0.3, 1e-3};
    std::vector<std::size_t> counts;
    for (double depth : depths) {
        auto H = well_op(g, depth, 1.0);
        auto sd = diagonalize(nbody::densify(H));
        auto s = classify_subspaces(sd, H, well_system(depth, 1.0));
        counts.push_back(s.bound.rank());
        // the two projectors resolve the identity
        Mat sum = s.bound.densify(256) + s.continuum.densify(256);
        CHECK((sum - Mat::Identity(256, 256)).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(counts[0] >= 2);
    for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] <= counts[i - 1]);
    CHECK(counts.back() == 0);

    // stability of the bound count under refining both extent and points
    auto g2 = Grid::make(1, 512, 80.0);
    auto H2 = well_op(g2, 5.0, 1.0);
    auto sd2 = diagonalize(nbody::densify(H2));
    auto s2 = classify_subspaces(sd2, H2, well_system(5.0, 1.0));
    CHECK(s2.bound.rank() == counts[0]);

    // harmonic confinement has no decay tail: classification refused
    auto gk = Grid::make(1, 128, 20.0);
    auto kin = FourierMultiplier::from_function(
        gk, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    RVec V(128);
    for (int i = 0; i < 128; ++i) {
        double x = gk->xvalues()[static_cast<std::size_t>(i)];
        V[i] = 0.5 * x * x;
    }
    auto Hh = nbody::HamiltonianOperator::grid_operator(kin, V);
    auto sdh = diagonalize(nbody::densify(Hh));
    nbody::ParticleSystem harm{{2.0, 2.0}, {{{0, 1}, nbody::Potential::harmonic(1.0)}}};
    CHECK_THROWS_AS(classify_subspaces(sdh, Hh, harm), Error);
}

TEST_CASE("beat signal frequencies") {
    // two levels with gap 1: dominant detrended frequency within one bin
    Mat H2 = Mat::Zero(2, 2);
    H2(1, 1) = 1.0;
    Mat U = Mat::Identity(2, 2);
    // mix the position basis so the probe point sees both levels
    Mat R(2, 2);
    R << Complex(std::cos(0.4)), Complex(-std::sin(0.4)), Complex(std::sin(0.4)),
        Complex(std::cos(0.4));
    Mat Hm = R * H2 * R.adjoint();
    auto sd = diagonalize(Hm);

    std::vector<int> levels = {0, 1};
    std::vector<Complex> a = {Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0))};
    auto sig = beat_signal(sd, levels, a, 0, 60.0, 256);
    CHECK(std::abs(sig.dominant_frequency - 1.0) <= sig.bin_width);

    // single eigenstate: constant signal
    std::vector<int> one = {0};
    std::vector<Complex> a1 = {Complex(1.0)};
    auto flat = beat_signal(sd, one, a1, 0, 60.0, 256);
    double lo = *std::min_element(flat.values.begin(), flat.values.end());
    double hi = *std::max_element(flat.values.begin(), flat.values.end());
    CHECK(hi - lo < 1e-12);

    // three levels, gaps 1 and 2: spectral peaks at 1, 2 and 3
    Mat H3 = Mat::Zero(3, 3);
    H3(1, 1) = 1.0;
    H3(2, 2) = 3.0;
    Mat R3(3, 3);
    R3 << Complex(0.8), Complex(0.36), Complex(0.48), Complex(-0.6), Complex(0.48),
        Complex(0.64), Complex(0.0), Complex(-0.8), Complex(0.6);
    Mat Hm3 = R3 * H3 * R3.adjoint();
    auto sd3 = diagonalize(Hm3);
    std::vector<int> l3 = {0, 1, 2};
    double c3 = 1.0 / std::sqrt(3.0);
    std::vector<Complex> a3 = {Complex(c3), Complex(c3), Complex(c3)};
    auto sig3 = beat_signal(sd3, l3, a3, 0, 80.0, 512);
    for (double gap : {1.0, 2.0, 3.0}) {
        // a local peak within one bin of each gap
        double best = 1e9;
        for (std::size_t b = 1; b + 1 < sig3.power.size(); ++b) {
            if (sig3.power[b] > sig3.power[b - 1] && sig3.power[b] >= sig3.power[b + 1])
                best = std::min(best, std::abs(sig3.frequencies[b] - gap));
        }
        CHECK(best <= sig3.bin_width);
    }

    // too-short grid rejected (cannot resolve the smallest gap)
    CHECK_THROWS_AS(beat_signal(sd, levels, a, 0, 3.0, 64), Error);
    // aliasing rejected
    CHECK_THROWS_AS(beat_signal(sd3, l3, a3, 0, 80.0, 24), Error);
    // weight must be unit
    std::vector<Complex> abad = {Complex(1.0), Complex(1.0)};
    CHECK_THROWS_AS(beat_signal(sd, levels, abad, 0, 60.0, 256), Error);
}
