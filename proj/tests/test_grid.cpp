#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qdyn/grid.hpp"

using namespace qdyn;
using std::numbers::pi;

namespace {

WaveFunction random_state(GridPtr grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    WaveFunction psi{grid, Vec(static_cast<Eigen::Index>(grid->size())),
                     Representation::position};
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i)
        psi.amplitudes[i] = Complex(gauss(rng), gauss(rng));
    return normalized(std::move(psi));
}

}  // namespace

TEST_CASE("grid construction and dual lattice") {
    auto g = Grid::make(1, 8, 8.0);
    CHECK(g->spacing() == doctest::Approx(1.0));
    CHECK(g->spacing() * g->points_per_dim() == doctest::Approx(g->extent()));

    // frequencies (2 pi / 8) * {0,1,2,3,-4,-3,-2,-1}
    const double dk = 2.0 * pi / 8.0;
    std::vector<double> want = {0, dk, 2 * dk, 3 * dk, -4 * dk, -3 * dk, -2 * dk, -dk};
    for (int j = 0; j < 8; ++j) CHECK(g->kvalues()[j] == doctest::Approx(want[j]));

    // only the Nyquist frequency is unpaired
    double sum = 0.0;
    for (double k : g->kvalues()) sum += k;
    CHECK(sum == doctest::Approx(-4 * dk));
}

TEST_CASE("grid precondition errors") {
    CHECK_THROWS_AS(Grid::make(1, 7, 8.0), Error);
    CHECK_THROWS_AS(Grid::make(1, 4, 8.0), Error);
    CHECK_THROWS_AS(Grid::make(1, 1024, -1.0), Error);
    CHECK_THROWS_AS(Grid::make(4, 8, 8.0), Error);
    CHECK_THROWS_AS(Grid::make(3, 512, 8.0), Error);  // 2^27 over the cap
}

TEST_CASE("representation change is unitary and involutive") {
    auto g = Grid::make(1, 256, 40.0);
    WaveFunction psi = random_state(g, 11);
    WaveFunction hat = to_momentum(psi);
    // Parseval with the momentum-space measure
    double nhat = std::sqrt(std::pow(2.0 * pi / g->extent(), g->dims())) * hat.amplitudes.norm();
    CHECK(nhat == doctest::Approx(1.0).epsilon(1e-12));
    WaveFunction back = to_position(hat);
    CHECK((back.amplitudes - psi.amplitudes).norm() < 1e-12 * psi.amplitudes.norm());
    CHECK_THROWS_AS(to_momentum(hat), Error);
    CHECK_THROWS_AS(to_position(psi), Error);
}

TEST_CASE("momentum representation matches the continuum Gaussian transform") {
    // centered real packet: psi_hat should peak at k0 with (near-)real phase
    auto g = Grid::make(1, 512, 60.0);
    double k0 = snap_to_lattice(*g, 1.5);
    std::vector<double> c = {0.0}, m = {k0};
    WaveFunction psi = gaussian_packet(g, c, 1.0, m);
    WaveFunction hat = to_momentum(psi);
    Eigen::Index peak = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < hat.amplitudes.size(); ++i)
        if (std::abs(hat.amplitudes[i]) > best) {
            best = std::abs(hat.amplitudes[i]);
            peak = i;
        }
    CHECK(g->kvalues()[static_cast<std::size_t>(peak)] == doctest::Approx(k0));
    CHECK(hat.amplitudes[peak].real() > 0.0);
    CHECK(std::abs(hat.amplitudes[peak].imag()) < 1e-10 * best);
}

TEST_CASE("apply_position") {
    auto g = Grid::make(1, 64, 16.0);

    // constant state: output antisymmetric about the center, zero mean
    WaveFunction flat{g, Vec::Constant(64, Complex(0.25, 0.0)), Representation::position};
    flat = normalized(std::move(flat));
    Vec xpsi = apply_position(flat, 0);
    double mean = 0.0;
    for (Eigen::Index i = 0; i < xpsi.size(); ++i) mean += xpsi[i].real();
    // the j = 0 point carries the unpaired -L/2 coordinate
    CHECK(mean * g->spacing() == doctest::Approx(-8.0 * flat.amplitudes[0].real() * g->spacing()));

    // delta at x = 2 scales by 2
    WaveFunction delta{g, Vec::Zero(64), Representation::position};
    int idx = 0;
    for (int j = 0; j < 64; ++j)
        if (g->xvalues()[j] == doctest::Approx(2.0)) idx = j;
    delta.amplitudes[idx] = 1.0;
    delta = normalized(std::move(delta));
    Vec dx = apply_position(delta, 0);
    CHECK(std::abs(dx[idx] - 2.0 * delta.amplitudes[idx]) < 1e-14);

    // centered Gaussian: <x> = 0 by parity
    std::vector<double> c = {0.0}, m = {0.0};
    WaveFunction gauss = gaussian_packet(g, c, 1.0, m);
    Complex xval = g->cell_volume() * gauss.amplitudes.dot(apply_position(gauss, 0));
    CHECK(std::abs(xval) < 1e-12);

    CHECK_THROWS_AS(apply_position(to_momentum(gauss), 0), Error);
}

TEST_CASE("apply_momentum") {
    auto g = Grid::make(1, 128, 32.0);

    // lattice plane wave is an exact eigenfunction
    std::vector<int> mode = {5};
    WaveFunction pw = plane_wave(g, mode);
    double k = 2.0 * pi / 32.0 * 5;
    Vec ppsi = apply_momentum(pw, 0);
    CHECK((ppsi - k * pw.amplitudes).norm() < 1e-12 * pw.amplitudes.norm());

    // constant maps to zero
    WaveFunction flat{g, Vec::Constant(128, Complex(1.0, 0.0)), Representation::position};
    flat = normalized(std::move(flat));
    CHECK(apply_momentum(flat, 0).norm() < 1e-12);
}

TEST_CASE("apply_momentum converges to the finite-difference oracle") {
    // smooth Gaussian: FD error is O(h^2); refinement improves the match
    double errs[2];
    int idx = 0;
    for (int n : {256, 512}) {
        auto g = Grid::make(1, n, 40.0);
        std::vector<double> c = {0.0}, m = {1.0};
        double k0 = snap_to_lattice(*g, 1.0);
        m[0] = k0;
        WaveFunction psi = gaussian_packet(g, c, 2.0, m);
        Vec exact = apply_momentum(psi, 0);
        std::vector<Complex> amp(psi.amplitudes.data(),
                                 psi.amplitudes.data() + psi.amplitudes.size());
        auto fd = oracles::momentum_fd(amp, g->spacing());
        double err = 0.0;
        for (Eigen::Index i = 0; i < exact.size(); ++i)
            err += std::norm(exact[i] - fd[static_cast<std::size_t>(i)]);
        errs[idx++] = std::sqrt(err * g->cell_volume());
    }
    CHECK(errs[1] < errs[0] / 3.0);  // second order: ratio ~ 4
}

TEST_CASE("apply_multiplier") {
    auto g = Grid::make(1, 128, 32.0);
    WaveFunction psi = random_state(g, 3);

    auto identity = FourierMultiplier::from_function(g, [](auto) { return 1.0; });
    CHECK((apply_multiplier(identity, psi) - psi.amplitudes).norm() < 1e-12);

    // k^2/2 on a plane wave
    std::vector<int> mode = {7};
    WaveFunction pw = plane_wave(g, mode);
    double k0 = 2.0 * pi / 32.0 * 7;
    auto kinetic = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    Vec out = apply_multiplier(kinetic, pw);
    CHECK((out - 0.5 * k0 * k0 * pw.amplitudes).norm() < 1e-11 * pw.amplitudes.norm());

    // sqrt(k^2) = |k| on a plane wave with k0 = 3 (2 pi / L)
    std::vector<int> m3 = {3};
    WaveFunction pw3 = plane_wave(g, m3);
    auto habs = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return std::sqrt(k[0] * k[0]); });
    Vec o3 = apply_multiplier(habs, pw3);
    double v = 2.0 * pi / 32.0 * 3;
    CHECK((o3 - v * pw3.amplitudes).norm() < 1e-12 * pw3.amplitudes.norm());

    // self-adjointness on random states
    WaveFunction phi = random_state(g, 4);
    Complex lhs = g->cell_volume() * phi.amplitudes.dot(apply_multiplier(kinetic, psi));
    Complex rhs = g->cell_volume() * psi.amplitudes.dot(apply_multiplier(kinetic, phi));
    CHECK(std::abs(lhs - std::conj(rhs)) < 1e-12 * std::abs(lhs));

    // grid mismatch rejected
    auto g2 = Grid::make(1, 64, 32.0);
    WaveFunction other = random_state(g2, 5);
    CHECK_THROWS_AS(apply_multiplier(kinetic, other), Error);

    // non-finite symbols rejected
    CHECK_THROWS_AS(FourierMultiplier::from_function(
                        g, [](std::span<const double> k) { return 1.0 / k[0]; }),
                    Error);
}

TEST_CASE("multiplier composition f(g(k)) equals chained application") {
    auto g = Grid::make(1, 128, 20.0);
    WaveFunction psi = random_state(g, 9);
    auto f2 = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return k[0] * k[0]; });
    auto fexp = FourierMultiplier::from_function(
        g, [](std::span<const double> k) { return std::exp(-0.1 * k[0] * k[0]); });
    auto composed = FourierMultiplier::from_function(g, [](std::span<const double> k) {
        return k[0] * k[0] * std::exp(-0.1 * k[0] * k[0]);
    });
    Vec chained = apply_multiplier(fexp, WaveFunction{g, apply_multiplier(f2, psi), psi.rep});
    Vec direct = apply_multiplier(composed, psi);
    CHECK((chained - direct).norm() < 1e-12 * direct.norm());
}

TEST_CASE("canonical commutator proxy on localized states") {
    // <psi, (xp - px) psi> = i up to grid truncation, improving when the
    // domain and resolution are refined together
    double err[2];
    int idx = 0;
    for (auto [n, L] : {std::pair{64, 8.0}, std::pair{256, 16.0}}) {
        auto g = Grid::make(1, n, L);
        std::vector<double> c = {0.0}, m = {0.0};
        WaveFunction psi = gaussian_packet(g, c, 1.2, m);
        WaveFunction xpsi{g, apply_position(psi, 0), Representation::position};
        WaveFunction ppsi{g, apply_momentum(psi, 0), Representation::position};
        Complex xp = g->cell_volume() * psi.amplitudes.dot(apply_position(ppsi, 0));
        Complex px = g->cell_volume() * psi.amplitudes.dot(apply_momentum(xpsi, 0));
        err[idx++] = std::abs((xp - px) - Complex(0.0, 1.0));
    }
    CHECK(err[0] < 0.05);
    CHECK(err[1] < err[0] / 10.0);
}

TEST_CASE("2D and 3D grids") {
    auto g = Grid::make(2, 16, 8.0);
    CHECK(g->size() == 256);
    std::vector<int> mode = {3, -2};
    WaveFunction pw = plane_wave(g, mode);
    auto kin = FourierMultiplier::from_function(g, [](std::span<const double> k) {
        return 0.5 * (k[0] * k[0] + k[1] * k[1]);
    });
    double dk = 2.0 * pi / 8.0;
    double want = 0.5 * dk * dk * (9 + 4);
    Vec out = apply_multiplier(kin, pw);
    CHECK((out - want * pw.amplitudes).norm() < 1e-11 * pw.amplitudes.norm());

    // round trip in 3D
    auto g3 = Grid::make(3, 8, 4.0);
    WaveFunction psi = random_state(g3, 17);
    WaveFunction back = to_position(to_momentum(psi));
    CHECK((back.amplitudes - psi.amplitudes).norm() < 1e-12);
}

TEST_CASE("boundary band mass") {
    auto g = Grid::make(1, 256, 100.0);
    std::vector<double> c = {0.0}, m = {0.0};
    WaveFunction centered = gaussian_packet(g, c, 2.0, m);
    CHECK(boundary_band_mass(centered) < 1e-15);
    std::vector<double> edge = {47.0};
    WaveFunction shifted = gaussian_packet(g, edge, 2.0, m);
    CHECK(boundary_band_mass(shifted) > 0.5);
}
