#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "qdyn/nbody.hpp"

using namespace qdyn;
using namespace qdyn::nbody;

TEST_CASE("jacobi frame: two and three bodies") {
    auto f2 = jacobi_frame({1.0, 1.0});
    CHECK(f2.reduced_masses[0] == doctest::Approx(0.5));
    // x_1 = r_2 - r_1, X_C = (r_1 + r_2)/2
    CHECK(f2.to_internal(1, 0) == doctest::Approx(-1.0));
    CHECK(f2.to_internal(1, 1) == doctest::Approx(1.0));
    CHECK(f2.to_internal(0, 0) == doctest::Approx(0.5));

    auto f3 = jacobi_frame({1.0, 1.0, 1.0});
    CHECK(f3.reduced_masses[0] == doctest::Approx(0.5));
    CHECK(f3.reduced_masses[1] == doctest::Approx(2.0 / 3.0));

    auto f12 = jacobi_frame({1.0, 2.0});
    CHECK(f12.reduced_masses[0] == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(jacobi_frame({1.0}), Error);
    CHECK_THROWS_AS(jacobi_frame({1.0, -1.0}), Error);
}

TEST_CASE("reduced-mass recursion for random mass vectors") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> mass(0.1, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        int N = 2 + static_cast<int>(rng() % 7);
        std::vector<double> masses;
        for (int i = 0; i < N; ++i) masses.push_back(mass(rng));
        auto frame = jacobi_frame(masses);
        double head = 0.0;
        for (int i = 0; i < N - 1; ++i) {
            head += masses[static_cast<std::size_t>(i)];
            double want = 1.0 / (1.0 / masses[static_cast<std::size_t>(i + 1)] + 1.0 / head);
            CHECK(frame.reduced_masses[i] == doctest::Approx(want).epsilon(1e-14));
        }
        // transform and inverse compose to the identity
        RMat round = frame.to_internal * frame.from_internal;
        CHECK((round - RMat::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("jacobi transform preserves the kinetic quadratic form") {
    // sum p_r^2 / 2m = P_C^2 / 2M + sum p_i^2 / 2mu_i on random momenta;
    // conjugate momenta transform by the transpose
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> mass(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        int N = 2 + static_cast<int>(rng() % 5);
        std::vector<double> masses;
        for (int i = 0; i < N; ++i) masses.push_back(mass(rng));
        auto frame = jacobi_frame(masses);

        RVec p_internal(N);
        for (int i = 0; i < N; ++i) p_internal[i] = gauss(rng);
        RVec p_particle = frame.to_internal.transpose() * p_internal;

        double lhs = 0.0;
        for (int i = 0; i < N; ++i)
            lhs += p_particle[i] * p_particle[i] / (2.0 * masses[static_cast<std::size_t>(i)]);
        double rhs = p_internal[0] * p_internal[0] / (2.0 * frame.total_mass);
        for (int i = 1; i < N; ++i)
            rhs += p_internal[i] * p_internal[i] / (2.0 * frame.reduced_masses[i - 1]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("potential catalog") {
    CHECK(Potential::none().evaluate(4.0) == 0.0);
    CHECK(Potential::harmonic(2.0).evaluate(9.0) == doctest::Approx(0.5 * 4.0 * 9.0));
    CHECK(Potential::gaussian_well(5.0, 1.0).evaluate(0.0) == doctest::Approx(-5.0));
    CHECK(Potential::soft_coulomb(1.0, 0.5).evaluate(0.0) == doctest::Approx(-2.0));
    CHECK(Potential::square_barrier(3.0, 2.0).evaluate(0.9) == doctest::Approx(3.0));
    CHECK(Potential::square_barrier(3.0, 2.0).evaluate(1.1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(Potential::soft_coulomb(1.0, 0.0), Error);
    CHECK(!Potential::harmonic(1.0).decays_at_infinity());
    CHECK(Potential::gaussian_well(1.0, 1.0).decays_at_infinity());
}

TEST_CASE("free two-body relative Hamiltonian") {
    auto grid = Grid::make(1, 64, 16.0);
    auto frame = jacobi_frame({1.0, 1.0});
    ParticleSystem sys{{1.0, 1.0}, {}};
    auto H = assemble_relative_hamiltonian(frame, grid, sys);
    REQUIRE(H.is_grid());

    // constant mode is the ground state at eigenvalue 0
    Vec flat = Vec::Constant(64, Complex(1.0, 0.0));
    CHECK(H.apply(flat).norm() < 1e-12);

    // symbol is k^2 / (2 mu) with mu = 1/2
    Mat M = densify(H);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
    double dk = 2.0 * std::numbers::pi / 16.0;
    CHECK(es.eigenvalues()[1] == doctest::Approx(dk * dk).epsilon(1e-10));  // k^2/(2*0.5)
}

TEST_CASE("harmonic pair: ladder spectrum against the analytic oracle") {
    auto grid = Grid::make(1, 256, 40.0);
    auto frame = jacobi_frame({2.0, 2.0});  // mu = 1
    ParticleSystem sys{{2.0, 2.0}, {{{0, 1}, Potential::harmonic(1.0)}}};
    auto H = assemble_relative_hamiltonian(frame, grid, sys);
    Mat M = densify(H);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    // E_n = (n + 1/2) omega with omega = 1 for mu = 1
    CHECK(es.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-8));
    for (int n = 0; n < 6; ++n)
        CHECK(es.eigenvalues()[n + 1] - es.eigenvalues()[n] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("densify structure") {
    auto grid = Grid::make(1, 32, 8.0);

    // diagonal potential only: densified matrix is that diagonal
    FourierMultiplier zero = FourierMultiplier::from_function(grid, [](auto) { return 0.0; });
    RVec V(32);
    for (int i = 0; i < 32; ++i) V[i] = 0.1 * i;
    auto Hv = HamiltonianOperator::grid_operator(zero, V);
    Mat Mv = densify(Hv);
    CHECK((Mv - Mat(V.cast<Complex>().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);

    // multiplier only: eigenvalues are the symbol values as a multiset
    auto kin = FourierMultiplier::from_function(
        grid, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });
    auto Hk = HamiltonianOperator::grid_operator(kin, RVec::Zero(32));
    Mat Mk = densify(Hk);
    CHECK((Mk - Mk.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> es(Mk);
    std::vector<double> sym(kin.symbol.data(), kin.symbol.data() + 32);
    std::sort(sym.begin(), sym.end());
    for (int i = 0; i < 32; ++i)
        CHECK(es.eigenvalues()[i] ==
              doctest::Approx(sym[static_cast<std::size_t>(i)]).epsilon(1e-10));

    // cap enforced
    auto big = Grid::make(2, 128, 8.0);
    auto bigkin = FourierMultiplier::from_function(big, [](auto) { return 0.0; });
    auto Hbig = HamiltonianOperator::grid_operator(
        bigkin, RVec::Zero(static_cast<Eigen::Index>(big->size())));
    CHECK_THROWS_AS(densify(Hbig), Error);
}

TEST_CASE("assembled Hamiltonians are Hermitian on random vectors") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // three equal masses in 1D with pairwise wells: 2 internal coordinates
    auto grid = Grid::make(2, 32, 12.0);
    auto frame = jacobi_frame({1.0, 1.0, 1.0});
    ParticleSystem sys{{1.0, 1.0, 1.0},
                       {{{0, 1}, Potential::gaussian_well(1.0, 1.0)},
                        {{0, 2}, Potential::gaussian_well(1.0, 1.0)},
                        {{1, 2}, Potential::gaussian_well(1.0, 1.0)}}};
    auto H = assemble_relative_hamiltonian(frame, grid, sys);
    for (int trial = 0; trial < 5; ++trial) {
        Vec a(static_cast<Eigen::Index>(grid->size())), b(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a[i] = Complex(gauss(rng), gauss(rng));
            b[i] = Complex(gauss(rng), gauss(rng));
        }
        Complex lhs = b.dot(H.apply(a));
        Complex rhs = a.dot(H.apply(b));
        CHECK(std::abs(lhs - std::conj(rhs)) < 1e-10 * std::abs(lhs));
    }

    // undefined pair rejected
    ParticleSystem bad{{1.0, 1.0}, {{{0, 3}, Potential::harmonic(1.0)}}};
    auto g1 = Grid::make(1, 32, 12.0);
    auto f1 = jacobi_frame({1.0, 1.0});
    CHECK_THROWS_AS(assemble_relative_hamiltonian(f1, g1, bad), Error);
}

TEST_CASE("center-of-mass separation") {
    auto axis = Grid::make(1, 32, 16.0);

    // free equal masses: identity holds tightly
    ParticleSystem free_sys{{1.0, 1.0}, {}};
    auto rep = com_separation_check(free_sys, axis, 1e-10);
    CHECK(rep.matched);
    CHECK(rep.max_deviation < 1e-10);

    // harmonic pair potential
    ParticleSystem harm{{1.0, 2.0}, {{{0, 1}, Potential::harmonic(1.0)}}};
    auto rep2 = com_separation_check(harm, axis, 1e-8);
    CHECK(rep2.matched);

    // deliberately broken frame: mismatch detected
    auto rep3 = com_separation_check(harm, axis, 1e-8, 0.05);
    CHECK(!rep3.matched);
    CHECK(rep3.max_deviation > 1e-3);
}
