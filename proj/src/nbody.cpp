#include "qdyn/nbody.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qdyn::nbody {

Potential Potential::harmonic(double omega) {
    if (!(omega > 0.0)) throw Error("potential: harmonic omega must be positive");
    return {PotentialKind::harmonic, omega, 0.0};
}

Potential Potential::gaussian_well(double depth, double width) {
    if (!(width > 0.0)) throw Error("potential: gaussian_well width must be positive");
    return {PotentialKind::gaussian_well, depth, width};
}

Potential Potential::soft_coulomb(double q, double reg) {
    if (!(reg > 0.0)) throw Error("potential: soft_coulomb regularization must be positive");
    return {PotentialKind::soft_coulomb, q, reg};
}

Potential Potential::square_barrier(double height, double width) {
    if (!(width > 0.0)) throw Error("potential: square_barrier width must be positive");
    return {PotentialKind::square_barrier, height, width};
}

double Potential::evaluate(double dist2) const {
    switch (kind) {
        case PotentialKind::none:
            return 0.0;
        case PotentialKind::harmonic:
            return 0.5 * a * a * dist2;
        case PotentialKind::gaussian_well:
            return -a * std::exp(-dist2 / (2.0 * b * b));
        case PotentialKind::soft_coulomb:
            return -a / std::sqrt(dist2 + b * b);
        case PotentialKind::square_barrier:
            return dist2 <= 0.25 * b * b ? a : 0.0;
    }
    return 0.0;
}

bool Potential::decays_at_infinity() const { return kind != PotentialKind::harmonic; }

const char* Potential::name() const {
    switch (kind) {
        case PotentialKind::none: return "none";
        case PotentialKind::harmonic: return "harmonic";
        case PotentialKind::gaussian_well: return "gaussian_well";
        case PotentialKind::soft_coulomb: return "soft_coulomb";
        case PotentialKind::square_barrier: return "square_barrier";
    }
    return "?";
}

JacobiFrame jacobi_frame(const std::vector<double>& masses) {
    const int N = static_cast<int>(masses.size());
    if (N < 2) throw Error("jacobi_frame: need at least two particles");
    for (double m : masses)
        if (!(m > 0.0)) throw Error("jacobi_frame: masses must be positive");

    JacobiFrame frame;
    frame.total_mass = 0.0;
    for (double m : masses) frame.total_mass += m;

    frame.to_internal = RMat::Zero(N, N);
    // row 0: center of mass
    for (int j = 0; j < N; ++j) frame.to_internal(0, j) = masses[j] / frame.total_mass;
    // row i: x_i = r_{i+1} - mass-weighted centroid of the first i particles
    frame.reduced_masses.resize(N - 1);
    double head_mass = 0.0;
    for (int i = 1; i < N; ++i) {
        head_mass += masses[i - 1];
        for (int j = 0; j < i; ++j) frame.to_internal(i, j) = -masses[j] / head_mass;
        frame.to_internal(i, i) = 1.0;
        frame.reduced_masses[i - 1] = 1.0 / (1.0 / masses[i] + 1.0 / head_mass);
    }
    frame.from_internal = frame.to_internal.inverse();
    return frame;
}

HamiltonianOperator HamiltonianOperator::grid_operator(FourierMultiplier kinetic, RVec potential) {
    if (static_cast<std::size_t>(potential.size()) != kinetic.grid->size())
        throw Error("hamiltonian: potential array size mismatch");
    HamiltonianOperator H;
    H.form_ = GridForm{std::move(kinetic), std::move(potential)};
    return H;
}

HamiltonianOperator HamiltonianOperator::dense(Mat matrix) {
    if (matrix.rows() != matrix.cols()) throw Error("hamiltonian: dense form must be square");
    HamiltonianOperator H;
    H.form_ = std::move(matrix);
    return H;
}

std::size_t HamiltonianOperator::dimension() const {
    if (is_grid()) return grid_form().kinetic.grid->size();
    return static_cast<std::size_t>(matrix().rows());
}

Vec HamiltonianOperator::apply(const Vec& v) const {
    if (is_grid()) {
        const GridForm& gf = grid_form();
        Vec out = apply_multiplier_raw(gf.kinetic, v);
        out.array() += gf.potential.array().cast<Complex>() * v.array();
        return out;
    }
    return matrix() * v;
}

HamiltonianOperator assemble_relative_hamiltonian(const JacobiFrame& frame, GridPtr grid,
                                                  const ParticleSystem& system) {
    const int N = frame.particle_count();
    const int internal = N - 1;
    if (grid->dims() % internal != 0)
        throw Error("assemble: grid dims must be spatial_dim * (N-1)");
    const int spatial = grid->dims() / internal;

    // kinetic: sum over internal coordinates of |k_i|^2 / (2 mu_i); axis
    // a belongs to internal coordinate a / spatial.
    RVec inv2mu(grid->dims());
    for (int a = 0; a < grid->dims(); ++a)
        inv2mu[a] = 0.5 / frame.reduced_masses[a / spatial];
    FourierMultiplier kinetic = FourierMultiplier::from_function(
        grid, [&](std::span<const double> k) {
            double e = 0.0;
            for (std::size_t a = 0; a < k.size(); ++a) e += inv2mu[static_cast<int>(a)] * k[a] * k[a];
            return e;
        });

    RVec potential = RVec::Zero(static_cast<Eigen::Index>(grid->size()));
    const auto& xv = grid->xvalues();
    for (const auto& [pair, pot] : system.pair_potentials) {
        auto [i, j] = pair;
        if (i < 0 || j <= i || j >= N) throw Error("assemble: potential references invalid pair");
        if (pot.kind == PotentialKind::none) continue;
        // x_ij = r_i - r_j in internal coordinates; the center-of-mass
        // component must cancel by translation invariance.
        RVec coeff = frame.from_internal.row(i) - frame.from_internal.row(j);
        if (std::abs(coeff[0]) > 1e-12)
            throw Error("assemble: pair separation depends on the center of mass");
        for (std::size_t p = 0; p < grid->size(); ++p) {
            double d2 = 0.0;
            for (int s = 0; s < spatial; ++s) {
                double comp = 0.0;
                for (int c = 0; c < internal; ++c)
                    comp += coeff[1 + c] * xv[grid->axis_index(p, c * spatial + s)];
                d2 += comp * comp;
            }
            potential[static_cast<Eigen::Index>(p)] += pot.evaluate(d2);
        }
    }
    return HamiltonianOperator::grid_operator(std::move(kinetic), std::move(potential));
}

Mat densify(const HamiltonianOperator& H, std::size_t cap) {
    const std::size_t dim = H.dimension();
    if (dim > cap) throw Error("densify: lattice size exceeds cap");
    if (!H.is_grid()) return H.matrix();
    Mat M(dim, dim);
    Vec basis = Vec::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        basis[static_cast<Eigen::Index>(b)] = 1.0;
        M.col(static_cast<Eigen::Index>(b)) = H.apply(basis);
        basis[static_cast<Eigen::Index>(b)] = 0.0;
    }
    return M;
}

ComSeparationReport com_separation_check(const ParticleSystem& system, GridPtr axis_grid,
                                         double tolerance, double perturb_mu) {
    if (system.masses.size() != 2) throw Error("com_separation: two-body systems only");
    if (axis_grid->dims() != 1) throw Error("com_separation: expects a 1D axis grid");
    const std::size_t n = axis_grid->size();
    if (n * n > 4096) throw Error("com_separation: joint grid exceeds densify cap");

    JacobiFrame frame = jacobi_frame(system.masses);
    const double M_total = frame.total_mass;
    // the joint operator always uses the true frame; the perturbation (for
    // negative-control runs) corrupts only the 1D pieces entering the sums
    const double mu_true = frame.reduced_masses[0];
    const double mu = mu_true + perturb_mu;

    // 1D pieces
    FourierMultiplier com_kin = FourierMultiplier::from_function(
        axis_grid, [&](std::span<const double> k) { return k[0] * k[0] / (2.0 * M_total); });
    HamiltonianOperator H_com =
        HamiltonianOperator::grid_operator(com_kin, RVec::Zero(static_cast<Eigen::Index>(n)));

    FourierMultiplier rel_kin = FourierMultiplier::from_function(
        axis_grid, [&](std::span<const double> k) { return k[0] * k[0] / (2.0 * mu); });
    RVec V = RVec::Zero(static_cast<Eigen::Index>(n));
    auto it = system.pair_potentials.find({0, 1});
    if (it != system.pair_potentials.end()) {
        const auto& xv = axis_grid->xvalues();
        for (std::size_t p = 0; p < n; ++p)
            V[static_cast<Eigen::Index>(p)] = it->second.evaluate(xv[p] * xv[p]);
    }
    HamiltonianOperator H_rel = HamiltonianOperator::grid_operator(rel_kin, V);

    // joint operator on the (X, x) tensor grid, built independently of the
    // 1D pieces and densified blind
    GridPtr joint = Grid::make(2, axis_grid->points_per_dim(), axis_grid->extent());
    FourierMultiplier joint_kin = FourierMultiplier::from_function(
        joint, [&](std::span<const double> k) {
            return k[0] * k[0] / (2.0 * M_total) + k[1] * k[1] / (2.0 * mu_true);
        });
    RVec joint_V = RVec::Zero(static_cast<Eigen::Index>(joint->size()));
    if (it != system.pair_potentials.end()) {
        const auto& xv = joint->xvalues();
        for (std::size_t p = 0; p < joint->size(); ++p) {
            double x = xv[joint->axis_index(p, 1)];
            joint_V[static_cast<Eigen::Index>(p)] = it->second.evaluate(x * x);
        }
    }
    HamiltonianOperator H_joint =
        HamiltonianOperator::grid_operator(std::move(joint_kin), std::move(joint_V));

    Eigen::SelfAdjointEigenSolver<Mat> es_joint(densify(H_joint), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> es_com(densify(H_com), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> es_rel(densify(H_rel), Eigen::EigenvaluesOnly);

    ComSeparationReport report;
    report.tolerance = tolerance;
    report.joint_spectrum = es_joint.eigenvalues();

    std::vector<double> sums;
    sums.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sums.push_back(es_com.eigenvalues()[static_cast<Eigen::Index>(i)] +
                           es_rel.eigenvalues()[static_cast<Eigen::Index>(j)]);
    std::sort(sums.begin(), sums.end());
    report.combined_spectrum =
        Eigen::Map<RVec>(sums.data(), static_cast<Eigen::Index>(sums.size()));

    report.max_deviation =
        (report.joint_spectrum - report.combined_spectrum).cwiseAbs().maxCoeff();
    report.matched = report.max_deviation <= tolerance;
    return report;
}

}  // namespace qdyn::nbody
