#include "qdyn/clock.hpp"

#include <cmath>
#include <numbers>

namespace qdyn::clock {

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw Error("propagator: dt must be positive");
    if (!(t_final >= dt)) throw Error("propagator: t_final must be at least dt");
    if (record_every < 1) throw Error("propagator: record_every must be >= 1");
    if (time_sign != 1 && time_sign != -1) throw Error("propagator: time_sign must be +-1");
}

int PropagatorConfig::total_steps() const {
    int s = static_cast<int>(std::llround(t_final / dt));
    return std::max(1, s);
}

namespace {

void check_snapshot(const WaveFunction& psi, double t, const PropagatorConfig& cfg,
                    const char* method) {
    double nrm = norm(psi);
    if (std::abs(nrm - 1.0) > 1e-9)
        throw Error(std::string(method) + ": norm drifted to " + std::to_string(nrm) +
                    " at t=" + std::to_string(t));
    if (cfg.monitor_boundary && psi.grid) {
        double mass = boundary_band_mass(psi, cfg.boundary_fraction);
        if (mass > cfg.boundary_mass_limit)
            throw MonitorAbort(std::string(method) +
                                   ": boundary-norm monitor tripped (mass " +
                                   std::to_string(mass) + " at t=" + std::to_string(t) +
                                   "); enlarge the domain or shorten the run",
                               t, mass);
    }
}

bool should_record(int step, int total, int every) {
    return step == total || step % every == 0;
}

}  // namespace

Trajectory evolve_split_operator(const nbody::HamiltonianOperator& H, const WaveFunction& psi0,
                                 const PropagatorConfig& config) {
    config.validate();
    if (!H.is_grid()) throw Error("split_operator: Hamiltonian not in splittable grid form");
    if (psi0.rep != Representation::position) throw Error("split_operator: needs position rep");
    if (psi0.grid != H.grid()) throw Error("split_operator: grid mismatch");

    const Grid& g = *psi0.grid;
    const auto& gf = H.grid_form();
    const double sdt = config.time_sign * config.dt;

    Vec expV_half(gf.potential.size()), expT(gf.kinetic.symbol.size());
    for (Eigen::Index i = 0; i < expV_half.size(); ++i)
        expV_half[i] = std::exp(Complex(0.0, -0.5 * sdt * gf.potential[i]));
    for (Eigen::Index i = 0; i < expT.size(); ++i)
        expT[i] = std::exp(Complex(0.0, -sdt * gf.kinetic.symbol[i]));

    const int total = config.total_steps();
    Trajectory traj;
    traj.generator = "split_operator";
    traj.times.push_back(0.0);
    traj.states.push_back(psi0);

    Vec cur = psi0.amplitudes;
    Vec hat(cur.size());
    for (int step = 1; step <= total; ++step) {
        cur.array() *= expV_half.array();
        g.dft_forward(cur.data(), hat.data());
        hat.array() *= expT.array();
        g.dft_backward(hat.data(), cur.data());
        cur /= static_cast<double>(g.size());
        cur.array() *= expV_half.array();
        if (should_record(step, total, config.record_every)) {
            double t = sdt * step;
            WaveFunction snap{psi0.grid, cur, Representation::position};
            check_snapshot(snap, t, config, "split_operator");
            traj.times.push_back(t);
            traj.states.push_back(std::move(snap));
        }
    }
    return traj;
}

namespace {

Trajectory evolve_by_modes(const spectral::Evolver& ev, const WaveFunction& psi0,
                           const PropagatorConfig& config, const char* name) {
    config.validate();
    const int total = config.total_steps();
    Vec modes = ev.to_modes(psi0.amplitudes);
    const RVec& freq = ev.mode_frequencies();

    Trajectory traj;
    traj.generator = name;
    for (int step = 0; step <= total; ++step) {
        if (step != 0 && !should_record(step, total, config.record_every)) continue;
        double t = config.time_sign * config.dt * step;
        Vec c = modes;
        for (Eigen::Index j = 0; j < c.size(); ++j)
            c[j] *= std::exp(Complex(0.0, -t * freq[j]));
        WaveFunction snap{psi0.grid, ev.from_modes(c), psi0.rep};
        check_snapshot(snap, t, config, name);
        traj.times.push_back(t);
        traj.states.push_back(std::move(snap));
    }
    return traj;
}

}  // namespace

Trajectory evolve_exact_diagonal(const spectral::SpectralData& sd, const WaveFunction& psi0,
                                 const PropagatorConfig& config) {
    if (static_cast<std::size_t>(psi0.amplitudes.size()) != sd.count())
        throw Error("exact_diagonal: dimension mismatch");
    spectral::SpectralEvolver ev(sd);
    return evolve_by_modes(ev, psi0, config, "exact_diagonal");
}

Trajectory evolve_exact_diagonal(const Mat& H, const WaveFunction& psi0,
                                 const PropagatorConfig& config) {
    return evolve_exact_diagonal(spectral::diagonalize(H), psi0, config);
}

Trajectory evolve_dispersive(const FourierMultiplier& omega, const WaveFunction& psi0,
                             const PropagatorConfig& config) {
    if (psi0.grid != omega.grid) throw Error("dispersive: grid mismatch");
    if (psi0.rep != Representation::position) throw Error("dispersive: needs position rep");
    spectral::MultiplierEvolver ev(omega);
    return evolve_by_modes(ev, psi0, config, "dispersive_exact");
}

double field_energy(const FieldState& f) {
    const Grid& g = *f.grid;
    Vec qc = f.q.cast<Complex>();
    double grad2 = 0.0;
    WaveFunction wrap{f.grid, qc, Representation::position};
    for (int a = 0; a < g.dims(); ++a) grad2 += apply_momentum(wrap, a).squaredNorm();
    double e = 0.5 * (f.qdot.squaredNorm() + f.c * f.c * grad2 +
                      std::pow(f.c, 4) * f.mu * f.mu * f.q.squaredNorm());
    return e * g.cell_volume();
}

FieldTrajectory evolve_klein_gordon(const FieldState& initial, const PropagatorConfig& config) {
    config.validate();
    if (config.method != Method::kg_leapfrog)
        throw Error("klein_gordon: config method must be kg_leapfrog");
    const Grid& g = *initial.grid;
    if (!(config.dt <= 0.9 * g.spacing() / initial.c))
        throw Error("klein_gordon: dt violates the stability bound 0.9 spacing/c");

    // acceleration operator c^2 (Laplacian - c^2 mu^2), diagonal in k
    const double c2 = initial.c * initial.c;
    const double m2 = std::pow(initial.c, 4) * initial.mu * initial.mu;
    FourierMultiplier acc_symbol = FourierMultiplier::from_function(
        initial.grid, [&](std::span<const double> k) {
            double k2 = 0.0;
            for (double kk : k) k2 += kk * kk;
            return -(c2 * k2 + m2);
        });
    auto accel = [&](const RVec& q) -> RVec {
        Vec out = apply_multiplier_raw(acc_symbol, q.cast<Complex>());
        return out.real();
    };

    const int total = config.total_steps();
    const double sdt = config.time_sign * config.dt;

    FieldTrajectory traj;
    FieldState cur = initial;
    traj.times.push_back(0.0);
    traj.states.push_back(cur);
    traj.energies.push_back(field_energy(cur));

    RVec a = accel(cur.q);
    for (int step = 1; step <= total; ++step) {
        cur.qdot += 0.5 * sdt * a;
        cur.q += sdt * cur.qdot;
        a = accel(cur.q);
        cur.qdot += 0.5 * sdt * a;
        if (should_record(step, total, config.record_every)) {
            traj.times.push_back(sdt * step);
            traj.states.push_back(cur);
            traj.energies.push_back(field_energy(cur));
        }
    }
    return traj;
}

ResidualReport schrodinger_residual(const Trajectory& traj,
                                    const std::function<Vec(const Vec&)>& apply_H) {
    const std::size_t m = traj.states.size();
    if (m < 3) throw Error("schrodinger_residual: need at least three snapshots");
    const double delta = traj.times[1] - traj.times[0];
    for (std::size_t i = 1; i < m; ++i)
        if (std::abs(traj.times[i] - traj.times[i - 1] - delta) > 1e-9 * std::abs(delta))
            throw Error("schrodinger_residual: snapshots not uniformly spaced");

    const double w = std::sqrt(traj.states[0].grid ? traj.states[0].grid->cell_volume() : 1.0);
    auto residual_at_stride = [&](std::size_t stride) {
        double worst = 0.0;
        const double d = delta * static_cast<double>(stride);
        for (std::size_t i = stride; i + stride < m; i += 1) {
            Vec fd = (traj.states[i + stride].amplitudes - traj.states[i - stride].amplitudes) /
                     (2.0 * d);
            Vec res = fd / imag_unit + apply_H(traj.states[i].amplitudes);
            worst = std::max(worst, w * res.norm());
        }
        return worst;
    };

    ResidualReport report;
    report.max_residual = residual_at_stride(1);
    if (m >= 5) {
        double coarse = residual_at_stride(2);
        if (report.max_residual > 0.0 && coarse > 0.0)
            report.convergence_order = std::log2(coarse / report.max_residual);
    }
    return report;
}

TwoClocksReport two_clocks_compare(const WaveFunction& psi0, double t_final, int samples) {
    if (psi0.grid->dims() != 1) throw Error("two_clocks: 1D packets only");
    if (psi0.rep != Representation::position) throw Error("two_clocks: needs position rep");
    if (samples < 3) throw Error("two_clocks: need at least 3 samples");
    if (boundary_band_mass(psi0) > 1e-12)
        throw Error("two_clocks: packet too wide for the domain");

    const Grid& g = *psi0.grid;
    FourierMultiplier habs = FourierMultiplier::from_function(
        psi0.grid, [](std::span<const double> k) { return std::abs(k[0]); });
    FourierMultiplier hfree = FourierMultiplier::from_function(
        psi0.grid, [](std::span<const double> k) { return 0.5 * k[0] * k[0]; });

    // mean momentum of the packet, for the report
    WaveFunction hat = to_momentum(psi0);
    double k0 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        k0 += g.kvalues()[g.axis_index(i, 0)] *
              std::norm(hat.amplitudes[static_cast<Eigen::Index>(i)]);
    k0 *= std::pow(2.0 * std::numbers::pi / g.extent(), g.dims());

    TwoClocksReport report;
    report.k0 = k0;
    spectral::MultiplierEvolver ev_abs(habs), ev_free(hfree);

    auto trace = [&](const spectral::Evolver& ev) {
        ClockTrace tr;
        Vec modes = ev.to_modes(psi0.amplitudes);
        const RVec& freq = ev.mode_frequencies();
        for (int s = 0; s < samples; ++s) {
            double t = t_final * s / (samples - 1);
            Vec c = modes;
            for (Eigen::Index j = 0; j < c.size(); ++j)
                c[j] *= std::exp(Complex(0.0, -t * freq[j]));
            WaveFunction snap{psi0.grid, ev.from_modes(c), Representation::position};
            if (boundary_band_mass(snap) > 1e-3)
                throw MonitorAbort("two_clocks: packet reached the domain boundary", t, 0.0);
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double x = g.xvalues()[g.axis_index(i, 0)];
                double p = std::norm(snap.amplitudes[static_cast<Eigen::Index>(i)]);
                m1 += x * p;
                m2 += x * x * p;
            }
            m1 *= g.cell_volume();
            m2 *= g.cell_volume();
            tr.center.push_back(m1);
            tr.width.push_back(std::sqrt(std::max(0.0, m2 - m1 * m1)));
        }
        return tr;
    };

    for (int s = 0; s < samples; ++s) report.times.push_back(t_final * s / (samples - 1));
    report.half_laplacian = trace(ev_abs);
    report.schroedinger = trace(ev_free);
    for (ClockTrace* tr : {&report.half_laplacian, &report.schroedinger}) {
        tr->center_fit = linear_fit(report.times, tr->center);
        tr->width_growth = tr->width.back() / tr->width.front();
    }
    return report;
}

}  // namespace qdyn::clock
