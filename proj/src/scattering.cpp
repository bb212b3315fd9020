#include "qdyn/scattering.hpp"

#include <cmath>

namespace qdyn::scattering {

double TestFunction::operator()(double lambda) const {
    double u = (lambda - center) / halfwidth;
    double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}

namespace {

std::array<double, 3> resolve_origin(const Grid& g, std::span<const double> origin) {
    std::array<double, 3> o{0.0, 0.0, 0.0};
    if (!origin.empty()) {
        if (static_cast<int>(origin.size()) != g.dims())
            throw Error("origin dimension mismatch");
        for (int a = 0; a < g.dims(); ++a) o[a] = origin[a];
    }
    return o;
}

}  // namespace

double escape_norm(const WaveFunction& psi, double R, std::span<const double> origin) {
    if (psi.rep != Representation::position) throw Error("escape_norm: needs position rep");
    const Grid& g = *psi.grid;
    if (!(R > 0.0) || !(R < g.extent() / 2.0))
        throw Error("escape_norm: R must lie in (0, L/2)");
    auto o = resolve_origin(g, origin);
    const double R2 = R * R;
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r2 = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            double d = g.xvalues()[g.axis_index(i, a)] - o[a];
            r2 += d * d;
        }
        if (r2 < R2) mass += std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]);
    }
    return std::sqrt(mass * g.cell_volume());
}

double energy_mismatch(const WaveFunction& psi, const TestFunction& phi,
                       const spectral::SpectralData& sd, const FourierMultiplier& kinetic) {
    if (psi.grid != kinetic.grid) throw Error("energy_mismatch: grid mismatch");
    if (sd.count() != kinetic.grid->size()) throw Error("energy_mismatch: dimension mismatch");
    Vec via_full = sd.apply_function([&](double l) { return phi(l); }, psi.amplitudes);
    FourierMultiplier phi_of_h0{kinetic.grid, kinetic.symbol};
    for (Eigen::Index j = 0; j < phi_of_h0.symbol.size(); ++j)
        phi_of_h0.symbol[j] = phi(kinetic.symbol[j]);
    Vec via_kinetic = apply_multiplier_raw(phi_of_h0, psi.amplitudes);
    return std::sqrt(psi.grid->cell_volume()) * (via_full - via_kinetic).norm();
}

double velocity_mismatch(const WaveFunction& psi, double t, std::span<const double> mu_per_axis,
                         std::span<const double> origin) {
    if (t == 0.0) throw Error("velocity_mismatch: t must be nonzero");
    if (psi.rep != Representation::position) throw Error("velocity_mismatch: needs position rep");
    const Grid& g = *psi.grid;
    if (static_cast<int>(mu_per_axis.size()) != g.dims())
        throw Error("velocity_mismatch: one effective mass per axis required");
    for (double m : mu_per_axis)
        if (!(m > 0.0)) throw Error("velocity_mismatch: masses must be positive");
    auto o = resolve_origin(g, origin);
    double total = 0.0;
    for (int a = 0; a < g.dims(); ++a) {
        Vec xpsi = apply_position(psi, a, o[a]);
        Vec ppsi = apply_momentum(psi, a);
        total += (xpsi / t - ppsi / mu_per_axis[a]).squaredNorm();
    }
    return std::sqrt(total * g.cell_volume());
}

double velocity_mismatch(const WaveFunction& psi, double t, double mu,
                         std::span<const double> origin) {
    std::vector<double> mus(static_cast<std::size_t>(psi.grid->dims()), mu);
    return velocity_mismatch(psi, t, std::span<const double>(mus), origin);
}

CalibrationSeries local_time_calibration(const clock::Trajectory& traj, double mu, int axis) {
    if (!(mu > 0.0)) throw Error("calibration: mu must be positive");
    CalibrationSeries out;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const WaveFunction& psi = traj.states[s];
        const Grid& g = *psi.grid;
        double xmean = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            xmean += g.xvalues()[g.axis_index(i, axis)] *
                     std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]);
        xmean *= g.cell_volume();
        Complex pexp = g.cell_volume() * psi.amplitudes.dot(apply_momentum(psi, axis));
        double pmean = pexp.real();
        if (std::abs(pmean) < 1e-8)
            throw Error("calibration: <p> vanishes; mechanical time undefined");
        double t = traj.times[s];
        out.times.push_back(t);
        out.t_hat.push_back(mu * xmean / pmean);
        out.relative_dev.push_back(t != 0.0 ? std::abs(out.t_hat.back() - t) / std::abs(t) : 0.0);
    }
    return out;
}

namespace {

SeriesFit fit_series(const std::vector<double>& t, const std::vector<double>& y) {
    SeriesFit out;
    out.monotone_decreasing = true;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] < y[i - 1])) out.monotone_decreasing = false;
    out.tail_monotone_from = y.size();
    for (std::size_t start = 0; start < y.size(); ++start) {
        bool mono = true;
        for (std::size_t i = start + 1; i < y.size(); ++i)
            if (!(y[i] < y[i - 1])) mono = false;
        if (mono) {
            out.tail_monotone_from = start;
            break;
        }
    }
    bool positive = true;
    for (double v : y) positive = positive && v > 0.0;
    if (positive && y.size() >= 2) out.fit = power_law_fit(t, y);
    return out;
}

}  // namespace

DiagnosticSeries run_asymptotics_suite(const nbody::HamiltonianOperator& H, double mu,
                                       const WaveFunction& packet, const SuiteConfig& config,
                                       std::span<const double> origin) {
    std::vector<double> mus(static_cast<std::size_t>(packet.grid->dims()), mu);
    return run_asymptotics_suite(H, std::span<const double>(mus), packet, config, origin);
}

DiagnosticSeries run_asymptotics_suite(const nbody::HamiltonianOperator& H,
                                       std::span<const double> mu_per_axis,
                                       const WaveFunction& packet, const SuiteConfig& config,
                                       std::span<const double> origin) {
    if (!H.is_grid()) throw Error("asymptotics_suite: needs a grid-form Hamiltonian");
    if (packet.grid != H.grid()) throw Error("asymptotics_suite: grid mismatch");
    if (!(config.t_min > 0.0) || !(config.t_max > config.t_min) || config.time_points < 2)
        throw Error("asymptotics_suite: bad time grid");

    const Grid& g = *packet.grid;
    const auto& gf = H.grid_form();
    const bool has_potential = gf.potential.cwiseAbs().maxCoeff() > 0.0;

    DiagnosticSeries series;
    series.time_sign = config.time_sign;

    // spectral data: needed for phi(H) and for continuum filtering
    std::optional<spectral::SpectralData> sd;
    WaveFunction psi0 = packet;
    if (has_potential || g.size() <= 4096) {
        sd = spectral::diagonalize(nbody::densify(H));
    }

    if (has_potential) {
        if (!sd) throw Error("asymptotics_suite: potential present but grid exceeds densify cap");
        // drop the numerically-bound part and renormalize
        std::vector<Eigen::Index> bound;
        const double r2max = std::pow(g.extent() / 4.0, 2);
        for (Eigen::Index j = 0; j < sd->eigenvalues.size(); ++j) {
            if (sd->eigenvalues[j] >= -1e-6) break;
            double r2 = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double x2 = 0.0;
                for (int a = 0; a < g.dims(); ++a) {
                    double x = g.xvalues()[g.axis_index(i, a)];
                    x2 += x * x;
                }
                r2 += x2 * std::norm(sd->eigenvectors(static_cast<Eigen::Index>(i), j));
            }
            if (r2 < r2max) bound.push_back(j);
        }
        Vec amp = psi0.amplitudes;
        double removed = 0.0;
        for (Eigen::Index j : bound) {
            Complex c = sd->eigenvectors.col(j).dot(amp);
            amp -= c * sd->eigenvectors.col(j);
            removed += std::norm(c);
        }
        double total = psi0.amplitudes.squaredNorm();
        series.continuum_weight = 1.0 - removed / total;
        if (config.filter == ContinuumFilter::require &&
            series.continuum_weight < config.continuum_threshold)
            throw Error("asymptotics_suite: initial state is essentially bound (continuum weight " +
                        std::to_string(series.continuum_weight) + " below threshold)");
        psi0.amplitudes = amp / amp.norm();
    }

    // default bump: centered at the packet's mean kinetic energy with
    // matching half-width
    TestFunction phi;
    if (config.phi) {
        phi = *config.phi;
    } else {
        Complex ke = psi0.amplitudes.dot(apply_multiplier_raw(gf.kinetic, psi0.amplitudes));
        phi.center = ke.real() / psi0.amplitudes.squaredNorm();
        phi.halfwidth = phi.center;
    }
    series.phi_center = phi.center;
    series.phi_halfwidth = phi.halfwidth;

    // geometric time grid
    const double rho = std::pow(config.t_max / config.t_min,
                                1.0 / static_cast<double>(config.time_points - 1));
    std::vector<double> tgrid;
    for (int i = 0; i < config.time_points; ++i)
        tgrid.push_back(config.t_min * std::pow(rho, i));

    // evolve: exact through the eigenbasis when densifiable, dispersive
    // when free, split-operator otherwise
    auto state_at = [&](double tau) -> WaveFunction {
        const double t = config.time_sign * tau;
        if (sd) {
            WaveFunction out = psi0;
            out.amplitudes = sd->evolve(t, psi0.amplitudes);
            return out;
        }
        if (!has_potential) {
            spectral::MultiplierEvolver ev(gf.kinetic);
            WaveFunction out = psi0;
            out.amplitudes = ev.evolve(t, psi0.amplitudes);
            return out;
        }
        clock::PropagatorConfig pc;
        pc.method = clock::Method::split_operator;
        pc.dt = config.dt;
        pc.t_final = tau;
        pc.time_sign = config.time_sign;
        pc.record_every = std::max(1, pc.total_steps());
        return clock::evolve_split_operator(H, psi0, pc).states.back();
    };

    for (double tau : tgrid) {
        WaveFunction psi_t = state_at(tau);
        double bmass = boundary_band_mass(psi_t);
        if (bmass > config.boundary_mass_limit)
            throw MonitorAbort("asymptotics_suite: wrap-around monitor tripped at |t|=" +
                                   std::to_string(tau),
                               config.time_sign * tau, bmass);
        series.times.push_back(tau);
        series.escape.push_back(escape_norm(psi_t, config.radius, origin));
        if (has_potential) {
            series.energy.push_back(energy_mismatch(psi_t, phi, *sd, gf.kinetic));
        } else {
            series.energy.push_back(0.0);  // phi(H) = phi(H0) identically
        }
        series.velocity.push_back(
            velocity_mismatch(psi_t, config.time_sign * tau, mu_per_axis, origin));
    }

    series.escape_fit = fit_series(series.times, series.escape);
    series.energy_fit = fit_series(series.times, series.energy);
    series.velocity_fit = fit_series(series.times, series.velocity);
    return series;
}

}  // namespace qdyn::scattering
