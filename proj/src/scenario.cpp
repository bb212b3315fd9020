#include "qdyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "qdyn/csv.hpp"

namespace qdyn::scenario {

namespace {

const std::map<std::string, Experiment>& experiment_table() {
    static const std::map<std::string, Experiment> table = {
        {"theorem1", Experiment::theorem1},
        {"two_clocks", Experiment::two_clocks},
        {"ergodic", Experiment::ergodic},
        {"stone", Experiment::stone},
        {"fourier_laplace", Experiment::fourier_laplace},
        {"klein_gordon", Experiment::klein_gordon},
        {"com_separation", Experiment::com_separation},
        {"beats", Experiment::beats},
        {"equivalence", Experiment::equivalence},
    };
    return table;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string join(const std::vector<std::string>& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out += " ";
        out += toks[i];
    }
    return out;
}

struct RawEntry {
    std::string value;
    int line = 0;
    int column = 0;
};

struct RawConfig {
    std::map<std::string, std::map<std::string, RawEntry>> sections;  // "" = top level
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

const char* experiment_name(Experiment e) {
    for (const auto& [name, val] : experiment_table())
        if (val == e) return name.c_str();
    return "?";
}

std::optional<Experiment> experiment_from_name(const std::string& name) {
    auto it = experiment_table().find(name);
    if (it == experiment_table().end()) return std::nullopt;
    return it->second;
}

namespace {

class Collector {
public:
    explicit Collector(std::vector<ValidationIssue>& issues) : issues_(issues) {}
    void add(int line, int column, const std::string& msg) {
        issues_.push_back({line, column, msg});
    }
    void add(const RawEntry& e, const std::string& msg) { add(e.line, e.column, msg); }

private:
    std::vector<ValidationIssue>& issues_;
};

// typed readers; each records an issue and returns the fallback on failure
class SectionReader {
public:
    SectionReader(const RawConfig& cfg, const std::string& section, Collector& col)
        : col_(col), section_(section) {
        auto it = cfg.sections.find(section);
        if (it != cfg.sections.end()) entries_ = &it->second;
    }

    bool has(const std::string& key) const { return entries_ && entries_->count(key); }

    const RawEntry* entry(const std::string& key) const {
        if (!has(key)) return nullptr;
        return &entries_->at(key);
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const RawEntry* e = entry(key);
        return e ? e->value : fallback;
    }

    double get_double(const std::string& key, double fallback) const {
        const RawEntry* e = entry(key);
        if (!e) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            col_.add(*e, "[" + section_ + "] " + key + ": expected a number, got '" + e->value + "'");
            return fallback;
        }
    }

    long get_int(const std::string& key, long fallback) const {
        const RawEntry* e = entry(key);
        if (!e) return fallback;
        try {
            std::size_t pos = 0;
            long v = std::stol(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            col_.add(*e, "[" + section_ + "] " + key + ": expected an integer, got '" + e->value + "'");
            return fallback;
        }
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
        const RawEntry* e = entry(key);
        if (!e) return fallback;
        std::vector<double> out;
        for (const std::string& tok : tokenize(e->value)) {
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                col_.add(*e, "[" + section_ + "] " + key + ": expected numbers, got '" + tok + "'");
                return fallback;
            }
        }
        return out;
    }

    std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const {
        const RawEntry* e = entry(key);
        if (!e) return fallback;
        std::vector<int> out;
        for (const std::string& tok : tokenize(e->value)) {
            try {
                out.push_back(std::stoi(tok));
            } catch (...) {
                col_.add(*e, "[" + section_ + "] " + key + ": expected integers, got '" + tok + "'");
                return fallback;
            }
        }
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key,
                                         std::vector<std::string> fallback) const {
        const RawEntry* e = entry(key);
        if (!e) return fallback;
        return tokenize(e->value);
    }

    void check_known(const std::set<std::string>& known,
                     const std::function<bool(const std::string&)>& pattern = nullptr) const {
        if (!entries_) return;
        for (const auto& [key, e] : *entries_) {
            if (known.count(key)) continue;
            if (pattern && pattern(key)) continue;
            col_.add(e, "unknown key '" + key + "' in section [" + section_ + "]");
        }
    }

private:
    Collector& col_;
    std::string section_;
    const std::map<std::string, RawEntry>* entries_ = nullptr;
};

bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

std::optional<RawConfig> lex(const std::string& text, Collector& col) {
    RawConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool fatal = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                col.add(lineno, static_cast<int>(line.find('[')) + 1, "unterminated section header");
                fatal = true;
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) {
                col.add(lineno, 1, "empty section name");
                fatal = true;
            }
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            col.add(lineno, 1, "expected 'key = value'");
            fatal = true;
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            col.add(lineno, 1, "missing key before '='");
            fatal = true;
            continue;
        }
        int column = static_cast<int>(line.find(key)) + 1;
        if (cfg.sections[section].count(key)) {
            col.add(lineno, column, "duplicate key '" + key + "' in section [" +
                                        (section.empty() ? "top level" : section) + "]");
            fatal = true;
            continue;
        }
        cfg.sections[section][key] = {join(tokenize(value)), lineno, column};
    }
    if (fatal) return std::nullopt;
    return cfg;
}

}  // namespace

ParseResult parse_scenario(const std::string& text) {
    ParseResult result;
    Collector col(result.issues);
    auto raw = lex(text, col);
    if (!raw) return result;

    Scenario sc;

    // known sections
    static const std::set<std::string> known_sections = {"",          "grid",   "system",
                                                         "packet",    "propagator",
                                                         "experiment", "output"};
    for (const auto& [name, entries] : raw->sections) {
        if (!known_sections.count(name)) {
            int line = entries.empty() ? 0 : entries.begin()->second.line;
            col.add(line, 1, "unknown section [" + name + "]");
        }
    }

    // top level
    {
        SectionReader top(*raw, "", col);
        top.check_known({"experiment"});
        std::string name = top.get_string("experiment", "");
        if (name.empty()) {
            col.add(0, 0, "missing top-level 'experiment' key");
        } else if (auto e = experiment_from_name(name)) {
            sc.experiment = *e;
        } else {
            const RawEntry* en = top.entry("experiment");
            col.add(en ? en->line : 0, en ? en->column : 0, "unknown experiment '" + name + "'");
        }
    }

    // grid
    {
        SectionReader g(*raw, "grid", col);
        g.check_known({"dims", "n", "extent"});
        sc.grid.dims = static_cast<int>(g.get_int("dims", sc.grid.dims));
        sc.grid.n = static_cast<int>(g.get_int("n", sc.grid.n));
        sc.grid.extent = g.get_double("extent", sc.grid.extent);
        if (sc.grid.dims < 1 || sc.grid.dims > 3)
            col.add(0, 0, "[grid] dims must be 1, 2 or 3");
        if (!power_of_two(sc.grid.n) || sc.grid.n < 8)
            col.add(0, 0, "[grid] n must be a power of two >= 8");
        if (!(sc.grid.extent > 0.0)) col.add(0, 0, "[grid] extent must be positive");
        double total = std::pow(static_cast<double>(sc.grid.n), sc.grid.dims);
        if (total > static_cast<double>(Grid::default_size_cap))
            col.add(0, 0, "[grid] lattice size n^dims exceeds the cap 2^22");
    }

    // system
    {
        SectionReader s(*raw, "system", col);
        auto pair_key = [](const std::string& k) {
            return k.rfind("pair_", 0) == 0;
        };
        s.check_known({"type", "masses", "values", "size", "seed"}, pair_key);
        std::string type = s.get_string("type", "particles");
        if (type == "particles")
            sc.system.type = SystemType::particles;
        else if (type == "diag")
            sc.system.type = SystemType::diag;
        else if (type == "random_hermitian")
            sc.system.type = SystemType::random_hermitian;
        else
            col.add(0, 0, "[system] unknown type '" + type + "'");

        sc.system.masses = s.get_doubles("masses", sc.system.masses);
        for (double m : sc.system.masses)
            if (!(m > 0.0)) col.add(0, 0, "[system] masses must be positive");
        if (sc.system.type == SystemType::particles && sc.system.masses.size() < 2)
            col.add(0, 0, "[system] need at least two masses");

        sc.system.diag_values = s.get_doubles("values", sc.system.diag_values);
        sc.system.size = static_cast<int>(s.get_int("size", sc.system.size));
        sc.system.seed = static_cast<unsigned>(s.get_int("seed", sc.system.seed));
        if (sc.system.size < 2 || sc.system.size > 4096)
            col.add(0, 0, "[system] size must lie in [2, 4096]");

        // pair potentials: pair_<i>_<j> = <kind> <params...>, 1-based indices
        if (auto it = raw->sections.find("system"); it != raw->sections.end()) {
            for (const auto& [key, entry] : it->second) {
                if (!pair_key(key)) continue;
                int i = 0, j = 0;
                if (std::sscanf(key.c_str(), "pair_%d_%d", &i, &j) != 2 || i < 1 || j <= i) {
                    col.add(entry, "[system] malformed pair key '" + key +
                                       "' (want pair_<i>_<j> with i < j, 1-based)");
                    continue;
                }
                if (j > static_cast<int>(sc.system.masses.size())) {
                    col.add(entry, "[system] " + key + " references a particle beyond the mass list");
                    continue;
                }
                auto toks = tokenize(entry.value);
                if (toks.empty()) {
                    col.add(entry, "[system] " + key + ": missing potential kind");
                    continue;
                }
                try {
                    auto need = [&](std::size_t n) {
                        if (toks.size() != n + 1)
                            throw Error("expected " + std::to_string(n) + " parameter(s)");
                    };
                    nbody::Potential pot;
                    if (toks[0] == "none") {
                        need(0);
                        pot = nbody::Potential::none();
                    } else if (toks[0] == "harmonic") {
                        need(1);
                        pot = nbody::Potential::harmonic(std::stod(toks[1]));
                    } else if (toks[0] == "gaussian_well") {
                        need(2);
                        pot = nbody::Potential::gaussian_well(std::stod(toks[1]), std::stod(toks[2]));
                    } else if (toks[0] == "soft_coulomb") {
                        need(2);
                        pot = nbody::Potential::soft_coulomb(std::stod(toks[1]), std::stod(toks[2]));
                    } else if (toks[0] == "square_barrier") {
                        need(2);
                        pot = nbody::Potential::square_barrier(std::stod(toks[1]), std::stod(toks[2]));
                    } else {
                        throw Error("unknown potential kind '" + toks[0] + "'");
                    }
                    sc.system.potentials[{i - 1, j - 1}] = pot;
                } catch (const std::exception& ex) {
                    col.add(entry, "[system] " + key + ": " + ex.what());
                }
            }
        }
    }

    // packet
    {
        SectionReader p(*raw, "packet", col);
        p.check_known({"shape", "center", "width", "momentum"});
        sc.packet.shape = p.get_string("shape", sc.packet.shape);
        if (sc.packet.shape != "gaussian" && sc.packet.shape != "bump")
            col.add(0, 0, "[packet] shape must be gaussian or bump (compact-support catalog)");
        sc.packet.center = p.get_doubles("center", {});
        sc.packet.width = p.get_double("width", sc.packet.width);
        sc.packet.momentum = p.get_doubles("momentum", {});
        if (!(sc.packet.width > 0.0)) col.add(0, 0, "[packet] width must be positive");
        if (!sc.packet.center.empty() &&
            sc.packet.center.size() != static_cast<std::size_t>(sc.grid.dims))
            col.add(0, 0, "[packet] center dimension mismatch with grid dims");
        if (!sc.packet.momentum.empty() &&
            sc.packet.momentum.size() != static_cast<std::size_t>(sc.grid.dims))
            col.add(0, 0, "[packet] momentum dimension mismatch with grid dims");
    }

    // propagator
    {
        SectionReader pr(*raw, "propagator", col);
        pr.check_known({"method", "dt", "t_final", "record_every", "time_sign"});
        sc.propagator.method = pr.get_string("method", sc.propagator.method);
        static const std::set<std::string> methods = {"auto", "split_operator", "exact_diagonal",
                                                      "dispersive_exact", "kg_leapfrog"};
        if (!methods.count(sc.propagator.method))
            col.add(0, 0, "[propagator] unknown method '" + sc.propagator.method + "'");
        sc.propagator.dt = pr.get_double("dt", sc.propagator.dt);
        sc.propagator.t_final = pr.get_double("t_final", sc.propagator.t_final);
        sc.propagator.record_every =
            static_cast<int>(pr.get_int("record_every", sc.propagator.record_every));
        sc.propagator.time_sign = static_cast<int>(pr.get_int("time_sign", sc.propagator.time_sign));
        if (!(sc.propagator.dt > 0.0)) col.add(0, 0, "[propagator] dt must be positive");
        if (!(sc.propagator.t_final >= sc.propagator.dt))
            col.add(0, 0, "[propagator] t_final must be at least dt");
        if (sc.propagator.record_every < 1)
            col.add(0, 0, "[propagator] record_every must be >= 1");
        if (sc.propagator.time_sign != 1 && sc.propagator.time_sign != -1)
            col.add(0, 0, "[propagator] time_sign must be 1 or -1");
    }

    // experiment parameters
    {
        SectionReader e(*raw, "experiment", col);
        e.check_known({"seed",        "radius",        "t_min",       "t_max",
                       "time_points", "phi",           "filter",      "momenta",
                       "samples",     "lambda",        "average_times", "probes",
                       "epsilons",    "window_margin", "z_points",    "integration_time",
                       "quadrature_dt", "tail_times",  "lambda_set",  "average_time",
                       "epsilon",     "kg_mode",       "c",           "mu_field",
                       "mode_index",  "pulse_width",   "levels",      "coefficients",
                       "probe_x"});
        ExperimentBlock& x = sc.params;
        x.seed = static_cast<unsigned>(e.get_int("seed", x.seed));
        x.radius = e.get_double("radius", x.radius);
        x.t_min = e.get_double("t_min", x.t_min);
        x.t_max = e.get_double("t_max", x.t_max);
        x.time_points = static_cast<int>(e.get_int("time_points", x.time_points));
        x.phi = e.get_string("phi", x.phi);
        x.filter = e.get_string("filter", x.filter);
        x.momenta = e.get_doubles("momenta", x.momenta);
        x.samples = static_cast<int>(e.get_int("samples", x.samples));
        x.lambda = e.get_double("lambda", x.lambda);
        x.average_times = e.get_doubles("average_times", x.average_times);
        x.probes = static_cast<int>(e.get_int("probes", x.probes));
        x.epsilons = e.get_doubles("epsilons", x.epsilons);
        x.window_margin = e.get_double("window_margin", x.window_margin);
        x.z_points = e.get_doubles("z_points", x.z_points);
        x.integration_time = e.get_double("integration_time", x.integration_time);
        x.quadrature_dt = e.get_double("quadrature_dt", x.quadrature_dt);
        x.tail_times = e.get_doubles("tail_times", x.tail_times);
        x.lambda_set = e.get_doubles("lambda_set", x.lambda_set);
        x.average_time = e.get_double("average_time", x.average_time);
        x.epsilon = e.get_double("epsilon", x.epsilon);
        x.kg_mode = e.get_string("kg_mode", x.kg_mode);
        x.c = e.get_double("c", x.c);
        x.mu_field = e.get_double("mu_field", x.mu_field);
        x.mode_index = static_cast<int>(e.get_int("mode_index", x.mode_index));
        x.pulse_width = e.get_double("pulse_width", x.pulse_width);
        x.levels = e.get_ints("levels", x.levels);
        x.coefficients = e.get_doubles("coefficients", x.coefficients);
        x.probe_x = e.get_double("probe_x", x.probe_x);

        if (!(x.radius > 0.0) || !(x.radius < sc.grid.extent / 2.0))
            col.add(0, 0, "[experiment] radius must lie in (0, extent/2)");
        if (!(x.t_min > 0.0) || !(x.t_max > x.t_min))
            col.add(0, 0, "[experiment] need 0 < t_min < t_max");
        if (x.time_points < 2) col.add(0, 0, "[experiment] time_points must be >= 2");
        if (x.filter != "require" && x.filter != "off")
            col.add(0, 0, "[experiment] filter must be require or off");
        if (x.z_points.empty() || x.z_points.size() % 2 != 0)
            col.add(0, 0, "[experiment] z_points must be flat re,im pairs");
        else
            for (std::size_t i = 1; i < x.z_points.size(); i += 2)
                if (x.z_points[i] == 0.0)
                    col.add(0, 0, "[experiment] z_points must have nonzero imaginary parts");
        for (double eps : x.epsilons)
            if (!(eps > 0.0)) col.add(0, 0, "[experiment] epsilons must be positive");
        if (!(x.epsilon > 0.0)) col.add(0, 0, "[experiment] epsilon must be positive");
        if (x.samples < 3) col.add(0, 0, "[experiment] samples must be >= 3");
        if (x.kg_mode != "plane_wave" && x.kg_mode != "pulse" && x.kg_mode != "constant")
            col.add(0, 0, "[experiment] kg_mode must be plane_wave, pulse or constant");
        if (!(x.c > 0.0)) col.add(0, 0, "[experiment] c must be positive");
        if (x.mu_field < 0.0) col.add(0, 0, "[experiment] mu_field must be nonnegative");
        if (sc.experiment == Experiment::klein_gordon &&
            !(sc.propagator.dt <= 0.9 * (sc.grid.extent / sc.grid.n) / x.c))
            col.add(0, 0, "[experiment] dt violates the wave stability bound 0.9*spacing/c");
        if (x.levels.size() < 1) col.add(0, 0, "[experiment] levels must not be empty");
        if (!x.coefficients.empty() && x.coefficients.size() != x.levels.size())
            col.add(0, 0, "[experiment] coefficients must match levels");
        if (sc.experiment == Experiment::com_separation) {
            if (sc.grid.dims != 1) col.add(0, 0, "[grid] com_separation expects dims = 1");
            if (static_cast<long>(sc.grid.n) * sc.grid.n > 4096)
                col.add(0, 0, "[grid] com_separation needs n^2 <= 4096 (n <= 64)");
            if (sc.system.masses.size() != 2)
                col.add(0, 0, "[system] com_separation is a two-body check");
        }
        if (sc.experiment == Experiment::ergodic || sc.experiment == Experiment::stone ||
            sc.experiment == Experiment::fourier_laplace ||
            sc.experiment == Experiment::equivalence) {
            if (sc.system.type == SystemType::diag && sc.system.diag_values.empty())
                col.add(0, 0, "[system] diag system needs values");
        }
    }

    // output
    {
        SectionReader o(*raw, "output", col);
        o.check_known({"directory", "formats"});
        sc.output.directory = o.get_string("directory", "");
        sc.output.formats = o.get_strings("formats", sc.output.formats);
        for (const auto& f : sc.output.formats)
            if (f != "csv" && f != "json")
                col.add(0, 0, "[output] unknown format '" + f + "'");
    }

    if (result.issues.empty()) result.scenario = std::move(sc);
    return result;
}

ParseResult parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        ParseResult r;
        r.issues.push_back({0, 0, "cannot open scenario file " + path.string()});
        return r;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

std::string fmt(double v) { return CsvWriter::format(v); }

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += fmt(v[i]);
    }
    return out;
}

std::string fmt_list(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

std::string Scenario::serialize() const {
    std::ostringstream out;
    out << "experiment = " << experiment_name(experiment) << "\n\n";

    out << "[grid]\n";
    out << "dims = " << grid.dims << "\n";
    out << "n = " << grid.n << "\n";
    out << "extent = " << fmt(grid.extent) << "\n\n";

    out << "[system]\n";
    switch (system.type) {
        case SystemType::particles: out << "type = particles\n"; break;
        case SystemType::diag: out << "type = diag\n"; break;
        case SystemType::random_hermitian: out << "type = random_hermitian\n"; break;
    }
    out << "masses = " << fmt_list(system.masses) << "\n";
    for (const auto& [pair, pot] : system.potentials) {
        out << "pair_" << pair.first + 1 << "_" << pair.second + 1 << " = " << pot.name();
        switch (pot.kind) {
            case nbody::PotentialKind::none: break;
            case nbody::PotentialKind::harmonic: out << " " << fmt(pot.a); break;
            default: out << " " << fmt(pot.a) << " " << fmt(pot.b); break;
        }
        out << "\n";
    }
    out << "values = " << fmt_list(system.diag_values) << "\n";
    out << "size = " << system.size << "\n";
    out << "seed = " << system.seed << "\n\n";

    out << "[packet]\n";
    out << "shape = " << packet.shape << "\n";
    if (!packet.center.empty()) out << "center = " << fmt_list(packet.center) << "\n";
    out << "width = " << fmt(packet.width) << "\n";
    if (!packet.momentum.empty()) out << "momentum = " << fmt_list(packet.momentum) << "\n";
    out << "\n";

    out << "[propagator]\n";
    out << "method = " << propagator.method << "\n";
    out << "dt = " << fmt(propagator.dt) << "\n";
    out << "t_final = " << fmt(propagator.t_final) << "\n";
    out << "record_every = " << propagator.record_every << "\n";
    out << "time_sign = " << propagator.time_sign << "\n\n";

    out << "[experiment]\n";
    out << "seed = " << params.seed << "\n";
    out << "radius = " << fmt(params.radius) << "\n";
    out << "t_min = " << fmt(params.t_min) << "\n";
    out << "t_max = " << fmt(params.t_max) << "\n";
    out << "time_points = " << params.time_points << "\n";
    out << "phi = " << params.phi << "\n";
    out << "filter = " << params.filter << "\n";
    out << "momenta = " << fmt_list(params.momenta) << "\n";
    out << "samples = " << params.samples << "\n";
    out << "lambda = " << fmt(params.lambda) << "\n";
    out << "average_times = " << fmt_list(params.average_times) << "\n";
    out << "probes = " << params.probes << "\n";
    out << "epsilons = " << fmt_list(params.epsilons) << "\n";
    out << "window_margin = " << fmt(params.window_margin) << "\n";
    out << "z_points = " << fmt_list(params.z_points) << "\n";
    out << "integration_time = " << fmt(params.integration_time) << "\n";
    out << "quadrature_dt = " << fmt(params.quadrature_dt) << "\n";
    if (!params.tail_times.empty()) out << "tail_times = " << fmt_list(params.tail_times) << "\n";
    out << "lambda_set = " << fmt_list(params.lambda_set) << "\n";
    out << "average_time = " << fmt(params.average_time) << "\n";
    out << "epsilon = " << fmt(params.epsilon) << "\n";
    out << "kg_mode = " << params.kg_mode << "\n";
    out << "c = " << fmt(params.c) << "\n";
    out << "mu_field = " << fmt(params.mu_field) << "\n";
    out << "mode_index = " << params.mode_index << "\n";
    out << "pulse_width = " << fmt(params.pulse_width) << "\n";
    out << "levels = " << fmt_list(params.levels) << "\n";
    if (!params.coefficients.empty())
        out << "coefficients = " << fmt_list(params.coefficients) << "\n";
    out << "probe_x = " << fmt(params.probe_x) << "\n\n";

    out << "[output]\n";
    if (!output.directory.empty()) out << "directory = " << output.directory << "\n";
    std::string formats;
    for (std::size_t i = 0; i < output.formats.size(); ++i) {
        if (i) formats += " ";
        formats += output.formats[i];
    }
    out << "formats = " << formats << "\n";
    return out.str();
}

std::string Scenario::hash() const {
    const std::string text = serialize();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace qdyn::scenario
