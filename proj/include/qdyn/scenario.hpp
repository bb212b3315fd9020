#ifndef QDYN_SCENARIO_HPP
#define QDYN_SCENARIO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdyn/nbody.hpp"
#include "qdyn/types.hpp"

namespace qdyn::scenario {

enum class Experiment {
    theorem1,
    two_clocks,
    ergodic,
    stone,
    fourier_laplace,
    klein_gordon,
    com_separation,
    beats,
    equivalence,
};

const char* experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(const std::string& name);

struct GridBlock {
    int dims = 1;
    int n = 1024;
    double extent = 200.0;
};

enum class SystemType { particles, diag, random_hermitian };

struct SystemBlock {
    SystemType type = SystemType::particles;
    std::vector<double> masses = {2.0, 2.0};  // equal-mass pair with reduced mass 1
    std::map<std::pair<int, int>, nbody::Potential> potentials;  // 0-based i < j
    std::vector<double> diag_values = {0.0, 1.0};
    int size = 64;
    unsigned seed = 7;
};

struct PacketBlock {
    std::string shape = "gaussian";  // gaussian | bump
    std::vector<double> center;      // defaults to the origin
    double width = 1.0;
    std::vector<double> momentum;    // defaults to 2 along the first axis
};

struct PropagatorBlock {
    std::string method = "auto";  // auto | split_operator | exact_diagonal | dispersive_exact | kg_leapfrog
    double dt = 0.005;
    double t_final = 40.0;
    int record_every = 10;
    int time_sign = 1;
};

struct ExperimentBlock {
    // shared
    unsigned seed = 1234;
    // theorem1
    double radius = 10.0;
    double t_min = 5.0;
    double t_max = 40.0;
    int time_points = 8;
    std::string phi = "auto";        // auto | "<center> <halfwidth>"
    std::string filter = "require";  // require | off
    // two_clocks
    std::vector<double> momenta = {1.0, 2.0, 3.0};
    int samples = 21;
    // ergodic
    double lambda = 0.0;
    std::vector<double> average_times = {25.0, 50.0, 100.0, 200.0};
    int probes = 3;
    // stone / equivalence
    std::vector<double> epsilons = {0.1, 0.05};
    double window_margin = 50.0;  // lambda window half-padding in units of eps
    // fourier_laplace / equivalence
    std::vector<double> z_points = {0.5, 0.5};  // flat re,im pairs
    double integration_time = 30.0;
    double quadrature_dt = 0.01;
    std::vector<double> tail_times;
    // equivalence
    std::vector<double> lambda_set = {0.0, 1.0};
    double average_time = 100.0;
    double epsilon = 0.05;
    // klein_gordon
    std::string kg_mode = "plane_wave";  // plane_wave | pulse | constant
    double c = 1.0;
    double mu_field = 1.0;
    int mode_index = 4;
    double pulse_width = 1.0;
    // beats
    std::vector<int> levels = {0, 1};
    std::vector<double> coefficients;  // |a_j|, normalized; default equal weights
    double probe_x = 0.0;
};

struct OutputBlock {
    std::string directory;  // default out/<experiment>
    std::vector<std::string> formats = {"csv"};
};

struct Scenario {
    Experiment experiment = Experiment::theorem1;
    GridBlock grid;
    SystemBlock system;
    PacketBlock packet;
    PropagatorBlock propagator;
    ExperimentBlock params;
    OutputBlock output;

    /// Canonical text form; parse(serialize(s)) reproduces s exactly.
    std::string serialize() const;
    /// FNV-1a hash of the canonical form, as fixed-width hex.
    std::string hash() const;

    bool operator==(const Scenario& other) const { return serialize() == other.serialize(); }
};

struct ValidationIssue {
    int line = 0;    // 0 when not tied to a source location
    int column = 0;
    std::string message;
};

struct ParseResult {
    std::optional<Scenario> scenario;  // set only when there are no issues
    std::vector<ValidationIssue> issues;
    bool ok() const { return scenario.has_value(); }
};

ParseResult parse_scenario(const std::string& text);
ParseResult parse_scenario_file(const std::filesystem::path& path);

}  // namespace qdyn::scenario

#endif
