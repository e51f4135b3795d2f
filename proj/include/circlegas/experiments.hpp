#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlegas/kac.hpp"
#include "circlegas/kostlan.hpp"
#include "circlegas/limit_laws.hpp"

namespace circlegas {

/// One named experiment per acceptance item, in item order.
enum class Experiment {
    hard_exponential = 1,
    gumbel_linear,
    very_weak,
    annulus_law,
    finite_particles,
    hard_kernel,
    gaf_covariance,
    edge_bergman,
    edge_distinction,
    kac_independence,
    coulomb_cross_decay,
    inversion,
    gumbel_weak,
    nonradial_edge,
};

inline constexpr int kExperimentCount = 14;

Experiment parse_experiment(const std::string& s);
std::string to_string(Experiment e);
/// Acceptance item number, 1..14.
int criterion(Experiment e);
std::vector<Experiment> all_experiments();
/// Monte Carlo experiments draw replicas; the rest are deterministic.
bool is_monte_carlo(Experiment e);

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::hard_exponential;
    // gas
    int n = 1000;
    double chi = 1.0;
    double q = 2.0;
    double R = 1.5;
    // law
    double alpha = 3.0;
    double gamma = 1.0;
    double l_plus = 0.5;
    double l_minus = 1.5;
    CoefficientLaw coefficients = CoefficientLaw::complex_gaussian;
    // run
    int replicas = 4000;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    double tolerance = 0.05;
};

/// Acceptance parameters of an experiment (seed, n, M, tolerance).
ExperimentConfig default_config(Experiment e);
/// Keys accepted for an experiment, in schema order.
std::vector<std::string> config_keys(Experiment e);

/// key = value lines, '#' comments. The experiment key selects the defaults;
/// other keys override them. Unknown or inapplicable keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

/// Throws ConfigError naming the violated hypothesis.
void validate(const ExperimentConfig& config);

GasSpec experiment_gas(const ExperimentConfig& config);
LimitLaw experiment_law(const ExperimentConfig& config);
RescaleScheme experiment_rescale(const ExperimentConfig& config);
RescaleParams experiment_rescale_params(const ExperimentConfig& config);

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool at_most = true;  // value <= bound, else value >= bound
    [[nodiscard]] bool pass() const { return at_most ? value <= bound : value >= bound; }
};

/// A CSV artifact; figure_kind names the plot that consumes it (empty: none).
struct Table {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string figure_kind;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<double> raw_extremes;
    std::vector<double> rescaled;
    double ks = 0.0;          // primary statistic (KS distance or sup error)
    double tail_bound = 0.0;  // largest truncation bound met while evaluating the limit
    std::vector<Check> checks;  // checks.front() is ks <= tolerance
    std::vector<std::pair<std::string, double>> diagnostics;
    std::vector<Table> tables;
    double wall_seconds = 0.0;
    bool pass = false;
};

struct RunOptions {
    int threads = 1;
    bool write_files = true;
};

/// Runs, writes <output_dir>/<name>/ {samples.csv or a table CSV, summary.json} and
/// a figure manifest entry. Deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

enum class Suite { fast, full };
Suite parse_suite(const std::string& s);
std::string to_string(Suite s);

/// Acceptance config, with fast = reduced n/M and tolerance x1.5.
ExperimentConfig suite_config(Experiment e, Suite s, const std::filesystem::path& output_dir);

struct SuiteReport {
    Suite suite = Suite::full;
    std::vector<ExperimentResult> results;
    double wall_seconds = 0.0;
    [[nodiscard]] bool pass() const;
};

using ProgressFn = std::function<void(const ExperimentResult&)>;

/// Runs every experiment of the suite and writes <output_dir>/report.json.
SuiteReport verify_all(Suite suite, const std::filesystem::path& output_dir, const RunOptions& options = {},
                       const ProgressFn& progress = {});

/// Calls fn(i) for i in [0, count) on `threads` workers; rethrows the first exception.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// CSV writer: comma separator, header row, LF endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Appends (or replaces) one entry of <dir>/figures/manifest.json.
void register_figure(const std::filesystem::path& dir, const std::string& kind, const std::filesystem::path& csv,
                     const std::string& image_name);

}  // namespace circlegas
