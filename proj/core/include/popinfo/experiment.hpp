#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "popinfo/metrics.hpp"
#include "popinfo/montecarlo.hpp"
#include "popinfo/stimulus.hpp"

namespace popinfo {

enum class TuningKind { Heaviside, RectifiedLinear, RandomBinary };

struct ModelSpec {
    TuningKind tuning = TuningKind::Heaviside;
    double half_range = 10.0;      ///< T; centers span [-T, T] (Heaviside, ReLU)
    double amplitude = 10.0;       ///< A (Heaviside) or B (random binary)
    std::size_t support_size = 10; ///< K (random binary)
};

enum class PointSet { EvenlySpaced, IntegerRange, Explicit };

struct StimulusSpec {
    PointSet points = PointSet::EvenlySpaced;
    std::size_t count = 21;
    double half_range = 10.0;
    std::int64_t first = 1;
    std::vector<double> values;
    PriorSpec prior;
};

/// Continuous-stimulus model evaluated with I_G, I_F and I_gamma.
struct FieldSpec {
    enum class Model { LinearGaussian, Poisson1D };
    Model model = Model::LinearGaussian;
    double prior_sigma = 1.0;
    double noise_sigma = 1.0;     ///< linear-Gaussian only; N is the observation count
    double baseline = 0.1;        ///< Poisson-1D Gaussian-bump tuning
    double amplitude = 10.0;
    double width = 1.0;
    double half_range = 3.0;      ///< bump centers span [-half_range, half_range]
    double grid_lower = -8.0;
    double grid_upper = 8.0;
    double grid_step = 0.01;
};

struct OutputSpec {
    std::string csv;
    std::string json;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelSpec model;
    StimulusSpec stimulus;
    std::optional<FieldSpec> field;
    std::vector<std::size_t> n_sweep;
    std::vector<Metric> metrics;
    double beta = 0.5;
    double alpha = 1.0;
    std::size_t j_max = 100000;
    std::size_t i_max = 100;
    unsigned threads = 0;
    std::uint64_t seed = 2024;
    OutputSpec output;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Parses a JSON configuration document. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Serializes in the same schema parse_config accepts.
std::string config_to_json(const ExperimentConfig& config);

/// N values used by every preset.
const std::vector<std::size_t>& default_n_sweep();
std::vector<std::string> preset_names();
/// fig1 .. fig6. Throws ConfigError for unknown names.
ExperimentConfig preset(std::string_view name);
/// A preset name or a path to a JSON config.
ExperimentConfig resolve_config(std::string_view preset_or_path);

StimulusSpace build_stimulus_space(const ExperimentConfig& config);
PoissonPopulation build_population(const ExperimentConfig& config, const StimulusSpace& space,
                                   std::size_t neurons);

/// Seed of the random-binary tuning draw; shared by all N so smaller populations are
/// prefixes of larger ones.
std::uint64_t population_seed(const ExperimentConfig& config);
/// Seed of the Monte-Carlo run at population size N.
std::uint64_t montecarlo_seed(const ExperimentConfig& config, std::size_t neurons);

/// A failure while processing one entry of the N sweep.
class ExperimentError : public std::runtime_error {
public:
    ExperimentError(std::size_t neurons, const std::string& what);
    std::size_t neurons() const { return neurons_; }

private:
    std::size_t neurons_;
};

struct ResultRow {
    std::size_t neurons = 0;
    McEstimate mc;  ///< per-sample terms are dropped
    MetricReport metrics;
    std::vector<RelativeError> errors;  ///< parallel to metrics.values
};

struct ResultTable {
    ExperimentConfig config;
    std::vector<ResultRow> rows;

    /// N, I_MC_nats, I_MC_bits, I_std_nats, then <name>_nats, <name>_bits, DI_<name>
    /// per metric, then DI_std.
    void write_csv(std::ostream& out) const;
    /// Config echo, seeds and per-row summaries.
    std::string metadata_json() const;
};

using ProgressFn = std::function<void(std::size_t neurons)>;

/// Full sweep: population, metrics, Monte-Carlo estimate and relative errors for each N.
ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

struct MetricsRow {
    std::size_t neurons = 0;
    MetricReport metrics;
};
/// Metrics only (no Monte-Carlo). Continuous configs report I_G, I_F and I_gamma(beta).
std::vector<MetricsRow> run_metrics(const ExperimentConfig& config);
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

struct OracleRow {
    std::size_t neurons = 0;
    ExactMi exact;
};
std::vector<OracleRow> run_oracle(const ExperimentConfig& config, double tail_tol = 1e-14);
void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows);

/// Formats a double with 17 significant digits; rejects inf/nan.
std::string format_number(double value);

}  // namespace popinfo
