#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "popinfo/errors.hpp"
#include "popinfo/experiment.hpp"
#include "popinfo/fisher.hpp"
#include "popinfo/random.hpp"

namespace popinfo {

namespace {

using ordered = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fingerprint(const ExperimentConfig& config, std::size_t neurons)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx-N%zu",
                  static_cast<unsigned long long>(fnv1a(config_to_json(config))), neurons);
    return buf;
}

enum : std::uint64_t { kPopulationTag = 0x706f70, kMonteCarloTag = 0x6d63 };

MetricOptions metric_options(const ExperimentConfig& config)
{
    MetricOptions options;
    options.beta = config.beta;
    options.alpha = config.alpha;
    return options;
}

MetricReport continuous_report(const ExperimentConfig& config, std::size_t neurons)
{
    const FieldSpec& spec = *config.field;
    const auto grid = QuadratureGrid::trapezoid_step(spec.grid_lower, spec.grid_upper, spec.grid_step);
    auto field = [&] {
        if (spec.model == FieldSpec::Model::LinearGaussian) {
            return linear_gaussian_field(spec.prior_sigma, static_cast<double>(neurons), spec.noise_sigma, grid);
        }
        std::vector<DifferentiableTuning> tuning;
        for (double c : tuning_centers(neurons, spec.half_range)) {
            tuning.push_back(gaussian_bump_tuning(spec.baseline, spec.amplitude, c, spec.width));
        }
        return poisson_1d_field(std::move(tuning), spec.prior_sigma, grid);
    }();

    MetricReport report;
    report.fingerprint = fingerprint(config, neurons);
    report.values.push_back({"I_G", i_G(field)});
    // J alone can vanish at a node (flat tuning); I_F is then left out of the row.
    try {
        report.values.push_back({"I_F", i_F(field)});
    } catch (const SingularityError&) {
    }
    report.values.push_back({"I_gamma", i_gamma(field, config.beta)});
    return report;
}

}  // namespace

ExperimentError::ExperimentError(std::size_t neurons, const std::string& what)
    : std::runtime_error("N=" + std::to_string(neurons) + ": " + what), neurons_(neurons)
{
}

std::string format_number(double value)
{
    if (!std::isfinite(value)) {
        throw DomainError("refusing to write a non-finite number");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

StimulusSpace build_stimulus_space(const ExperimentConfig& config)
{
    const StimulusSpec& spec = config.stimulus;
    std::vector<double> points;
    switch (spec.points) {
    case PointSet::EvenlySpaced: points = evenly_spaced_points(spec.count, spec.half_range); break;
    case PointSet::IntegerRange: points = integer_points(spec.first, spec.count); break;
    case PointSet::Explicit: points = spec.values; break;
    }
    auto prior = make_prior(spec.prior, points);
    return StimulusSpace(std::move(points), std::move(prior));
}

PoissonPopulation build_population(const ExperimentConfig& config, const StimulusSpace& space,
                                   std::size_t neurons)
{
    const ModelSpec& m = config.model;
    switch (m.tuning) {
    case TuningKind::Heaviside:
        return build_heaviside_population(neurons, m.half_range, m.amplitude, space);
    case TuningKind::RectifiedLinear:
        return build_relu_population(neurons, m.half_range, space);
    case TuningKind::RandomBinary:
        return build_random_binary_population(neurons, m.support_size, m.amplitude, space,
                                              population_seed(config));
    }
    throw ConfigError("unknown tuning kind");
}

std::uint64_t population_seed(const ExperimentConfig& config)
{
    return derive_seed(config.seed, kPopulationTag, 0);
}

std::uint64_t montecarlo_seed(const ExperimentConfig& config, std::size_t neurons)
{
    return derive_seed(config.seed, neurons, kMonteCarloTag);
}

ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress)
{
    config.validate();
    if (config.field) {
        throw ConfigError("continuous field configs have no Monte-Carlo run; use the metrics command");
    }
    const StimulusSpace space = build_stimulus_space(config);
    const MetricOptions options = metric_options(config);

    ResultTable table;
    table.config = config;
    for (std::size_t neurons : config.n_sweep) {
        if (progress) {
            progress(neurons);
        }
        try {
            const PoissonPopulation pop = build_population(config, space, neurons);
            ResultRow row;
            row.neurons = neurons;
            row.metrics = compute_metrics(pop, space.prior(), config.metrics, options, fingerprint(config, neurons));

            McConfig mc;
            mc.j_max = config.j_max;
            mc.i_max = config.i_max;
            mc.seed = montecarlo_seed(config, neurons);
            mc.threads = config.threads;
            row.mc = estimate(pop, space.prior(), mc);
            row.mc.terms.clear();
            row.mc.terms.shrink_to_fit();

            for (const auto& value : row.metrics.values) {
                row.errors.push_back(relative_error(value.nats, row.mc));
            }
            table.rows.push_back(std::move(row));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ExperimentError(neurons, e.what());
        }
    }
    return table;
}

void ResultTable::write_csv(std::ostream& out) const
{
    out << "N,I_MC_nats,I_MC_bits,I_std_nats";
    for (Metric m : config.metrics) {
        const auto name = metric_name(m);
        out << ',' << name << "_nats," << name << "_bits,DI_" << name;
    }
    out << ",DI_std\n";
    for (const auto& row : rows) {
        out << row.neurons << ',' << format_number(row.mc.i_mc) << ',' << format_number(nats_to_bits(row.mc.i_mc))
            << ',' << format_number(row.mc.i_std);
        for (std::size_t k = 0; k < row.metrics.values.size(); ++k) {
            const auto& v = row.metrics.values[k];
            out << ',' << format_number(v.nats) << ',' << format_number(v.bits()) << ','
                << format_number(row.errors[k].di);
        }
        out << ',' << format_number(row.mc.i_std / row.mc.i_mc) << '\n';
    }
}

std::string ResultTable::metadata_json() const
{
    ordered doc;
    doc["config"] = ordered::parse(config_to_json(config));
    doc["population_seed"] = population_seed(config);
    ordered rows_json = ordered::array();
    for (const auto& row : rows) {
        ordered r;
        r["N"] = row.neurons;
        r["fingerprint"] = row.metrics.fingerprint;
        r["montecarlo_seed"] = row.mc.seed;
        r["j_max"] = row.mc.j_max;
        r["i_max"] = row.mc.i_max;
        r["I_MC_star_nats"] = row.mc.i_mc_star;
        r["I_MC_nats"] = row.mc.i_mc;
        r["I_std_nats"] = row.mc.i_std;
        rows_json.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows_json);
    return doc.dump(2);
}

std::vector<MetricsRow> run_metrics(const ExperimentConfig& config)
{
    config.validate();
    std::vector<MetricsRow> rows;
    if (config.field) {
        for (std::size_t neurons : config.n_sweep) {
            try {
                rows.push_back({neurons, continuous_report(config, neurons)});
            } catch (const std::exception& e) {
                throw ExperimentError(neurons, e.what());
            }
        }
        return rows;
    }
    const StimulusSpace space = build_stimulus_space(config);
    const MetricOptions options = metric_options(config);
    for (std::size_t neurons : config.n_sweep) {
        try {
            const PoissonPopulation pop = build_population(config, space, neurons);
            rows.push_back({neurons, compute_metrics(pop, space.prior(), config.metrics, options,
                                                     fingerprint(config, neurons))});
        } catch (const std::exception& e) {
            throw ExperimentError(neurons, e.what());
        }
    }
    return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows)
{
    std::vector<std::string> names;
    for (const auto& row : rows) {
        for (const auto& v : row.metrics.values) {
            if (std::find(names.begin(), names.end(), v.name) == names.end()) {
                names.push_back(v.name);
            }
        }
    }
    out << 'N';
    for (const auto& name : names) {
        out << ',' << name << "_nats," << name << "_bits";
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.neurons;
        for (const auto& name : names) {
            if (row.metrics.contains(name)) {
                const auto& v = row.metrics.at(name);
                out << ',' << format_number(v.nats) << ',' << format_number(v.bits());
            } else {
                out << ",,";
            }
        }
        out << '\n';
    }
}

std::vector<OracleRow> run_oracle(const ExperimentConfig& config, double tail_tol)
{
    config.validate();
    if (config.field) {
        throw ConfigError("the enumeration oracle needs a discrete population config");
    }
    const StimulusSpace space = build_stimulus_space(config);
    std::vector<OracleRow> rows;
    for (std::size_t neurons : config.n_sweep) {
        try {
            const PoissonPopulation pop = build_population(config, space, neurons);
            rows.push_back({neurons, exact_mi(pop, space.prior(), tail_tol)});
        } catch (const std::exception& e) {
            throw ExperimentError(neurons, e.what());
        }
    }
    return rows;
}

void write_oracle_csv(std::ostream& out, std::span<const OracleRow> rows)
{
    out << "N,I_exact_nats,I_exact_bits,tail_bound\n";
    for (const auto& row : rows) {
        out << row.neurons << ',' << format_number(row.exact.value) << ','
            << format_number(nats_to_bits(row.exact.value)) << ',' << format_number(row.exact.tail_bound) << '\n';
    }
}

}  // namespace popinfo
