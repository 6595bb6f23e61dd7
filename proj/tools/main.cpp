#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popinfo/divergence.hpp"
#include "popinfo/errors.hpp"
#include "popinfo/experiment.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> j_max;
    std::optional<std::size_t> i_max;
    std::optional<unsigned> threads;
    std::vector<std::size_t> neurons;
    std::string out;
    bool full_scale = false;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool montecarlo)
{
    cmd->add_option("--seed", o.seed, "Override the master seed");
    cmd->add_option("--n", o.neurons, "Replace the N sweep (comma separated)")->delimiter(',');
    cmd->add_option("--out", o.out, "Output CSV path (a .json sidecar is written next to it for run)");
    if (montecarlo) {
        cmd->add_option("--jmax", o.j_max, "Monte-Carlo samples per N");
        cmd->add_option("--imax", o.i_max, "Bootstrap replicates per N");
        cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
        cmd->add_flag("--full-scale", o.full_scale, "j_max = 500000 (an explicit --jmax still wins)");
    }
}

popinfo::ExperimentConfig load(const std::string& source, const Overrides& o)
{
    auto config = popinfo::resolve_config(source);
    if (o.seed) config.seed = *o.seed;
    if (o.full_scale) config.j_max = 500000;
    if (o.j_max) config.j_max = *o.j_max;
    if (o.i_max) config.i_max = *o.i_max;
    if (o.threads) config.threads = *o.threads;
    if (!o.neurons.empty()) config.n_sweep = o.neurons;
    if (!o.out.empty()) {
        config.output.csv = o.out;
        config.output.json = std::filesystem::path(o.out).replace_extension(".json").string();
    }
    config.validate();
    return config;
}

template <class Writer>
void emit(const std::string& path, Writer&& write)
{
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    write(out);
}

popinfo::DivergenceMatrix divergence_matrix(const std::string& kind, const popinfo::PoissonPopulation& pop,
                                            double beta)
{
    if (kind == "kl") return popinfo::kl_matrix(pop);
    if (kind == "chernoff_coefficient") return popinfo::chernoff_coefficient_matrix(pop, beta);
    if (kind == "bhattacharyya") return popinfo::bhattacharyya_matrix(pop);
    if (kind == "chernoff_information") return popinfo::chernoff_information_matrix(pop, 1e-10);
    throw popinfo::ConfigError("unknown divergence kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mutual-information approximations for Poisson population codes"};
    app.require_subcommand(1);

    std::string source;
    Overrides run_opts, metrics_opts, oracle_opts, div_opts;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Sweep N: metrics, Monte-Carlo estimate and relative errors");
    run->add_option("config", source, "Preset name (fig1..fig6) or JSON config path")->required();
    run->add_flag("-q,--quiet", quiet, "No progress on stderr");
    add_overrides(run, run_opts, true);

    auto* metrics = app.add_subcommand("metrics", "Closed-form metrics only, no Monte-Carlo");
    metrics->add_option("config", source, "Preset name or JSON config path")->required();
    add_overrides(metrics, metrics_opts, false);

    double tail = 1e-14;
    auto* oracle = app.add_subcommand("oracle", "Exact mutual information by enumeration (N <= 3)");
    oracle->add_option("config", source, "Preset name or JSON config path")->required();
    oracle->add_option("--tail", tail, "Per-neuron Poisson tail mass allowed to be dropped");
    add_overrides(oracle, oracle_opts, false);

    std::string kind = "kl";
    double beta = 0.5;
    auto* divergence = app.add_subcommand("divergence", "Dump one pairwise divergence matrix as CSV");
    divergence->add_option("config", source, "Preset name or JSON config path")->required();
    divergence->add_option("--kind", kind, "kl, chernoff_coefficient, bhattacharyya or chernoff_information")
        ->check(CLI::IsMember({"kl", "chernoff_coefficient", "bhattacharyya", "chernoff_information"}));
    divergence->add_option("--beta", beta, "Order for chernoff_coefficient");
    add_overrides(divergence, div_opts, false);

    bool show = false;
    std::string which;
    auto* presets = app.add_subcommand("presets", "List presets, or print one as JSON");
    presets->add_option("name", which, "Preset to print");
    presets->add_flag("--show", show, "Print every preset as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = load(source, run_opts);
            auto table = popinfo::run_experiment(config, [&](std::size_t n) {
                if (!quiet) std::cerr << config.name << ": N=" << n << std::endl;
            });
            emit(config.output.csv, [&](std::ostream& out) { table.write_csv(out); });
            if (!config.output.json.empty()) {
                emit(config.output.json, [&](std::ostream& out) { out << table.metadata_json() << '\n'; });
            }
        } else if (*metrics) {
            auto config = load(source, metrics_opts);
            const auto rows = popinfo::run_metrics(config);
            emit(config.output.csv, [&](std::ostream& out) { popinfo::write_metrics_csv(out, rows); });
        } else if (*oracle) {
            auto config = load(source, oracle_opts);
            const auto rows = popinfo::run_oracle(config, tail);
            emit(config.output.csv, [&](std::ostream& out) { popinfo::write_oracle_csv(out, rows); });
        } else if (*divergence) {
            auto config = load(source, div_opts);
            if (config.field) {
                throw popinfo::ConfigError("divergence needs a discrete population config");
            }
            if (config.n_sweep.size() != 1) {
                // one matrix per call; default to the smallest N of the sweep
                config.n_sweep.resize(1);
            }
            const auto space = popinfo::build_stimulus_space(config);
            const auto pop = popinfo::build_population(config, space, config.n_sweep.front());
            const auto matrix = divergence_matrix(kind, pop, beta);
            emit(config.output.csv, [&](std::ostream& out) { matrix.write_csv(out); });
        } else if (*presets) {
            if (!which.empty()) {
                std::cout << popinfo::config_to_json(popinfo::preset(which)) << '\n';
            } else {
                for (const auto& name : popinfo::preset_names()) {
                    if (show) {
                        std::cout << popinfo::config_to_json(popinfo::preset(name)) << '\n';
                    } else {
                        std::cout << name << '\n';
                    }
                }
            }
        }
    } catch (const popinfo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
