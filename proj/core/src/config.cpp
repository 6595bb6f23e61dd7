#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "popinfo/errors.hpp"
#include "popinfo/experiment.hpp"

namespace popinfo {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
    }
}

std::string require_string(const json& obj, const char* key, std::string_view where)
{
    if (!obj.contains(key) || !obj.at(key).is_string()) {
        throw ConfigError(std::string(where) + " needs a string '" + key + "'");
    }
    return obj.at(key).get<std::string>();
}

TuningKind parse_tuning(const std::string& s)
{
    if (s == "heaviside") return TuningKind::Heaviside;
    if (s == "relu") return TuningKind::RectifiedLinear;
    if (s == "random_binary") return TuningKind::RandomBinary;
    throw ConfigError("unknown tuning '" + s + "' (heaviside, relu, random_binary)");
}

std::string tuning_name(TuningKind k)
{
    switch (k) {
    case TuningKind::Heaviside: return "heaviside";
    case TuningKind::RectifiedLinear: return "relu";
    case TuningKind::RandomBinary: return "random_binary";
    }
    return "heaviside";
}

PriorKind parse_prior_kind(const std::string& s)
{
    if (s == "uniform") return PriorKind::Uniform;
    if (s == "gaussian") return PriorKind::Gaussian;
    if (s == "half_gaussian") return PriorKind::HalfGaussian;
    throw ConfigError("unknown prior kind '" + s + "' (uniform, gaussian, half_gaussian)");
}

std::string prior_name(PriorKind k)
{
    switch (k) {
    case PriorKind::Uniform: return "uniform";
    case PriorKind::Gaussian: return "gaussian";
    case PriorKind::HalfGaussian: return "half_gaussian";
    }
    return "uniform";
}

ModelSpec parse_model(const json& j)
{
    ModelSpec spec;
    const auto where = "model";
    spec.tuning = parse_tuning(require_string(j, "tuning", where));
    switch (spec.tuning) {
    case TuningKind::Heaviside:
        check_keys(j, {"tuning", "half_range", "amplitude"}, where);
        break;
    case TuningKind::RectifiedLinear:
        check_keys(j, {"tuning", "half_range"}, where);
        break;
    case TuningKind::RandomBinary:
        check_keys(j, {"tuning", "support_size", "amplitude"}, where);
        break;
    }
    spec.half_range = get_or(j, "half_range", spec.half_range, where);
    spec.amplitude = get_or(j, "amplitude", spec.amplitude, where);
    spec.support_size = get_or(j, "support_size", spec.support_size, where);
    return spec;
}

void parse_stimulus(const json& j, StimulusSpec& spec)
{
    const auto where = "stimulus";
    const auto kind = require_string(j, "points", where);
    if (kind == "evenly_spaced") {
        check_keys(j, {"points", "count", "half_range"}, where);
        spec.points = PointSet::EvenlySpaced;
    } else if (kind == "integer_range") {
        check_keys(j, {"points", "first", "count"}, where);
        spec.points = PointSet::IntegerRange;
    } else if (kind == "explicit") {
        check_keys(j, {"points", "values"}, where);
        spec.points = PointSet::Explicit;
    } else {
        throw ConfigError("unknown stimulus point set '" + kind + "' (evenly_spaced, integer_range, explicit)");
    }
    spec.count = get_or(j, "count", spec.count, where);
    spec.half_range = get_or(j, "half_range", spec.half_range, where);
    spec.first = get_or(j, "first", spec.first, where);
    spec.values = get_or(j, "values", spec.values, where);
}

void parse_prior(const json& j, PriorSpec& spec)
{
    const auto where = "prior";
    spec.kind = parse_prior_kind(require_string(j, "kind", where));
    if (spec.kind == PriorKind::Uniform) {
        check_keys(j, {"kind"}, where);
    } else {
        check_keys(j, {"kind", "sigma"}, where);
        if (!j.contains("sigma")) {
            throw ConfigError("Gaussian priors need 'sigma'");
        }
    }
    spec.sigma = get_or(j, "sigma", spec.sigma, where);
}

FieldSpec parse_field(const json& j)
{
    FieldSpec spec;
    const auto where = "field";
    const auto model = require_string(j, "model", where);
    if (model == "linear_gaussian") {
        spec.model = FieldSpec::Model::LinearGaussian;
        check_keys(j, {"model", "prior_sigma", "noise_sigma", "grid"}, where);
    } else if (model == "poisson_1d") {
        spec.model = FieldSpec::Model::Poisson1D;
        check_keys(j, {"model", "prior_sigma", "baseline", "amplitude", "width", "half_range", "grid"}, where);
    } else {
        throw ConfigError("unknown field model '" + model + "' (linear_gaussian, poisson_1d)");
    }
    spec.prior_sigma = get_or(j, "prior_sigma", spec.prior_sigma, where);
    spec.noise_sigma = get_or(j, "noise_sigma", spec.noise_sigma, where);
    spec.baseline = get_or(j, "baseline", spec.baseline, where);
    spec.amplitude = get_or(j, "amplitude", spec.amplitude, where);
    spec.width = get_or(j, "width", spec.width, where);
    spec.half_range = get_or(j, "half_range", spec.half_range, where);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, {"lower", "upper", "step"}, "field.grid");
        spec.grid_lower = get_or(g, "lower", spec.grid_lower, "field.grid");
        spec.grid_upper = get_or(g, "upper", spec.grid_upper, "field.grid");
        spec.grid_step = get_or(g, "step", spec.grid_step, "field.grid");
    }
    return spec;
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (n_sweep.empty()) {
        throw ConfigError("n_sweep must list at least one population size");
    }
    for (std::size_t i = 0; i < n_sweep.size(); ++i) {
        if (n_sweep[i] < 1) {
            throw ConfigError("n_sweep values must be >= 1");
        }
        if (i > 0 && n_sweep[i] <= n_sweep[i - 1]) {
            throw ConfigError("n_sweep must be strictly increasing");
        }
    }
    if (!(beta > 0.0 && beta < 1.0)) {
        throw ConfigError("beta must lie strictly inside (0, 1)");
    }
    if (!(alpha > 0.0)) {
        throw ConfigError("alpha must be positive");
    }
    if (j_max < 1 || i_max < 1) {
        throw ConfigError("montecarlo.j_max and montecarlo.i_max must be >= 1");
    }
    if (field) {
        if (!(field->prior_sigma > 0.0) || !(field->grid_step > 0.0) || !(field->grid_upper > field->grid_lower)) {
            throw ConfigError("field needs prior_sigma > 0, step > 0 and upper > lower");
        }
        if (field->model == FieldSpec::Model::LinearGaussian && !(field->noise_sigma > 0.0)) {
            throw ConfigError("linear-Gaussian field needs noise_sigma > 0");
        }
        if (field->model == FieldSpec::Model::Poisson1D &&
            (!(field->width > 0.0) || !(field->baseline > 0.0) || !(field->amplitude >= 0.0) ||
             !(field->half_range > 0.0))) {
            throw ConfigError("Poisson-1D field needs width > 0, baseline > 0, amplitude >= 0, half_range > 0");
        }
        return;
    }
    if (model.tuning != TuningKind::RandomBinary && !(model.half_range > 0.0)) {
        throw ConfigError("model.half_range must be positive");
    }
    if (!(model.amplitude >= 0.0)) {
        throw ConfigError("model.amplitude must be >= 0");
    }
    std::size_t stimuli = 0;
    switch (stimulus.points) {
    case PointSet::EvenlySpaced:
        if (!(stimulus.half_range > 0.0)) {
            throw ConfigError("stimulus.half_range must be positive");
        }
        stimuli = stimulus.count;
        break;
    case PointSet::IntegerRange: stimuli = stimulus.count; break;
    case PointSet::Explicit: stimuli = stimulus.values.size(); break;
    }
    if (stimuli == 0) {
        throw ConfigError("stimulus set is empty");
    }
    if (model.tuning == TuningKind::RandomBinary && model.support_size > stimuli) {
        throw ConfigError("model.support_size exceeds the number of stimuli");
    }
    if (stimulus.prior.kind != PriorKind::Uniform && !(stimulus.prior.sigma > 0.0)) {
        throw ConfigError("prior.sigma must be positive");
    }
}

ExperimentConfig parse_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, {"name", "model", "stimulus", "prior", "field", "n_sweep", "metrics", "beta", "alpha",
                     "montecarlo", "seed", "output"},
               "config");

    ExperimentConfig cfg;
    cfg.name = get_or(doc, "name", cfg.name, "config");
    if (doc.contains("field")) {
        if (doc.contains("model") || doc.contains("stimulus") || doc.contains("prior")) {
            throw ConfigError("a 'field' config cannot also define model, stimulus or prior");
        }
        cfg.field = parse_field(doc.at("field"));
    } else {
        if (!doc.contains("model") || !doc.contains("stimulus")) {
            throw ConfigError("config needs 'model' and 'stimulus' (or a continuous 'field')");
        }
        cfg.model = parse_model(doc.at("model"));
        parse_stimulus(doc.at("stimulus"), cfg.stimulus);
        if (doc.contains("prior")) {
            parse_prior(doc.at("prior"), cfg.stimulus.prior);
        }
    }
    cfg.n_sweep = get_or(doc, "n_sweep", cfg.n_sweep, "config");
    for (const auto& name : get_or(doc, "metrics", std::vector<std::string>{}, "config")) {
        cfg.metrics.push_back(parse_metric(name));
    }
    cfg.beta = get_or(doc, "beta", cfg.beta, "config");
    cfg.alpha = get_or(doc, "alpha", cfg.alpha, "config");
    if (doc.contains("montecarlo")) {
        const auto& mc = doc.at("montecarlo");
        check_keys(mc, {"j_max", "i_max", "threads"}, "montecarlo");
        cfg.j_max = get_or(mc, "j_max", cfg.j_max, "montecarlo");
        cfg.i_max = get_or(mc, "i_max", cfg.i_max, "montecarlo");
        cfg.threads = get_or(mc, "threads", cfg.threads, "montecarlo");
    }
    cfg.seed = get_or(doc, "seed", cfg.seed, "config");
    if (doc.contains("output")) {
        const auto& out = doc.at("output");
        check_keys(out, {"csv", "json"}, "output");
        cfg.output.csv = get_or(out, "csv", cfg.output.csv, "output");
        cfg.output.json = get_or(out, "json", cfg.output.json, "output");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg)
{
    ordered doc;
    doc["name"] = cfg.name;
    if (cfg.field) {
        const auto& f = *cfg.field;
        ordered field;
        if (f.model == FieldSpec::Model::LinearGaussian) {
            field["model"] = "linear_gaussian";
            field["prior_sigma"] = f.prior_sigma;
            field["noise_sigma"] = f.noise_sigma;
        } else {
            field["model"] = "poisson_1d";
            field["prior_sigma"] = f.prior_sigma;
            field["baseline"] = f.baseline;
            field["amplitude"] = f.amplitude;
            field["width"] = f.width;
            field["half_range"] = f.half_range;
        }
        field["grid"] = {{"lower", f.grid_lower}, {"upper", f.grid_upper}, {"step", f.grid_step}};
        doc["field"] = field;
    } else {
        ordered model;
        model["tuning"] = tuning_name(cfg.model.tuning);
        if (cfg.model.tuning == TuningKind::RandomBinary) {
            model["support_size"] = cfg.model.support_size;
            model["amplitude"] = cfg.model.amplitude;
        } else {
            model["half_range"] = cfg.model.half_range;
            if (cfg.model.tuning == TuningKind::Heaviside) {
                model["amplitude"] = cfg.model.amplitude;
            }
        }
        doc["model"] = model;

        ordered stim;
        switch (cfg.stimulus.points) {
        case PointSet::EvenlySpaced:
            stim["points"] = "evenly_spaced";
            stim["count"] = cfg.stimulus.count;
            stim["half_range"] = cfg.stimulus.half_range;
            break;
        case PointSet::IntegerRange:
            stim["points"] = "integer_range";
            stim["first"] = cfg.stimulus.first;
            stim["count"] = cfg.stimulus.count;
            break;
        case PointSet::Explicit:
            stim["points"] = "explicit";
            stim["values"] = cfg.stimulus.values;
            break;
        }
        doc["stimulus"] = stim;

        ordered prior;
        prior["kind"] = prior_name(cfg.stimulus.prior.kind);
        if (cfg.stimulus.prior.kind != PriorKind::Uniform) {
            prior["sigma"] = cfg.stimulus.prior.sigma;
        }
        doc["prior"] = prior;
    }
    doc["n_sweep"] = cfg.n_sweep;
    std::vector<std::string> names;
    for (Metric m : cfg.metrics) {
        names.emplace_back(metric_name(m));
    }
    doc["metrics"] = names;
    doc["beta"] = cfg.beta;
    doc["alpha"] = cfg.alpha;
    doc["montecarlo"] = {{"j_max", cfg.j_max}, {"i_max", cfg.i_max}, {"threads", cfg.threads}};
    doc["seed"] = cfg.seed;
    doc["output"] = {{"csv", cfg.output.csv}, {"json", cfg.output.json}};
    return doc.dump(2);
}

const std::vector<std::size_t>& default_n_sweep()
{
    static const std::vector<std::size_t> sweep{1, 2, 3, 4, 6, 10, 14, 20, 30, 50, 100, 200, 400, 700, 1000};
    return sweep;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}; }

ExperimentConfig preset(std::string_view name)
{
    ExperimentConfig cfg;
    cfg.name = std::string(name);
    cfg.n_sweep = default_n_sweep();
    cfg.metrics = {Metric::IE, Metric::ID, Metric::IDD};
    cfg.model.half_range = 10.0;
    cfg.model.amplitude = 10.0;
    cfg.stimulus.points = PointSet::EvenlySpaced;
    cfg.stimulus.count = 21;
    cfg.stimulus.half_range = 10.0;

    const PriorSpec gaussian{PriorKind::Gaussian, cfg.model.half_range / 2.0};
    if (name == "fig1") {
        cfg.model.tuning = TuningKind::Heaviside;
    } else if (name == "fig2") {
        cfg.model.tuning = TuningKind::Heaviside;
        cfg.stimulus.prior = gaussian;
    } else if (name == "fig3") {
        cfg.model.tuning = TuningKind::RectifiedLinear;
    } else if (name == "fig4") {
        cfg.model.tuning = TuningKind::RectifiedLinear;
        cfg.stimulus.prior = gaussian;
    } else if (name == "fig5" || name == "fig6") {
        cfg.model.tuning = TuningKind::RandomBinary;
        cfg.model.support_size = 10;
        cfg.model.amplitude = 10.0;
        cfg.stimulus.points = PointSet::IntegerRange;
        cfg.stimulus.first = 1;
        cfg.stimulus.count = 1000;
        if (name == "fig6") {
            cfg.stimulus.prior = {PriorKind::HalfGaussian, 500.0};
        }
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "' (fig1 .. fig6)");
    }
    return cfg;
}

ExperimentConfig resolve_config(std::string_view preset_or_path)
{
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), preset_or_path) != names.end()) {
        return preset(preset_or_path);
    }
    return load_config(std::filesystem::path(preset_or_path));
}

}  // namespace popinfo
