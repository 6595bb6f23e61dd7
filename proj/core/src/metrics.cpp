#include "popinfo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "popinfo/errors.hpp"
#include "popinfo/numeric.hpp"

namespace popinfo {

namespace {

void require_prior(const DivergenceMatrix& div, std::span<const double> prior)
{
    if (prior.size() != div.size()) {
        throw DimensionError("prior has " + std::to_string(prior.size()) + " entries but the matrix is " +
                             std::to_string(div.size()) + " x " + std::to_string(div.size()));
    }
}

void require_kl(const DivergenceMatrix& div)
{
    if (div.kind() != DivergenceKind::KL) {
        throw ConfigError("metric requires a KL divergence matrix, got " + std::string(to_string(div.kind())));
    }
}

void require_chernoff(const DivergenceMatrix& div)
{
    if (div.kind() != DivergenceKind::ChernoffCoefficient && div.kind() != DivergenceKind::Bhattacharyya) {
        throw ConfigError("metric requires a Chernoff-coefficient matrix, got " +
                          std::string(to_string(div.kind())));
    }
}

void require_alpha(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must lie in (0, inf)");
    }
}

void require_sets(const DivergenceMatrix& div, const NeighborSets& sets)
{
    if (sets.size() != div.size()) {
        throw DimensionError("neighbour sets and divergence matrix differ in size");
    }
    const bool same_beta = div.kind() == DivergenceKind::KL || sets.beta == div.beta();
    if (sets.kind != div.kind() || !same_beta) {
        throw ConfigError("neighbour sets were built from a different divergence kind");
    }
}

// -sum_m p_m ln(inner(m)) + H(X), accumulated in index order.
template <class Inner>
double information(std::span<const double> prior, Inner inner)
{
    double acc = 0.0;
    for (std::size_t m = 0; m < prior.size(); ++m) {
        acc -= prior[m] * std::log(inner(m));
    }
    return acc + entropy(prior);
}

struct Weight {
    std::span<const double> prior;
    double alpha;
    bool use_prior;

    double operator()(std::size_t m, std::size_t mh) const
    {
        if (!use_prior) {
            return 1.0;
        }
        const double ratio = prior[mh] / prior[m];
        return alpha == 1.0 ? ratio : std::pow(ratio, alpha);
    }
};

double full_sum(const DivergenceMatrix& div, std::span<const double> prior, double scale, Weight w)
{
    return information(prior, [&](std::size_t m) {
        double inner = 0.0;
        const auto row = div.row(m);
        for (std::size_t mh = 0; mh < row.size(); ++mh) {
            inner += w(m, mh) * exp_neg(scale * row[mh]);
        }
        return inner;
    });
}

// Same summation order as full_sum restricted to M_m and m itself, so terms
// excluded here that are exactly 0 there leave the result bit-identical.
double restricted_sum(const DivergenceMatrix& div, const NeighborSets& sets,
                      std::span<const double> prior, double scale, Weight w)
{
    return information(prior, [&](std::size_t m) {
        const auto& members = sets.combined[m];
        const auto row = div.row(m);
        double inner = 0.0;
        bool self_done = false;
        for (std::size_t mh : members) {
            if (!self_done && mh > m) {
                inner += w(m, m) * exp_neg(scale * row[m]);
                self_done = true;
            }
            inner += w(m, mh) * exp_neg(scale * row[mh]);
        }
        if (!self_done) {
            inner += w(m, m) * exp_neg(scale * row[m]);
        }
        return inner;
    });
}

}  // namespace

NeighborSets neighbor_sets(const DivergenceMatrix& div, double zero_tol, double tie_tol)
{
    if (!(zero_tol > 0.0) || !(tie_tol > 0.0)) {
        throw DomainError("neighbour-set tolerances must be positive");
    }
    const std::size_t size = div.size();
    NeighborSets sets;
    sets.kind = div.kind();
    sets.beta = div.beta();
    sets.aliases.resize(size);
    sets.nearest.resize(size);
    sets.combined.resize(size);

    for (std::size_t m = 0; m < size; ++m) {
        const auto row = div.row(m);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t mh = 0; mh < size; ++mh) {
            if (mh == m) {
                continue;
            }
            if (row[mh] <= zero_tol) {
                sets.aliases[m].push_back(mh);
            } else {
                best = std::min(best, row[mh]);
            }
        }
        if (std::isfinite(best)) {
            const double cutoff = best + tie_tol * best;
            for (std::size_t mh = 0; mh < size; ++mh) {
                if (mh != m && row[mh] > zero_tol && row[mh] <= cutoff) {
                    sets.nearest[m].push_back(mh);
                }
            }
        }
        auto& combined = sets.combined[m];
        std::merge(sets.aliases[m].begin(), sets.aliases[m].end(), sets.nearest[m].begin(),
                   sets.nearest[m].end(), std::back_inserter(combined));
    }
    return sets;
}

double i_u(const DivergenceMatrix& kl, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    return full_sum(kl, prior, 1.0, {prior, 1.0, true});
}

double i_e(const DivergenceMatrix& kl, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    return full_sum(kl, prior, kInvE, {prior, 1.0, true});
}

double i_beta_alpha(const DivergenceMatrix& chernoff, std::span<const double> prior, double alpha)
{
    require_chernoff(chernoff);
    require_prior(chernoff, prior);
    require_alpha(alpha);
    return full_sum(chernoff, prior, 1.0, {prior, alpha, true});
}

double i_d(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    require_sets(kl, sets);
    return restricted_sum(kl, sets, prior, kInvE, {prior, 1.0, true});
}

double i_u_d(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    require_sets(kl, sets);
    return restricted_sum(kl, sets, prior, 1.0, {prior, 1.0, true});
}

double i_beta_alpha_d(const DivergenceMatrix& chernoff, const NeighborSets& sets,
                      std::span<const double> prior, double alpha)
{
    require_chernoff(chernoff);
    require_prior(chernoff, prior);
    require_sets(chernoff, sets);
    require_alpha(alpha);
    return restricted_sum(chernoff, sets, prior, 1.0, {prior, alpha, true});
}

double i_D(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    require_sets(kl, sets);
    return restricted_sum(kl, sets, prior, kInvE, {prior, 1.0, false});
}

double i_D0(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior)
{
    require_kl(kl);
    require_prior(kl, prior);
    require_sets(kl, sets);
    double acc = 0.0;
    for (std::size_t m = 0; m < prior.size(); ++m) {
        double z = 0.0;
        for (std::size_t mh : sets.combined[m]) {
            z += exp_neg(kInvE * kl(m, mh));
        }
        acc -= prior[m] * z;
    }
    return acc + entropy(prior);
}

double h_c_bound(const DivergenceMatrix& chernoff_information, std::span<const double> prior)
{
    if (chernoff_information.kind() != DivergenceKind::ChernoffInformation) {
        throw ConfigError("h_c requires a Chernoff-information matrix");
    }
    require_prior(chernoff_information, prior);
    return full_sum(chernoff_information, prior, 1.0, {prior, 1.0, true});
}

double h_c_bound(const PoissonPopulation& pop, std::span<const double> prior, double tol)
{
    return h_c_bound(chernoff_information_matrix(pop, tol), prior);
}

double h_d_bound(const PoissonPopulation& pop, std::span<const double> prior, double beta,
                 double tol, HdInterpretation interpretation)
{
    if (interpretation != HdInterpretation::MaximizerTimesFixedOrder) {
        throw ConfigError("unsupported h_d interpretation");
    }
    const auto fixed = chernoff_coefficient_matrix(pop, beta);
    require_prior(fixed, prior);
    const auto records = chernoff_information_records(pop, tol);
    const std::size_t size = fixed.size();
    std::vector<double> exponents(size * size, 0.0);
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        const auto& rec = records[i];
        if (i % (size + 1) == 0) {
            continue;
        }
        // beta_m * D_beta = (beta_m / beta) * (beta D_beta); an unset maximizer means +inf.
        exponents[i] = rec.beta ? (*rec.beta / beta) * fixed.entries()[i]
                                : std::numeric_limits<double>::infinity();
    }
    const DivergenceMatrix hd(size, DivergenceKind::ChernoffCoefficient, beta, std::move(exponents));
    return full_sum(hd, prior, 1.0, {prior, 1.0, true});
}

std::string_view metric_name(Metric metric)
{
    switch (metric) {
    case Metric::IU: return "I_u";
    case Metric::IE: return "I_e";
    case Metric::IBetaAlpha: return "I_beta_alpha";
    case Metric::ID: return "I_d";
    case Metric::IUD: return "I_u_d";
    case Metric::IBetaAlphaD: return "I_beta_alpha_d";
    case Metric::IDD: return "I_D";
    case Metric::ID0: return "I_D0";
    case Metric::HcPlusH: return "h_c_plus_H";
    case Metric::HX: return "H_X";
    }
    return "unknown";
}

const std::vector<Metric>& all_metrics()
{
    static const std::vector<Metric> metrics{Metric::IU, Metric::IE,  Metric::IBetaAlpha, Metric::ID,
                                             Metric::IUD, Metric::IBetaAlphaD, Metric::IDD, Metric::ID0,
                                             Metric::HcPlusH, Metric::HX};
    return metrics;
}

Metric parse_metric(std::string_view name)
{
    for (Metric m : all_metrics()) {
        if (metric_name(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown metric name '" + std::string(name) + "'");
}

double MetricValue::bits() const { return nats_to_bits(nats); }

const MetricValue& MetricReport::at(std::string_view name) const
{
    for (const auto& v : values) {
        if (v.name == name) {
            return v;
        }
    }
    throw std::out_of_range("metric '" + std::string(name) + "' not in report");
}

bool MetricReport::contains(std::string_view name) const
{
    return std::any_of(values.begin(), values.end(), [&](const MetricValue& v) { return v.name == name; });
}

std::string MetricReport::to_json() const
{
    nlohmann::ordered_json doc;
    doc["fingerprint"] = fingerprint;
    auto& metrics = doc["metrics"];
    metrics = nlohmann::ordered_json::object();
    for (const auto& v : values) {
        metrics[v.name] = {{"nats", v.nats}, {"bits", v.bits()}};
    }
    return doc.dump(2);
}

void MetricReport::write_csv(std::ostream& out) const
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i ? "," : "") << values[i].name << "_nats," << values[i].name << "_bits";
    }
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i].nats);
        out << (i ? "," : "") << buf;
        std::snprintf(buf, sizeof buf, "%.17g", values[i].bits());
        out << ',' << buf;
    }
    out << '\n';
}

MetricReport compute_metrics(const PoissonPopulation& pop, std::span<const double> prior,
                             std::span<const Metric> metrics, const MetricOptions& options,
                             std::string fingerprint)
{
    auto wants = [&](std::initializer_list<Metric> any) {
        return std::any_of(metrics.begin(), metrics.end(), [&](Metric m) {
            return std::find(any.begin(), any.end(), m) != any.end();
        });
    };

    std::optional<DivergenceMatrix> kl;
    std::optional<NeighborSets> kl_sets;
    if (wants({Metric::IU, Metric::IE, Metric::ID, Metric::IUD, Metric::IDD, Metric::ID0})) {
        kl = kl_matrix(pop);
        kl_sets = neighbor_sets(*kl, options.zero_tol, options.tie_tol);
    }
    std::optional<DivergenceMatrix> chernoff;
    std::optional<NeighborSets> chernoff_sets;
    if (wants({Metric::IBetaAlpha, Metric::IBetaAlphaD})) {
        chernoff = chernoff_coefficient_matrix(pop, options.beta);
        chernoff_sets = neighbor_sets(*chernoff, options.zero_tol, options.tie_tol);
    }

    MetricReport report;
    report.fingerprint = std::move(fingerprint);
    for (Metric metric : metrics) {
        double value = 0.0;
        switch (metric) {
        case Metric::IU: value = i_u(*kl, prior); break;
        case Metric::IE: value = i_e(*kl, prior); break;
        case Metric::IBetaAlpha: value = i_beta_alpha(*chernoff, prior, options.alpha); break;
        case Metric::ID: value = i_d(*kl, *kl_sets, prior); break;
        case Metric::IUD: value = i_u_d(*kl, *kl_sets, prior); break;
        case Metric::IBetaAlphaD:
            value = i_beta_alpha_d(*chernoff, *chernoff_sets, prior, options.alpha);
            break;
        case Metric::IDD: value = i_D(*kl, *kl_sets, prior); break;
        case Metric::ID0: value = i_D0(*kl, *kl_sets, prior); break;
        case Metric::HcPlusH: value = h_c_bound(pop, prior, options.chernoff_tol); break;
        case Metric::HX: value = entropy(prior); break;
        }
        if (!std::isfinite(value)) {
            throw std::runtime_error("metric " + std::string(metric_name(metric)) + " is not finite");
        }
        report.values.push_back({std::string(metric_name(metric)), value});
    }
    return report;
}

}  // namespace popinfo
