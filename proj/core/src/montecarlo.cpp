#include "popinfo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "popinfo/divergence.hpp"
#include "popinfo/errors.hpp"
#include "popinfo/numeric.hpp"
#include "popinfo/random.hpp"

namespace popinfo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate(const PoissonPopulation& pop, std::span<const double> prior, const McConfig& cfg)
{
    if (prior.size() != pop.stimuli()) {
        throw DimensionError("prior length does not match the population's stimulus count");
    }
    if (cfg.j_max < 1 || cfg.i_max < 1) {
        throw ConfigError("j_max and i_max must be >= 1");
    }
    if (cfg.j_max > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("j_max exceeds 2^32 - 1");
    }
    for (double p : prior) {
        if (!(p > 0.0)) {
            throw ConfigError("prior must be strictly positive");
        }
    }
}

// Likelihood tables shared by all samples.
struct LikelihoodTables {
    std::size_t neurons;
    std::size_t stimuli;
    std::vector<double> log_rate;  // neuron-major, -inf for zero rates
    std::vector<double> neg_total; // -sum_n rate(n, m)
    std::vector<double> log_prior;
    std::vector<double> cdf;

    LikelihoodTables(const PoissonPopulation& pop, std::span<const double> prior)
        : neurons(pop.neurons()), stimuli(pop.stimuli()), log_rate(pop.rates().size()),
          neg_total(stimuli, 0.0), log_prior(stimuli), cdf(stimuli)
    {
        for (std::size_t n = 0; n < neurons; ++n) {
            for (std::size_t m = 0; m < stimuli; ++m) {
                const double r = pop.rate(n, m);
                log_rate[n * stimuli + m] = r > 0.0 ? std::log(r) : kNegInf;
                neg_total[m] -= r;
            }
        }
        double acc = 0.0;
        for (std::size_t m = 0; m < stimuli; ++m) {
            log_prior[m] = std::log(prior[m]);
            acc += prior[m];
            cdf[m] = acc;
        }
    }

    std::size_t draw_stimulus(double u) const
    {
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), stimuli - 1);
    }
};

// Information term for one response given log-likelihoods (up to the common -sum ln r!).
// Anchored on the true stimulus so that a perfectly discriminated sample yields exactly -ln p.
double information_term(std::span<const double> score, std::span<const double> log_prior, std::size_t truth)
{
    const double anchor = score[truth];
    std::size_t arg = truth;
    double top = log_prior[truth];
    for (std::size_t m = 0; m < score.size(); ++m) {
        const double a = log_prior[m] + (score[m] - anchor);
        if (a > top) {
            top = a;
            arg = m;
        }
    }
    double rest = 0.0;
    for (std::size_t m = 0; m < score.size(); ++m) {
        if (m != arg) {
            rest += std::exp(log_prior[m] + (score[m] - anchor) - top);
        }
    }
    return -(top + std::log1p(rest));
}

}  // namespace

std::vector<double> sample_information_terms(const PoissonPopulation& pop, std::span<const double> prior,
                                             const McConfig& cfg)
{
    validate(pop, prior, cfg);
    const LikelihoodTables tables(pop, prior);
    std::vector<double> terms(cfg.j_max);

    detail::parallel_chunks(cfg.j_max, cfg.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> score(tables.stimuli);
        for (std::size_t j = begin; j < end; ++j) {
            Substream stimulus_stream(cfg.seed, StreamLane::Stimulus, j);
            const std::size_t truth = tables.draw_stimulus(stimulus_stream.uniform());

            std::copy(tables.neg_total.begin(), tables.neg_total.end(), score.begin());
            for (std::size_t n = 0; n < tables.neurons; ++n) {
                const double rate = pop.rate(n, truth);
                if (rate == 0.0) {
                    continue;
                }
                Substream response_stream(cfg.seed, StreamLane::Response, j, static_cast<std::uint32_t>(n));
                const std::uint32_t count = sample_poisson(rate, response_stream);
                if (count == 0) {
                    continue;
                }
                const double k = count;
                const double* row = tables.log_rate.data() + n * tables.stimuli;
                for (std::size_t m = 0; m < tables.stimuli; ++m) {
                    score[m] += k * row[m];
                }
            }
            terms[j] = information_term(score, tables.log_prior, truth);
        }
    });
    return terms;
}

McEstimate bootstrap_terms(std::vector<double> terms, std::size_t i_max, std::uint64_t seed, unsigned threads)
{
    if (terms.empty() || i_max < 1) {
        throw ConfigError("bootstrap needs at least one term and one replicate");
    }
    if (terms.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("too many terms to bootstrap");
    }
    const std::size_t j_max = terms.size();
    const double shift = terms.front();
    std::vector<double> centered(j_max);
    for (std::size_t j = 0; j < j_max; ++j) {
        centered[j] = terms[j] - shift;
    }

    McEstimate est;
    est.seed = seed;
    est.j_max = j_max;
    est.i_max = i_max;
    est.i_mc_star = shift + pairwise_sum(centered) / static_cast<double>(j_max);

    std::vector<double> replicate(i_max);
    detail::parallel_chunks(i_max, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> draw(j_max);
        for (std::size_t i = begin; i < end; ++i) {
            Substream stream(seed, StreamLane::Bootstrap, i);
            for (std::size_t k = 0; k < j_max; ++k) {
                draw[k] = centered[stream.uniform_index(static_cast<std::uint32_t>(j_max))];
            }
            replicate[i] = pairwise_sum(draw) / static_cast<double>(j_max);
        }
    });

    const double centered_mc = pairwise_sum(replicate) / static_cast<double>(i_max);
    double ss = 0.0;
    for (double r : replicate) {
        ss += (r - centered_mc) * (r - centered_mc);
    }
    est.i_mc = shift + centered_mc;
    est.i_std = std::sqrt(ss / static_cast<double>(i_max));
    est.terms = std::move(terms);
    return est;
}

McEstimate estimate(const PoissonPopulation& pop, std::span<const double> prior, const McConfig& cfg)
{
    return bootstrap_terms(sample_information_terms(pop, prior, cfg), cfg.i_max, cfg.seed, cfg.threads);
}

ExactMi exact_mi(const PoissonPopulation& pop, std::span<const double> prior, double tail_tol)
{
    if (prior.size() != pop.stimuli()) {
        throw DimensionError("prior length does not match the population's stimulus count");
    }
    if (!(tail_tol > 0.0)) {
        throw DomainError("tail tolerance must be positive");
    }
    const std::size_t neurons = pop.neurons();
    if (neurons > kOracleMaxNeurons) {
        throw InstanceTooLarge("exact enumeration supports N <= " + std::to_string(kOracleMaxNeurons) +
                               " neurons, got N = " + std::to_string(neurons));
    }

    ExactMi out;
    out.r_max.resize(neurons, 0);
    for (std::size_t n = 0; n < neurons; ++n) {
        for (std::size_t m = 0; m < pop.stimuli(); ++m) {
            out.r_max[n] = std::max(out.r_max[n], poisson_truncation_point(pop.rate(n, m), tail_tol));
        }
        if (out.r_max[n] + 1 > kOracleMaxSupport) {
            throw InstanceTooLarge("neuron " + std::to_string(n) + " needs a support of " +
                                   std::to_string(out.r_max[n] + 1) + " counts (limit " +
                                   std::to_string(kOracleMaxSupport) + ")");
        }
    }

    std::vector<std::vector<double>> conditional(pop.stimuli());
    std::vector<double> rates(neurons);
    for (std::size_t m = 0; m < pop.stimuli(); ++m) {
        for (std::size_t n = 0; n < neurons; ++n) {
            rates[n] = pop.rate(n, m);
        }
        conditional[m] = poisson_product_pmf(rates, out.r_max);
    }
    const std::size_t outcomes = conditional.front().size();
    std::vector<double> marginal(outcomes, 0.0);
    for (std::size_t m = 0; m < pop.stimuli(); ++m) {
        for (std::size_t r = 0; r < outcomes; ++r) {
            marginal[r] += prior[m] * conditional[m][r];
        }
    }

    double info = 0.0;
    for (std::size_t m = 0; m < pop.stimuli(); ++m) {
        double inner = 0.0;
        double kept = 0.0;
        for (std::size_t r = 0; r < outcomes; ++r) {
            const double p = conditional[m][r];
            kept += p;
            if (p > 0.0) {
                inner += p * std::log(p / marginal[r]);
            }
        }
        info += prior[m] * inner;
        out.tail_bound = std::max(out.tail_bound, std::max(0.0, 1.0 - kept));
    }
    out.value = info;
    return out;
}

RelativeError relative_error(double metric, const McEstimate& mc)
{
    if (mc.i_mc == 0.0) {
        throw DomainError("relative error is undefined when I_MC == 0");
    }
    return {(metric - mc.i_mc) / mc.i_mc, mc.i_std / mc.i_mc};
}

}  // namespace popinfo
