#include "popinfo/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "popinfo/errors.hpp"

namespace popinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nonzero rates of each stimulus column, sorted by neuron.
struct SparseColumns {
    std::vector<std::size_t> start;
    std::vector<std::size_t> neuron;
    std::vector<double> rate;
    std::vector<double> log_rate;

    explicit SparseColumns(const PoissonPopulation& pop)
    {
        const std::size_t stimuli = pop.stimuli();
        start.reserve(stimuli + 1);
        start.push_back(0);
        for (std::size_t m = 0; m < stimuli; ++m) {
            for (std::size_t n = 0; n < pop.neurons(); ++n) {
                const double r = pop.rate(n, m);
                if (r > 0.0) {
                    neuron.push_back(n);
                    rate.push_back(r);
                    log_rate.push_back(std::log(r));
                }
            }
            start.push_back(neuron.size());
        }
    }
};

// Walks the union of the nonzero supports of two columns in neuron order.
// `both(a, la, b, lb)`, `only_first(a)`, `only_second(b)` return the per-neuron term.
template <class Both, class OnlyFirst, class OnlySecond>
double merge_sum(const SparseColumns& cols, std::size_t m, std::size_t mh, Both both,
                 OnlyFirst only_first, OnlySecond only_second)
{
    std::size_t i = cols.start[m];
    const std::size_t iend = cols.start[m + 1];
    std::size_t j = cols.start[mh];
    const std::size_t jend = cols.start[mh + 1];
    double sum = 0.0;
    while (i < iend || j < jend) {
        if (j == jend || (i < iend && cols.neuron[i] < cols.neuron[j])) {
            sum += only_first(cols.rate[i]);
            ++i;
        } else if (i == iend || cols.neuron[j] < cols.neuron[i]) {
            sum += only_second(cols.rate[j]);
            ++j;
        } else {
            sum += both(cols.rate[i], cols.log_rate[i], cols.rate[j], cols.log_rate[j]);
            ++i;
            ++j;
        }
    }
    return sum;
}

double kl_pair(const SparseColumns& cols, std::size_t m, std::size_t mh)
{
    if (m == mh) {
        return 0.0;
    }
    const double d = merge_sum(
        cols, m, mh,
        [](double a, double la, double b, double lb) {
            return a == b ? 0.0 : std::max(0.0, a * (la - lb) + b - a);
        },
        [](double) { return kInf; }, [](double b) { return b; });
    return std::max(0.0, d);
}

double chernoff_pair(const SparseColumns& cols, std::size_t m, std::size_t mh, double beta)
{
    if (m == mh) {
        return 0.0;
    }
    const double alpha = 1.0 - beta;
    const bool half = beta == 0.5;
    const double d = merge_sum(
        cols, m, mh,
        [=](double a, double la, double b, double lb) {
            if (a == b) {
                return 0.0;
            }
            const double cross = half ? std::sqrt(a * b) : std::exp(alpha * la + beta * lb);
            return std::max(0.0, alpha * a + beta * b - cross);
        },
        [=](double a) { return alpha * a; }, [=](double b) { return beta * b; });
    return std::max(0.0, d);
}

void check_beta(double beta)
{
    if (!(beta > 0.0 && beta < 1.0)) {
        throw DomainError("beta must lie strictly inside (0, 1), got " + std::to_string(beta));
    }
}

void check_pair(const PoissonPopulation& pop, std::size_t m, std::size_t mh)
{
    if (m >= pop.stimuli() || mh >= pop.stimuli()) {
        throw DimensionError("stimulus index out of range");
    }
}

template <class PairFn>
std::vector<double> fill_matrix(std::size_t size, PairFn pair)
{
    std::vector<double> entries(size * size, 0.0);
    for (std::size_t m = 0; m < size; ++m) {
        for (std::size_t mh = 0; mh < size; ++mh) {
            entries[m * size + mh] = pair(m, mh);
        }
    }
    return entries;
}

// d/dbeta of beta D_beta. Nonincreasing in beta because beta D_beta is concave.
double chernoff_slope(const SparseColumns& cols, std::size_t m, std::size_t mh, double beta)
{
    return merge_sum(
        cols, m, mh,
        [=](double a, double la, double b, double lb) {
            if (a == b) {
                return 0.0;
            }
            return b - a - std::exp((1.0 - beta) * la + beta * lb) * (lb - la);
        },
        [](double a) { return -a; }, [](double b) { return b; });
}

// Golden-section on g alone cannot place the argmax closer than ~sqrt(eps) because g is
// flat at its top, so the search bisects on the sign of the analytic slope instead.
ChernoffInformation chernoff_search(const SparseColumns& cols, std::size_t m, std::size_t mh,
                                    double tol)
{
    ChernoffInformation out;
    const double slope_lo = chernoff_slope(cols, m, mh, kChernoffBetaMin);
    const double slope_hi = chernoff_slope(cols, m, mh, kChernoffBetaMax);
    double beta;
    if (slope_lo == 0.0 && slope_hi == 0.0) {
        beta = 0.5;  // identical columns, g == 0
    } else if (slope_lo <= 0.0) {
        beta = kChernoffBetaMin;
        out.clamped = true;
    } else if (slope_hi >= 0.0) {
        beta = kChernoffBetaMax;
        out.clamped = true;
    } else {
        double lo = kChernoffBetaMin;
        double hi = kChernoffBetaMax;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            (chernoff_slope(cols, m, mh, mid) > 0.0 ? lo : hi) = mid;
        }
        beta = 0.5 * (lo + hi);
    }
    out.value = chernoff_pair(cols, m, mh, beta);
    if (!std::isfinite(out.value)) {
        return {kInf, std::nullopt, false};
    }
    out.beta = beta;
    return out;
}

}  // namespace

std::string_view to_string(DivergenceKind kind)
{
    switch (kind) {
    case DivergenceKind::KL:
        return "kl";
    case DivergenceKind::ChernoffCoefficient:
        return "chernoff_coefficient";
    case DivergenceKind::Bhattacharyya:
        return "bhattacharyya";
    case DivergenceKind::ChernoffInformation:
        return "chernoff_information";
    }
    return "unknown";
}

DivergenceMatrix::DivergenceMatrix(std::size_t size, DivergenceKind kind, double beta,
                                   std::vector<double> entries)
    : size_(size), kind_(kind), beta_(beta), entries_(std::move(entries))
{
    if (entries_.size() != size_ * size_) {
        throw DimensionError("divergence matrix is not square");
    }
    for (std::size_t m = 0; m < size_; ++m) {
        if (entries_[m * size_ + m] != 0.0) {
            throw ConfigError("divergence matrix diagonal must be exactly 0");
        }
    }
    for (double d : entries_) {
        if (!(d >= 0.0)) {
            throw ConfigError("divergence entries must be nonnegative");
        }
    }
}

void DivergenceMatrix::write_csv(std::ostream& out) const
{
    char buf[32];
    for (std::size_t m = 0; m < size_; ++m) {
        for (std::size_t mh = 0; mh < size_; ++mh) {
            const double d = (*this)(m, mh);
            if (mh > 0) {
                out << ',';
            }
            if (std::isinf(d)) {
                out << "inf";
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", d);
                out << buf;
            }
        }
        out << '\n';
    }
}

DivergenceMatrix kl_matrix(const PoissonPopulation& pop)
{
    const SparseColumns cols(pop);
    auto entries = fill_matrix(pop.stimuli(), [&](std::size_t m, std::size_t mh) { return kl_pair(cols, m, mh); });
    return {pop.stimuli(), DivergenceKind::KL, std::numeric_limits<double>::quiet_NaN(), std::move(entries)};
}

DivergenceMatrix chernoff_coefficient_matrix(const PoissonPopulation& pop, double beta)
{
    check_beta(beta);
    const SparseColumns cols(pop);
    auto entries = fill_matrix(pop.stimuli(),
                               [&](std::size_t m, std::size_t mh) { return chernoff_pair(cols, m, mh, beta); });
    return {pop.stimuli(), DivergenceKind::ChernoffCoefficient, beta, std::move(entries)};
}

DivergenceMatrix bhattacharyya_matrix(const PoissonPopulation& pop)
{
    const SparseColumns cols(pop);
    auto entries = fill_matrix(pop.stimuli(),
                               [&](std::size_t m, std::size_t mh) { return chernoff_pair(cols, m, mh, 0.5); });
    return {pop.stimuli(), DivergenceKind::Bhattacharyya, 0.5, std::move(entries)};
}

double kl_divergence(const PoissonPopulation& pop, std::size_t m, std::size_t mh)
{
    check_pair(pop, m, mh);
    return kl_pair(SparseColumns(pop), m, mh);
}

double chernoff_coefficient(const PoissonPopulation& pop, std::size_t m, std::size_t mh, double beta)
{
    check_beta(beta);
    check_pair(pop, m, mh);
    return chernoff_pair(SparseColumns(pop), m, mh, beta);
}

double hellinger_sq(const PoissonPopulation& pop, std::size_t m, std::size_t mh)
{
    return -std::expm1(-chernoff_coefficient(pop, m, mh, 0.5));
}

ChernoffInformation chernoff_information(const PoissonPopulation& pop, std::size_t m,
                                         std::size_t mh, double tol)
{
    if (!(tol > 0.0)) {
        throw DomainError("Chernoff search tolerance must be positive");
    }
    check_pair(pop, m, mh);
    return chernoff_search(SparseColumns(pop), m, mh, tol);
}

std::vector<ChernoffInformation> chernoff_information_records(const PoissonPopulation& pop, double tol)
{
    if (!(tol > 0.0)) {
        throw DomainError("Chernoff search tolerance must be positive");
    }
    const SparseColumns cols(pop);
    const std::size_t size = pop.stimuli();
    std::vector<ChernoffInformation> records(size * size);
    for (std::size_t m = 0; m < size; ++m) {
        for (std::size_t mh = m + 1; mh < size; ++mh) {
            // g_{mh,m}(beta) = g_{m,mh}(1 - beta): one search serves both orders.
            const auto c = chernoff_search(cols, m, mh, tol);
            records[m * size + mh] = c;
            auto mirrored = c;
            if (c.beta) {
                mirrored.beta = 1.0 - *c.beta;
            }
            records[mh * size + m] = mirrored;
        }
    }
    return records;
}

DivergenceMatrix chernoff_information_matrix(const PoissonPopulation& pop, double tol)
{
    const auto records = chernoff_information_records(pop, tol);
    std::vector<double> entries(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        entries[i] = records[i].value;
    }
    return {pop.stimuli(), DivergenceKind::ChernoffInformation, std::numeric_limits<double>::quiet_NaN(),
            std::move(entries)};
}

double brute_force_divergence(std::span<const double> p, std::span<const double> q,
                              DivergenceKind kind, double beta)
{
    if (p.size() != q.size()) {
        throw DimensionError("pmfs have supports of different size");
    }
    if (kind == DivergenceKind::KL) {
        double d = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0) {
                continue;
            }
            if (q[i] == 0.0) {
                return kInf;
            }
            d += p[i] * std::log(p[i] / q[i]);
        }
        return d;
    }
    if (kind == DivergenceKind::Bhattacharyya) {
        beta = 0.5;
    } else if (kind != DivergenceKind::ChernoffCoefficient) {
        throw ConfigError("brute-force oracle supports KL and Chernoff-coefficient kinds only");
    }
    check_beta(beta);
    double overlap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && q[i] > 0.0) {
            overlap += std::pow(p[i], 1.0 - beta) * std::pow(q[i], beta);
        }
    }
    return overlap > 0.0 ? -std::log(overlap) : kInf;
}

std::vector<double> poisson_pmf(double rate, std::size_t r_max)
{
    std::vector<double> pmf(r_max + 1, 0.0);
    if (rate == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    const double log_rate = std::log(rate);
    for (std::size_t r = 0; r <= r_max; ++r) {
        const auto k = static_cast<double>(r);
        pmf[r] = std::exp(k * log_rate - rate - std::lgamma(k + 1.0));
    }
    return pmf;
}

std::size_t poisson_truncation_point(double rate, double tail_mass)
{
    if (!(tail_mass > 0.0)) {
        throw DomainError("tail mass must be positive");
    }
    if (rate == 0.0) {
        return 0;
    }
    // Far enough that the mass beyond `hard` is negligible against any usable tail_mass.
    const auto hard = static_cast<std::size_t>(std::ceil(rate + 40.0 * std::sqrt(rate) + 60.0));
    const auto pmf = poisson_pmf(rate, hard);
    double tail = 0.0;
    std::size_t r = hard;
    // tail holds P(R > r) while scanning downward.
    while (r > 0) {
        const double next_tail = tail + pmf[r];
        if (next_tail >= tail_mass) {
            return r;
        }
        tail = next_tail;
        --r;
    }
    return 0;
}

std::vector<double> poisson_product_pmf(std::span<const double> rates,
                                        std::span<const std::size_t> r_max)
{
    if (rates.size() != r_max.size()) {
        throw DimensionError("rates and truncation points differ in length");
    }
    std::vector<double> joint{1.0};
    for (std::size_t n = 0; n < rates.size(); ++n) {
        const auto marginal = poisson_pmf(rates[n], r_max[n]);
        std::vector<double> next(joint.size() * marginal.size());
        for (std::size_t r = 0; r < marginal.size(); ++r) {
            for (std::size_t i = 0; i < joint.size(); ++i) {
                next[r * joint.size() + i] = joint[i] * marginal[r];
            }
        }
        joint = std::move(next);
    }
    return joint;
}

}  // namespace popinfo
