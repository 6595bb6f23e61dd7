#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "popinfo/errors.hpp"
#include "popinfo/montecarlo.hpp"
#include "support/instances.hpp"

namespace popinfo {
namespace {

double binary_entropy(double q) { return -(q * std::log(q) + (1 - q) * std::log(1 - q)); }

// Single-neuron mutual information summed directly from the definition.
double ref_single_neuron_mi(const std::vector<double>& rates, const std::vector<double>& prior)
{
    double info = 0.0;
    for (std::size_t r = 0; r < 150; ++r) {
        double marginal = 0.0;
        for (std::size_t m = 0; m < rates.size(); ++m) marginal += prior[m] * std::exp(test::ref_log_pmf(r, rates[m]));
        for (std::size_t m = 0; m < rates.size(); ++m) {
            const double lp = test::ref_log_pmf(r, rates[m]);
            if (std::isinf(lp)) continue;
            info += prior[m] * std::exp(lp) * (lp - std::log(marginal));
        }
    }
    return info;
}

TEST(Terms, SingleStimulusGivesZero)
{
    const PoissonPopulation pop(3, 1, {2.0, 0.0, 7.5});
    McConfig cfg;
    cfg.j_max = 500;
    cfg.seed = 1;
    const auto terms = sample_information_terms(pop, std::vector<double>{1.0}, cfg);
    ASSERT_EQ(terms.size(), 500u);
    for (double t : terms) EXPECT_EQ(t, 0.0);
}

TEST(Terms, AliasedStimuliCarryNoInformation)
{
    const PoissonPopulation pop(2, 2, {3.0, 3.0, 1.0, 1.0});
    McConfig cfg;
    cfg.j_max = 2000;
    cfg.i_max = 20;
    cfg.seed = 2;
    const auto est = estimate(pop, test::uniform_prior(2), cfg);
    EXPECT_LE(std::abs(est.i_mc), 3.0 * est.i_std + 1e-15);
    for (double t : est.terms) EXPECT_NEAR(t, 0.0, 1e-15);
}

TEST(Terms, PerfectDiscriminationGivesMinusLnPrior)
{
    // Disjoint supports: the response identifies the stimulus unless it is all-zero.
    const PoissonPopulation pop(2, 2, {60.0, 0.0, 0.0, 60.0});
    McConfig cfg;
    cfg.j_max = 300;
    cfg.seed = 3;
    for (double t : sample_information_terms(pop, test::uniform_prior(2), cfg)) EXPECT_EQ(t, std::log(2.0));
}

TEST(Bootstrap, ConstantTermsAreExact)
{
    const auto est = bootstrap_terms(std::vector<double>(1000, 0.7), 50, 4);
    EXPECT_EQ(est.i_mc, 0.7);
    EXPECT_EQ(est.i_mc_star, 0.7);
    EXPECT_EQ(est.i_std, 0.0);
}

TEST(Bootstrap, SingleReplicateHasZeroStd)
{
    std::vector<double> terms(100);
    std::iota(terms.begin(), terms.end(), 0.0);
    const auto est = bootstrap_terms(terms, 1, 5);
    EXPECT_EQ(est.i_std, 0.0);
    EXPECT_EQ(est.i_max, 1u);
    EXPECT_THROW(bootstrap_terms({}, 1, 5), ConfigError);
    EXPECT_THROW(bootstrap_terms(terms, 0, 5), ConfigError);
}

TEST(Bootstrap, ReplicatesAverageToSampleMean)
{
    for (std::size_t i = 0; i < 10; ++i) {
        const auto inst = test::tiny_instance(40, i);
        McConfig cfg;
        cfg.j_max = 5000;
        cfg.i_max = 100;
        cfg.seed = 40 + i;
        const auto est = estimate(inst.pop, inst.prior, cfg);
        EXPECT_LE(std::abs(est.i_mc - est.i_mc_star), 5.0 * est.i_std / std::sqrt(100.0) + 1e-15);
        EXPECT_EQ(est.terms.size(), 5000u);
        EXPECT_GE(est.i_std, 0.0);
    }
}

TEST(Determinism, IndependentOfThreadCount)
{
    const auto inst = test::tiny_instance(41, 0, 3, 6, 8.0);
    McConfig cfg;
    cfg.j_max = 3001;
    cfg.i_max = 17;
    cfg.seed = 99;
    cfg.threads = 1;
    const auto a = estimate(inst.pop, inst.prior, cfg);
    for (unsigned t : {2u, 3u, 8u}) {
        cfg.threads = t;
        const auto b = estimate(inst.pop, inst.prior, cfg);
        EXPECT_EQ(a.terms, b.terms);
        EXPECT_EQ(a.i_mc, b.i_mc);
        EXPECT_EQ(a.i_mc_star, b.i_mc_star);
        EXPECT_EQ(a.i_std, b.i_std);
    }
    cfg.seed = 100;
    EXPECT_NE(estimate(inst.pop, inst.prior, cfg).terms, a.terms);
}

TEST(Property, BoundedByStimulusEntropy)
{
    for (std::size_t i = 0; i < 20; ++i) {
        const auto inst = test::degenerate_instance(42, i);
        McConfig cfg;
        cfg.j_max = 4000;
        cfg.i_max = 30;
        cfg.seed = i;
        const auto est = estimate(inst.pop, inst.prior, cfg);
        EXPECT_LE(est.i_mc, std::log(static_cast<double>(inst.pop.stimuli())) + 5.0 * est.i_std);
    }
}

TEST(Property, CoversExactValueOnTinyInstances)
{
    int covered = 0;
    const int runs = 40;
    for (int i = 0; i < runs; ++i) {
        const auto inst = test::tiny_instance(43, static_cast<std::size_t>(i), 2, 3, 3.0);
        const double exact = exact_mi(inst.pop, inst.prior).value;
        McConfig cfg;
        cfg.j_max = 20000;
        cfg.i_max = 50;
        cfg.seed = 1000 + static_cast<std::uint64_t>(i);
        const auto est = estimate(inst.pop, inst.prior, cfg);
        if (std::abs(est.i_mc - exact) <= 3.0 * est.i_std) ++covered;
    }
    EXPECT_GE(covered, 36);
}

TEST(Oracle, IdenticalColumnsGiveZero)
{
    const PoissonPopulation pop(2, 3, {1, 1, 1, 5, 5, 5});
    EXPECT_NEAR(exact_mi(pop, test::uniform_prior(3)).value, 0.0, 1e-15);
}

TEST(Oracle, NearPerfectBinaryChannel)
{
    const double a = 10.0;
    const PoissonPopulation pop(1, 2, {0.0, a});
    const auto exact = exact_mi(pop, test::uniform_prior(2));
    const double p0 = (1.0 + std::exp(-a)) / 2.0;
    const double closed = std::log(2.0) - p0 * binary_entropy(1.0 / (1.0 + std::exp(-a)));
    EXPECT_NEAR(exact.value, closed, 1e-12);
    EXPECT_GE(exact.value, 0.999 * std::log(2.0));
}

TEST(Oracle, MatchesSingleNeuronDefinition)
{
    for (std::size_t i = 0; i < 20; ++i) {
        const auto inst = test::tiny_instance(44, i, 1, 6, 12.0);
        const auto row = inst.pop.row(0);
        const std::vector<double> rates(row.begin(), row.end());
        EXPECT_NEAR(exact_mi(inst.pop, inst.prior).value, ref_single_neuron_mi(rates, inst.prior), 1e-12);
    }
}

TEST(Oracle, TailToleranceConverged)
{
    for (std::size_t i = 0; i < 20; ++i) {
        const auto inst = test::tiny_instance(45, i);
        const auto loose = exact_mi(inst.pop, inst.prior, 1e-12);
        const auto tight = exact_mi(inst.pop, inst.prior, 1e-14);
        EXPECT_NEAR(loose.value, tight.value, 1e-9);
        // three truncated neurons plus summation rounding
        EXPECT_LE(tight.tail_bound, 1e-13);
    }
}

TEST(Oracle, RefusesLargeInstances)
{
    const PoissonPopulation four(4, 2, std::vector<double>(8, 1.0));
    EXPECT_THROW(exact_mi(four, test::uniform_prior(2)), InstanceTooLarge);
    const PoissonPopulation busy(1, 2, {1.0, 45.0});
    EXPECT_THROW(exact_mi(busy, test::uniform_prior(2)), InstanceTooLarge);
}

TEST(RelativeError, Examples)
{
    McEstimate mc;
    mc.i_mc = 2.0;
    mc.i_std = 0.1;
    EXPECT_EQ(relative_error(2.0, mc).di, 0.0);
    EXPECT_NEAR(relative_error(2.04, mc).di, 0.02, 1e-15);
    EXPECT_NEAR(relative_error(2.0, mc).di_std, 0.05, 1e-15);
    mc.i_mc = 0.0;
    EXPECT_THROW(relative_error(1.0, mc), DomainError);
}

}  // namespace
}  // namespace popinfo
