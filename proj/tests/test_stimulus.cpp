#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "popinfo/errors.hpp"
#include "popinfo/stimulus.hpp"
#include "support/instances.hpp"

namespace popinfo {
namespace {

StimulusSpace grid21(PriorSpec prior = {})
{
    auto pts = evenly_spaced_points(21, 10.0);
    auto p = make_prior(prior, pts);
    return StimulusSpace(std::move(pts), std::move(p));
}

TEST(Points, EvenlySpacedHitsIntegersExactly)
{
    const auto pts = evenly_spaced_points(21, 10.0);
    ASSERT_EQ(pts.size(), 21u);
    for (int m = 0; m < 21; ++m) {
        EXPECT_EQ(pts[m], -10.0 + m);
    }
    EXPECT_EQ(evenly_spaced_points(1, 10.0), std::vector<double>{0.0});
}

TEST(Points, IntegerRange)
{
    const auto pts = integer_points(1, 1000);
    EXPECT_EQ(pts.front(), 1.0);
    EXPECT_EQ(pts.back(), 1000.0);
}

TEST(StimulusSpace, RejectsBadPriors)
{
    EXPECT_THROW(StimulusSpace({0.0, 1.0}, {0.5, 0.6}), ConfigError);
    EXPECT_THROW(StimulusSpace({0.0, 1.0}, {1.0, 0.0}), ConfigError);
    EXPECT_THROW(StimulusSpace({0.0, 1.0}, {1.0}), ConfigError);
    EXPECT_THROW(StimulusSpace({}, {}), ConfigError);
}

TEST(StimulusSpace, RejectsRepeatedPoints)
{
    EXPECT_THROW(StimulusSpace({1.0, 2.0, 1.0}, {0.25, 0.5, 0.25}), ConfigError);
    EXPECT_THROW(StimulusSpace({0.0, 1.0, 0.0, 1.0}, 2, {0.5, 0.5}), ConfigError);
    EXPECT_NO_THROW(StimulusSpace({0.0, 1.0, 1.0, 0.0}, 2, {0.5, 0.5}));
}

TEST(Prior, UniformIsOneOverM)
{
    const auto space = grid21();
    for (double p : space.prior()) {
        EXPECT_DOUBLE_EQ(p, 1.0 / 21.0);
    }
}

TEST(Prior, GaussianModeAtZero)
{
    const auto space = grid21({PriorKind::Gaussian, 5.0});
    const auto prior = space.prior();
    const auto mode = std::max_element(prior.begin(), prior.end()) - prior.begin();
    EXPECT_EQ(space.value(static_cast<std::size_t>(mode)), 0.0);
    for (std::size_t m = 0; m < 21; ++m) {
        EXPECT_DOUBLE_EQ(prior[m], prior[20 - m]);
    }
}

TEST(Prior, GaussianMatchesDefinition)
{
    const auto pts = evenly_spaced_points(21, 10.0);
    const auto prior = make_prior({PriorKind::Gaussian, 5.0}, pts);
    double z = 0.0;
    for (double x : pts) {
        z += std::exp(-x * x / 50.0);
    }
    for (std::size_t m = 0; m < pts.size(); ++m) {
        EXPECT_NEAR(prior[m], std::exp(-pts[m] * pts[m] / 50.0) / z, 1e-15);
    }
}

TEST(Prior, HalfGaussianNeedsOneSidedPoints)
{
    const auto pts = integer_points(1, 1000);
    const auto prior = make_prior({PriorKind::HalfGaussian, 500.0}, pts);
    EXPECT_GT(prior.front(), prior.back());
    EXPECT_NEAR(std::accumulate(prior.begin(), prior.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(make_prior({PriorKind::HalfGaussian, 500.0}, evenly_spaced_points(21, 10.0)), ConfigError);
}

TEST(Prior, RejectsNonpositiveSigma)
{
    const auto pts = evenly_spaced_points(5, 1.0);
    EXPECT_THROW(make_prior({PriorKind::Gaussian, 0.0}, pts), ConfigError);
    EXPECT_THROW(make_prior({PriorKind::Gaussian, -1.0}, pts), ConfigError);
}

TEST(Prior, AlwaysPositiveAndNormalized)
{
    for (std::size_t m : {1u, 2u, 21u, 1000u}) {
        const auto pts = integer_points(1, m);
        const double sigma = std::max(3.0, m / 3.0);
        for (PriorSpec spec : {PriorSpec{PriorKind::Uniform, 0.0}, PriorSpec{PriorKind::Gaussian, sigma},
                               PriorSpec{PriorKind::HalfGaussian, sigma}}) {
            const auto prior = make_prior(spec, pts);
            EXPECT_NEAR(std::accumulate(prior.begin(), prior.end(), 0.0), 1.0, 1e-12);
            for (double p : prior) {
                EXPECT_GT(p, 0.0);
            }
        }
    }
}

TEST(Entropy, UniformValues)
{
    EXPECT_NEAR(entropy(test::uniform_prior(21)), std::log(21.0), 1e-12);
    EXPECT_NEAR(entropy_bits(test::uniform_prior(21)), 4.392, 5e-4);
    EXPECT_NEAR(entropy_bits(test::uniform_prior(1000)), 9.966, 5e-4);
    EXPECT_EQ(entropy(std::vector<double>{1.0}), 0.0);
}

TEST(Entropy, ShrinksTowardDegenerate)
{
    double previous = INFINITY;
    for (double eps : {1e-1, 1e-3, 1e-6, 1e-9}) {
        std::vector<double> p(10, eps / 9.0);
        p[0] = 1.0 - eps;
        const double h = entropy(p);
        EXPECT_GE(h, 0.0);
        EXPECT_LT(h, previous);
        previous = h;
    }
    EXPECT_LT(previous, 1e-7);
}

TEST(Entropy, RejectsNonPmf)
{
    EXPECT_THROW(entropy(std::vector<double>{0.5, 0.6}), ConfigError);
    EXPECT_THROW(entropy(std::vector<double>{-0.1, 1.1}), ConfigError);
}

TEST(Centers, SymmetricAboutZero)
{
    for (std::size_t n : {1u, 2u, 3u, 10u, 14u, 1000u}) {
        const auto c = tuning_centers(n, 10.0);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(c[k] + c[n - 1 - k], 0.0, 1e-12);
        }
    }
    EXPECT_EQ(tuning_centers(2, 10.0), (std::vector<double>{-10.0, 10.0}));
    EXPECT_THROW(tuning_centers(3, 0.0), ConfigError);
    EXPECT_THROW(tuning_centers(0, 1.0), ConfigError);
}

TEST(Heaviside, SingleNeuronAtCenterZero)
{
    const auto space = grid21();
    const auto pop = build_heaviside_population(1, 10.0, 10.0, space);
    EXPECT_EQ(pop.rate(0, 10), 10.0);  // x = 0
    EXPECT_EQ(pop.rate(0, 9), 0.0);    // x = -1
}

TEST(Heaviside, ThreeNeuronsLeftEdge)
{
    const auto space = grid21();
    const auto pop = build_heaviside_population(3, 10.0, 10.0, space);
    EXPECT_EQ(pop.rate(0, 0), 10.0);
    EXPECT_EQ(pop.rate(1, 0), 0.0);
    EXPECT_EQ(pop.rate(2, 0), 0.0);
}

TEST(Heaviside, TwoValuedRates)
{
    const auto space = grid21();
    const auto pop = build_heaviside_population(14, 10.0, 10.0, space);
    for (double r : pop.rates()) {
        EXPECT_TRUE(r == 0.0 || r == 10.0);
    }
}

TEST(Relu, Examples)
{
    const auto space = grid21();
    const auto one = build_relu_population(1, 10.0, space);
    EXPECT_EQ(one.rate(0, 15), 5.0);  // x = 5
    EXPECT_EQ(one.rate(0, 5), 0.0);   // x = -5
    const auto three = build_relu_population(3, 10.0, space);
    EXPECT_EQ(three.rate(0, 20), 20.0);
    EXPECT_EQ(three.rate(1, 20), 10.0);
    EXPECT_EQ(three.rate(2, 20), 0.0);
}

TEST(RandomBinary, ExactlyKEntriesPerRow)
{
    const auto pts = integer_points(1, 1000);
    const StimulusSpace space(pts, test::uniform_prior(1000));
    const auto pop = build_random_binary_population(50, 10, 10.0, space, 99);
    for (std::size_t n = 0; n < 50; ++n) {
        const auto row = pop.row(n);
        EXPECT_EQ(std::count(row.begin(), row.end(), 10.0), 10);
        EXPECT_EQ(std::count(row.begin(), row.end(), 0.0), 990);
    }
}

TEST(RandomBinary, FullSupportIsConstant)
{
    const StimulusSpace space(integer_points(1, 12), test::uniform_prior(12));
    const auto pop = build_random_binary_population(5, 12, 3.0, space, 1);
    for (double r : pop.rates()) {
        EXPECT_EQ(r, 3.0);
    }
}

TEST(RandomBinary, DeterministicAndPrefixStable)
{
    const StimulusSpace space(integer_points(1, 100), test::uniform_prior(100));
    const auto a = build_random_binary_population(20, 10, 10.0, space, 5);
    const auto b = build_random_binary_population(20, 10, 10.0, space, 5);
    const auto small = build_random_binary_population(7, 10, 10.0, space, 5);
    const auto other = build_random_binary_population(20, 10, 10.0, space, 6);
    EXPECT_TRUE(std::equal(a.rates().begin(), a.rates().end(), b.rates().begin()));
    EXPECT_TRUE(std::equal(small.rates().begin(), small.rates().end(), a.rates().begin()));
    EXPECT_FALSE(std::equal(a.rates().begin(), a.rates().end(), other.rates().begin()));
}

TEST(RandomBinary, RejectsOversizedSupport)
{
    const StimulusSpace space(integer_points(1, 5), test::uniform_prior(5));
    EXPECT_THROW(build_random_binary_population(2, 6, 1.0, space, 0), ConfigError);
}

TEST(Population, RejectsBadRates)
{
    EXPECT_THROW(PoissonPopulation(1, 2, {1.0, -1.0}), ConfigError);
    EXPECT_THROW(PoissonPopulation(1, 2, {1.0, INFINITY}), ConfigError);
    EXPECT_THROW(PoissonPopulation(1, 2, {1.0}), DimensionError);
    EXPECT_THROW(PoissonPopulation(0, 0, {}), ConfigError);
}

}  // namespace
}  // namespace popinfo
