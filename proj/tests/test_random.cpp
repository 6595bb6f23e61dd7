#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "popinfo/random.hpp"
#include "support/instances.hpp"

namespace popinfo {
namespace {

// Known-answer vectors published with Random123 (kat_vectors, philox4x32 R=10).
TEST(Philox, KnownAnswerZero)
{
    const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes)
{
    const auto out = Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi)
{
    const auto out = Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Substream, SameAddressReproduces)
{
    Substream a(7, StreamLane::Response, 12345, 3);
    Substream b(7, StreamLane::Response, 12345, 3);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(Substream, DistinctAddressesDiffer)
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t j = 0; j < 50; ++j) {
        for (std::uint32_t sub = 0; sub < 4; ++sub) {
            Substream s(7, StreamLane::Response, j, sub);
            firsts.insert(s.next_u64());
        }
    }
    Substream other_lane(7, StreamLane::Stimulus, 0);
    firsts.insert(other_lane.next_u64());
    Substream other_seed(8, StreamLane::Response, 0);
    firsts.insert(other_seed.next_u64());
    EXPECT_EQ(firsts.size(), 202u);
}

TEST(Substream, UniformIsOpenUnitInterval)
{
    Substream s(1, StreamLane::Test, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_LT(lo, 1e-4);
    EXPECT_GT(hi, 1.0 - 1e-4);
}

TEST(Substream, UniformIndexCoversRangeEvenly)
{
    Substream s(2, StreamLane::Test, 0);
    const std::uint32_t bound = 7;
    std::vector<int> counts(bound, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto k = s.uniform_index(bound);
        ASSERT_LT(k, bound);
        ++counts[k];
    }
    for (int c : counts) {
        EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
    }
}

TEST(DeriveSeed, DependsOnEveryArgument)
{
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
}

TEST(PoissonSampler, ZeroMeanGivesZero)
{
    Substream s(3, StreamLane::Test, 0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_poisson(0.0, s), 0u);
    }
}

class PoissonMoments : public ::testing::TestWithParam<double> {};

TEST_P(PoissonMoments, MeanAndVarianceMatch)
{
    const double mean = GetParam();
    Substream s(4, StreamLane::Test, static_cast<std::uint64_t>(mean * 1000));
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = sample_poisson(mean, s);
        sum += r;
        sq += r * r;
    }
    const double m = sum / n;
    const double var = sq / n - m * m;
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n));
    // var of the sample variance is about (mu + 2 mu^2) / n for Poisson
    EXPECT_NEAR(var, mean, 5.0 * std::sqrt((mean + 2.0 * mean * mean) / n));
}

INSTANTIATE_TEST_SUITE_P(BothBranches, PoissonMoments, ::testing::Values(0.05, 0.7, 3.0, 9.99, 10.0, 17.5, 60.0, 400.0));

class PoissonFrequencies : public ::testing::TestWithParam<double> {};

// Pearson chi-square against the exact pmf over cells with expected count >= 20.
TEST_P(PoissonFrequencies, MatchPmf)
{
    const double mean = GetParam();
    Substream s(5, StreamLane::Test, static_cast<std::uint64_t>(mean * 1000));
    const int n = 300000;
    std::vector<double> counts(static_cast<std::size_t>(mean * 4 + 60), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto r = sample_poisson(mean, s);
        if (r < counts.size()) {
            counts[r] += 1.0;
        }
    }
    double chi2 = 0.0;
    int cells = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) {
        const double expected = n * std::exp(test::ref_log_pmf(r, mean));
        if (expected < 20.0) {
            continue;
        }
        chi2 += (counts[r] - expected) * (counts[r] - expected) / expected;
        ++cells;
    }
    ASSERT_GT(cells, 3);
    // Mean cells-1, sd sqrt(2(cells-1)); 6 sd is far in the tail.
    EXPECT_LT(chi2, cells - 1 + 6.0 * std::sqrt(2.0 * (cells - 1)));
}

INSTANTIATE_TEST_SUITE_P(BothBranches, PoissonFrequencies, ::testing::Values(1.5, 4.0, 9.5, 10.0, 15.0, 42.0));

}  // namespace
}  // namespace popinfo
