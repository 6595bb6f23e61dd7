#include "popinfo/numeric.hpp"

#include <vector>

namespace popinfo {

namespace {
constexpr std::size_t kPairwiseBlock = 128;

double pairwise_impl(const double* v, std::size_t n)
{
    if (n <= kPairwiseBlock) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += v[i];
        }
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_impl(v, half) + pairwise_impl(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values)
{
    return pairwise_impl(values.data(), values.size());
}

double shifted_mean(std::span<const double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const double shift = values.front();
    std::vector<double> centered(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        centered[i] = values[i] - shift;
    }
    return shift + pairwise_sum(centered) / static_cast<double>(values.size());
}

}  // namespace popinfo
