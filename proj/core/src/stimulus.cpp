#include "popinfo/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "popinfo/errors.hpp"
#include "popinfo/random.hpp"

namespace popinfo {

namespace {

constexpr double kPmfTolerance = 1e-12;

void validate_prior(std::span<const double> prior)
{
    double total = 0.0;
    for (std::size_t m = 0; m < prior.size(); ++m) {
        if (!(prior[m] > 0.0) || !std::isfinite(prior[m])) {
            throw ConfigError("prior entry " + std::to_string(m) + " is not strictly positive");
        }
        total += prior[m];
    }
    if (std::fabs(total - 1.0) > kPmfTolerance) {
        throw ConfigError("prior does not sum to 1 (sum = " + std::to_string(total) + ")");
    }
}

// (a - b) T / d with the integer numerator formed exactly before the single division.
double grid_point(std::size_t index, std::size_t count, double half_range)
{
    const auto num = 2.0 * static_cast<double>(index) - static_cast<double>(count - 1);
    return num * half_range / static_cast<double>(count - 1);
}

}  // namespace

StimulusSpace::StimulusSpace(std::vector<double> coords, std::size_t dim, std::vector<double> prior)
    : dim_(dim), coords_(std::move(coords)), prior_(std::move(prior))
{
    if (dim_ == 0) {
        throw ConfigError("stimulus dimension must be >= 1");
    }
    if (prior_.empty()) {
        throw ConfigError("stimulus space is empty");
    }
    if (coords_.size() != prior_.size() * dim_) {
        throw ConfigError("stimulus coordinates and prior have inconsistent sizes");
    }
    validate_prior(prior_);

    std::vector<std::size_t> order(prior_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
                                            coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (!less(order[i - 1], order[i])) {
            throw ConfigError("stimulus points " + std::to_string(order[i - 1]) + " and " +
                              std::to_string(order[i]) + " coincide");
        }
    }
}

StimulusSpace::StimulusSpace(std::vector<double> points, std::vector<double> prior)
    : StimulusSpace(std::move(points), 1, std::move(prior))
{
}

std::span<const double> StimulusSpace::point(std::size_t m) const
{
    return {coords_.data() + m * dim_, dim_};
}

double StimulusSpace::value(std::size_t m) const
{
    if (dim_ != 1) {
        throw DimensionError("scalar value requested from a multi-dimensional stimulus space");
    }
    return coords_[m];
}

std::vector<double> evenly_spaced_points(std::size_t count, double half_range)
{
    if (count == 0) {
        throw ConfigError("point count must be >= 1");
    }
    if (!(half_range > 0.0)) {
        throw ConfigError("half range must be positive");
    }
    if (count == 1) {
        return {0.0};
    }
    std::vector<double> points(count);
    for (std::size_t m = 0; m < count; ++m) {
        points[m] = grid_point(m, count, half_range);
    }
    return points;
}

std::vector<double> integer_points(std::int64_t first, std::size_t count)
{
    std::vector<double> points(count);
    for (std::size_t m = 0; m < count; ++m) {
        points[m] = static_cast<double>(first + static_cast<std::int64_t>(m));
    }
    return points;
}

std::vector<double> make_prior(const PriorSpec& spec, std::span<const double> points)
{
    const std::size_t count = points.size();
    if (count == 0) {
        throw ConfigError("cannot build a prior over an empty point set");
    }
    if (spec.kind == PriorKind::Uniform) {
        return std::vector<double>(count, 1.0 / static_cast<double>(count));
    }
    if (!(spec.sigma > 0.0)) {
        throw ConfigError("Gaussian prior requires sigma > 0");
    }
    if (spec.kind == PriorKind::HalfGaussian &&
        std::any_of(points.begin(), points.end(), [](double x) { return x < 0.0; })) {
        throw ConfigError("half-Gaussian prior requires a one-sided (nonnegative) point set");
    }

    std::vector<double> prior(count);
    const double scale = 1.0 / (2.0 * spec.sigma * spec.sigma);
    for (std::size_t m = 0; m < count; ++m) {
        prior[m] = std::exp(-points[m] * points[m] * scale);
    }
    const double z = std::accumulate(prior.begin(), prior.end(), 0.0);
    if (!(z > 0.0)) {
        throw ConfigError("Gaussian prior underflows on this point set");
    }
    for (double& p : prior) {
        p /= z;
        if (!(p > 0.0)) {
            throw ConfigError("Gaussian prior underflows to zero on this point set");
        }
    }
    return prior;
}

double entropy(std::span<const double> pmf)
{
    if (pmf.empty()) {
        throw ConfigError("entropy of an empty pmf");
    }
    double total = 0.0;
    double h = 0.0;
    for (double p : pmf) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw ConfigError("pmf has a negative or non-finite entry");
        }
        total += p;
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw ConfigError("pmf does not sum to 1");
    }
    return h;
}

double evaluate(const TuningFunction& tuning, std::size_t m, double x)
{
    struct Visitor {
        std::size_t m;
        double x;
        double operator()(const Heaviside& h) const { return x >= h.center ? h.amplitude : 0.0; }
        double operator()(const RectifiedLinear& r) const { return std::max(0.0, x - r.center); }
        double operator()(const RandomBinary& b) const
        {
            return std::find(b.support.begin(), b.support.end(), m) != b.support.end() ? b.amplitude
                                                                                        : 0.0;
        }
    };
    return std::visit(Visitor{m, x}, tuning);
}

std::vector<double> tuning_centers(std::size_t neurons, double half_range)
{
    if (neurons == 0) {
        throw ConfigError("population needs at least one neuron");
    }
    if (!(half_range > 0.0)) {
        throw ConfigError("half range T must be positive");
    }
    if (neurons == 1) {
        return {0.0};
    }
    std::vector<double> centers(neurons);
    for (std::size_t n = 0; n < neurons; ++n) {
        centers[n] = grid_point(n, neurons, half_range);
    }
    return centers;
}

PoissonPopulation::PoissonPopulation(std::size_t neurons, std::size_t stimuli, std::vector<double> rates)
    : neurons_(neurons), stimuli_(stimuli), rates_(std::move(rates))
{
    if (neurons_ == 0 || stimuli_ == 0) {
        throw ConfigError("population needs N >= 1 and M >= 1");
    }
    if (rates_.size() != neurons_ * stimuli_) {
        throw DimensionError("rate matrix size does not match N x M");
    }
    for (double r : rates_) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw ConfigError("rates must be finite and nonnegative");
        }
    }
}

PoissonPopulation PoissonPopulation::from_tuning(std::span<const TuningFunction> tuning,
                                                 const StimulusSpace& space)
{
    const std::size_t stimuli = space.size();
    std::vector<double> rates(tuning.size() * stimuli);
    for (std::size_t n = 0; n < tuning.size(); ++n) {
        for (std::size_t m = 0; m < stimuli; ++m) {
            rates[n * stimuli + m] = evaluate(tuning[n], m, space.value(m));
        }
    }
    return PoissonPopulation(tuning.size(), stimuli, std::move(rates));
}

PoissonPopulation build_heaviside_population(std::size_t neurons, double half_range,
                                             double amplitude, const StimulusSpace& space)
{
    if (!(amplitude >= 0.0)) {
        throw ConfigError("Heaviside amplitude must be >= 0");
    }
    std::vector<TuningFunction> tuning;
    for (double c : tuning_centers(neurons, half_range)) {
        tuning.emplace_back(Heaviside{c, amplitude});
    }
    return PoissonPopulation::from_tuning(tuning, space);
}

PoissonPopulation build_relu_population(std::size_t neurons, double half_range,
                                        const StimulusSpace& space)
{
    std::vector<TuningFunction> tuning;
    for (double c : tuning_centers(neurons, half_range)) {
        tuning.emplace_back(RectifiedLinear{c});
    }
    return PoissonPopulation::from_tuning(tuning, space);
}

PoissonPopulation build_random_binary_population(std::size_t neurons, std::size_t support_size,
                                                 double amplitude, const StimulusSpace& space,
                                                 std::uint64_t seed)
{
    const std::size_t stimuli = space.size();
    if (neurons == 0) {
        throw ConfigError("population needs at least one neuron");
    }
    if (support_size > stimuli) {
        throw ConfigError("support size K = " + std::to_string(support_size) +
                          " exceeds the number of stimuli M = " + std::to_string(stimuli));
    }
    if (!(amplitude >= 0.0)) {
        throw ConfigError("random-binary amplitude must be >= 0");
    }

    std::vector<double> rates(neurons * stimuli, 0.0);
    std::vector<std::size_t> deck(stimuli);
    for (std::size_t n = 0; n < neurons; ++n) {
        std::iota(deck.begin(), deck.end(), std::size_t{0});
        Substream stream(seed, StreamLane::Population, n);
        for (std::size_t i = 0; i < support_size; ++i) {
            const std::size_t j = i + stream.uniform_index(static_cast<std::uint32_t>(stimuli - i));
            std::swap(deck[i], deck[j]);
            rates[n * stimuli + deck[i]] = amplitude;
        }
    }
    return PoissonPopulation(neurons, stimuli, std::move(rates));
}

}  // namespace popinfo
