#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "popinfo/numeric.hpp"

namespace popinfo {

/// M distinct stimulus points (each a K-vector) with a strictly positive prior pmf.
class StimulusSpace {
public:
    /// `coords` holds M*dim values, point-major. Throws ConfigError on an
    /// empty set, repeated points, or a prior that is not a strictly positive pmf.
    StimulusSpace(std::vector<double> coords, std::size_t dim, std::vector<double> prior);

    /// One-dimensional convenience constructor.
    StimulusSpace(std::vector<double> points, std::vector<double> prior);

    std::size_t size() const { return prior_.size(); }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t m) const;
    /// Scalar value of point m; only valid for dim() == 1.
    double value(std::size_t m) const;
    std::span<const double> coords() const { return coords_; }
    std::span<const double> prior() const { return prior_; }

private:
    std::size_t dim_;
    std::vector<double> coords_;
    std::vector<double> prior_;
};

/// x_m = 2(m-1)T/(M-1) - T for m = 1..M (a single point 0 when M == 1).
std::vector<double> evenly_spaced_points(std::size_t count, double half_range);

/// first, first+1, ..., first+count-1.
std::vector<double> integer_points(std::int64_t first, std::size_t count);

enum class PriorKind { Uniform, Gaussian, HalfGaussian };

struct PriorSpec {
    PriorKind kind = PriorKind::Uniform;
    double sigma = 0.0;
};

/// Discrete prior over 1-D points. Gaussian kinds use Z^-1 exp(-x^2 / (2 sigma^2));
/// HalfGaussian additionally requires a one-sided (nonnegative) point set.
std::vector<double> make_prior(const PriorSpec& spec, std::span<const double> points);

/// Shannon entropy in nats with 0 ln 0 = 0. Throws ConfigError if `pmf` is not a pmf.
double entropy(std::span<const double> pmf);
inline double entropy_bits(std::span<const double> pmf) { return nats_to_bits(entropy(pmf)); }

struct Heaviside {
    double center = 0.0;
    double amplitude = 0.0;
};

struct RectifiedLinear {
    double center = 0.0;
};

/// Responds with `amplitude` on a fixed set of stimulus indices, 0 elsewhere.
struct RandomBinary {
    std::vector<std::size_t> support;
    double amplitude = 0.0;
};

using TuningFunction = std::variant<Heaviside, RectifiedLinear, RandomBinary>;

/// Mean spike count of a tuning function at stimulus index m with value x.
double evaluate(const TuningFunction& tuning, std::size_t m, double x);

/// theta_n = (n-1) 2T/(N-1) - T for N >= 2, and {0} for N == 1.
std::vector<double> tuning_centers(std::size_t neurons, double half_range);

/// N x M nonnegative mean spike counts of conditionally independent Poisson neurons.
class PoissonPopulation {
public:
    /// `rates` is neuron-major: rates[n * stimuli + m].
    PoissonPopulation(std::size_t neurons, std::size_t stimuli, std::vector<double> rates);

    static PoissonPopulation from_tuning(std::span<const TuningFunction> tuning,
                                         const StimulusSpace& space);

    std::size_t neurons() const { return neurons_; }
    std::size_t stimuli() const { return stimuli_; }
    double rate(std::size_t n, std::size_t m) const { return rates_[n * stimuli_ + m]; }
    std::span<const double> row(std::size_t n) const
    {
        return {rates_.data() + n * stimuli_, stimuli_};
    }
    std::span<const double> rates() const { return rates_; }

private:
    std::size_t neurons_;
    std::size_t stimuli_;
    std::vector<double> rates_;
};

PoissonPopulation build_heaviside_population(std::size_t neurons, double half_range,
                                             double amplitude, const StimulusSpace& space);

PoissonPopulation build_relu_population(std::size_t neurons, double half_range,
                                        const StimulusSpace& space);

/// Each neuron responds with `amplitude` on `support_size` distinct stimulus indices
/// drawn by a partial Fisher-Yates shuffle from its own (seed, n) substream.
PoissonPopulation build_random_binary_population(std::size_t neurons, std::size_t support_size,
                                                 double amplitude, const StimulusSpace& space,
                                                 std::uint64_t seed);

}  // namespace popinfo
