#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "popinfo/stimulus.hpp"

namespace popinfo {

struct McConfig {
    std::size_t j_max = 100000;  ///< samples
    std::size_t i_max = 100;     ///< bootstrap replicates
    std::uint64_t seed = 0;
    unsigned threads = 0;        ///< 0: hardware concurrency; results do not depend on it
    double oracle_tail_tol = 1e-14;
};

struct McEstimate {
    double i_mc_star = 0.0;  ///< plain sample mean of the information terms
    double i_mc = 0.0;       ///< mean of bootstrap replicate means
    double i_std = 0.0;      ///< population std of replicate means
    std::vector<double> terms;
    std::uint64_t seed = 0;
    std::size_t j_max = 0;
    std::size_t i_max = 0;
};

/// t_j = ln p(r_j|x_j) - ln p(r_j) for x_j ~ prior and r_j ~ Poisson(rates of x_j).
/// Sample j draws from substreams addressed by (seed, j) and (seed, j, n).
std::vector<double> sample_information_terms(const PoissonPopulation& pop, std::span<const double> prior,
                                             const McConfig& cfg);

/// Bootstrap over cached terms: i_max replicates of j_max indices drawn uniformly with
/// replacement from the (seed, i) substream.
McEstimate bootstrap_terms(std::vector<double> terms, std::size_t i_max, std::uint64_t seed,
                           unsigned threads = 0);

McEstimate estimate(const PoissonPopulation& pop, std::span<const double> prior, const McConfig& cfg);

struct ExactMi {
    double value = 0.0;
    /// Largest probability mass dropped by truncation for any stimulus.
    double tail_bound = 0.0;
    std::vector<std::size_t> r_max;
};

inline constexpr std::size_t kOracleMaxNeurons = 3;
inline constexpr std::size_t kOracleMaxSupport = 64;

/// Exact mutual information by enumerating all response vectors, each neuron truncated where
/// its Poisson tail mass drops below tail_tol. Throws InstanceTooLarge for N > 3 or a
/// per-neuron support above 64.
ExactMi exact_mi(const PoissonPopulation& pop, std::span<const double> prior, double tail_tol = 1e-14);

struct RelativeError {
    double di = 0.0;      ///< (metric - I_MC) / I_MC
    double di_std = 0.0;  ///< I_std / I_MC
};

/// Throws DomainError when I_MC == 0.
RelativeError relative_error(double metric, const McEstimate& mc);

}  // namespace popinfo
