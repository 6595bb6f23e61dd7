#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "popinfo/divergence.hpp"
#include "popinfo/stimulus.hpp"

namespace popinfo {

inline constexpr double kDefaultZeroTol = 1e-12;
inline constexpr double kDefaultTieTol = 1e-9;

/// Per-stimulus neighbourhoods derived from one divergence matrix.
///  aliases[m]:  m^ != m with divergence <= zero_tol
///  nearest[m]:  non-aliases attaining the minimal finite divergence (relative tie_tol)
///  combined[m]: sorted union of the two; never contains m
struct NeighborSets {
    DivergenceKind kind = DivergenceKind::KL;
    double beta = 0.0;
    std::vector<std::vector<std::size_t>> aliases;
    std::vector<std::vector<std::size_t>> nearest;
    std::vector<std::vector<std::size_t>> combined;

    std::size_t size() const { return combined.size(); }
};

NeighborSets neighbor_sets(const DivergenceMatrix& div, double zero_tol = kDefaultZeroTol,
                           double tie_tol = kDefaultTieTol);

// Full-sum approximations and bounds. All return nats and include H(X).

/// Upper bound: exponent D.
double i_u(const DivergenceMatrix& kl, std::span<const double> prior);
/// Approximation: exponent e^-1 D.
double i_e(const DivergenceMatrix& kl, std::span<const double> prior);
/// Lower bound from a Chernoff-coefficient (or Bhattacharyya) matrix; beta is the matrix's.
double i_beta_alpha(const DivergenceMatrix& chernoff, std::span<const double> prior, double alpha);

// Restricted sums over the combined neighbour sets, with the self term as the leading 1.

double i_d(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior);
double i_u_d(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior);
double i_beta_alpha_d(const DivergenceMatrix& chernoff, const NeighborSets& sets,
                      std::span<const double> prior, double alpha);
/// As i_d without the prior ratio inside the sum.
double i_D(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior);
/// First-order Taylor form of i_D: -sum_m p_m sum_{m^ in M_m} exp(-D/e) + H(X).
double i_D0(const DivergenceMatrix& kl, const NeighborSets& sets, std::span<const double> prior);

/// h_c + H(X): full double sum with exp(-C(m||m^)), C the Chernoff information.
double h_c_bound(const PoissonPopulation& pop, std::span<const double> prior, double tol);
/// Same, from a precomputed Chernoff-information matrix.
double h_c_bound(const DivergenceMatrix& chernoff_information, std::span<const double> prior);

/// The only reading of the h_d exponent implemented: beta_m * D_beta(m||m^), with beta_m
/// the per-pair Chernoff maximizer and D_beta the Renyi-type divergence at a fixed
/// user-supplied beta. No ordering against h_c is claimed.
enum class HdInterpretation { MaximizerTimesFixedOrder };

/// h_d + H(X) under the given interpretation.
double h_d_bound(const PoissonPopulation& pop, std::span<const double> prior, double beta,
                 double tol, HdInterpretation interpretation = HdInterpretation::MaximizerTimesFixedOrder);

/// Names accepted in configurations and reports.
enum class Metric { IU, IE, IBetaAlpha, ID, IUD, IBetaAlphaD, IDD, ID0, HcPlusH, HX };

std::string_view metric_name(Metric metric);
/// Throws ConfigError for unknown names.
Metric parse_metric(std::string_view name);
const std::vector<Metric>& all_metrics();

struct MetricValue {
    std::string name;
    double nats = 0.0;
    double bits() const;
};

/// Named metric values plus a fingerprint of the configuration that produced them.
struct MetricReport {
    std::vector<MetricValue> values;
    std::string fingerprint;

    /// Throws std::out_of_range when absent.
    const MetricValue& at(std::string_view name) const;
    bool contains(std::string_view name) const;

    /// {"fingerprint": ..., "metrics": {name: {"nats": x, "bits": y}}}
    std::string to_json() const;
    /// One header line and one data row with <name>_nats,<name>_bits columns.
    void write_csv(std::ostream& out) const;
};

struct MetricOptions {
    double beta = 0.5;
    double alpha = 1.0;
    double zero_tol = kDefaultZeroTol;
    double tie_tol = kDefaultTieTol;
    double chernoff_tol = 1e-10;
};

/// Evaluates the requested metrics on one population. Every stored value is finite.
MetricReport compute_metrics(const PoissonPopulation& pop, std::span<const double> prior,
                             std::span<const Metric> metrics, const MetricOptions& options,
                             std::string fingerprint = {});

}  // namespace popinfo
