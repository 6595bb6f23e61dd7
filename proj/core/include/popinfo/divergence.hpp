#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "popinfo/stimulus.hpp"

namespace popinfo {

enum class DivergenceKind {
    KL,                   ///< D(m || m^)
    ChernoffCoefficient,  ///< beta * D_beta(m || m^) = -ln sum_r p^(1-beta) q^beta
    Bhattacharyya,        ///< ChernoffCoefficient at beta = 1/2
    ChernoffInformation,  ///< max over beta of beta * D_beta
};

std::string_view to_string(DivergenceKind kind);

/// Square M x M matrix of divergences in nats. Entries are in [0, +inf];
/// +inf is stored as IEEE infinity and the diagonal is exactly 0.
class DivergenceMatrix {
public:
    /// `beta` is meaningful for the Chernoff kinds only (NaN otherwise).
    DivergenceMatrix(std::size_t size, DivergenceKind kind, double beta, std::vector<double> entries);

    std::size_t size() const { return size_; }
    DivergenceKind kind() const { return kind_; }
    double beta() const { return beta_; }
    double operator()(std::size_t m, std::size_t mh) const { return entries_[m * size_ + mh]; }
    std::span<const double> entries() const { return entries_; }
    std::span<const double> row(std::size_t m) const { return {entries_.data() + m * size_, size_}; }

    /// Row-major CSV, full precision, "inf" for +inf.
    void write_csv(std::ostream& out) const;

private:
    std::size_t size_;
    DivergenceKind kind_;
    double beta_;
    std::vector<double> entries_;
};

/// Closed-form Poisson KL: sum_n [a ln(a/b) + b - a], a = rate(n,m), b = rate(n,m^).
/// A term is 0 when a == 0 and +inf when a > 0, b == 0.
DivergenceMatrix kl_matrix(const PoissonPopulation& pop);

/// beta * D_beta for every ordered pair:
/// sum_n [(1-beta) a + beta b - a^(1-beta) b^beta]. Throws DomainError unless 0 < beta < 1.
DivergenceMatrix chernoff_coefficient_matrix(const PoissonPopulation& pop, double beta);

/// Chernoff coefficient matrix at beta = 1/2; exactly symmetric.
DivergenceMatrix bhattacharyya_matrix(const PoissonPopulation& pop);

double kl_divergence(const PoissonPopulation& pop, std::size_t m, std::size_t mh);
double chernoff_coefficient(const PoissonPopulation& pop, std::size_t m, std::size_t mh, double beta);

/// Squared Hellinger distance 1 - exp(-B), B the Bhattacharyya distance.
double hellinger_sq(const PoissonPopulation& pop, std::size_t m, std::size_t mh);

inline constexpr double kChernoffBetaMin = 1e-6;
inline constexpr double kChernoffBetaMax = 1.0 - 1e-6;

struct ChernoffInformation {
    double value = 0.0;
    /// Maximizing beta; empty when the objective is non-finite everywhere.
    std::optional<double> beta;
    /// True when the maximizer sits on the search clamp [1e-6, 1 - 1e-6].
    bool clamped = false;
};

/// Maximizes the concave g(beta) = beta D_beta over [1e-6, 1 - 1e-6]. The bracket is
/// shrunk on the sign of dg/dbeta until it is narrower than `tol`, so the returned beta
/// is within tol of the argmax.
ChernoffInformation chernoff_information(const PoissonPopulation& pop, std::size_t m,
                                         std::size_t mh, double tol);

/// Row-major M x M records of chernoff_information for every ordered pair
/// (diagonal: value 0, beta empty).
std::vector<ChernoffInformation> chernoff_information_records(const PoissonPopulation& pop, double tol);

/// Symmetric matrix of Chernoff information values.
DivergenceMatrix chernoff_information_matrix(const PoissonPopulation& pop, double tol);

/// Direct summation over two explicit pmfs on a common support.
/// KL: sum p ln(p/q). ChernoffCoefficient / Bhattacharyya: -ln sum p^(1-beta) q^beta.
/// Throws DimensionError on mismatched supports.
double brute_force_divergence(std::span<const double> p, std::span<const double> q,
                              DivergenceKind kind, double beta = 0.5);

/// Smallest r_max such that P(R > r_max) < tail_mass for R ~ Poisson(rate).
std::size_t poisson_truncation_point(double rate, double tail_mass);

/// Poisson pmf for r = 0..r_max.
std::vector<double> poisson_pmf(double rate, std::size_t r_max);

/// Product pmf of independent Poisson counts with the given rates, each truncated
/// at r_max[n]. Enumeration order is mixed-radix with neuron 0 varying fastest.
std::vector<double> poisson_product_pmf(std::span<const double> rates,
                                        std::span<const std::size_t> r_max);

}  // namespace popinfo
