#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace popinfo {

inline constexpr double kLn2 = std::numbers::ln2;
/// Exponent scale used by I_e, I_d and I_D.
inline constexpr double kInvE = 1.0 / std::numbers::e;

inline double nats_to_bits(double nats) { return nats / kLn2; }

/// Pairwise (cascade) summation with a fixed reduction tree, so the result
/// depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

/// Mean computed as `shift + sum(v - shift) / n` with `shift = values[0]`.
/// Exact when all values are equal.
double shifted_mean(std::span<const double> values);

/// exp(-x) with exp(-inf) == 0.
inline double exp_neg(double x) { return std::isinf(x) && x > 0 ? 0.0 : std::exp(-x); }

}  // namespace popinfo
