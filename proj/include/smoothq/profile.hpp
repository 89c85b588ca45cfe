#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smoothq {

/// Probabilities below this are treated as numerically zero by every
/// operation that needs logarithms of choice probabilities.
inline constexpr double kProbabilityFloor = 1e-12;

using MixedStrategy = std::vector<double>;
using Profile = std::vector<MixedStrategy>;

enum class Interior {
  strict,    // every component >= kProbabilityFloor
  clamped,   // some component in (0, kProbabilityFloor); logs are floored
  boundary,  // some component <= 0 or non-finite
};

Interior classify_interior(const Profile& profile);

/// ln(max(p, kProbabilityFloor)).
double floored_log(double p);

Profile uniform_profile(std::span<const std::size_t> action_counts);

/// exp(scale * z_i) / sum_j exp(scale * z_j), computed with max-subtraction.
MixedStrategy softmax(std::span<const double> z, double scale = 1.0);

double log_sum_exp(std::span<const double> z);

/// Log-ratio chart of the simplex: y_i = ln(x_i / x_n) for i < n.
std::vector<double> to_log_ratio(std::span<const double> x);

/// Inverse chart: appends y_n = 0 and normalizes exp(y).
MixedStrategy from_log_ratio(std::span<const double> y);

double dot(std::span<const double> a, std::span<const double> b);

/// Max-norm distance between two profiles of equal shape.
double max_abs_diff(const Profile& a, const Profile& b);

}  // namespace smoothq
