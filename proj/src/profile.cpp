#include "smoothq/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smoothq/errors.hpp"

namespace smoothq {

Interior classify_interior(const Profile& profile) {
  Interior status = Interior::strict;
  for (const auto& xk : profile) {
    for (double p : xk) {
      if (!std::isfinite(p) || p <= 0.0) return Interior::boundary;
      if (p < kProbabilityFloor) status = Interior::clamped;
    }
  }
  return status;
}

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

Profile uniform_profile(std::span<const std::size_t> action_counts) {
  Profile out;
  out.reserve(action_counts.size());
  for (std::size_t n : action_counts) {
    if (n == 0) throw ConfigError("uniform_profile: zero actions");
    out.emplace_back(n, 1.0 / static_cast<double>(n));
  }
  return out;
}

MixedStrategy softmax(std::span<const double> z, double scale) {
  if (z.empty()) throw ConfigError("softmax: empty input");
  MixedStrategy out(z.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double v : z) top = std::max(top, scale * v);
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(scale * z[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double log_sum_exp(std::span<const double> z) {
  if (z.empty()) throw ConfigError("log_sum_exp: empty input");
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - top);
  return top + std::log(total);
}

std::vector<double> to_log_ratio(std::span<const double> x) {
  if (x.empty()) throw ConfigError("to_log_ratio: empty input");
  const double last = x.back();
  if (!(last > 0.0)) throw DomainError("to_log_ratio: last component must be positive");
  std::vector<double> y(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("to_log_ratio: components must be positive");
    y[i] = std::log(x[i] / last);
  }
  return y;
}

MixedStrategy from_log_ratio(std::span<const double> y) {
  std::vector<double> z(y.begin(), y.end());
  z.push_back(0.0);
  return softmax(z);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs_diff(const Profile& a, const Profile& b) {
  if (a.size() != b.size()) throw ConfigError("max_abs_diff: player count mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) throw ConfigError("max_abs_diff: action count mismatch");
    for (std::size_t i = 0; i < a[k].size(); ++i) worst = std::max(worst, std::abs(a[k][i] - b[k][i]));
  }
  return worst;
}

}  // namespace smoothq
