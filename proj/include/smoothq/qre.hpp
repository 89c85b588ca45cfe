#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothq/game.hpp"

namespace smoothq {

enum class Stability { stable, unstable, indeterminate };

std::string to_string(Stability s);

struct QREPoint {
  Profile profile;
  std::vector<double> deltas;
  double residual = 0.0;
  std::optional<Stability> stability;
  /// Set by qre_2x2_roots when the scalar reduction is nearly tangent at the root.
  bool degenerate = false;
};

/// max_{k,i} |x_ki - softmax_i(r_k(x) / delta_k)|. Requires delta_k > 0.
double qre_residual(const NormalFormGame& game, std::span<const double> deltas,
                    const Profile& profile);

enum class QreMethod { damped, newton };

struct QreOptions {
  QreMethod method = QreMethod::damped;
  double damping = 0.5;  // theta in x <- (1 - theta) x + theta softmax(r / delta)
  double tolerance = 1e-10;
  std::size_t max_iterations = 200000;
};

/// Finds the QRE reached from `seed`. Damped iteration converges to stable
/// equilibria only; Newton (in log-ratio coordinates) also reaches saddles.
/// Throws ConvergenceError at the iteration cap.
QREPoint solve_qre(const NormalFormGame& game, std::span<const double> deltas, const Profile& seed,
                   const QreOptions& options = {});

/// Runs both methods from a grid of seeds (grid_size points per log-ratio
/// axis, spanning +-seed_span) and returns the distinct roots with residual
/// below `accept`, sorted by the first player's first probability.
std::vector<QREPoint> solve_qre_multistart(const NormalFormGame& game,
                                           std::span<const double> deltas,
                                           std::size_t grid_size = 13, double seed_span = 40.0,
                                           double accept = 1e-10);

struct RootScanOptions {
  /// Finest subdivision of the logit interval, as a fraction of its length.
  double resolution = 1e-5;
  /// |G'| below this marks a root as degenerate.
  double tangency = 1e-6;
};

/// All QRE of a 2x2 game from the scalar reduction
///   x = sigma(c1 (y - y_mix)),  y = sigma(c2 (x - x_mix)),  c1 = k1 / delta_x, c2 = k2 / delta_y,
/// solved as G(s) = c1 (sigma(c2 (sigma(s) - x_mix)) - y_mix) - s = 0 in s = logit(x).
/// Internally uses logit(x) = (k1 y - lambda1) / delta_x so k1 = 0 or k2 = 0 also work.
/// Roots are bracketed by certified subdivision (a Lipschitz bound on G rules
/// out roots in an interval) and refined by bisection. Sorted by x.
std::vector<QREPoint> qre_2x2_roots(const CoordinationFacts& facts, double delta_x, double delta_y,
                                    const RootScanOptions& options = {});

/// Linearization of the SQL field (beta = 1, alpha = delta) in log-ratio
/// coordinates by central differences with step 1e-6. Indeterminate when some
/// eigenvalue has |Re| < 1e-6.
Stability stability_of(const NormalFormGame& game, std::span<const double> deltas,
                       const QREPoint& point);

struct RegionCheck {
  /// False when the locus result does not apply (not a coordination game, or
  /// x_mix + y_mix = 1).
  bool covered = false;
  bool allowed = true;
  /// "lower_left", "middle", "upper_right" or "excluded", in the frame after
  /// relabeling actions (x_mix + y_mix < 1) and swapping players (x_mix <= 1/2).
  std::string region;
  /// 1 when both mixed probabilities exceed 1/2 in that frame, 2 otherwise.
  int locus_case = 0;
};

/// Where a 2x2 QRE (x = P1(a1), y = P2(a1)) lies relative to the allowed
/// regions of the QRE locus in coordination games. `slack` widens every
/// region boundary.
RegionCheck region_check(const CoordinationFacts& facts, double x, double y, double slack = 1e-9);

}  // namespace smoothq
