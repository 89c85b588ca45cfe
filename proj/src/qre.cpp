#include "smoothq/qre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_deltas(const NormalFormGame& game, std::span<const double> deltas) {
  if (deltas.size() != game.num_players()) throw ConfigError("one exploration rate per player is required");
  for (double d : deltas) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("QRE needs positive, finite exploration rates");
  }
}

Profile logit_response(const NormalFormGame& game, std::span<const double> deltas,
                       const Profile& profile) {
  const auto r = reward_vectors(game, profile);
  Profile out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = softmax(r[k], 1.0 / deltas[k]);
  return out;
}

std::size_t chart_dim(const NormalFormGame& game) {
  std::size_t d = 0;
  for (std::size_t n : game.action_counts()) d += n - 1;
  return d;
}

Profile chart_to_profile(const NormalFormGame& game, const Eigen::VectorXd& y) {
  Profile x;
  std::size_t offset = 0;
  for (std::size_t n : game.action_counts()) {
    x.push_back(from_log_ratio(std::span<const double>(y.data() + offset, n - 1)));
    offset += n - 1;
  }
  return x;
}

Eigen::VectorXd profile_to_chart(const NormalFormGame& game, const Profile& x) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(chart_dim(game)));
  Eigen::Index offset = 0;
  for (const auto& xk : x) {
    std::vector<double> clipped(xk.size());
    for (std::size_t i = 0; i < xk.size(); ++i) clipped[i] = std::max(xk[i], kProbabilityFloor);
    for (double v : to_log_ratio(clipped)) y[offset++] = v;
  }
  return y;
}

// QRE equation y_ki - (r_ki - r_kn) / delta_k in log-ratio coordinates, or
// with field = true the SQL field for beta = 1, alpha = delta.
Eigen::VectorXd chart_equation(const NormalFormGame& game, std::span<const double> deltas,
                               const Eigen::VectorXd& y, bool field) {
  const Profile x = chart_to_profile(game, y);
  const auto r = reward_vectors(game, x);
  Eigen::VectorXd out(y.size());
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double last = r[k].back();
    for (std::size_t i = 0; i + 1 < r[k].size(); ++i, ++idx) {
      out[idx] = field ? (r[k][i] - last) - deltas[k] * y[idx] : y[idx] - (r[k][i] - last) / deltas[k];
    }
  }
  return out;
}

Eigen::MatrixXd chart_jacobian(const NormalFormGame& game, std::span<const double> deltas,
                               const Eigen::VectorXd& y, bool field, double h) {
  const Eigen::Index d = y.size();
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd plus = y, minus = y;
    plus[j] += h;
    minus[j] -= h;
    jac.col(j) = (chart_equation(game, deltas, plus, field) - chart_equation(game, deltas, minus, field)) / (2 * h);
  }
  return jac;
}

QREPoint make_point(const NormalFormGame& game, std::span<const double> deltas, Profile x) {
  QREPoint p;
  p.residual = qre_residual(game, deltas, x);
  p.profile = std::move(x);
  p.deltas.assign(deltas.begin(), deltas.end());
  return p;
}

QREPoint solve_damped(const NormalFormGame& game, std::span<const double> deltas, Profile x,
                      const QreOptions& options) {
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Profile target = logit_response(game, deltas, x);
    residual = max_abs_diff(x, target);
    if (residual < options.tolerance) return make_point(game, deltas, std::move(x));
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (std::size_t i = 0; i < x[k].size(); ++i) {
        x[k][i] = (1.0 - options.damping) * x[k][i] + options.damping * target[k][i];
      }
    }
  }
  throw ConvergenceError("damped QRE iteration did not converge",
                         static_cast<double>(options.max_iterations), x, residual);
}

QREPoint solve_newton(const NormalFormGame& game, std::span<const double> deltas, const Profile& seed,
                      const QreOptions& options) {
  Eigen::VectorXd y = profile_to_chart(game, seed);
  Eigen::VectorXd f = chart_equation(game, deltas, y, false);
  const std::size_t cap = std::min<std::size_t>(options.max_iterations, 200);
  for (std::size_t it = 0; it < cap; ++it) {
    const double norm = f.lpNorm<Eigen::Infinity>();
    if (norm <= 1e-13 * (1.0 + y.lpNorm<Eigen::Infinity>())) break;
    const Eigen::MatrixXd jac = chart_jacobian(game, deltas, y, false, 1e-6);
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool moved = false;
    while (t > 1e-10) {
      const Eigen::VectorXd trial = y + t * step;
      const Eigen::VectorXd ft = chart_equation(game, deltas, trial, false);
      if (ft.allFinite() && ft.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * norm) {
        y = trial;
        f = ft;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  Profile x = chart_to_profile(game, y);
  const double residual = qre_residual(game, deltas, x);
  if (!(residual < options.tolerance)) {
    throw ConvergenceError("Newton QRE iteration did not converge", static_cast<double>(cap), x, residual);
  }
  return make_point(game, deltas, std::move(x));
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

double qre_residual(const NormalFormGame& game, std::span<const double> deltas,
                    const Profile& profile) {
  check_deltas(game, deltas);
  game.check_profile(profile);
  return max_abs_diff(profile, logit_response(game, deltas, profile));
}

QREPoint solve_qre(const NormalFormGame& game, std::span<const double> deltas, const Profile& seed,
                   const QreOptions& options) {
  check_deltas(game, deltas);
  game.check_profile(seed);
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (options.method == QreMethod::newton) return solve_newton(game, deltas, seed, options);
  return solve_damped(game, deltas, seed, options);
}

std::vector<QREPoint> solve_qre_multistart(const NormalFormGame& game,
                                           std::span<const double> deltas, std::size_t grid_size,
                                           double seed_span, double accept) {
  check_deltas(game, deltas);
  if (grid_size < 2) throw ConfigError("multistart needs at least 2 seeds per axis");
  const std::size_t dim = chart_dim(game);
  double total = 1.0;
  for (std::size_t d = 0; d < dim; ++d) total *= static_cast<double>(grid_size);
  if (total > 1e6) throw ConfigError("multistart seed grid is too large for this game");

  std::vector<QREPoint> found;
  auto keep = [&](QREPoint p) {
    if (!(p.residual < accept)) return;
    for (const auto& q : found) {
      if (max_abs_diff(q.profile, p.profile) < 1e-7) return;
    }
    found.push_back(std::move(p));
  };

  QreOptions newton;
  newton.method = QreMethod::newton;
  newton.tolerance = accept;
  QreOptions damped;
  damped.tolerance = accept;
  damped.max_iterations = 5000;

  std::vector<std::size_t> index(dim, 0);
  const auto seeds = static_cast<std::size_t>(total);
  for (std::size_t s = 0; s < seeds; ++s) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(dim));
    bool coarse = true;
    for (std::size_t d = 0; d < dim; ++d) {
      y[static_cast<Eigen::Index>(d)] =
          -seed_span + 2.0 * seed_span * static_cast<double>(index[d]) / static_cast<double>(grid_size - 1);
      coarse = coarse && index[d] % 3 == 0;
    }
    const Profile seed = chart_to_profile(game, y);
    try {
      keep(solve_newton(game, deltas, seed, newton));
    } catch (const ConvergenceError&) {
    }
    if (coarse) {
      try {
        keep(solve_damped(game, deltas, seed, damped));
      } catch (const ConvergenceError&) {
      }
    }
    for (std::size_t d = dim; d-- > 0;) {
      if (++index[d] < grid_size) break;
      index[d] = 0;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const QREPoint& a, const QREPoint& b) { return a.profile[0][0] < b.profile[0][0]; });
  return found;
}

std::vector<QREPoint> qre_2x2_roots(const CoordinationFacts& facts, double delta_x, double delta_y,
                                    const RootScanOptions& options) {
  if (!(delta_x > 0.0) || !(delta_y > 0.0) || !std::isfinite(delta_x) || !std::isfinite(delta_y)) {
    throw ConfigError("qre_2x2_roots: exploration rates must be positive and finite");
  }
  // logit(x) = (k1 y - lambda1) / delta_x and logit(y) = (k2 x - lambda2) / delta_y, which is
  // c1 (y - y_mix) and c2 (x - x_mix) whenever k1, k2 != 0.
  const double a1 = facts.k1 / delta_x, b1 = -facts.lambda1 / delta_x;
  const double a2 = facts.k2 / delta_y, b2 = -facts.lambda2 / delta_y;
  if (!std::isfinite(a1) || !std::isfinite(b1) || !std::isfinite(a2) || !std::isfinite(b2)) {
    throw ConfigError("qre_2x2_roots: payoffs must be finite");
  }
  auto g = [&](double s) { return a1 * sigmoid(a2 * sigmoid(s) + b2) + b1 - s; };

  // s = a1 y + b1 with y in (0, 1) bounds every root.
  const double lo = std::min(b1, a1 + b1) - 1.0;
  const double hi = std::max(b1, a1 + b1) + 1.0;
  const double lipschitz = std::abs(a1 * a2) / 16.0 + 1.0;
  const double min_width = (hi - lo) * options.resolution;

  std::vector<double> roots;
  struct Interval {
    double a, b, ga, gb;
  };
  std::vector<Interval> stack{{lo, hi, g(lo), g(hi)}};
  while (!stack.empty()) {
    Interval iv = stack.back();
    stack.pop_back();
    const bool change = (iv.ga < 0.0) != (iv.gb < 0.0);
    if (!change && std::abs(iv.ga) + std::abs(iv.gb) > lipschitz * (iv.b - iv.a)) continue;
    if (iv.b - iv.a > min_width) {
      const double m = 0.5 * (iv.a + iv.b);
      const double gm = g(m);
      // Right half first so roots pop out left to right.
      stack.push_back({m, iv.b, gm, iv.gb});
      stack.push_back({iv.a, m, iv.ga, gm});
      continue;
    }
    if (!change) continue;
    double a = iv.a, b = iv.b, ga = iv.ga;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double gm = g(m);
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }

  std::vector<QREPoint> out;
  for (double s : roots) {
    const double x = sigmoid(s), x_not = sigmoid(-s);
    const double t = a2 * x + b2;
    const double y = sigmoid(t), y_not = sigmoid(-t);
    QREPoint p;
    p.profile = {{x, x_not}, {y, y_not}};
    p.deltas = {delta_x, delta_y};
    p.residual = std::max(std::abs(x - sigmoid(a1 * y + b1)), std::abs(y - sigmoid(a2 * x + b2)));
    const double slope = a1 * a2 * y * y_not * x * x_not - 1.0;
    p.degenerate = std::abs(slope) < options.tangency;
    out.push_back(std::move(p));
  }
  return out;
}

Stability stability_of(const NormalFormGame& game, std::span<const double> deltas,
                       const QREPoint& point) {
  check_deltas(game, deltas);
  game.check_profile(point.profile);
  const Eigen::VectorXd y = profile_to_chart(game, point.profile);
  const Eigen::MatrixXd jac = chart_jacobian(game, deltas, y, true, 1e-6);
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  bool unstable = false;
  for (const auto& lambda : solver.eigenvalues()) {
    if (std::abs(lambda.real()) < 1e-6) return Stability::indeterminate;
    if (lambda.real() > 0.0) unstable = true;
  }
  return unstable ? Stability::unstable : Stability::stable;
}

RegionCheck region_check(const CoordinationFacts& facts, double x, double y, double slack) {
  RegionCheck check;
  const double sum = facts.x_mix + facts.y_mix;
  if (!facts.is_coordination || sum == 1.0) {
    check.region = "not_covered";
    return check;
  }
  double xm = facts.x_mix, ym = facts.y_mix;
  if (sum < 1.0) {
    x = 1.0 - x;
    y = 1.0 - y;
    xm = 1.0 - xm;
    ym = 1.0 - ym;
  }
  if (xm <= 0.5) {
    std::swap(x, y);
    std::swap(xm, ym);
  }
  check.covered = true;
  const double e = slack;
  if (ym > 0.5) {
    check.locus_case = 1;
    if (x > xm - e && y > ym - e) {
      check.region = "upper_right";
    } else if (x < 0.5 + e && y < 0.5 + e) {
      check.region = "lower_left";
    } else {
      check.region = "excluded";
    }
  } else {
    check.locus_case = 2;
    if (x > xm - e && y > ym - e) {
      check.region = "upper_right";
    } else if (x > 0.5 - e && x < xm + e && y > ym - e && y < 0.5 + e) {
      check.region = "middle";
    } else if (x < 0.5 + e && y < ym + e) {
      check.region = "lower_left";
    } else {
      check.region = "excluded";
    }
  }
  check.allowed = check.region != "excluded";
  return check;
}

}  // namespace smoothq
