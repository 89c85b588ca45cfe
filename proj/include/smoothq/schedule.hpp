#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace smoothq {

enum class ScheduleKind { constant, ete, clr1, piecewise };
enum class RampShape { linear, quadratic };

std::string to_string(ScheduleKind kind);
std::string to_string(RampShape shape);

struct ScheduleValue {
  double alpha = 0.0;
  double beta = 1.0;
  double delta = 0.0;
};

/// Exploration rate delta(t) for one agent. The adaptation rate beta is held
/// fixed and alpha(t) = delta(t) * beta.
///
/// ETE holds delta_max until t_start, then ramps down to 0 at t_end.
/// CLR1 holds delta_low until t_start, ramps up to delta_peak at t_peak, then
/// down to 0 at t_end. Both are 0 after t_end. Quadratic ramps use the squared
/// normalized distance from the segment start (rising) or end (falling).
/// Piecewise interpolates (t, delta) knots linearly and holds the end values.
struct ExplorationSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  RampShape shape = RampShape::linear;
  double beta = 1.0;
  double delta_low = 0.0;  // constant value for kind == constant
  double delta_peak = 0.0;  // delta_max for ETE
  double t_start = 0.0;
  double t_peak = 0.0;
  double t_end = 0.0;
  std::vector<std::pair<double, double>> knots;

  double delta_at(double t) const;
  double max_delta() const;
  bool is_constant() const;
};

ExplorationSchedule make_constant(double delta, double beta = 1.0);
ExplorationSchedule make_ete(double delta_max, double t_end, RampShape shape = RampShape::linear,
                             double beta = 1.0, double t_start = 0.0);
ExplorationSchedule make_clr1(double delta_low, double delta_peak, double t_peak, double t_end,
                              RampShape shape = RampShape::linear, double beta = 1.0,
                              double t_start = 0.0);
ExplorationSchedule make_piecewise(std::vector<std::pair<double, double>> knots, double beta = 1.0);

/// Throws ConfigError on negative t.
ScheduleValue eval_schedule(const ExplorationSchedule& schedule, double t);

/// {"kind": "constant"|"ete"|"clr1"|"piecewise", ...}. Keys per kind:
/// constant: delta; ete: delta_max, t_end; clr1: delta_low, delta_peak,
/// t_peak, t_end; piecewise: knots [[t, delta], ...]. Optional: shape,
/// beta (default 1), t_start (default 0).
ExplorationSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const ExplorationSchedule& schedule);

}  // namespace smoothq
