#include "smoothq/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "smoothq/errors.hpp"

namespace smoothq {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_rate(const ExplorationSchedule& s) {
  require(std::isfinite(s.beta) && s.beta > 0.0, "schedule: beta must be positive");
  require(s.max_delta() * s.beta < 1.0,
          "schedule: delta * beta must stay below 1 so that alpha < 1; lower beta");
}

// Fraction in [0, 1] covered by t on [a, b].
double progress(double t, double a, double b) { return std::clamp((t - a) / (b - a), 0.0, 1.0); }

double ramp(double s, RampShape shape) { return shape == RampShape::quadratic ? s * s : s; }

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::ete: return "ete";
    case ScheduleKind::clr1: return "clr1";
    case ScheduleKind::piecewise: return "piecewise";
  }
  return "constant";
}

std::string to_string(RampShape shape) {
  return shape == RampShape::quadratic ? "quadratic" : "linear";
}

double ExplorationSchedule::delta_at(double t) const {
  switch (kind) {
    case ScheduleKind::constant:
      return delta_low;
    case ScheduleKind::ete:
      if (t >= t_end) return 0.0;
      return delta_peak * ramp(1.0 - progress(t, t_start, t_end), shape);
    case ScheduleKind::clr1:
      if (t >= t_end) return 0.0;
      if (t <= t_peak) {
        return delta_low + (delta_peak - delta_low) * ramp(progress(t, t_start, t_peak), shape);
      }
      return delta_peak * ramp(1.0 - progress(t, t_peak, t_end), shape);
    case ScheduleKind::piecewise: {
      if (t <= knots.front().first) return knots.front().second;
      if (t >= knots.back().first) return knots.back().second;
      auto hi = std::upper_bound(knots.begin(), knots.end(), t,
                                 [](double v, const auto& knot) { return v < knot.first; });
      auto lo = hi - 1;
      const double s = (t - lo->first) / (hi->first - lo->first);
      return lo->second + s * (hi->second - lo->second);
    }
  }
  return 0.0;
}

double ExplorationSchedule::max_delta() const {
  switch (kind) {
    case ScheduleKind::constant: return delta_low;
    case ScheduleKind::ete: return delta_peak;
    case ScheduleKind::clr1: return std::max(delta_low, delta_peak);
    case ScheduleKind::piecewise: {
      double top = 0.0;
      for (const auto& knot : knots) top = std::max(top, knot.second);
      return top;
    }
  }
  return 0.0;
}

bool ExplorationSchedule::is_constant() const {
  switch (kind) {
    case ScheduleKind::constant: return true;
    case ScheduleKind::ete: return delta_peak == 0.0;
    case ScheduleKind::clr1: return delta_low == 0.0 && delta_peak == 0.0;
    case ScheduleKind::piecewise:
      return std::all_of(knots.begin(), knots.end(),
                         [&](const auto& knot) { return knot.second == knots.front().second; });
  }
  return false;
}

ExplorationSchedule make_constant(double delta, double beta) {
  require(finite_nonneg(delta), "constant schedule: delta must be non-negative");
  ExplorationSchedule s;
  s.kind = ScheduleKind::constant;
  s.delta_low = delta;
  s.beta = beta;
  check_rate(s);
  return s;
}

ExplorationSchedule make_ete(double delta_max, double t_end, RampShape shape, double beta,
                             double t_start) {
  require(finite_nonneg(delta_max), "ete: delta_max must be non-negative");
  require(finite_nonneg(t_start), "ete: t_start must be non-negative");
  require(std::isfinite(t_end) && t_end > t_start, "ete: t_end must exceed t_start");
  ExplorationSchedule s;
  s.kind = ScheduleKind::ete;
  s.shape = shape;
  s.delta_peak = delta_max;
  s.t_start = t_start;
  s.t_end = t_end;
  s.beta = beta;
  check_rate(s);
  return s;
}

ExplorationSchedule make_clr1(double delta_low, double delta_peak, double t_peak, double t_end,
                              RampShape shape, double beta, double t_start) {
  require(finite_nonneg(delta_low) && finite_nonneg(delta_peak),
          "clr1: deltas must be non-negative");
  require(delta_peak >= delta_low, "clr1: delta_peak must be at least delta_low");
  require(finite_nonneg(t_start), "clr1: t_start must be non-negative");
  require(std::isfinite(t_peak) && t_peak > t_start, "clr1: t_peak must exceed t_start");
  require(std::isfinite(t_end) && t_end > t_peak, "clr1: t_end must exceed t_peak");
  ExplorationSchedule s;
  s.kind = ScheduleKind::clr1;
  s.shape = shape;
  s.delta_low = delta_low;
  s.delta_peak = delta_peak;
  s.t_start = t_start;
  s.t_peak = t_peak;
  s.t_end = t_end;
  s.beta = beta;
  check_rate(s);
  return s;
}

ExplorationSchedule make_piecewise(std::vector<std::pair<double, double>> knots, double beta) {
  require(!knots.empty(), "piecewise: at least one knot is required");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require(finite_nonneg(knots[i].first) && finite_nonneg(knots[i].second),
            "piecewise: knots must be non-negative");
    if (i > 0) require(knots[i].first > knots[i - 1].first, "piecewise: knot times must increase");
  }
  ExplorationSchedule s;
  s.kind = ScheduleKind::piecewise;
  s.knots = std::move(knots);
  s.beta = beta;
  check_rate(s);
  return s;
}

ScheduleValue eval_schedule(const ExplorationSchedule& schedule, double t) {
  if (!(t >= 0.0)) throw ConfigError("eval_schedule: time must be non-negative");
  ScheduleValue v;
  v.beta = schedule.beta;
  v.delta = schedule.delta_at(t);
  v.alpha = v.delta * v.beta;
  return v;
}

namespace {

RampShape parse_shape(const nlohmann::json& j) {
  const std::string name = j.value("shape", std::string("linear"));
  if (name == "linear") return RampShape::linear;
  if (name == "quadratic") return RampShape::quadratic;
  throw ConfigError("schedule: unknown shape '" + name + "'");
}

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("schedule: missing key '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("schedule: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

ExplorationSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("schedule must be a JSON object");
  const std::string kind = j.value("kind", std::string());
  const double beta = j.contains("beta") ? number(j, "beta") : 1.0;
  const double t_start = j.contains("t_start") ? number(j, "t_start") : 0.0;
  if (kind == "constant") return make_constant(number(j, "delta"), beta);
  if (kind == "ete") {
    return make_ete(number(j, "delta_max"), number(j, "t_end"), parse_shape(j), beta, t_start);
  }
  if (kind == "clr1") {
    return make_clr1(number(j, "delta_low"), number(j, "delta_peak"), number(j, "t_peak"),
                     number(j, "t_end"), parse_shape(j), beta, t_start);
  }
  if (kind == "piecewise") {
    if (!j.contains("knots") || !j.at("knots").is_array()) {
      throw ConfigError("schedule: piecewise needs a 'knots' array");
    }
    std::vector<std::pair<double, double>> knots;
    for (const auto& knot : j.at("knots")) {
      if (!knot.is_array() || knot.size() != 2) throw ConfigError("schedule: knots are [t, delta] pairs");
      knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
    }
    return make_piecewise(std::move(knots), beta);
  }
  throw ConfigError("schedule: unknown kind '" + kind + "'");
}

nlohmann::json schedule_to_json(const ExplorationSchedule& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["beta"] = s.beta;
  switch (s.kind) {
    case ScheduleKind::constant:
      j["delta"] = s.delta_low;
      break;
    case ScheduleKind::ete:
      j["delta_max"] = s.delta_peak;
      j["t_start"] = s.t_start;
      j["t_end"] = s.t_end;
      j["shape"] = to_string(s.shape);
      break;
    case ScheduleKind::clr1:
      j["delta_low"] = s.delta_low;
      j["delta_peak"] = s.delta_peak;
      j["t_start"] = s.t_start;
      j["t_peak"] = s.t_peak;
      j["t_end"] = s.t_end;
      j["shape"] = to_string(s.shape);
      break;
    case ScheduleKind::piecewise:
      j["knots"] = nlohmann::json::array();
      for (const auto& [t, d] : s.knots) j["knots"].push_back({t, d});
      break;
  }
  return j;
}

}  // namespace smoothq
