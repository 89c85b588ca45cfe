#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "smoothq/dynamics.hpp"
#include "smoothq/metrics.hpp"
#include "smoothq/projection.hpp"
#include "smoothq/surface.hpp"

namespace smoothq {

/// Shortest decimal that round-trips to the same double ("nan", "inf", "-inf" otherwise).
std::string format_number(double v);

/// t, delta_1..delta_N, x_k_i for every player k and action i, u_1..u_N, phi_h.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// delta_x, delta_y, count, then (x_Q_r, y_Q_r, stable_r) for r = 1..3, blank-padded.
void write_surface_csv(std::ostream& out, const SurfaceScan& scan);

/// component_id, delta_x, delta_y (component types are in FoldReport).
void write_folds_csv(std::ostream& out, const FoldReport& report);

/// t, R_1..R_N, RH_1..RH_N, bound_1..bound_N.
void write_regret_csv(std::ostream& out, const std::vector<RegretReport>& reports);

/// alpha, beta, phi_h.
void write_projection_csv(std::ostream& out, const std::vector<ProjectionPoint>& points);

/// Opens `path` for writing (ConfigError on failure) and runs `body` on it.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace smoothq
