#include "smoothq/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "smoothq/errors.hpp"

namespace smoothq {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.empty()) throw ConfigError("cannot write an empty trajectory");
  const Profile& shape = traj.profiles.front();
  const std::size_t players = shape.size();
  out << "t";
  for (std::size_t k = 0; k < players; ++k) out << ",delta_" << k + 1;
  for (std::size_t k = 0; k < players; ++k) {
    for (std::size_t i = 0; i < shape[k].size(); ++i) out << ",x_" << k + 1 << '_' << i + 1;
  }
  for (std::size_t k = 0; k < players; ++k) out << ",u_" << k + 1;
  out << ",phi_h\n";
  const bool has_phi = traj.phi_h.size() == traj.size();
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out << format_number(traj.times[s]);
    for (const auto& v : traj.schedule_values[s]) out << ',' << format_number(v.delta);
    for (const auto& xk : traj.profiles[s]) {
      for (double p : xk) out << ',' << format_number(p);
    }
    for (double u : traj.utilities[s]) out << ',' << format_number(u);
    out << ',';
    if (has_phi) out << format_number(traj.phi_h[s]);
    out << '\n';
  }
}

void write_surface_csv(std::ostream& out, const SurfaceScan& scan) {
  std::size_t slots = 3;
  for (const auto& pts : scan.points) slots = std::max(slots, pts.size());
  out << "delta_x,delta_y,count";
  for (std::size_t r = 1; r <= slots; ++r) out << ",x_Q_" << r << ",y_Q_" << r << ",stable_" << r;
  out << '\n';
  for (std::size_t j = 0; j < scan.ny(); ++j) {
    for (std::size_t i = 0; i < scan.nx(); ++i) {
      const std::size_t c = scan.index(i, j);
      out << format_number(scan.delta_x[i]) << ',' << format_number(scan.delta_y[j]) << ','
          << scan.counts[c];
      for (std::size_t r = 0; r < slots; ++r) {
        if (r < scan.points[c].size()) {
          const auto& p = scan.points[c][r];
          out << ',' << format_number(p.profile[0][0]) << ',' << format_number(p.profile[1][0]) << ',';
          if (p.stability) out << to_string(*p.stability);
        } else {
          out << ",,,";
        }
      }
      out << '\n';
    }
  }
}

void write_folds_csv(std::ostream& out, const FoldReport& report) {
  out << "component_id,delta_x,delta_y\n";
  for (const auto& comp : report.components) {
    for (const auto& [dx, dy] : comp.polyline) {
      out << comp.id << ',' << format_number(dx) << ',' << format_number(dy) << '\n';
    }
  }
}

void write_regret_csv(std::ostream& out, const std::vector<RegretReport>& reports) {
  if (reports.empty()) throw ConfigError("no regret series to write");
  out << 't';
  for (const auto& r : reports) out << ",R_" << r.agent + 1;
  for (const auto& r : reports) out << ",RH_" << r.agent + 1;
  for (const auto& r : reports) out << ",bound_" << r.agent + 1;
  out << '\n';
  const auto& times = reports.front().times;
  for (std::size_t s = 0; s < times.size(); ++s) {
    out << format_number(times[s]);
    for (const auto& r : reports) out << ',' << format_number(r.regret[s]);
    for (const auto& r : reports) out << ',' << format_number(r.modified_regret[s]);
    for (const auto& r : reports) out << ',' << format_number(r.bound[s]);
    out << '\n';
  }
}

void write_projection_csv(std::ostream& out, const std::vector<ProjectionPoint>& points) {
  out << "alpha,beta,phi_h\n";
  for (const auto& p : points) {
    out << format_number(p.alpha) << ',' << format_number(p.beta) << ',' << format_number(p.phi_h) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  body(out);
  if (!out) throw ConfigError("failed while writing " + path.string());
}

}  // namespace smoothq
