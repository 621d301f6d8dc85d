#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elbm/core.hpp"
#include "elbm/io.hpp"
#include "elbm/solver.hpp"

namespace elbm {

/// Trapezoidal displacement update: u(t) = u*(t - dt) + (dt/2) v(t).
inline Vec2 update_displacement(Vec2 u_star, Vec2 v_num, double dt) {
  return {u_star.x + 0.5 * dt * v_num.x, u_star.y + 0.5 * dt * v_num.y};
}

/// Accumulator advance at the end of a step: u* = u(t) + (dt/2) v(t), so the
/// previous velocity never needs to be stored.
inline Vec2 advance_accumulator(Vec2 u_num, Vec2 v_num, double dt) {
  return update_displacement(u_num, v_num, dt);
}

inline constexpr const char* kSnapshotHeader =
    "x,y,u_x,u_y,v_x,v_y,sigma_xx,sigma_yy,sigma_xy";

/// Writes the per-node derived fields in row-major node order.
inline void write_snapshot(const Solver& s, const std::filesystem::path& path) {
  CsvWriter csv(path, kSnapshotHeader);
  const Lattice& lat = s.lattice();
  for (std::size_t n = 0; n < lat.num_nodes(); ++n) {
    const Vec2 p = lat.node_pos(n);
    const Vec2 u = s.displacement()[n];
    const Vec2 v = s.velocity(n);
    const Stress sig = s.stress(n);
    csv.row({format_double(p.x), format_double(p.y), format_double(u.x),
             format_double(u.y), format_double(v.x), format_double(v.y),
             format_double(sig.xx), format_double(sig.yy), format_double(sig.xy)});
  }
  csv.close();
}

struct SnapshotRow {
  double x, y, ux, uy, vx, vy, sxx, syy, sxy;
};

inline std::vector<SnapshotRow> read_snapshot(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<SnapshotRow> rows;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw std::runtime_error("snapshot without header");
  while (pos + 1 < text.size()) {
    const std::size_t end = text.find('\n', pos + 1);
    const std::string line = text.substr(pos + 1, end - pos - 1);
    if (!line.empty()) {
      const auto cells = split_csv_line(line);
      if (cells.size() != 9) throw std::runtime_error("malformed snapshot row");
      rows.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2]),
                      std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5]),
                      std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8])});
    }
    if (end == std::string::npos) break;
    pos = end;
  }
  return rows;
}

inline std::string snapshot_filename(std::size_t step_index) {
  return "fields_" + std::to_string(step_index) + ".csv";
}

}  // namespace elbm
