#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "elbm/io.hpp"
#include "elbm/mms.hpp"
#include "elbm/postprocess.hpp"
#include "elbm/solver.hpp"
#include "elbm/stabmon.hpp"
#include "elbm/verify.hpp"
#include "elbm/version.hpp"

namespace elbm {

/// Process exit codes shared by the library runner and the CLI.
enum class RunStatus : int {
  ok = 0,
  config_error = 2,
  cfl_rejected = 3,
  diverged = 4,
  io_error = 5,
};

/// Flat, file-round-trippable run configuration. The solver is deterministic
/// and seed-free; identical configurations produce byte-identical outputs for
/// any worker count.
struct RunConfig {
  std::string case_name = "wave52";
  std::string mode = "periodic";
  double ck2 = 1.1;
  double cmu2 = 0.4;
  double dx = 1.0 / 80.0;
  double dt = 1.0 / 200.0;
  double t_final = 1.0;
  double omega = 2.0;
  bool cfl_override = false;
  std::size_t snapshot_stride = 0;  // 0: final snapshot only
  std::size_t trace_stride = 1;     // norm / error trace cadence
  std::string out_dir = "out";
  std::size_t workers = 1;
};

/// Writes the manifest as a config file the CLI can re-execute directly
/// (keys match the long option names).
inline void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest");
  out << "# elbm " << kVersion << "\n";
  out << "case=" << cfg.case_name << "\n";
  out << "mode=" << cfg.mode << "\n";
  out << "ck2=" << format_double(cfg.ck2) << "\n";
  out << "cmu2=" << format_double(cfg.cmu2) << "\n";
  out << "dx=" << format_double(cfg.dx) << "\n";
  out << "dt=" << format_double(cfg.dt) << "\n";
  out << "t-final=" << format_double(cfg.t_final) << "\n";
  out << "omega=" << format_double(cfg.omega) << "\n";
  out << "cfl-override=" << (cfg.cfl_override ? "true" : "false") << "\n";
  out << "snapshot-stride=" << cfg.snapshot_stride << "\n";
  out << "trace-stride=" << cfg.trace_stride << "\n";
  out << "out=" << cfg.out_dir << "\n";
  out << "workers=" << cfg.workers << "\n";
}

/// Reads a run configuration back from a manifest or hand-written config file.
inline RunConfig run_config_from_file(const std::filesystem::path& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed config line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "case") cfg.case_name = val;
    else if (key == "mode") cfg.mode = val;
    else if (key == "ck2") cfg.ck2 = std::stod(val);
    else if (key == "cmu2") cfg.cmu2 = std::stod(val);
    else if (key == "dx") cfg.dx = std::stod(val);
    else if (key == "dt") cfg.dt = std::stod(val);
    else if (key == "t-final") cfg.t_final = std::stod(val);
    else if (key == "omega") cfg.omega = std::stod(val);
    else if (key == "cfl-override") cfg.cfl_override = val == "true" || val == "1";
    else if (key == "snapshot-stride") cfg.snapshot_stride = std::stoul(val);
    else if (key == "trace-stride") cfg.trace_stride = std::stoul(val);
    else if (key == "out") cfg.out_dir = val;
    else if (key == "workers") cfg.workers = std::stoul(val);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return cfg;
}

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::size_t steps_completed = 0;
  std::size_t divergence_step = std::numeric_limits<std::size_t>::max();
  double max_relative_drift = 0.0;  // of the norm trace
  double max_error_trace = 0.0;     // of the spatial error trace (if recorded)
  std::optional<ErrorReport> error_report;
  std::string message;
};

/// Executes one simulation with the configured observers.
/// `with_error_report` samples the space-time error norms at every step (the
/// `run` command); `with_error_trace` records the space-only displacement
/// error at the trace stride (the `stability` command). Norm traces always
/// record: the weighted L2 grid norm when the CFL condition holds, otherwise
/// (override runs) the plain population norm.
inline RunResult execute_run(const RunConfig& cfg, bool with_error_report,
                             bool with_error_trace) {
  RunResult res;
  const std::filesystem::path dir(cfg.out_dir);

  Material mat;
  BcMode mode;
  ManufacturedCase mcase;
  try {
    mat = Material(cfg.ck2, cfg.cmu2);
    mode = bc_mode_from_string(cfg.mode);
    mcase = manufactured_case(cfg.case_name);
    if (!(cfg.omega > 0.0 && cfg.omega <= 2.0))
      throw std::invalid_argument("omega must lie in (0, 2]");
    if (cfg.trace_stride == 0) throw std::invalid_argument("trace_stride must be > 0");
  } catch (const std::exception& ex) {
    res.status = RunStatus::config_error;
    res.message = ex.what();
    return res;
  }

  try {
    const Lattice lat = build_lattice({1.0, 1.0}, cfg.dx, cfg.dt, mode, cfg.t_final);
    const CflResult cfl = cfl_check(mat, lat.disc().c);
    if (!cfl.pass && !cfg.cfl_override) {
      res.status = RunStatus::cfl_rejected;
      res.message = "CFL margin " + format_double(cfl.margin) +
                    " >= 1; pass cfl_override to run anyway";
      return res;
    }
    std::optional<Symmetrizer> sym;
    if (cfl.pass) sym.emplace(mat, lat.disc().c);

    WorkerPool pool(cfg.workers);
    Solver solver(lat, mat, cfg.omega, pool, case_body_slice(mcase, lat, mat),
                  case_wall_velocity(mcase));
    solver.initialize(case_init_data(mcase, mat));

    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    if (std::abs(steps * cfg.dt - cfg.t_final) > 1e-9 * cfg.t_final) {
      res.status = RunStatus::config_error;
      res.message = "t_final must be a multiple of dt";
      return res;
    }

    write_manifest(cfg, dir);
    CsvWriter norm_trace(dir / "norm_trace.csv", "step,time,norm,relative_drift");
    std::unique_ptr<CsvWriter> error_trace;
    if (with_error_trace && mcase.has_exact)
      error_trace = std::make_unique<CsvWriter>(dir / "error_trace.csv", "step,time,l2rel_u");
    std::unique_ptr<ErrorAccumulator> acc;
    if (with_error_report && mcase.has_exact)
      acc = std::make_unique<ErrorAccumulator>(mcase, lat, mat, pool);

    auto norm_of = [&]() {
      return sym ? weighted_norm(*sym, solver.populations(), pool)
                 : plain_norm(solver.populations(), pool);
    };
    const double norm0 = norm_of();
    norm_trace.row({"0", format_double(0.0), format_double(norm0), format_double(0.0)});
    if (error_trace) {
      const double e0 = spatial_error_l2rel(mcase, solver, pool);
      error_trace->row({"0", format_double(0.0), format_double(e0)});
      res.max_error_trace = e0;
    }
    if (cfg.snapshot_stride > 0) write_snapshot(solver, dir / snapshot_filename(0));

    bool diverged = false;
    for (std::size_t s = 1; s <= steps && !diverged; ++s) {
      solver.step();
      if (acc) acc->accumulate(solver);
      const bool due = s % cfg.trace_stride == 0 || s == steps;
      if (due) {
        const double norm = norm_of();
        const double drift = norm0 > 0.0 ? std::abs(norm - norm0) / norm0 : 0.0;
        res.max_relative_drift = std::max(res.max_relative_drift, drift);
        norm_trace.row({std::to_string(s), format_double(solver.time()),
                        format_double(norm), format_double(drift)});
        if (error_trace) {
          const double e = spatial_error_l2rel(mcase, solver, pool);
          res.max_error_trace = std::max(res.max_error_trace, e);
          error_trace->row({std::to_string(s), format_double(solver.time()),
                            format_double(e)});
        }
        if (!std::isfinite(norm) || (norm0 > 0.0 && norm > 1e6 * norm0)) {
          diverged = true;
          res.divergence_step = s;
        }
      }
      if (cfg.snapshot_stride > 0 && s % cfg.snapshot_stride == 0)
        write_snapshot(solver, dir / snapshot_filename(s));
      res.steps_completed = s;
    }

    if (!diverged || cfg.snapshot_stride == 0)
      write_snapshot(solver, dir / snapshot_filename(solver.step_index()));
    norm_trace.close();
    if (error_trace) error_trace->close();

    if (acc) {
      res.error_report = acc->report();
      CsvWriter rep(dir / "error_report.csv", "field,l2,linf,l2rel,linfrel");
      const ErrorReport& r = *res.error_report;
      rep.row({"u", format_double(r.u.l2), format_double(r.u.linf),
               format_double(r.u.l2rel), format_double(r.u.linfrel)});
      rep.row({"sigma", format_double(r.sigma.l2), format_double(r.sigma.linf),
               format_double(r.sigma.l2rel), format_double(r.sigma.linfrel)});
      rep.close();
    }

    if (diverged) {
      res.status = RunStatus::diverged;
      res.message = "unstable: norm diverged at step " + std::to_string(res.divergence_step);
      return res;
    }
    if (solver.first_order_only())
      res.message = "omega != 2: scheme is first-order consistent only";
    return res;
  } catch (const std::ios_base::failure& ex) {
    res.status = RunStatus::io_error;
    res.message = ex.what();
    return res;
  } catch (const std::invalid_argument& ex) {
    res.status = RunStatus::config_error;
    res.message = ex.what();
    return res;
  } catch (const std::runtime_error& ex) {
    res.status = RunStatus::io_error;
    res.message = ex.what();
    return res;
  }
}

inline RunResult cmd_run(const RunConfig& cfg) { return execute_run(cfg, true, false); }

inline RunResult cmd_stability(const RunConfig& cfg) {
  return execute_run(cfg, false, true);
}

/// Acceptance bounds for observed convergence orders between the two finest
/// levels. Dirichlet stress in the max norm admits both the boundary-dominated
/// first-order regime and, for near-pure-dilatational materials at coarse
/// resolutions, the undegraded second-order regime.
inline std::vector<std::pair<double, double>> order_bounds(BcMode mode,
                                                           const std::string& field,
                                                           const std::string& norm) {
  if (mode == BcMode::dirichlet && field == "sigma" && norm == "linf")
    return {{0.8, 1.6}, {1.9, 2.3}};
  return {{1.9, 2.3}};
}

struct StudyConfig {
  std::string case_name = "wave52";
  std::string mode = "periodic";
  std::vector<std::pair<double, double>> materials;        // (ck2, cmu2)
  std::vector<std::pair<double, double>> discretizations;  // (dx, dt)
  double t_final = 1.0;
  double omega = 2.0;
  std::string out_dir = "out";
  std::size_t workers = 1;
};

struct StudyResult {
  RunStatus status = RunStatus::ok;
  std::vector<StudyRow> rows;
  std::vector<std::string> violations;
  std::string message;
};

/// Runs the convergence study, writes the order table and gates the orders
/// between the two finest levels against the acceptance bounds.
inline StudyResult cmd_converge(const StudyConfig& cfg,
                                const std::function<void(const StudyRow&)>& on_row = nullptr) {
  StudyResult res;
  BcMode mode;
  ManufacturedCase mcase;
  std::vector<Material> materials;
  try {
    if (cfg.discretizations.empty())
      throw std::invalid_argument("empty discretization list");
    if (cfg.materials.empty()) throw std::invalid_argument("empty material list");
    mode = bc_mode_from_string(cfg.mode);
    mcase = manufactured_case(cfg.case_name);
    for (auto [ck2, cmu2] : cfg.materials) materials.emplace_back(ck2, cmu2);
  } catch (const std::exception& ex) {
    res.status = RunStatus::config_error;
    res.message = ex.what();
    return res;
  }

  try {
    WorkerPool pool(cfg.workers);
    res.rows = convergence_study(mcase, mode, materials, cfg.discretizations,
                                 cfg.t_final, cfg.omega, pool, true, on_row);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    CsvWriter table(dir / "order_table.csv",
                    "case,mode,ck2,cmu2,dx,dt,field,norm,error,observed_order");
    for (const StudyRow& r : res.rows)
      table.row({r.case_name, to_string(r.mode), format_double(r.ck2),
                 format_double(r.cmu2), format_double(r.dx), format_double(r.dt),
                 r.field, r.norm, format_double(r.error),
                 std::isnan(r.order) ? "" : format_double(r.order)});
    table.close();

    const double finest_dx = cfg.discretizations.back().first;
    for (const StudyRow& r : res.rows) {
      if (r.dx != finest_dx) continue;
      if (r.divergent) {
        res.violations.push_back("divergent run at dx=" + format_double(r.dx));
        continue;
      }
      if (std::isnan(r.order)) continue;  // single-level study: nothing to gate
      bool ok = false;
      for (auto [lo, hi] : order_bounds(mode, r.field, r.norm))
        ok = ok || (r.order >= lo && r.order <= hi);
      if (!ok)
        res.violations.push_back(
            "order " + format_double(r.order) + " outside bounds for " + r.field + "/" +
            r.norm + " at ck2=" + format_double(r.ck2) + " cmu2=" + format_double(r.cmu2));
    }
    if (!res.violations.empty()) res.status = RunStatus::diverged;
    return res;
  } catch (const std::exception& ex) {
    res.status = RunStatus::io_error;
    res.message = ex.what();
    return res;
  }
}

/// Named experiment presets mirroring the reported parameter studies.
inline RunConfig run_preset(const std::string& name) {
  RunConfig c;
  if (name == "periodic-wave") {
    // mid-resolution periodic convergence point
    c = RunConfig{};
  } else if (name == "stability-norm") {
    // homogeneous-Dirichlet norm-conservation run
    c.case_name = "stability_ic";
    c.mode = "dirichlet";
    c.ck2 = 1.1;
    c.cmu2 = 0.4;
    c.dx = 1.0 / 160.0;
    c.dt = 1.0 / 400.0;
    c.t_final = 25.0;  // 10^4 steps
    c.trace_stride = 1;
  } else if (name == "stability-long-stable") {
    c.case_name = "wave52";
    c.mode = "dirichlet";
    c.ck2 = 1.1;
    c.cmu2 = 0.4;
    c.dx = 1.0 / 160.0;
    c.dt = 1.0 / 400.0;
    c.t_final = 250.0;  // 10^5 steps
    c.trace_stride = 100;
  } else if (name == "stability-long-unstable") {
    c.case_name = "wave52";
    c.mode = "dirichlet";
    c.ck2 = 1.2;
    c.cmu2 = 0.4;
    c.dx = 1.0 / 160.0;
    c.dt = 1.0 / 400.0;
    c.t_final = 250.0;
    c.trace_stride = 10;
    c.cfl_override = true;
  } else if (name == "stability-long-full") {
    // the flagged long experiment: 10^6 steps on 25600 nodes
    c.case_name = "wave52";
    c.mode = "dirichlet";
    c.ck2 = 1.1;
    c.cmu2 = 0.4;
    c.dx = 1.0 / 160.0;
    c.dt = 1.0 / 400.0;
    c.t_final = 2500.0;
    c.trace_stride = 1000;
  } else {
    throw std::invalid_argument("unknown run preset: " + name);
  }
  return c;
}

inline StudyConfig study_preset(const std::string& name) {
  StudyConfig c;
  c.materials = {{1.5, 0.0}, {1.1, 0.4}, {0.75, 0.75}};
  c.discretizations = {{1.0 / 40.0, 1.0 / 100.0},
                       {1.0 / 80.0, 1.0 / 200.0},
                       {1.0 / 160.0, 1.0 / 400.0}};
  if (name == "periodic-convergence") {
    c.mode = "periodic";
  } else if (name == "dirichlet-convergence") {
    c.mode = "dirichlet";
  } else if (name == "periodic-convergence-full") {
    c.mode = "periodic";
    c.materials = {{1.5, 0.0}, {1.4, 0.1}, {1.1, 0.4}, {0.95, 0.55}, {0.75, 0.75}};
    c.discretizations = {{1.0 / 80.0, 1.0 / 200.0},
                         {1.0 / 120.0, 1.0 / 300.0},
                         {1.0 / 160.0, 1.0 / 400.0},
                         {1.0 / 240.0, 1.0 / 600.0},
                         {1.0 / 320.0, 1.0 / 800.0}};
  } else if (name == "dirichlet-convergence-full") {
    c.mode = "dirichlet";
    c.materials = {{1.5, 0.0}, {1.4, 0.1}, {1.1, 0.4}, {0.95, 0.55}, {0.75, 0.75}};
    c.discretizations = {{1.0 / 80.0, 1.0 / 200.0},
                         {1.0 / 120.0, 1.0 / 300.0},
                         {1.0 / 160.0, 1.0 / 400.0},
                         {1.0 / 240.0, 1.0 / 600.0},
                         {1.0 / 320.0, 1.0 / 800.0}};
  } else {
    throw std::invalid_argument("unknown study preset: " + name);
  }
  return c;
}

}  // namespace elbm
