// Command-line driver: run / converge / stability / check.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "elbm/elbm.hpp"

namespace {

void add_run_options(CLI::App* cmd, elbm::RunConfig& cfg, std::string& preset,
                     std::string& config_file) {
  cmd->add_option("--config", config_file,
                  "read options from a key=value file (or a run manifest)");
  cmd->add_option("--preset", preset, "named experiment preset");
  cmd->add_option("--case", cfg.case_name, "manufactured case (wave52|stability_ic)");
  cmd->add_option("--mode", cfg.mode, "boundary mode (periodic|dirichlet)");
  cmd->add_option("--ck2", cfg.ck2, "squared dilatational wave speed");
  cmd->add_option("--cmu2", cfg.cmu2, "squared shear wave speed");
  cmd->add_option("--dx", cfg.dx, "grid spacing");
  cmd->add_option("--dt", cfg.dt, "time step");
  cmd->add_option("--t-final", cfg.t_final, "end time");
  cmd->add_option("--omega", cfg.omega, "relaxation rate (default 2)");
  cmd->add_flag("--cfl-override", cfg.cfl_override, "run despite a failing CFL check");
  cmd->add_option("--snapshot-stride", cfg.snapshot_stride,
                  "write field snapshots every N steps (0: final only)");
  cmd->add_option("--trace-stride", cfg.trace_stride, "trace cadence in steps");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--workers", cfg.workers, "worker threads");
}

int finish_run(const elbm::RunResult& res) {
  if (!res.message.empty()) std::fprintf(stderr, "%s\n", res.message.c_str());
  if (res.error_report) {
    const elbm::ErrorReport& r = *res.error_report;
    std::printf("u:     L2 %.6e  Linf %.6e  L2rel %.6e  Linfrel %.6e\n", r.u.l2,
                r.u.linf, r.u.l2rel, r.u.linfrel);
    std::printf("sigma: L2 %.6e  Linf %.6e  L2rel %.6e  Linfrel %.6e\n", r.sigma.l2,
                r.sigma.linf, r.sigma.l2rel, r.sigma.linfrel);
  }
  std::printf("steps %zu, max norm drift %.3e\n", res.steps_completed,
              res.max_relative_drift);
  if (res.status == elbm::RunStatus::diverged)
    std::printf("status: unstable (diverged at step %zu)\n", res.divergence_step);
  return static_cast<int>(res.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vectorial D2Q4 lattice Boltzmann solver for 2D linear elastodynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("elbm ") + elbm::kVersion);

  elbm::RunConfig run_cfg;
  std::string run_preset_name, run_config_file;
  CLI::App* run = app.add_subcommand("run", "run one simulation and write reports");
  add_run_options(run, run_cfg, run_preset_name, run_config_file);

  elbm::RunConfig stab_cfg;
  stab_cfg.trace_stride = 100;
  std::string stab_preset_name, stab_config_file;
  CLI::App* stab = app.add_subcommand("stability", "long-horizon norm and error traces");
  add_run_options(stab, stab_cfg, stab_preset_name, stab_config_file);

  CLI::App* conv = app.add_subcommand("converge", "convergence-order study");
  std::string conv_preset_name = "periodic-convergence";
  std::string conv_mode;
  std::string conv_out = "out";
  std::size_t conv_workers = 1;
  std::vector<double> conv_materials;  // flattened (ck2, cmu2) pairs
  std::vector<double> conv_discs;      // flattened (dx, dt) pairs
  conv->add_option("--preset", conv_preset_name, "study preset");
  conv->add_option("--mode", conv_mode, "override boundary mode");
  conv->add_option("--material", conv_materials, "flattened ck2 cmu2 pairs")
      ->expected(-1);
  conv->add_option("--disc", conv_discs, "flattened dx dt pairs")->expected(-1);
  conv->add_option("--out", conv_out, "output directory");
  conv->add_option("--workers", conv_workers, "worker threads");

  CLI::App* check = app.add_subcommand("check", "collision-algebra and CFL checks");
  double chk_ck2 = 1.1, chk_cmu2 = 0.4, chk_c = 2.5, chk_omega = 2.0;
  check->add_option("--ck2", chk_ck2, "squared dilatational wave speed");
  check->add_option("--cmu2", chk_cmu2, "squared shear wave speed");
  check->add_option("--c", chk_c, "lattice speed dx/dt");
  check->add_option("--omega", chk_omega, "relaxation rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(elbm::RunStatus::config_error);
  }

  try {
    if (run->parsed() || stab->parsed()) {
      const bool is_run = run->parsed();
      CLI::App* cmd = is_run ? run : stab;
      elbm::RunConfig cfg = is_run ? run_cfg : stab_cfg;
      const std::string& preset = is_run ? run_preset_name : stab_preset_name;
      const std::string& config_file = is_run ? run_config_file : stab_config_file;
      if (!preset.empty() && !config_file.empty())
        throw CLI::ValidationError("--preset and --config are mutually exclusive");
      if (!preset.empty() || !config_file.empty()) {
        // base values from the preset or config file; explicit flags override
        const elbm::RunConfig base = !preset.empty()
                                         ? elbm::run_preset(preset)
                                         : elbm::run_config_from_file(config_file);
        auto keep = [&](const char* name) { return cmd->count(name) > 0; };
        if (!keep("--case")) cfg.case_name = base.case_name;
        if (!keep("--mode")) cfg.mode = base.mode;
        if (!keep("--ck2")) cfg.ck2 = base.ck2;
        if (!keep("--cmu2")) cfg.cmu2 = base.cmu2;
        if (!keep("--dx")) cfg.dx = base.dx;
        if (!keep("--dt")) cfg.dt = base.dt;
        if (!keep("--t-final")) cfg.t_final = base.t_final;
        if (!keep("--omega")) cfg.omega = base.omega;
        if (!keep("--cfl-override")) cfg.cfl_override = base.cfl_override;
        if (!keep("--snapshot-stride")) cfg.snapshot_stride = base.snapshot_stride;
        if (!keep("--trace-stride")) cfg.trace_stride = base.trace_stride;
        if (!config_file.empty() && !keep("--out")) cfg.out_dir = base.out_dir;
        if (!config_file.empty() && !keep("--workers")) cfg.workers = base.workers;
      }
      const elbm::RunResult res = is_run ? elbm::cmd_run(cfg) : elbm::cmd_stability(cfg);
      return finish_run(res);
    }

    if (conv->parsed()) {
      elbm::StudyConfig cfg = elbm::study_preset(conv_preset_name);
      cfg.out_dir = conv_out;
      cfg.workers = conv_workers;
      if (!conv_mode.empty()) cfg.mode = conv_mode;
      if (!conv_materials.empty()) {
        if (conv_materials.size() % 2 != 0)
          throw CLI::ValidationError("--material expects ck2 cmu2 pairs");
        cfg.materials.clear();
        for (std::size_t i = 0; i < conv_materials.size(); i += 2)
          cfg.materials.emplace_back(conv_materials[i], conv_materials[i + 1]);
      }
      if (!conv_discs.empty()) {
        if (conv_discs.size() % 2 != 0)
          throw CLI::ValidationError("--disc expects dx dt pairs");
        cfg.discretizations.clear();
        for (std::size_t i = 0; i < conv_discs.size(); i += 2)
          cfg.discretizations.emplace_back(conv_discs[i], conv_discs[i + 1]);
      }
      const elbm::StudyResult res = elbm::cmd_converge(cfg, [](const elbm::StudyRow& r) {
        std::printf("%-10s %-9s ck2=%-5g cmu2=%-5g dx=%-9g %-6s %-5s err=%.6e order=%s\n",
                    r.case_name.c_str(), elbm::to_string(r.mode).c_str(), r.ck2, r.cmu2,
                    r.dx, r.field.c_str(), r.norm.c_str(), r.error,
                    std::isnan(r.order) ? "-" : elbm::format_double(r.order).c_str());
      });
      if (!res.message.empty()) std::fprintf(stderr, "%s\n", res.message.c_str());
      for (const std::string& v : res.violations)
        std::fprintf(stderr, "violation: %s\n", v.c_str());
      if (res.status == elbm::RunStatus::ok) std::printf("all order thresholds met\n");
      return static_cast<int>(res.status);
    }

    if (check->parsed()) {
      const elbm::Material mat(chk_ck2, chk_cmu2);
      const elbm::CflResult cfl = elbm::cfl_check(mat, chk_c);
      std::printf("CFL margin %.6f -> %s\n", cfl.margin, cfl.pass ? "pass" : "fail");
      if (!cfl.pass) return static_cast<int>(elbm::RunStatus::cfl_rejected);
      const elbm::AlgebraReport rep = elbm::algebra_checks(mat, chk_c, chk_omega);
      std::printf("max|G^2-G|            = %.3e\n", rep.projector_residual);
      std::printf("spec(G) residual      = %.3e\n", rep.spectrum_g_residual);
      std::printf("max|KJ-(KJ)^T|        = %.3e\n", rep.kj_asymmetry);
      std::printf("spec(-J) residual     = %.3e\n", rep.spectrum_j_residual);
      std::printf("bounce identity       = %.3e\n", rep.bounce_identity_residual);
      std::printf("algebra checks: %s\n", rep.pass ? "pass" : "FAIL");
      return rep.pass ? 0 : static_cast<int>(elbm::RunStatus::config_error);
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return static_cast<int>(elbm::RunStatus::config_error);
  }
  return 0;
}
