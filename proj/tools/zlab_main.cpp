// Command-line driver: dispersion audit, growth-rate fits, the instability
// scaling table and single direct runs, all emitting CSV/JSON artifacts.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "zlab/errors.hpp"
#include "zlab/experiments.hpp"
#include "zlab/state.hpp"

namespace {

using namespace zlab;

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  std::ifstream in(path);
  if (!in) throw zlab::ConfigError("cannot read config file: " + path);
  ordered_json j;
  in >> j;
  return config_from_json(j);
}

int run_solve(const ExperimentConfig& cfg, double T_factor, double delta, bool dump_traj) {
  int status = 0;
  for (int k : cfg.k_list) {
    try {
      const ZakharovConfig zc = cfg.zakharov_for(k);
      const SpectrumReport rep = analyze_spectrum(mode_matrix(k, zc.m, zc.E), k, zc.m, zc.E);
      const UnstableMode mode(rep, zc.truncation);
      const double T = T_factor / rep.sigma;
      StateU s0 = mode.state(0.0);
      s0.e *= delta;
      s0.n *= delta;
      s0.n_t *= delta;
      const EvolveResult run = evolve_direct(zc, s0, T, 0.05 / rep.sigma, cfg.norm_ceiling);
      const NormTrace trace = norm_trace(run.traj, k, cfg.s, rep.sigma);
      ordered_json meta;
      meta["k"] = k;
      meta["sigma"] = rep.sigma;
      meta["T"] = T;
      meta["delta"] = delta;
      meta["blowup_time"] =
          run.blowup_time ? ordered_json(*run.blowup_time) : ordered_json(nullptr);
      for (const auto& p : emit_trace(cfg, k, trace, meta)) std::cerr << "wrote " << p << "\n";
      if (dump_traj) {
        std::filesystem::create_directories(cfg.out_dir);
        const auto path =
            (std::filesystem::path(cfg.out_dir) / ("trajectory_k" + std::to_string(k) + ".csv"))
                .string();
        std::ofstream os(path, std::ios::binary);
        trajectory_to_csv(run.traj, os);
        std::cerr << "wrote " << path << "\n";
      }
      if (run.blowup_time)
        std::cerr << "k=" << k << ": norm ceiling crossed at t=" << *run.blowup_time << "\n";
    } catch (const zlab::Error& err) {
      std::cerr << "k=" << k << ": " << err.what() << "\n";
      status = 2;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral instability laboratory for the periodic Zakharov system"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<int> k_override;
  int s_override = -1;
  double c0_override = -1.0;
  std::string out_override;
  bool oracle = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--k", k_override, "override k list")->delimiter(',');
  app.add_option("--s", s_override, "override Sobolev index");
  app.add_option("--c0", c0_override, "override smallness constant");
  app.add_option("--out", out_override, "override output directory");
  app.add_flag("--oracle", oracle, "enable slow brute-force cross-checks");

  auto* cmd_dispersion = app.add_subcommand("dispersion", "dispersion-relation audit");
  auto* cmd_growth = app.add_subcommand("growth", "growth-rate fits");
  auto* cmd_theorem = app.add_subcommand("theorem", "instability scaling table");
  auto* cmd_solve = app.add_subcommand("solve", "direct run, norm trace output");

  double solve_T_factor = 3.0;
  double solve_delta = 1e-8;
  bool solve_dump_traj = false;
  cmd_solve->add_option("--T-factor", solve_T_factor, "horizon in units of 1/sigma");
  cmd_solve->add_option("--delta", solve_delta, "initial data size");
  cmd_solve->add_flag("--dump-trajectory", solve_dump_traj, "also write the coefficient table");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!k_override.empty()) cfg.k_list = k_override;
    if (s_override > 0) cfg.s = s_override;
    if (c0_override > 0.0) cfg.c0 = c0_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (oracle) cfg.oracle = true;
    cfg.validate();

    if (cmd_dispersion->parsed()) {
      const DispersionAudit audit = run_dispersion_audit(cfg);
      for (const auto& p : emit_dispersion(cfg, audit)) std::cerr << "wrote " << p << "\n";
      // Full spectral reports, one per k, with the threshold scan attached.
      int k0 = -1;
      try {
        k0 = discover_k0(cfg.E, cfg.Z);
      } catch (const ClassificationError&) {
      }
      for (int k : cfg.k_list) {
        try {
          const auto mc = resonant_m(k, cfg.Z);
          SpectrumReport rep = analyze_spectrum(mode_matrix(k, mc.m, cfg.E), k, mc.m, cfg.E);
          rep.k0 = k0;
          std::filesystem::create_directories(cfg.out_dir);
          const auto path =
              (std::filesystem::path(cfg.out_dir) / ("spectrum_k" + std::to_string(k) + ".json"))
                  .string();
          std::ofstream os(path, std::ios::binary);
          os << to_json(rep).dump(2) << "\n";
          std::cerr << "wrote " << path << "\n";
        } catch (const ClassificationError&) {
        }
      }
      return audit.warnings.empty() ? 0 : 2;
    }
    if (cmd_growth->parsed()) {
      std::vector<GrowthFit> fits;
      fits.reserve(cfg.k_list.size());
      for (int k : cfg.k_list) fits.push_back(run_growth_fit(cfg, k));
      for (const auto& p : emit_growth(cfg, fits)) std::cerr << "wrote " << p << "\n";
      for (const auto& f : fits)
        if (!f.error.empty()) return 2;
      return 0;
    }
    if (cmd_theorem->parsed()) {
      const TheoremTable table = run_theorem(cfg);
      for (const auto& p : emit_theorem(cfg, table)) std::cerr << "wrote " << p << "\n";
      return table.warnings.empty() ? 0 : 2;
    }
    if (cmd_solve->parsed()) return run_solve(cfg, solve_T_factor, solve_delta, solve_dump_traj);
  } catch (const zlab::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 1;
  } catch (const zlab::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
