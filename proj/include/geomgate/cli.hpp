#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geomgate/config.hpp"
#include "geomgate/dynamics.hpp"
#include "geomgate/errors.hpp"
#include "geomgate/gate.hpp"
#include "geomgate/sweep.hpp"
#include "geomgate/verify.hpp"
#include "geomgate/version.hpp"

namespace geomgate::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("Io", "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("Io", "cannot open output file: " + path);
  out << content;
}

/// Load the run configuration from --config and/or --preset. Returns the
/// config together with the text whose hash identifies this run.
inline std::pair<config::RunConfig, std::string> load_config(
    const std::string& config_path, const std::string& preset_name) {
  std::string text;
  if (!config_path.empty()) {
    text = read_file(config_path);
  } else if (!preset_name.empty()) {
    text = "{\"preset\":\"" + preset_name + "\"}";
  } else {
    throw UsageError("either --config or --preset is required");
  }
  config::RunConfig cfg = config::parse_config(text);
  if (!config_path.empty() && !preset_name.empty()) {
    // The command-line preset takes precedence over the file's physics.
    const auto preset = config::preset_by_name(preset_name);
    const auto numerics = cfg.params;
    cfg.preset = preset_name;
    cfg.params = preset.params;
    cfg.params.n_max = numerics.n_max;
    cfg.params.dt = numerics.dt;
    cfg.params.model_kind = numerics.model_kind;
    cfg.override_log.push_back("--preset " + preset_name +
                               " overrides the config file physics");
    text += "#preset=" + preset_name;
  }
  return {cfg, text};
}

inline void report_soft_checks(const config::RunConfig& cfg) {
  for (const auto& note : cfg.override_log) std::cerr << "note: " << note << "\n";
  for (const auto& warn : model::validity_warnings(cfg.params)) {
    std::cerr << "warning: " << warn << "\n";
  }
}

inline std::vector<std::pair<std::string, std::string>> make_meta(
    const std::string& config_text, const config::RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> meta = {
      {"tool", kToolName},
      {"version", kVersion},
      {"config_hash", config::hash_hex(config_text)}};
  if (cfg.preset) meta.emplace_back("preset", *cfg.preset);
  return meta;
}

inline std::string provenance_line(const std::string& config_text) {
  return std::string(kToolName) + " " + kVersion +
         " config_hash=" + config::hash_hex(config_text);
}

inline int basis_row_index(const std::string& name) {
  for (int k = 0; k < 4; ++k) {
    if (name == gate::kBasisNames[k]) return k;
  }
  throw UsageError("unknown basis row: " + name + " (expected gg, ge, eg or ee)");
}

/// Re-propagate one computational row with the per-step observable dump.
inline void dump_row_csv(const config::RunConfig& cfg, int row,
                         const std::string& path,
                         const std::string& config_text) {
  const auto& p = cfg.params;
  const bool full = p.model_kind == model::ModelKind::full;
  model::JointOperator h = model::hamiltonian(p);
  if (!full) h = model::reduce_to_qubit_manifold(h);
  const int atom_dim = full ? model::atom::kPairDim : 4;
  const int atom_index = full ? model::atom::kQubitIndices[row] : row;
  const auto psi0 = dynamics::JointState::basis(atom_dim, p.fock_dim().levels(),
                                                atom_index, 0);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("Io", "cannot open output file: " + path);
  out << "# " << provenance_line(config_text) << "\n";
  out << "t,re_alpha,im_alpha,p_r,purity\n";
  if (p.model_kind == model::ModelKind::effective_lindblad) {
    dynamics::LindbladOptions opts;
    opts.convergence_tol = 1e-3;
    opts.observer = dynamics::csv_dump_observer(out);
    dynamics::propagate_lindblad(h, psi0.to_density(), p.gamma_cav, p.t_total,
                                 p.dt, opts);
  } else {
    dynamics::PropagateOptions opts;
    opts.convergence_tol = 1e-3;
    opts.observer = dynamics::csv_dump_observer(out);
    dynamics::propagate_unitary(h, psi0, p.t_total, p.dt, opts);
  }
}

inline int default_jobs() {
  if (const char* env = std::getenv("GEOMGATE_JOBS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace detail

/// CLI entry point, exposed for in-process testing. Exit codes: 0 success,
/// 1 runtime or config error, 2 usage error.
inline int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Two-qubit geometric phase gate simulator (cavity QED)"};
  app.require_subcommand(1);

  auto* verify_cmd =
      app.add_subcommand("verify", "run the invariant suites and print a summary");

  std::string config_path, preset_name, output_path;
  std::string dump_path, dump_row = "eg";
  bool allow_ambiguous = false;
  auto* gate_cmd = app.add_subcommand("gate", "run the phase gate and emit a report");
  gate_cmd->add_option("--config", config_path, "JSON config file");
  gate_cmd->add_option("--preset", preset_name, "parameter preset")
      ->check(CLI::IsMember({"A", "B"}));
  gate_cmd->add_option("--output", output_path, "output file (default stdout)");
  gate_cmd->add_option("--dump", dump_path, "per-step trajectory CSV for one row");
  gate_cmd->add_option("--dump-row", dump_row, "row to dump (gg, ge, eg, ee)");
  gate_cmd->add_flag("--allow-ambiguous", allow_ambiguous,
                     "record ambiguous phases as notes instead of failing");

  std::string sweep_config, sweep_spec_path, sweep_output;
  int jobs = detail::default_jobs();
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep, emit CSV");
  sweep_cmd->add_option("--config", sweep_config, "base JSON config file")->required();
  sweep_cmd->add_option("--spec", sweep_spec_path, "sweep spec JSON file")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent sweep points");
  sweep_cmd->add_option("--output", sweep_output, "output file (default stdout)");

  std::string traj_config, traj_preset, traj_output;
  int traj_samples = 0;
  auto* traj_cmd =
      app.add_subcommand("trajectory", "emit the analytic alpha(t) path as CSV");
  traj_cmd->add_option("--config", traj_config, "JSON config file");
  traj_cmd->add_option("--preset", traj_preset, "parameter preset")
      ->check(CLI::IsMember({"A", "B"}));
  traj_cmd->add_option("--samples", traj_samples,
                       "sample count (default t_total/dt)");
  traj_cmd->add_option("--output", traj_output, "output file (default stdout)");

  try {
    std::vector<std::string> argv_store = args;
    std::vector<char*> argv;
    static char prog[] = "geomgate";
    argv.push_back(prog);
    for (auto& s : argv_store) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (verify_cmd->parsed()) {
      const auto results = verify::run_all();
      int failed = 0;
      for (const auto& r : results) {
        std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << ": " << r.detail
                  << "\n";
        if (!r.passed) ++failed;
      }
      std::cout << (failed == 0 ? "all checks passed" : "checks FAILED") << " ("
                << results.size() - failed << "/" << results.size() << ")\n";
      return failed == 0 ? 0 : 1;
    }

    if (gate_cmd->parsed()) {
      auto [cfg, text] = detail::load_config(config_path, preset_name);
      detail::report_soft_checks(cfg);
      gate::GateOptions gopts;
      gopts.allow_ambiguous_phase = allow_ambiguous;
      auto report = gate::run_gate(cfg.params, gopts);
      report = gate::apply_correction(report, cfg.params);
      report.fidelity = gate::gate_fidelity(report, {1.0, 1.0, 1.0, -1.0});
      for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
      const std::string out_path =
          output_path.empty() ? cfg.output_path : output_path;
      detail::write_output(out_path,
                           gate::to_json(report, detail::make_meta(text, cfg)) + "\n");
      if (!dump_path.empty()) {
        detail::dump_row_csv(cfg, detail::basis_row_index(dump_row), dump_path, text);
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const std::string config_text = detail::read_file(sweep_config);
      const std::string spec_text = detail::read_file(sweep_spec_path);
      const auto cfg = config::parse_config(config_text);
      detail::report_soft_checks(cfg);
      const auto spec = config::parse_sweep_spec(spec_text);
      std::cerr << "sweep: " << spec.point_count() << " points, " << jobs
                << " job(s)\n";
      const auto rows = sweep::run_sweep(cfg.params, spec, jobs);
      std::ostringstream out;
      sweep::write_sweep_csv(out, spec, rows,
                             {detail::provenance_line(config_text) +
                              " spec_hash=" + config::hash_hex(spec_text)});
      detail::write_output(sweep_output.empty() ? cfg.output_path : sweep_output,
                           out.str());
      return 0;
    }

    if (traj_cmd->parsed()) {
      auto [cfg, text] = detail::load_config(traj_config, traj_preset);
      detail::report_soft_checks(cfg);
      int samples = traj_samples;
      if (samples <= 0) {
        samples = std::max(
            1, static_cast<int>(std::lround(cfg.params.t_total / cfg.params.dt)));
      }
      const auto path =
          model::sample_alpha_path(cfg.params, cfg.params.t_total, samples);
      std::ostringstream out;
      geompath::write_path_csv(out, path, {detail::provenance_line(text)});
      detail::write_output(traj_output.empty() ? cfg.output_path : traj_output,
                           out.str());
      return 0;
    }
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << e.name() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace geomgate::cli
