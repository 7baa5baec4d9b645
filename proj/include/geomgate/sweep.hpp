#pragma once

#include <atomic>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "geomgate/config.hpp"
#include "geomgate/gate.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"

namespace geomgate::sweep {

struct SweepRow {
  std::size_t point_index = 0;
  std::vector<double> axis_values;
  std::string status = "ok";  // "ok" or "failed:<ErrorName>"
  double phi_eg = 0.0;        // wrapped to (-pi, pi]
  double phi_ee = 0.0;        // wrapped to (-pi, pi]
  double fidelity = 0.0;
  double max_excitation = 0.0;
  double error_estimate = 0.0;
};

/// Parameter values of one grid/zip point.
inline std::vector<double> point_values(const config::SweepSpec& spec,
                                        std::size_t index) {
  std::vector<double> vals(spec.axes.size());
  if (spec.mode == config::SweepSpec::Mode::zip) {
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      vals[a] = spec.axes[a].values[index];
    }
    return vals;
  }
  // Row-major grid: the last axis varies fastest.
  std::size_t rem = index;
  for (std::size_t a = spec.axes.size(); a-- > 0;) {
    const auto& vv = spec.axes[a].values;
    vals[a] = vv[rem % vv.size()];
    rem /= vv.size();
  }
  return vals;
}

inline SweepRow run_point(const model::SystemParams& base,
                          const config::SweepSpec& spec, std::size_t index) {
  SweepRow row;
  row.point_index = index;
  row.axis_values = point_values(spec, index);
  model::SystemParams p = base;
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    config::apply_param(p, spec.axes[a].name, row.axis_values[a]);
  }
  try {
    // Ambiguous phases are sweep data (the residual signal shows up in the
    // excitation column); hard failures still produce status rows below.
    gate::GateOptions opts;
    opts.allow_ambiguous_phase = true;
    auto report = gate::run_gate(p, opts);
    report = gate::apply_correction(report, p);
    report.fidelity = gate::gate_fidelity(report, {1.0, 1.0, 1.0, -1.0});
    row.phi_eg = linalg::wrap_angle(report.phases[2]);
    row.phi_ee = linalg::wrap_angle(report.phases[3]);
    row.fidelity = report.fidelity;
    row.max_excitation = report.max_excitation;
    row.error_estimate = report.error_estimate;
  } catch (const Error& e) {
    row.status = "failed:" + e.name();
  }
  return row;
}

/// Execute every point, up to `jobs` concurrently. Rows come back in
/// ascending point_index regardless of execution order; failures become
/// status rows and do not stop the sweep.
inline std::vector<SweepRow> run_sweep(const model::SystemParams& base,
                                       const config::SweepSpec& spec,
                                       int jobs = 1) {
  const std::size_t n = spec.point_count();
  std::vector<SweepRow> rows(n);
  if (n == 0) return rows;
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = run_point(base, spec, i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      rows[i] = run_point(base, spec, i);
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(jobs, n));
  pool.reserve(count);
  for (int j = 0; j < count; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const config::SweepSpec& spec,
                            const std::vector<SweepRow>& rows,
                            const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "point_index";
  for (const auto& a : spec.axes) os << "," << a.name;
  os << ",status,phi_eg,phi_ee,fidelity,max_excitation,error_estimate\n";
  for (const auto& row : rows) {
    os << row.point_index;
    for (double v : row.axis_values) os << "," << gate::fmt12(v);
    os << "," << row.status;
    if (row.status == "ok") {
      os << "," << gate::fmt12(row.phi_eg) << "," << gate::fmt12(row.phi_ee)
         << "," << gate::fmt12(row.fidelity) << ","
         << gate::fmt12(row.max_excitation) << ","
         << gate::fmt12(row.error_estimate);
    } else {
      os << ",,,,,";
    }
    os << "\n";
  }
}

}  // namespace geomgate::sweep
