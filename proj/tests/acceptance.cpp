// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria run at their stated tolerances; measured values are
// printed so a failing line is diagnosable from the log alone.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geomgate/dynamics.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/gate.hpp"
#include "geomgate/geompath.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"

using namespace geomgate;

namespace {

struct Harness {
  int failed = 0;

  template <typename Body>
  void criterion(int id, const char* name, Body body) {
    std::ostringstream detail;
    bool pass = true;
    const auto start = std::chrono::steady_clock::now();
    try {
      pass = body(detail);
    } catch (const std::exception& e) {
      pass = false;
      detail << " exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %d: %s |%s | %.1fs\n", pass ? "PASS" : "FAIL",
                id, name, detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

bool check(bool cond, std::ostringstream& d, const std::string& label) {
  if (!cond) d << " !" << label;
  return cond;
}

geompath::DisplacementPath circle_path(Complex center, double radius,
                                       int segments) {
  geompath::DisplacementPath path;
  path.samples.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double th = 2.0 * M_PI * k / segments;
    path.samples.push_back(center + radius * std::exp(Complex(0.0, th)));
  }
  return path;
}

struct TrackedRun {
  double phase = 0.0;
  double max_pr = 0.0;
  double convergence = 0.0;
  double norm_drift = 0.0;
  dynamics::JointState final_state;
};

// Propagate one basis row with a phase tracker and |r>-population probe.
TrackedRun tracked_row(const model::JointOperator& h,
                       const dynamics::JointState& psi0, double t, double dt,
                       double tol) {
  gate::PhaseTracker tracker;
  double max_pr = 0.0;
  dynamics::PropagateOptions opts;
  opts.convergence_tol = tol;
  opts.observer = [&](double, const dynamics::JointState& s) {
    tracker.feed(psi0.vec.dot(s.vec));
    max_pr = std::max(max_pr, dynamics::r_population(s));
  };
  auto rep = dynamics::propagate_unitary(h, psi0, t, dt, opts);
  TrackedRun out;
  out.phase = tracker.value();
  out.max_pr = max_pr;
  out.convergence = rep.convergence_estimate;
  out.norm_drift = std::abs(rep.final_state.vec.norm() - 1.0);
  out.final_state = std::move(rep.final_state);
  return out;
}

}  // namespace

int main() {
  Harness h;

  // -------------------------------------------------------------------------
  h.criterion(1, "displacement algebra (composition law, closed-path identity)",
              [](std::ostringstream& d) {
    const auto start = std::chrono::steady_clock::now();
    const fock::FockDim dim(24);
    const int block = dim.n_max / 2 + 1;  // converged block; the truncation
                                          // edge carries O(1) cut artifacts
    bool ok = true;

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-0.21, 0.21);
    double worst_comp = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Complex a = (k == 0) ? Complex(0.1, 0.0) : Complex(u(rng), u(rng));
      const Complex b = (k == 0) ? Complex(0.0, 0.2) : Complex(u(rng), u(rng));
      const Matrix lhs = fock::displacement(b, dim).entries *
                         fock::displacement(a, dim).entries;
      const Matrix rhs = std::exp(Complex(0.0, std::imag(b * std::conj(a)))) *
                         fock::displacement(a + b, dim).entries;
      worst_comp = std::max(worst_comp,
                            linalg::max_abs(lhs.topLeftCorner(block, block) -
                                            rhs.topLeftCorner(block, block)));
    }
    d << " composition=" << worst_comp;
    ok &= check(worst_comp <= 1e-8, d, "composition<=1e-8");

    const auto path = circle_path(0.0, 0.1, 2000);
    const auto [product, theta] = geompath::compose_displacements(path, dim);
    const Matrix target = std::exp(Complex(0.0, theta)) *
                          Matrix::Identity(dim.levels(), dim.levels());
    const double closed = linalg::max_abs(
        product.entries.topLeftCorner(block, block) -
        target.topLeftCorner(block, block));
    d << " closed_path=" << closed;
    ok &= check(closed <= 1e-8, d, "closed_path<=1e-8");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    d << " runtime=" << secs << "s";
    ok &= check(secs < 1.0, d, "runtime<1s");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(2, "area law |theta| = 2*area, circle limit 2 pi r^2",
              [](std::ostringstream& d) {
    bool ok = true;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    double worst_poly = 0.0;
    for (int k = 0; k < 25; ++k) {
      geompath::DisplacementPath poly;
      for (int v = 0; v < 3 + (k % 8); ++v) {
        poly.samples.push_back(Complex(u(rng), u(rng)));
      }
      poly.samples.push_back(poly.samples.front());
      const auto res = geompath::path_phase(poly);
      worst_poly = std::max(worst_poly,
                            std::abs(std::abs(res.theta) -
                                     2.0 * std::abs(res.signed_area)));
    }
    d << " polygon_identity=" << worst_poly;
    ok &= check(worst_poly <= 1e-14, d, "polygon<=round-off");

    double worst_circle = 0.0;
    for (double r : {0.5, 0.25}) {
      const auto res = geompath::path_phase(circle_path(0.0, r, 10000));
      worst_circle = std::max(worst_circle,
                              std::abs(res.theta - 2.0 * M_PI * r * r));
    }
    // Off-origin circle: same enclosed area.
    const auto off = geompath::path_phase(circle_path(Complex(0.2, -0.1), 0.25, 10000));
    worst_circle = std::max(worst_circle,
                            std::abs(off.theta - 2.0 * M_PI * 0.25 * 0.25));
    d << " circle_error=" << worst_circle;
    ok &= check(worst_circle <= 1e-3, d, "circle<=1e-3");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(3, "preset A pi-phase gate (transformed model)",
              [](std::ostringstream& d) {
    bool ok = true;
    const auto p = model::preset_a().params;
    auto report = gate::run_gate(p);
    report = gate::apply_correction(report, p);
    report.fidelity = gate::gate_fidelity(report, {1.0, 1.0, 1.0, -1.0});

    const double e_gg = std::abs(report.phases[0]);
    const double e_ge = std::abs(report.phases[1] + M_PI / 2.0);
    const double e_eg = std::abs(report.phases[2] + M_PI / 2.0);
    const double e_ee = std::abs(report.phases[3] + 2.0 * M_PI);
    d << " phase_err=(" << e_gg << "," << e_ge << "," << e_eg << "," << e_ee << ")";
    ok &= check(e_gg <= 1e-3 && e_ge <= 1e-3 && e_eg <= 1e-3 && e_ee <= 1e-3, d,
                "phases<=1e-3");

    double worst_res = 0.0;
    for (const auto& a : report.residual_alpha) {
      worst_res = std::max(worst_res, std::abs(a));
    }
    d << " residual=" << worst_res;
    ok &= check(worst_res <= 1e-3, d, "residual<=1e-3");

    const double diag_err =
        std::max({std::abs(report.corrected_diagonal[0] - Complex(1.0)),
                  std::abs(report.corrected_diagonal[1] - Complex(1.0)),
                  std::abs(report.corrected_diagonal[2] - Complex(1.0)),
                  std::abs(report.corrected_diagonal[3] - Complex(-1.0))});
    d << " corrected_err=" << diag_err << " fidelity=" << report.fidelity;
    ok &= check(diag_err <= 1e-3, d, "corrected<=1e-3");
    ok &= check(report.fidelity >= 0.999, d, "fidelity>=0.999");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(4, "frame consistency H_i vs frame_transform after H_i'",
              [](std::ostringstream& d) {
    bool ok = true;
    for (const auto& preset : {model::preset_a(), model::preset_b()}) {
      const auto& p = preset.params;
      const auto hi = model::reduce_to_qubit_manifold(model::effective_hamiltonian(p));
      const auto hp = model::reduce_to_qubit_manifold(model::transformed_hamiltonian(p));
      const auto h0 = model::reduce_to_qubit_manifold(model::frame_hamiltonian(p));
      const int fl = p.fock_dim().levels();
      const double dt = (preset.name == "A") ? p.dt / 16.0 : 7.5e-4;

      std::vector<dynamics::JointState> states;
      states.push_back(dynamics::JointState::basis(4, fl, 2, 0));  // |eg,0>
      Vector v = Vector::Zero(4 * fl);
      v(0 * fl + 0) = std::sqrt(1.0 / 3.0);       // |gg,0>
      v(1 * fl + 0) = std::sqrt(1.0 / 3.0);       // |ge,0>
      v(2 * fl + 0) = 0.8 * std::sqrt(1.0 / 3.0); // |eg,0>
      v(2 * fl + 1) = 0.6 * std::sqrt(1.0 / 3.0); // |eg,1>
      states.push_back(dynamics::JointState::pure(4, fl, v));

      double worst = 0.0, worst_conv = 0.0;
      for (const auto& psi0 : states) {
        dynamics::PropagateOptions opts;
        opts.convergence_tol = 1e-4;
        const auto direct =
            dynamics::propagate_unitary(hi, psi0, p.t_total, dt, opts);
        const auto primed =
            dynamics::propagate_unitary(hp, psi0, p.t_total, dt, opts);
        const auto back = dynamics::frame_transform(primed.final_state, h0, p.t_total);
        worst = std::max(worst, (direct.final_state.vec - back.vec).norm());
        worst_conv = std::max({worst_conv, direct.convergence_estimate,
                               primed.convergence_estimate});
      }
      d << " preset" << preset.name << "=" << worst
        << " (conv_est=" << worst_conv << ")";
      ok &= check(worst <= 1e-6, d, std::string("preset") + preset.name + "<=1e-6");
    }
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(5, "full-model validation across Delta/g = 10, 20, 40",
              [](std::ostringstream& d) {
    bool ok = true;
    struct Point {
      double diff;
      double max_pr;
      double conv;
    };
    auto run_point = [](double delta_over_g) -> Point {
      model::SystemParams p;
      p.g = 1.0;
      p.omega = 1.0;
      p.delta_large = delta_over_g;
      p.delta_small = 1.0 / delta_over_g;  // delta = g^2/Delta
      p.n_max = 8;
      p.t_total = M_PI * delta_over_g;     // holds phi = -pi/2
      p.model_kind = model::ModelKind::full;

      const auto h_full = model::full_hamiltonian(p);
      const int fl = p.fock_dim().levels();
      const double dt_full = M_PI / (100.0 * delta_over_g);
      const auto full = tracked_row(
          h_full, dynamics::JointState::basis(9, fl, 3, 0), p.t_total, dt_full,
          5e-2);

      const auto h_eff = model::reduce_to_qubit_manifold(model::effective_hamiltonian(p));
      const double dt_eff = 2.0 * M_PI / (1000.0 * p.loop_frequency());
      const auto eff = tracked_row(
          h_eff, dynamics::JointState::basis(4, fl, 2, 0), p.t_total, dt_eff,
          5e-2);

      Point out;
      out.diff = std::abs(linalg::wrap_angle(full.phase - eff.phase));
      out.max_pr = full.max_pr;
      out.conv = std::max(full.convergence, eff.convergence);
      return out;
    };

    auto f10 = std::async(std::launch::async, run_point, 10.0);
    auto f20 = std::async(std::launch::async, run_point, 20.0);
    auto f40 = std::async(std::launch::async, run_point, 40.0);
    const Point p10 = f10.get(), p20 = f20.get(), p40 = f40.get();

    d << " diffs=(" << p10.diff << "," << p20.diff << "," << p40.diff << ")"
      << " p_r=(" << p10.max_pr << "," << p20.max_pr << "," << p40.max_pr << ")"
      << " conv_max=" << std::max({p10.conv, p20.conv, p40.conv});
    ok &= check(p10.diff > p20.diff && p20.diff > p40.diff, d, "monotone_diff");
    ok &= check(p10.max_pr <= 5e-2, d, "p_r(10)<=5e-2");
    ok &= check(p10.max_pr > p20.max_pr && p20.max_pr > p40.max_pr, d,
                "monotone_p_r");
    // The integrator must resolve the smallest compared difference.
    ok &= check(std::max({p10.conv, p20.conv, p40.conv}) < 0.2 * p40.diff, d,
                "integrator_resolves_diffs");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(6, "small-circle regime (preset B unitary)",
              [](std::ostringstream& d) {
    bool ok = true;
    auto p = model::preset_b().params;
    p.model_kind = model::ModelKind::effective;
    const auto report = gate::run_gate(p);
    const double two_r = 2.0 * p.trajectory_radius();

    d << " max_excitation=" << report.max_excitation;
    ok &= check(report.max_excitation >= 1e-3 && report.max_excitation <= 1e-2,
                d, "excitation_in_[1e-3,1e-2]");
    ok &= check(report.max_excitation <= two_r * two_r + 1e-4, d,
                "excitation<=(2R)^2+1e-4");

    // Witness superposition: minimum cavity purity over the run.
    const auto hq = model::reduce_to_qubit_manifold(model::effective_hamiltonian(p));
    const int fl = p.fock_dim().levels();
    Vector v = Vector::Zero(4 * fl);
    for (int q = 0; q < 4; ++q) v(q * fl) = 0.5;
    double min_purity = 1.0;
    dynamics::PropagateOptions opts;
    opts.convergence_tol = 1e-3;
    opts.observer = [&](double, const dynamics::JointState& s) {
      min_purity = std::min(min_purity, dynamics::cavity_purity(s));
    };
    dynamics::propagate_unitary(hq, dynamics::JointState::pure(4, fl, v),
                                p.t_total, p.dt, opts);
    d << " min_witness_purity=" << min_purity;
    ok &= check(min_purity >= 0.98, d, "purity>=0.98");
    ok &= check(min_purity >= 1.0 - 4.0 * two_r * two_r, d, "purity>=1-4(2R)^2");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(7, "decoherence budget (preset B, gamma = g/27, Lindblad witness)",
              [](std::ostringstream& d) {
    bool ok = true;
    const auto p = model::preset_b().params;
    const auto est = gate::decoherence_error_estimate(p);
    d << " p_exc=" << est.p_exc << " t_eff=" << est.t_eff
      << " error=" << est.error;
    ok &= check(std::abs(est.p_exc - 1.0 / 441.0) < 1e-12, d, "p_exc_exact");
    ok &= check(std::abs(est.error - 0.0122173) < 1e-3, d, "error~1.2e-2");

    auto report = gate::run_gate(p);
    report = gate::apply_correction(report, p);
    const double f_wit = gate::witness_fidelity(report, {1.0, 1.0, 1.0, -1.0});
    const double infid = 1.0 - f_wit;
    d << " witness_infidelity=" << infid << " ratio=" << infid / est.error;
    ok &= check(infid >= est.error / 3.0 && infid <= est.error * 3.0, d,
                "infidelity_within_3x");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(8, "geometric consistency: propagated loop phase = -2*area = Eq. phase",
              [](std::ostringstream& d) {
    bool ok = true;
    const auto p = model::preset_a().params;  // single loop by construction
    const auto hq = model::reduce_to_qubit_manifold(model::transformed_hamiltonian(p));
    const int fl = p.fock_dim().levels();
    const auto run = tracked_row(hq, dynamics::JointState::basis(4, fl, 2, 0),
                                 p.t_total, M_PI / 200.0, 1e-3);

    const double radius = p.trajectory_radius();
    const double area_phase = -2.0 * M_PI * radius * radius;
    const double analytic = model::conditional_phase(p, p.t_total).phi;
    const auto path = model::sample_alpha_path(p, p.t_total, 10000);
    const double path_theta = geompath::path_phase(path).theta;

    d << " propagated=" << run.phase << " -2area=" << area_phase
      << " analytic=" << analytic << " path=" << path_theta;
    ok &= check(std::abs(run.phase - area_phase) <= 1e-4, d, "prop_vs_area<=1e-4");
    ok &= check(std::abs(run.phase - analytic) <= 1e-4, d, "prop_vs_eq25<=1e-4");
    ok &= check(std::abs(path_theta - analytic) <= 1e-4, d, "path_vs_eq25<=1e-4");
    return ok;
  });

  // -------------------------------------------------------------------------
  h.criterion(9, "numerical hygiene: second-order ratio, norm/trace drift",
              [](std::ostringstream& d) {
    bool ok = true;
    auto p = model::preset_b().params;
    p.model_kind = model::ModelKind::transformed;
    const auto hq = model::reduce_to_qubit_manifold(model::transformed_hamiltonian(p));
    const int fl = p.fock_dim().levels();
    const auto psi0 = dynamics::JointState::basis(4, fl, 2, 0);

    dynamics::PropagateOptions opts;
    opts.convergence_tol = 1.0;
    const auto coarse = dynamics::propagate_unitary(hq, psi0, p.t_total, p.dt, opts);
    const auto fine =
        dynamics::propagate_unitary(hq, psi0, p.t_total, p.dt / 2.0, opts);
    const double ratio = coarse.convergence_estimate / fine.convergence_estimate;
    const double drift = std::abs(coarse.final_state.vec.norm() - 1.0);
    d << " ratio=" << ratio << " norm_drift=" << drift;
    ok &= check(ratio >= 3.5 && ratio <= 4.5, d, "ratio_in_[3.5,4.5]");
    ok &= check(drift <= 1e-8, d, "norm_drift<=1e-8");

    // Trace drift under decay over three loops.
    auto pl = model::preset_b().params;
    pl.t_total = 3.0 * 2.0 * M_PI / pl.loop_frequency();
    const auto hl = model::reduce_to_qubit_manifold(model::effective_hamiltonian(pl));
    const auto rho0 = dynamics::JointState::basis(4, fl, 2, 0).to_density();
    const auto lrep = dynamics::propagate_lindblad(hl, rho0, pl.gamma_cav,
                                                   pl.t_total, pl.dt);
    const double tdrift = std::abs(lrep.final_state.mat.trace().real() - 1.0);
    d << " trace_drift=" << tdrift;
    ok &= check(tdrift <= 1e-8, d, "trace_drift<=1e-8");
    return ok;
  });

  std::printf("%s: %d/9 criteria passed\n", h.failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              9 - h.failed);
  return h.failed == 0 ? 0 : 1;
}
