#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geomgate/dynamics.hpp"
#include "geomgate/errors.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"

namespace geomgate::gate {

/// Computational basis order used everywhere: gg, ge, eg, ee.
inline constexpr std::array<const char*, 4> kBasisNames = {"gg", "ge", "eg", "ee"};

/// Number of atoms in |e> per basis state (atom 1, atom 2).
inline constexpr std::array<int, 4> kExcitedAtom1 = {0, 0, 1, 1};
inline constexpr std::array<int, 4> kExcitedAtom2 = {0, 1, 0, 1};

/// Accumulates a continuously unwrapped phase from successive samples of a
/// complex amplitude. Robust as long as the per-step phase change stays
/// below pi and the amplitude never vanishes.
class PhaseTracker {
 public:
  void feed(Complex c) {
    const double a = std::arg(c);
    if (started_) {
      acc_ += linalg::wrap_angle(a - prev_);
    } else {
      acc_ = a;
      started_ = true;
    }
    prev_ = a;
    min_abs_ = std::min(min_abs_, std::abs(c));
  }
  double value() const { return acc_; }
  double min_abs() const { return min_abs_; }

 private:
  bool started_ = false;
  double prev_ = 0.0;
  double acc_ = 0.0;
  double min_abs_ = std::numeric_limits<double>::infinity();
};

struct GateOptions {
  /// Record AmbiguousPhase rows as notes instead of throwing.
  bool allow_ambiguous_phase = false;
  /// Convergence tolerance handed to the propagator. The gate contract is
  /// phase accuracy at the 1e-3 level, so the default is matched to it.
  double convergence_tol = 1e-3;
};

struct GateReport {
  model::SystemParams params;

  // Basis order gg, ge, eg, ee throughout.
  std::array<double, 4> phases{};               // unwrapped, radians
  std::array<Complex, 4> residual_alpha{};      // <a> at the final time
  std::array<double, 4> cavity_purity{};        // Tr(rho_cav^2) at the final time
  std::array<Complex, 4> corrected_diagonal{};  // unit modulus, set by apply_correction
  double fidelity = 0.0;
  double max_excitation = 0.0;  // max transient <a+a> over the single-excitation rows
  double error_estimate = 0.0;

  // Diagnostics beyond the serialized schema.
  std::array<Complex, 4> raw_overlaps{};        // <k,0|psi_k(t)> (unitary runs)
  std::array<double, 4> populations{};          // <k,0|rho_k|k,0> (Lindblad runs)
  std::array<double, 4> max_excitation_rows{};
  double max_r_population = 0.0;
  double witness_fidelity = -1.0;  // Lindblad dephasing witness, -1 when not run
  bool corrected = false;
  std::vector<std::string> notes;
  dynamics::JointState witness_state;  // final witness density (Lindblad runs)
};

struct DecoherenceEstimate {
  double p_exc = 0.0;   // (Omega g / (Delta delta + g^2))^2
  double t_eff = 0.0;   // effective cavity decay time
  double error = 0.0;   // t_total / t_eff
};

/// Cavity-decay error budget. The excitation probability is exact; the
/// effective decay time follows the order-of-magnitude arithmetic of the
/// error budget (p_exc rounded to its decade), giving t/T ~ 1e-2 in the
/// small-circle regime.
inline DecoherenceEstimate decoherence_error_estimate(const model::SystemParams& p) {
  if (p.gamma_cav <= 0.0) {
    throw Error("BadRate", "decoherence_error_estimate requires gamma_cav > 0");
  }
  DecoherenceEstimate est;
  est.p_exc = std::pow(p.trajectory_radius(), 2);
  const double decade = std::pow(10.0, std::round(std::log10(est.p_exc)));
  est.t_eff = 1.0 / (p.gamma_cav * decade);
  est.error = p.t_total / est.t_eff;
  return est;
}

namespace detail {

struct RowProbe {
  PhaseTracker tracker;
  double max_n = 0.0;
  double max_pr = 0.0;
};

inline dynamics::Observer make_row_observer(RowProbe& probe, const Vector& reference) {
  return [&probe, &reference](double, const dynamics::JointState& s) {
    probe.tracker.feed(reference.dot(s.vec));
    probe.max_n = std::max(probe.max_n, dynamics::photon_expectation(s));
    probe.max_pr = std::max(probe.max_pr, dynamics::r_population(s));
  };
}

/// Witness input (|g>+|e>)(|g>+|e>)/2 (x) |0>.
inline dynamics::JointState witness_state(int atom_dim, int fock_levels) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(atom_dim) * fock_levels);
  const auto rows = (atom_dim == 4)
                        ? std::array<int, 4>{0, 1, 2, 3}
                        : std::array<int, 4>{model::atom::kQubitIndices[0],
                                             model::atom::kQubitIndices[1],
                                             model::atom::kQubitIndices[2],
                                             model::atom::kQubitIndices[3]};
  for (int r : rows) v(static_cast<Eigen::Index>(r) * fock_levels) = 0.5;
  return dynamics::JointState::pure(atom_dim, fock_levels, std::move(v));
}

}  // namespace detail

/// Propagate the four computational basis states (cavity in vacuum) under the
/// selected model and extract the conditional phases, residual displacements,
/// cavity purity and transient excitation. Lindblad runs additionally
/// propagate the superposition witness, whose coherences supply the phases.
inline GateReport run_gate(const model::SystemParams& p, const GateOptions& opts = {}) {
  GateReport report;
  report.params = p;
  if (p.gamma_cav > 0.0) {
    report.error_estimate = decoherence_error_estimate(p).error;
  }

  const bool full = p.model_kind == model::ModelKind::full;
  const bool lindblad = p.model_kind == model::ModelKind::effective_lindblad;
  model::JointOperator h = model::hamiltonian(p);
  if (!full) h = model::reduce_to_qubit_manifold(h);
  const int atom_dim = full ? model::atom::kPairDim : 4;
  const int fock_levels = p.fock_dim().levels();
  const auto basis_row = [&](int k) {
    return full ? model::atom::kQubitIndices[k] : k;
  };

  std::vector<std::string> ambiguous;

  if (!lindblad) {
    for (int k = 0; k < 4; ++k) {
      const auto psi0 =
          dynamics::JointState::basis(atom_dim, fock_levels, basis_row(k), 0);
      detail::RowProbe probe;
      dynamics::PropagateOptions popts;
      popts.convergence_tol = opts.convergence_tol;
      popts.observer = detail::make_row_observer(probe, psi0.vec);
      const auto run = dynamics::propagate_unitary(h, psi0, p.t_total, p.dt, popts);

      const Complex overlap = psi0.vec.dot(run.final_state.vec);
      report.phases[k] = probe.tracker.value();
      report.raw_overlaps[k] = overlap;
      report.residual_alpha[k] = dynamics::cavity_amplitude(run.final_state);
      report.cavity_purity[k] = dynamics::cavity_purity(run.final_state);
      report.max_excitation_rows[k] = probe.max_n;
      report.max_r_population = std::max(report.max_r_population, probe.max_pr);
      for (const auto& n : run.wall_notes) report.notes.push_back(n);
      if (std::abs(overlap) < 0.5) {
        ambiguous.push_back(std::string(kBasisNames[k]) + " (|overlap| = " +
                            std::to_string(std::abs(overlap)) + ")");
      }
    }
  } else {
    // Basis rows as density operators: populations, residuals, purity.
    for (int k = 0; k < 4; ++k) {
      const auto psi0 =
          dynamics::JointState::basis(atom_dim, fock_levels, basis_row(k), 0);
      const auto rho0 = psi0.to_density();
      detail::RowProbe probe;
      dynamics::LindbladOptions lopts;
      lopts.convergence_tol = opts.convergence_tol;
      lopts.observer = [&probe](double, const dynamics::JointState& s) {
        probe.max_n = std::max(probe.max_n, dynamics::photon_expectation(s));
        probe.max_pr = std::max(probe.max_pr, dynamics::r_population(s));
      };
      const auto run = dynamics::propagate_lindblad(h, rho0, p.gamma_cav,
                                                    p.t_total, p.dt, lopts);
      const Eigen::Index i0 =
          static_cast<Eigen::Index>(basis_row(k)) * fock_levels;
      report.populations[k] = run.final_state.mat(i0, i0).real();
      report.residual_alpha[k] = dynamics::cavity_amplitude(run.final_state);
      report.cavity_purity[k] = dynamics::cavity_purity(run.final_state);
      report.max_excitation_rows[k] = probe.max_n;
      report.max_r_population = std::max(report.max_r_population, probe.max_pr);
      for (const auto& n : run.wall_notes) report.notes.push_back(n);
    }

    // Witness run: the coherences against the dark |gg> row carry the
    // conditional phases, which basis-state density runs cannot.
    const auto wit0 = detail::witness_state(atom_dim, fock_levels).to_density();
    std::array<PhaseTracker, 4> trackers;
    const std::array<Eigen::Index, 4> rows = {
        static_cast<Eigen::Index>(basis_row(0)) * fock_levels,
        static_cast<Eigen::Index>(basis_row(1)) * fock_levels,
        static_cast<Eigen::Index>(basis_row(2)) * fock_levels,
        static_cast<Eigen::Index>(basis_row(3)) * fock_levels};
    dynamics::LindbladOptions lopts;
    lopts.convergence_tol = opts.convergence_tol;
    lopts.observer = [&trackers, &rows](double, const dynamics::JointState& s) {
      for (int k = 0; k < 4; ++k) {
        trackers[k].feed(4.0 * s.mat(rows[k], rows[0]));
      }
    };
    const auto run = dynamics::propagate_lindblad(h, wit0, p.gamma_cav, p.t_total,
                                                  p.dt, lopts);
    report.witness_state = run.final_state;
    for (int k = 0; k < 4; ++k) {
      report.phases[k] = trackers[k].value();
      report.raw_overlaps[k] = 4.0 * run.final_state.mat(rows[k], rows[0]);
      if (std::abs(report.raw_overlaps[k]) < 0.5) {
        ambiguous.push_back(std::string(kBasisNames[k]) + " (|coherence|*4 = " +
                            std::to_string(std::abs(report.raw_overlaps[k])) + ")");
      }
    }
    for (const auto& n : run.wall_notes) report.notes.push_back(n);
  }

  report.max_excitation =
      std::max({report.max_excitation_rows[0], report.max_excitation_rows[1],
                report.max_excitation_rows[2]});

  if (!ambiguous.empty()) {
    std::string msg = "phase ill-defined for rows:";
    for (const auto& a : ambiguous) msg += " " + a;
    if (!opts.allow_ambiguous_phase) throw AmbiguousPhaseError(msg);
    report.notes.push_back("AmbiguousPhase: " + msg);
  }
  return report;
}

/// Correction phase applied per atom in |e>: the measured single-excitation
/// phases (Eq.-(27)-style one-qubit rotations).
inline std::array<Complex, 4> correction_factors(const GateReport& report) {
  const double phi_atom1 = report.phases[2];  // eg row
  const double phi_atom2 = report.phases[1];  // ge row
  std::array<Complex, 4> f;
  for (int k = 0; k < 4; ++k) {
    const double corr =
        kExcitedAtom1[k] * phi_atom1 + kExcitedAtom2[k] * phi_atom2;
    f[k] = std::exp(Complex(0.0, -corr));
  }
  return f;
}

/// One-qubit phase correction: each atom in |e> contributes one factor, so a
/// phase vector (0, x, x, 4x) becomes the diagonal (1, 1, 1, e^{i 2x}).
inline GateReport apply_correction(const GateReport& report,
                                   const model::SystemParams& /*params*/) {
  GateReport out = report;
  const auto f = correction_factors(report);
  for (int k = 0; k < 4; ++k) {
    out.corrected_diagonal[k] =
        std::exp(Complex(0.0, report.phases[k])) * f[k];
  }
  out.corrected = true;
  return out;
}

/// Unitary runs: F = |1/4 sum_k d_k* c_k|^2 with c_k the corrected overlap,
/// capturing both phase error and leakage. Lindblad runs: the average
/// retained population of the four basis states (the dephasing-sensitive
/// check is witness_fidelity).
inline double gate_fidelity(const GateReport& report,
                            const std::array<Complex, 4>& ideal_diagonal) {
  if (report.params.model_kind == model::ModelKind::effective_lindblad) {
    return 0.25 * (report.populations[0] + report.populations[1] +
                   report.populations[2] + report.populations[3]);
  }
  const auto f = correction_factors(report);
  Complex acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += std::conj(ideal_diagonal[k]) * report.raw_overlaps[k] * f[k];
  }
  return std::norm(acc / 4.0);
}

/// Dephasing witness for Lindblad runs: overlap of the corrected witness
/// density with the ideal output of the (|g>+|e>)(|g>+|e>)/2 input.
inline double witness_fidelity(const GateReport& report,
                               const std::array<Complex, 4>& ideal_diagonal) {
  if (report.witness_state.kind != dynamics::StateKind::density ||
      report.witness_state.mat.size() == 0) {
    throw Error("NoWitness", "witness_fidelity requires a Lindblad gate run");
  }
  const auto f = correction_factors(report);
  const int fl = report.witness_state.fock_levels;
  const bool full = report.witness_state.atom_dim == model::atom::kPairDim;
  double fid = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Index rk =
        static_cast<Eigen::Index>(full ? model::atom::kQubitIndices[k] : k) * fl;
    for (int l = 0; l < 4; ++l) {
      const Eigen::Index rl =
          static_cast<Eigen::Index>(full ? model::atom::kQubitIndices[l] : l) * fl;
      const Complex term = std::conj(ideal_diagonal[k]) * f[k] *
                           report.witness_state.mat(rk, rl) *
                           std::conj(f[l]) * ideal_diagonal[l];
      fid += 0.25 * term.real();
    }
  }
  return fid;
}

// ---------------------------------------------------------------------------
// Serialization: fixed key order, floats with 12 significant digits.
// ---------------------------------------------------------------------------

inline std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string to_json(const GateReport& r,
                           const std::vector<std::pair<std::string, std::string>>&
                               meta = {}) {
  auto pair_list = [](const std::array<Complex, 4>& v) {
    std::string s = "[";
    for (int k = 0; k < 4; ++k) {
      s += "[" + fmt12(v[k].real()) + "," + fmt12(v[k].imag()) + "]";
      if (k < 3) s += ",";
    }
    return s + "]";
  };
  auto real_list = [](const std::array<double, 4>& v) {
    std::string s = "[";
    for (int k = 0; k < 4; ++k) {
      s += fmt12(v[k]);
      if (k < 3) s += ",";
    }
    return s + "]";
  };

  std::string s = "{";
  if (!meta.empty()) {
    s += "\"meta\":{";
    for (std::size_t i = 0; i < meta.size(); ++i) {
      s += "\"" + meta[i].first + "\":\"" + meta[i].second + "\"";
      if (i + 1 < meta.size()) s += ",";
    }
    s += "},";
  }
  s += "\"phases\":" + real_list(r.phases);
  s += ",\"residual_alpha\":" + pair_list(r.residual_alpha);
  s += ",\"purity\":" + real_list(r.cavity_purity);
  s += ",\"corrected\":" + pair_list(r.corrected_diagonal);
  s += ",\"fidelity\":" + fmt12(r.fidelity);
  s += ",\"max_excitation\":" + fmt12(r.max_excitation);
  s += ",\"error_estimate\":" + fmt12(r.error_estimate);
  s += "}";
  return s;
}

}  // namespace geomgate::gate
