#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geomgate/errors.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"

namespace geomgate::dynamics {

enum class StateKind { pure, density };

/// State on (atoms) x (Fock): a complex vector for pure states or a density
/// operator. atom_dim is 9 (two three-level atoms), 4 (computational
/// manifold) or 1 (bare cavity mode).
struct JointState {
  StateKind kind = StateKind::pure;
  int atom_dim = 1;
  int fock_levels = 1;
  Vector vec;  // pure
  Matrix mat;  // density

  Eigen::Index dim() const { return static_cast<Eigen::Index>(atom_dim) * fock_levels; }

  static JointState pure(int atom_dim, int fock_levels, Vector v) {
    JointState s;
    s.kind = StateKind::pure;
    s.atom_dim = atom_dim;
    s.fock_levels = fock_levels;
    s.vec = std::move(v);
    return s;
  }

  static JointState density(int atom_dim, int fock_levels, Matrix m) {
    JointState s;
    s.kind = StateKind::density;
    s.atom_dim = atom_dim;
    s.fock_levels = fock_levels;
    s.mat = std::move(m);
    return s;
  }

  /// |atomic index> (x) |n>.
  static JointState basis(int atom_dim, int fock_levels, int atom_index, int n) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(atom_dim) * fock_levels);
    v(static_cast<Eigen::Index>(atom_index) * fock_levels + n) = 1.0;
    return pure(atom_dim, fock_levels, std::move(v));
  }

  JointState to_density() const {
    if (kind == StateKind::density) return *this;
    return density(atom_dim, fock_levels, vec * vec.adjoint());
  }
};

// ---------------------------------------------------------------------------
// Observables.
// ---------------------------------------------------------------------------

/// Reduced cavity density operator (partial trace over the atoms).
inline Matrix cavity_density(const JointState& s) {
  Matrix rho = Matrix::Zero(s.fock_levels, s.fock_levels);
  if (s.kind == StateKind::pure) {
    for (int a = 0; a < s.atom_dim; ++a) {
      const auto block = s.vec.segment(static_cast<Eigen::Index>(a) * s.fock_levels,
                                       s.fock_levels);
      rho += block * block.adjoint();
    }
  } else {
    for (int a = 0; a < s.atom_dim; ++a) {
      rho += s.mat.block(static_cast<Eigen::Index>(a) * s.fock_levels,
                         static_cast<Eigen::Index>(a) * s.fock_levels,
                         s.fock_levels, s.fock_levels);
    }
  }
  return rho;
}

inline double cavity_purity(const JointState& s) {
  const Matrix rho = cavity_density(s);
  return (rho * rho).trace().real();
}

/// <a+a>.
inline double photon_expectation(const JointState& s) {
  double out = 0.0;
  if (s.kind == StateKind::pure) {
    for (int a = 0; a < s.atom_dim; ++a) {
      for (int n = 1; n < s.fock_levels; ++n) {
        out += n * std::norm(s.vec(static_cast<Eigen::Index>(a) * s.fock_levels + n));
      }
    }
  } else {
    for (int a = 0; a < s.atom_dim; ++a) {
      for (int n = 1; n < s.fock_levels; ++n) {
        const Eigen::Index k = static_cast<Eigen::Index>(a) * s.fock_levels + n;
        out += n * s.mat(k, k).real();
      }
    }
  }
  return out;
}

/// <a>.
inline Complex cavity_amplitude(const JointState& s) {
  Complex out = 0.0;
  if (s.kind == StateKind::pure) {
    for (int a = 0; a < s.atom_dim; ++a) {
      const Eigen::Index base = static_cast<Eigen::Index>(a) * s.fock_levels;
      for (int n = 0; n + 1 < s.fock_levels; ++n) {
        out += std::sqrt(n + 1.0) * std::conj(s.vec(base + n)) * s.vec(base + n + 1);
      }
    }
  } else {
    // <a> = Tr(rho a) = sum sqrt(n+1) rho[(A,n+1),(A,n)]
    for (int a = 0; a < s.atom_dim; ++a) {
      const Eigen::Index base = static_cast<Eigen::Index>(a) * s.fock_levels;
      for (int n = 0; n + 1 < s.fock_levels; ++n) {
        out += std::sqrt(n + 1.0) * s.mat(base + n + 1, base + n);
      }
    }
  }
  return out;
}

/// Total population of states with any atom in |r>. Zero by construction on
/// the 4-dimensional computational manifold.
inline double r_population(const JointState& s) {
  if (s.atom_dim != model::atom::kPairDim) return 0.0;
  double out = 0.0;
  for (int a : {2, 5, 6, 7, 8}) {  // 3*l1+l2 with l1 = r or l2 = r
    const Eigen::Index base = static_cast<Eigen::Index>(a) * s.fock_levels;
    for (int n = 0; n < s.fock_levels; ++n) {
      out += (s.kind == StateKind::pure) ? std::norm(s.vec(base + n))
                                         : s.mat(base + n, base + n).real();
    }
  }
  return out;
}

inline double norm_or_trace(const JointState& s) {
  return (s.kind == StateKind::pure) ? s.vec.norm() : s.mat.trace().real();
}

// ---------------------------------------------------------------------------
// Propagation.
// ---------------------------------------------------------------------------

using Observer = std::function<void(double t, const JointState&)>;

struct PropagateOptions {
  double convergence_tol = 1e-6;
  bool check_convergence = true;
  Observer observer;  // called at t = 0 and after every step of the main run
};

struct PropagationReport {
  JointState final_state;
  long step_count = 0;
  double convergence_estimate = 0.0;  // norm difference under step halving
  std::vector<std::string> wall_notes;
};

namespace detail {

/// psi <- exp(-i h H) psi by a Taylor sum converged to machine precision.
inline void apply_unitary_step(const Matrix& h_matrix, double h, Vector& psi,
                               Vector& term, Vector& scratch) {
  term = psi;
  const double ref = psi.norm();
  for (int k = 1; k <= 80; ++k) {
    scratch.noalias() = h_matrix * term;
    term = (Complex(0.0, -h) / static_cast<double>(k)) * scratch;
    psi += term;
    if (term.norm() <= 1e-16 * ref) break;
  }
}

inline long step_count_for(double t_total, double dt) {
  if (t_total <= 0.0) return 0;
  return static_cast<long>(std::ceil(t_total / dt - 1e-9));
}

inline Vector run_unitary(const model::JointOperator& h, Vector psi,
                          double t_total, long n_steps, const Observer& obs,
                          int atom_dim, int fock_levels) {
  JointState view = JointState::pure(atom_dim, fock_levels, psi);
  if (obs) obs(0.0, view);
  if (n_steps == 0) return psi;
  const double step = t_total / n_steps;
  Vector term(psi.size()), scratch(psi.size());
  Matrix hm;
  for (long k = 0; k < n_steps; ++k) {
    h.eval_into((k + 0.5) * step, hm);
    apply_unitary_step(hm, step, psi, term, scratch);
    if (obs) {
      view.vec = psi;
      obs((k + 1) * step, view);
    }
  }
  return psi;
}

}  // namespace detail

/// Midpoint-exponential stepping of i d psi/dt = H(t) psi (second order).
/// The report always carries a convergence estimate from one half-step rerun.
inline PropagationReport propagate_unitary(const model::JointOperator& h,
                                           const JointState& psi0,
                                           double t_total, double dt,
                                           const PropagateOptions& opts = {}) {
  if (psi0.kind != StateKind::pure) {
    throw Error("BadState", "propagate_unitary expects a pure state");
  }
  if (dt <= 0.0) throw Error("BadStep", "dt must be positive");

  const long n = detail::step_count_for(t_total, dt);
  PropagationReport report;
  report.step_count = n;
  Vector fine, coarse = detail::run_unitary(h, psi0.vec, t_total, n, opts.observer,
                                            psi0.atom_dim, psi0.fock_levels);
  if (opts.check_convergence && n > 0) {
    fine = detail::run_unitary(h, psi0.vec, t_total, 2 * n, {}, psi0.atom_dim,
                               psi0.fock_levels);
    report.convergence_estimate = (coarse - fine).norm();
  }
  report.final_state = JointState::pure(psi0.atom_dim, psi0.fock_levels,
                                        std::move(coarse));

  const double drift = std::abs(report.final_state.vec.norm() - 1.0);
  if (drift > 1e-9) {
    report.wall_notes.push_back("norm drift " + std::to_string(drift));
  }
  if (opts.check_convergence && report.convergence_estimate > opts.convergence_tol) {
    throw NonConvergenceError(
        "half-step rerun changed the final state by " +
        std::to_string(report.convergence_estimate) + " (tol " +
        std::to_string(opts.convergence_tol) + ")");
  }
  return report;
}

struct LindbladOptions : PropagateOptions {
  double gamma_r = 0.0;  // optional |r> -> |e> decay per atom, default off
};

namespace detail {

struct JumpTerm {
  double rate;
  Matrix op;
  Matrix op_adjoint;
  Matrix opdag_op;
};

inline void lindblad_rhs_into(const Matrix& h_matrix, const Matrix& rho,
                              const std::vector<JumpTerm>& jumps, Matrix& out,
                              Matrix& tmp) {
  tmp.noalias() = h_matrix * rho;
  tmp.noalias() -= rho * h_matrix;
  out = Complex(0.0, -1.0) * tmp;
  for (const auto& j : jumps) {
    tmp.noalias() = j.op * rho;
    out.noalias() += j.rate * (tmp * j.op_adjoint);
    out.noalias() -= (0.5 * j.rate) * (j.opdag_op * rho);
    out.noalias() -= (0.5 * j.rate) * (rho * j.opdag_op);
  }
}

inline Matrix run_lindblad(const model::JointOperator& h, Matrix rho,
                           const std::vector<JumpTerm>& jumps, double t_total,
                           long n_steps, const Observer& obs, int atom_dim,
                           int fock_levels) {
  JointState view = JointState::density(atom_dim, fock_levels, rho);
  if (obs) obs(0.0, view);
  if (n_steps == 0) return rho;
  const double step = t_total / n_steps;
  Matrix hm, term, rhs, tmp;
  for (long k = 0; k < n_steps; ++k) {
    h.eval_into((k + 0.5) * step, hm);
    // rho <- exp(step * L) rho via the Taylor sum of the superoperator.
    term = rho;
    const double ref = rho.norm();
    for (int m = 1; m <= 80; ++m) {
      lindblad_rhs_into(hm, term, jumps, rhs, tmp);
      term = (step / static_cast<double>(m)) * rhs;
      rho += term;
      if (term.norm() <= 1e-16 * ref) break;
    }
    if (obs) {
      view.mat = rho;
      obs((k + 1) * step, view);
    }
  }
  return rho;
}

}  // namespace detail

/// d rho/dt = -i[H(t), rho] + gamma (a rho a+ - {a+a, rho}/2), second-order
/// midpoint stepping. gamma_cav = 0 reproduces unitary propagation.
inline PropagationReport propagate_lindblad(const model::JointOperator& h,
                                            const JointState& rho0,
                                            double gamma_cav, double t_total,
                                            double dt,
                                            const LindbladOptions& opts = {}) {
  if (rho0.kind != StateKind::density) {
    throw Error("BadState", "propagate_lindblad expects a density operator");
  }
  if (dt <= 0.0) throw Error("BadStep", "dt must be positive");
  if (gamma_cav < 0.0) throw Error("BadRate", "gamma_cav must be >= 0");

  std::vector<detail::JumpTerm> jumps;
  const Matrix id_atoms = Matrix::Identity(rho0.atom_dim, rho0.atom_dim);
  const Matrix a = fock::annihilation(fock::FockDim(rho0.fock_levels - 1)).entries;
  if (gamma_cav > 0.0) {
    Matrix j = linalg::kron(id_atoms, a);
    Matrix jdag = j.adjoint();
    jumps.push_back({gamma_cav, j, jdag, jdag * j});
  }
  if (opts.gamma_r > 0.0 && rho0.atom_dim == model::atom::kPairDim) {
    const Matrix id_f = Matrix::Identity(rho0.fock_levels, rho0.fock_levels);
    for (int atom_j : {0, 1}) {
      Matrix j = linalg::kron(model::atom::on_atom(atom_j, model::atom::lower()), id_f);
      Matrix jdag = j.adjoint();
      jumps.push_back({opts.gamma_r, j, jdag, jdag * j});
    }
  }

  const long n = detail::step_count_for(t_total, dt);
  PropagationReport report;
  report.step_count = n;
  Matrix coarse = detail::run_lindblad(h, rho0.mat, jumps, t_total, n,
                                       opts.observer, rho0.atom_dim,
                                       rho0.fock_levels);
  if (opts.check_convergence && n > 0) {
    Matrix fine = detail::run_lindblad(h, rho0.mat, jumps, t_total, 2 * n, {},
                                       rho0.atom_dim, rho0.fock_levels);
    report.convergence_estimate = (coarse - fine).norm();
  }
  report.final_state = JointState::density(rho0.atom_dim, rho0.fock_levels,
                                           std::move(coarse));

  const Matrix& rho = report.final_state.mat;
  const double trace_drift = std::abs(rho.trace().real() - 1.0);
  if (trace_drift > 1e-9) {
    report.wall_notes.push_back("trace drift " + std::to_string(trace_drift));
  }
  if (linalg::hermiticity_defect(rho) > 1e-9) {
    report.wall_notes.push_back("hermiticity defect above 1e-9");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-6) {
    report.wall_notes.push_back("PositivityBreach: min eigenvalue " +
                                std::to_string(min_eig));
  }
  if (opts.check_convergence && report.convergence_estimate > opts.convergence_tol) {
    throw NonConvergenceError(
        "half-step rerun changed the final state by " +
        std::to_string(report.convergence_estimate) + " (tol " +
        std::to_string(opts.convergence_tol) + ")");
  }
  return report;
}

/// |psi(t)> = e^{-i H_0 t} |psi'(t)> for a diagonal, time-independent H_0.
inline JointState frame_transform(const JointState& psi_prime,
                                  const model::JointOperator& h0, double t) {
  if (h0.time_dependent()) {
    throw Error("BadFrame", "frame_transform requires a time-independent H_0");
  }
  const Eigen::Index d = h0.dim();
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      if (r != c && h0.static_part(r, c) != 0.0) {
        throw Error("BadFrame", "frame_transform requires a diagonal H_0");
      }
    }
  }
  Vector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    phases(k) = std::exp(Complex(0.0, -h0.static_part(k, k).real() * t));
  }
  JointState out = psi_prime;
  if (psi_prime.kind == StateKind::pure) {
    out.vec = phases.asDiagonal() * psi_prime.vec;
  } else {
    out.mat = phases.asDiagonal() * psi_prime.mat * phases.conjugate().asDiagonal();
  }
  return out;
}

/// Per-step trajectory dump: t, Re<a>, Im<a>, |r> population, cavity purity.
inline Observer csv_dump_observer(std::ostream& os) {
  return [&os](double t, const JointState& s) {
    const Complex a = cavity_amplitude(s);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g", t, a.real(),
                  a.imag(), r_population(s), cavity_purity(s));
    os << buf << "\n";
  };
}

}  // namespace geomgate::dynamics
