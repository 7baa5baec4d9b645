#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "geomgate/errors.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/geompath.hpp"
#include "geomgate/linalg.hpp"

namespace geomgate::model {

enum class ModelKind { full, effective, transformed, effective_lindblad };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::full: return "full";
    case ModelKind::effective: return "effective";
    case ModelKind::transformed: return "transformed";
    case ModelKind::effective_lindblad: return "effective_lindblad";
  }
  return "?";
}

/// All physics values are ratios to the atom-cavity coupling g, which sets
/// the frequency unit (g = 1 by default).
struct SystemParams {
  double g = 1.0;            // atom-cavity coupling, the frequency unit
  double omega = 1.0;        // classical Rabi frequency
  double delta_large = 10.0; // cavity detuning Delta
  double delta_small = 0.1;  // two-field detuning delta
  double gamma_cav = 0.0;    // cavity decay rate
  int n_max = 8;
  double t_total = 0.0;
  double dt = 0.01;
  ModelKind model_kind = ModelKind::transformed;

  fock::FockDim fock_dim() const { return fock::FockDim(n_max); }

  /// Detuning of the drive sideband from the cavity pull, delta + g^2/Delta.
  double loop_frequency() const { return delta_small + g * g / delta_large; }

  /// Radius scale Omega*g / (Delta*delta + g^2) of the conditional trajectory.
  double trajectory_radius() const {
    return omega * g / (delta_large * delta_small + g * g);
  }
};

/// Recommended step: resolve the fastest phase factor by >= 200 points.
inline double default_dt(const SystemParams& p) {
  const double fast = (p.model_kind == ModelKind::full)
                          ? p.delta_large
                          : p.loop_frequency();
  return 2.0 * M_PI / (200.0 * fast);
}

/// Soft validity checks; reported, never enforced.
inline std::vector<std::string> validity_warnings(const SystemParams& p) {
  std::vector<std::string> w;
  if (p.delta_large < 5.0 * std::max(p.g, p.omega)) {
    w.push_back("dispersive validity: delta_large < 5*max(g, omega)");
  }
  if (p.delta_small > 0.5 * p.delta_large) {
    w.push_back("two-field detuning is not small against delta_large");
  }
  if (p.model_kind == ModelKind::full && p.dt > 2.0 * M_PI / (50.0 * p.delta_large)) {
    w.push_back("dt coarser than 1/50 of the delta_large period");
  }
  return w;
}

// ---------------------------------------------------------------------------
// Atomic basis. Level order g < e < r per atom; atom 1 is the slow (left)
// tensor factor, so the two-atom index is 3*l1 + l2. The computational
// sub-basis is ordered gg, ge, eg, ee.
// ---------------------------------------------------------------------------

namespace atom {

inline constexpr int kG = 0;
inline constexpr int kE = 1;
inline constexpr int kR = 2;
inline constexpr int kLevels = 3;
inline constexpr int kPairDim = 9;

/// Atomic composite indices of the computational basis {gg, ge, eg, ee}.
inline constexpr std::array<int, 4> kQubitIndices = {0, 1, 3, 4};

inline Matrix proj(int level) {
  Matrix p = Matrix::Zero(kLevels, kLevels);
  p(level, level) = 1.0;
  return p;
}

inline Matrix raise() {  // S+ = |r><e|
  Matrix s = Matrix::Zero(kLevels, kLevels);
  s(kR, kE) = 1.0;
  return s;
}

inline Matrix lower() { return raise().adjoint(); }  // S- = |e><r|

inline Matrix sz() { return 0.5 * (proj(kR) - proj(kE)); }

/// Place a single-atom operator on atom j (0 or 1) of the pair.
inline Matrix on_atom(int j, const Matrix& op) {
  const Matrix id = Matrix::Identity(kLevels, kLevels);
  return (j == 0) ? linalg::kron(op, id) : linalg::kron(id, op);
}

inline Matrix pair_sum(const Matrix& op) {
  return on_atom(0, op) + on_atom(1, op);
}

inline Matrix dipole_exchange() {  // S1+ S2- + S1- S2+
  return linalg::kron(raise(), lower()) + linalg::kron(lower(), raise());
}

}  // namespace atom

// ---------------------------------------------------------------------------
// Joint operators: H(t) = static + sum_m [e^{-i w_m t} B_m + h.c.], which is
// Hermitian at every t by construction when the static part is Hermitian.
// ---------------------------------------------------------------------------

struct Harmonic {
  double omega = 0.0;
  Matrix amplitude;          // B_m
  Matrix amplitude_adjoint;  // cached B_m^+
};

struct JointOperator {
  int atom_dim = atom::kPairDim;
  int fock_levels = 0;
  Matrix static_part;
  std::vector<Harmonic> harmonics;

  Eigen::Index dim() const { return static_part.rows(); }
  bool time_dependent() const { return !harmonics.empty(); }

  void add_harmonic(double omega, Matrix amplitude) {
    Matrix adj = amplitude.adjoint();
    harmonics.push_back({omega, std::move(amplitude), std::move(adj)});
  }

  /// Allocation-free evaluation for propagation inner loops.
  void eval_into(double t, Matrix& out) const {
    out = static_part;
    for (const auto& term : harmonics) {
      const Complex phase = std::exp(Complex(0.0, -term.omega * t));
      out.noalias() += phase * term.amplitude;
      out.noalias() += std::conj(phase) * term.amplitude_adjoint;
    }
  }

  Matrix at(double t) const {
    Matrix h;
    eval_into(t, h);
    return h;
  }
};

/// Rotating frame at the cavity frequency, Hermitized reading:
///   H = sum_j [Delta Sz_j + g (a Sj+ + a+ Sj-) + Omega (e^{-i delta t} Sj+ + h.c.)]
inline JointOperator full_hamiltonian(const SystemParams& p) {
  const auto dim = p.fock_dim();
  const Matrix a = fock::annihilation(dim).entries;
  const Matrix id_f = Matrix::Identity(dim.levels(), dim.levels());

  Matrix h0 = p.delta_large * linalg::kron(atom::pair_sum(atom::sz()), id_f);
  h0 += p.g * (linalg::kron(atom::pair_sum(atom::raise()), a) +
               linalg::kron(atom::pair_sum(atom::lower()), a.adjoint()));

  JointOperator op{atom::kPairDim, dim.levels(), std::move(h0), {}};
  op.add_harmonic(p.delta_small,
                  p.omega * linalg::kron(atom::pair_sum(atom::raise()), id_f));
  return op;
}

/// Second-order effective Hamiltonian:
///   H_i = sum_j (1/Delta) [ (g^2 a+a + Omega^2 + Omega g a e^{i delta t}
///         + Omega g a+ e^{-i delta t}) (|r_j><r_j| - |e_j><e_j|)
///         + g^2 |r_j><r_j| ] + (g^2/Delta)(S1+ S2- + S1- S2+)
inline JointOperator effective_hamiltonian(const SystemParams& p) {
  const auto dim = p.fock_dim();
  const Matrix a = fock::annihilation(dim).entries;
  const Matrix id_f = Matrix::Identity(dim.levels(), dim.levels());
  const Matrix nhat = fock::number(dim).entries;
  const double inv_delta = 1.0 / p.delta_large;
  const Matrix rr_minus_ee =
      atom::pair_sum(atom::proj(atom::kR) - atom::proj(atom::kE));

  Matrix h0 = inv_delta * p.g * p.g * linalg::kron(rr_minus_ee, nhat);
  h0 += inv_delta * p.omega * p.omega * linalg::kron(rr_minus_ee, id_f);
  h0 += inv_delta * p.g * p.g *
        linalg::kron(atom::pair_sum(atom::proj(atom::kR)), id_f);
  h0 += inv_delta * p.g * p.g * linalg::kron(atom::dipole_exchange(), id_f);

  JointOperator op{atom::kPairDim, dim.levels(), std::move(h0), {}};
  op.add_harmonic(p.delta_small,
                  inv_delta * p.omega * p.g * linalg::kron(rr_minus_ee, a.adjoint()));
  return op;
}

/// Time-independent frame generator:
///   H_0 = sum_j (1/Delta) [ (g^2 a+a + Omega^2)(|r_j><r_j| - |e_j><e_j|)
///         + g^2 |r_j><r_j| ]
/// Diagonal in the product basis.
inline JointOperator frame_hamiltonian(const SystemParams& p) {
  const auto dim = p.fock_dim();
  const Matrix id_f = Matrix::Identity(dim.levels(), dim.levels());
  const Matrix nhat = fock::number(dim).entries;
  const double inv_delta = 1.0 / p.delta_large;
  const Matrix rr_minus_ee =
      atom::pair_sum(atom::proj(atom::kR) - atom::proj(atom::kE));

  Matrix h0 = inv_delta * p.g * p.g * linalg::kron(rr_minus_ee, nhat);
  h0 += inv_delta * p.omega * p.omega * linalg::kron(rr_minus_ee, id_f);
  h0 += inv_delta * p.g * p.g *
        linalg::kron(atom::pair_sum(atom::proj(atom::kR)), id_f);
  return {atom::kPairDim, dim.levels(), std::move(h0), {}};
}

/// Interaction-picture Hamiltonian, conjugate-pair (Hermitian) form:
///   H_i' = (Omega g / Delta) sum_j { [a e^{i(delta - g^2/Delta)t} + h.c.] |r_j><r_j|
///          - [a e^{i(delta + g^2/Delta)t} + h.c.] |e_j><e_j| }
///          + (g^2/Delta)(S1+ S2- + S1- S2+)
///
/// The sideband frequencies are per-atom constants; the identity
/// e^{iH_0 t}(H_i - H_0)e^{-iH_0 t} = H_i'(t) holds exactly on the sector
/// with at most one atom in |e> (see transformed_consistency_residual).
inline JointOperator transformed_hamiltonian(const SystemParams& p) {
  const auto dim = p.fock_dim();
  const Matrix a = fock::annihilation(dim).entries;
  const Matrix id_f = Matrix::Identity(dim.levels(), dim.levels());
  const double lam = p.omega * p.g / p.delta_large;
  const double stark = p.g * p.g / p.delta_large;

  Matrix h0 = stark * linalg::kron(atom::dipole_exchange(), id_f);
  JointOperator op{atom::kPairDim, dim.levels(), std::move(h0), {}};
  op.add_harmonic(
      p.delta_small - stark,
      lam * linalg::kron(atom::pair_sum(atom::proj(atom::kR)), a.adjoint()));
  op.add_harmonic(
      p.delta_small + stark,
      -lam * linalg::kron(atom::pair_sum(atom::proj(atom::kE)), a.adjoint()));
  return op;
}

inline JointOperator hamiltonian(const SystemParams& p) {
  switch (p.model_kind) {
    case ModelKind::full: return full_hamiltonian(p);
    case ModelKind::effective:
    case ModelKind::effective_lindblad: return effective_hamiltonian(p);
    case ModelKind::transformed: return transformed_hamiltonian(p);
  }
  throw Error("BadModel", "unknown model kind");
}

// ---------------------------------------------------------------------------
// Qubit-manifold reduction. Valid only when the sliced-out rows decouple
// exactly (ground-manifold invariance); enforced here, not assumed.
// ---------------------------------------------------------------------------

inline std::vector<Eigen::Index> qubit_manifold_indices(int fock_levels) {
  std::vector<Eigen::Index> idx;
  idx.reserve(4 * fock_levels);
  for (int q : atom::kQubitIndices) {
    for (int n = 0; n < fock_levels; ++n) {
      idx.push_back(static_cast<Eigen::Index>(q) * fock_levels + n);
    }
  }
  return idx;
}

namespace detail {

inline Matrix select(const Matrix& m, const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(i, j) = m(rows[i], cols[j]);
    }
  }
  return out;
}

inline double coupling_out_of_manifold(const Matrix& m,
                                       const std::vector<Eigen::Index>& keep) {
  std::vector<bool> kept(m.rows(), false);
  for (auto i : keep) kept[i] = true;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (kept[r]) continue;
    for (auto c : keep) worst = std::max(worst, std::abs(m(r, c)));
  }
  return worst;
}

}  // namespace detail

/// Restrict a pair-of-three-level-atoms operator to the computational
/// manifold {gg, ge, eg, ee} (x) Fock. Throws if any retained column couples
/// out of the manifold.
inline JointOperator reduce_to_qubit_manifold(const JointOperator& op) {
  assert(op.atom_dim == atom::kPairDim);
  const auto keep = qubit_manifold_indices(op.fock_levels);
  auto check = [&](const Matrix& m) {
    if (detail::coupling_out_of_manifold(m, keep) != 0.0) {
      throw Error("ManifoldLeak",
                  "operator couples the computational manifold to |r> states");
    }
  };
  check(op.static_part);
  JointOperator out{4, op.fock_levels,
                    detail::select(op.static_part, keep, keep), {}};
  for (const auto& h : op.harmonics) {
    check(h.amplitude);
    check(h.amplitude.adjoint());
    out.add_harmonic(h.omega, detail::select(h.amplitude, keep, keep));
  }
  return out;
}

/// Max residual of e^{iH_0 t}(H_i - H_0)e^{-iH_0 t} - H_i'(t) over the
/// sector with at most one atom in |e> (atomic indices gg, ge, eg). On the
/// |ee> block the two forms genuinely differ by the doubled cavity pull.
inline double transformed_consistency_residual(const SystemParams& p, double t) {
  const JointOperator hi = effective_hamiltonian(p);
  const JointOperator h0 = frame_hamiltonian(p);
  const JointOperator hp = transformed_hamiltonian(p);
  const Eigen::Index d = hi.dim();

  // H_0 is diagonal; conjugation is a phase similarity transform.
  Vector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    phases(k) = std::exp(Complex(0.0, h0.static_part(k, k).real() * t));
  }
  const Matrix delta_h = hi.at(t) - h0.static_part;
  Matrix conj = phases.asDiagonal() * delta_h * phases.conjugate().asDiagonal();
  const Matrix diff = conj - hp.at(t);

  std::vector<Eigen::Index> sector;
  for (int q : {0, 1, 3}) {
    for (int n = 0; n < hi.fock_levels; ++n) {
      sector.push_back(static_cast<Eigen::Index>(q) * hi.fock_levels + n);
    }
  }
  double worst = 0.0;
  for (auto r : sector) {
    for (auto c : sector) worst = std::max(worst, std::abs(diff(r, c)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Analytic trajectory and conditional phase.
// ---------------------------------------------------------------------------

/// Single-excited-qubit displacement
///   alpha(t) = -(Omega g / (Delta delta + g^2)) [e^{-i(delta + g^2/Delta)t} - 1].
/// The |ee> trajectory is 2*alpha, the |gg> trajectory is 0.
inline Complex alpha_trajectory(const SystemParams& p, double t) {
  const double nu = p.loop_frequency();
  const double radius = p.trajectory_radius();
  return -radius * (std::exp(Complex(0.0, -nu * t)) - 1.0);
}

struct ConditionalPhase {
  double phi = 0.0;
  double phi_prime = 0.0;  // = 4 * phi
};

/// phi(t) = -((Omega g)^2 / (Delta (Delta delta + g^2)))
///          [t - sin((delta + g^2/Delta) t) / (delta + g^2/Delta)]
inline ConditionalPhase conditional_phase(const SystemParams& p, double t) {
  const double nu = p.loop_frequency();
  const double k = std::pow(p.omega * p.g, 2) /
                   (p.delta_large * (p.delta_large * p.delta_small + p.g * p.g));
  const double phi = -k * (t - std::sin(nu * t) / nu);
  return {phi, 4.0 * phi};
}

/// Sample alpha(t) at n_samples+1 uniformly spaced times in [0, t_total].
inline geompath::DisplacementPath sample_alpha_path(const SystemParams& p,
                                                    double t_total,
                                                    int n_samples) {
  geompath::DisplacementPath path;
  path.samples.reserve(n_samples + 1);
  for (int k = 0; k <= n_samples; ++k) {
    path.samples.push_back(alpha_trajectory(p, t_total * k / n_samples));
  }
  return path;
}

// ---------------------------------------------------------------------------
// Presets from the paper's two parameter choices.
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  SystemParams params;
};

/// Delta = 10g, delta = g^2/Delta, Omega = g, t = pi Delta / g^2:
/// one closed loop of the conditional trajectory, phi = -pi/2.
inline Preset preset_a() {
  SystemParams p;
  p.g = 1.0;
  p.omega = 1.0;
  p.delta_large = 10.0;
  p.delta_small = 0.1;
  p.gamma_cav = 0.0;
  p.n_max = 16;  // |2 alpha| reaches 2 on the ee row
  p.t_total = 10.0 * M_PI;
  p.dt = M_PI / 100.0;  // 1000 steps; 5x finer than the 200-per-period default
  p.model_kind = ModelKind::transformed;
  return {"A", p};
}

/// Delta = 10g, delta = 2g, Omega = g, gamma = g/27,
/// t = pi Delta (Delta delta + g^2) / (2 g^4) = 105 pi / g (2 phi = -pi).
inline Preset preset_b() {
  SystemParams p;
  p.g = 1.0;
  p.omega = 1.0;
  p.delta_large = 10.0;
  p.delta_small = 2.0;
  p.gamma_cav = 1.0 / 27.0;
  p.n_max = 4;  // max excitation (2R)^2 ~ 9e-3
  p.t_total = 105.0 * M_PI;
  p.dt = M_PI / 210.0;  // 22050 steps, 200 per loop period
  p.model_kind = ModelKind::effective_lindblad;
  return {"B", p};
}

}  // namespace geomgate::model
