#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "geomgate/dynamics.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/gate.hpp"
#include "geomgate/geompath.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"

namespace geomgate::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // measured value vs bound
};

namespace detail {

inline CheckResult check(const std::string& name, double measured, double bound) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.3g (bound %.3g)", measured, bound);
  return {name, measured <= bound, buf};
}

inline geompath::DisplacementPath circle(Complex center, double radius, int segments) {
  geompath::DisplacementPath path;
  path.samples.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double th = 2.0 * M_PI * k / segments;
    path.samples.push_back(center + radius * std::exp(Complex(0.0, th)));
  }
  return path;
}

}  // namespace detail

/// The invariant suite behind the CLI `verify` subcommand. Each entry is a
/// fast, self-contained numerical check of a library contract.
inline std::vector<CheckResult> run_all() {
  std::vector<CheckResult> out;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto rand_amp = [&](double radius) {
    return Complex(radius * unit(rng), radius * unit(rng));
  };

  {  // Displacement unitarity and inverse, |alpha| <= 0.5, n_max = 16.
    const fock::FockDim dim(16);
    const Matrix id = Matrix::Identity(dim.levels(), dim.levels());
    double worst_u = 0.0, worst_inv = 0.0;
    for (int k = 0; k < 8; ++k) {
      const Complex a = rand_amp(0.35);  // |a| <= 0.5
      const Matrix d = fock::displacement(a, dim).entries;
      worst_u = std::max(worst_u, linalg::max_abs(d.adjoint() * d - id));
      worst_inv = std::max(
          worst_inv,
          linalg::max_abs(fock::displacement(-a, dim).entries * d - id));
    }
    out.push_back(detail::check("displacement unitarity", worst_u, 1e-8));
    out.push_back(detail::check("displacement inverse", worst_inv, 1e-8));
  }

  {  // Composition law D(b)D(a) = e^{i Im(b a*)} D(a+b), n_max = 24.
     // Compared on the converged block: the truncation edge carries O(1)
     // artifacts of the cut.
    const fock::FockDim dim(24);
    const int block = dim.n_max / 2 + 1;
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
      const Complex a = rand_amp(0.21), b = rand_amp(0.21);  // |a|,|b| <= 0.3
      const Matrix lhs = fock::displacement(b, dim).entries *
                         fock::displacement(a, dim).entries;
      const Matrix rhs = std::exp(Complex(0.0, std::imag(b * std::conj(a)))) *
                         fock::displacement(a + b, dim).entries;
      worst = std::max(worst, linalg::max_abs(lhs.topLeftCorner(block, block) -
                                              rhs.topLeftCorner(block, block)));
    }
    out.push_back(detail::check("composition law", worst, 1e-8));
  }

  {  // D(alpha)|0> equals the coherent state, n_max = 24.
    const fock::FockDim dim(24);
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
      const Complex a = rand_amp(0.35);
      const Vector lhs = fock::displacement(a, dim).entries * fock::vacuum(dim);
      worst = std::max(worst, (lhs - fock::coherent_state(a, dim)).norm());
    }
    out.push_back(detail::check("coherent state vs displacement", worst, 1e-10));
  }

  {  // Area identity theta = 2 * signed_area for random polygons.
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      geompath::DisplacementPath path;
      const int vertices = 3 + k;
      for (int v = 0; v < vertices; ++v) path.samples.push_back(rand_amp(0.3));
      path.samples.push_back(path.samples.front());
      const auto res = geompath::path_phase(path);
      worst = std::max(worst, std::abs(res.theta - 2.0 * res.signed_area));
    }
    out.push_back(detail::check("polygon area identity", worst, 1e-14));
  }

  {  // Circle phase 2 pi r^2 at 1e4 segments.
    const auto res = geompath::path_phase(detail::circle(0.0, 0.5, 10000));
    out.push_back(detail::check("circle phase -> 2 pi r^2",
                                std::abs(res.theta - M_PI / 2.0), 1e-3));
  }

  {  // Closed-path operator identity, small circle, converged block.
    const fock::FockDim dim(16);
    const int block = dim.n_max / 2 + 1;
    const auto path = detail::circle(0.0, 0.05, 2000);
    const auto [product, theta] = geompath::compose_displacements(path, dim);
    const Matrix target = std::exp(Complex(0.0, theta)) *
                          Matrix::Identity(dim.levels(), dim.levels());
    out.push_back(detail::check(
        "closed-path identity",
        linalg::max_abs(product.entries.topLeftCorner(block, block) -
                        target.topLeftCorner(block, block)),
        1e-6));
  }

  {  // Hermiticity of every Hamiltonian at random times, presets A and B.
    double worst = 0.0;
    for (const auto& preset : {model::preset_a(), model::preset_b()}) {
      const auto& p = preset.params;
      for (const auto& op :
           {model::full_hamiltonian(p), model::effective_hamiltonian(p),
            model::frame_hamiltonian(p), model::transformed_hamiltonian(p)}) {
        for (int k = 0; k < 5; ++k) {
          const double t = 0.5 * (unit(rng) + 1.0) * p.t_total;
          const Matrix h = op.at(t);
          worst = std::max(worst,
                           linalg::hermiticity_defect(h) /
                               std::max(1.0, linalg::max_abs(h)));
        }
      }
    }
    out.push_back(detail::check("hamiltonian hermiticity", worst, 1e-12));
  }

  {  // Effective coupling matrix elements for all n < n_max.
    const auto p = model::preset_b().params;
    const auto h = model::effective_hamiltonian(p);
    const int fl = p.fock_dim().levels();
    const double t = 0.37;
    const Matrix hm = h.at(t);
    const Complex expected_unit =
        (p.omega * p.g / p.delta_large) * std::exp(Complex(0.0, -p.delta_small * t));
    double worst = 0.0;
    for (int n = 0; n + 1 < fl; ++n) {
      const double root = std::sqrt(n + 1.0);
      // <r1 g2, n+1| H |r1 g2, n> = +(Omega g/Delta) e^{-i delta t} sqrt(n+1)
      const Eigen::Index rg = 6 * fl;  // atomic index 3*r+g = 6
      worst = std::max(worst,
                       std::abs(hm(rg + n + 1, rg + n) - expected_unit * root));
      // <e1 g2, n+1| H |e1 g2, n> = -(Omega g/Delta) e^{-i delta t} sqrt(n+1)
      const Eigen::Index eg = 3 * fl;  // atomic index 3*e+g = 3
      worst = std::max(worst,
                       std::abs(hm(eg + n + 1, eg + n) + expected_unit * root));
    }
    out.push_back(detail::check("effective matrix elements", worst, 1e-12));
  }

  {  // Ground-manifold invariance: the qubit reduction must not leak.
    bool ok = true;
    std::string note = "reduction clean";
    for (const auto& preset : {model::preset_a(), model::preset_b()}) {
      try {
        (void)model::reduce_to_qubit_manifold(
            model::effective_hamiltonian(preset.params));
        (void)model::reduce_to_qubit_manifold(
            model::transformed_hamiltonian(preset.params));
      } catch (const Error& e) {
        ok = false;
        note = e.what();
      }
    }
    out.push_back({"ground-manifold invariance", ok, note});
  }

  {  // Effective model restricted to the manifold is atomically diagonal.
    const auto p = model::preset_a().params;
    const auto h = model::reduce_to_qubit_manifold(model::effective_hamiltonian(p));
    const int fl = p.fock_dim().levels();
    double worst = 0.0;
    const Matrix hm = h.at(0.83);
    for (int qa = 0; qa < 4; ++qa) {
      for (int qb = 0; qb < 4; ++qb) {
        if (qa == qb) continue;
        worst = std::max(worst, linalg::max_abs(hm.block(qa * fl, qb * fl, fl, fl)));
      }
    }
    out.push_back(detail::check("effective atomic diagonality", worst, 0.0));
  }

  {  // Frame conjugation equals the transformed Hamiltonian on the
     // at-most-one-excitation sector.
    double worst = 0.0;
    for (const auto& preset : {model::preset_a(), model::preset_b()}) {
      for (int k = 0; k < 5; ++k) {
        const double t = 0.5 * (unit(rng) + 1.0) * preset.params.t_total;
        worst = std::max(
            worst, model::transformed_consistency_residual(preset.params, t));
      }
    }
    out.push_back(detail::check("frame conjugation consistency", worst, 1e-10));
  }

  {  // Analytic trajectory against the path-phase machinery, one loop.
    const auto p = model::preset_a().params;
    const double loop_t = 2.0 * M_PI / p.loop_frequency();
    const auto path = model::sample_alpha_path(p, loop_t, 10000);
    const auto res = geompath::path_phase(path);
    const auto phase = model::conditional_phase(p, loop_t);
    out.push_back(detail::check("trajectory loop phase",
                                std::abs(res.theta - phase.phi), 1e-4));
  }

  {  // Correction algebra: phases (0, x, x, 4x) -> diagonal (1, 1, 1, e^{i2x}).
    gate::GateReport r;
    const double x = 0.7431;
    r.phases = {0.0, x, x, 4.0 * x};
    const auto corrected = gate::apply_correction(r, model::SystemParams{});
    double worst = std::abs(corrected.corrected_diagonal[0] - Complex(1.0));
    worst = std::max(worst, std::abs(corrected.corrected_diagonal[1] - Complex(1.0)));
    worst = std::max(worst, std::abs(corrected.corrected_diagonal[2] - Complex(1.0)));
    worst = std::max(worst, std::abs(corrected.corrected_diagonal[3] -
                                     std::exp(Complex(0.0, 2.0 * x))));
    out.push_back(detail::check("correction algebra", worst, 1e-15));
  }

  {  // Frame generator eigenvalue spot checks (n = 0 and n = 1).
    const auto p = model::preset_a().params;
    const auto h0 = model::frame_hamiltonian(p);
    const int fl = p.fock_dim().levels();
    const double w = p.omega * p.omega / p.delta_large;
    double worst = std::abs(h0.static_part(3 * fl, 3 * fl).real() + w);       // |e1 g2, 0>
    worst = std::max(worst, std::abs(h0.static_part(4 * fl, 4 * fl).real() + 2 * w));  // |e1 e2, 0>
    const double rg1 = (2.0 * p.g * p.g + p.omega * p.omega) / p.delta_large;
    worst = std::max(worst, std::abs(h0.static_part(6 * fl + 1, 6 * fl + 1).real() - rg1));
    out.push_back(detail::check("frame eigenvalues", worst, 1e-14));
  }

  return out;
}

}  // namespace geomgate::verify
