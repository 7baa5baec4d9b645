#pragma once

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

#include "geomgate/linalg.hpp"

namespace geomgate::fock {

/// Truncated Fock space keeping levels 0..n_max (dimension n_max + 1).
struct FockDim {
  int n_max = 8;

  explicit FockDim(int n) : n_max(n) { assert(n_max >= 1); }
  int levels() const { return n_max + 1; }
};

enum class StructureTag { general, hermitian, unitary };

/// Dense operator on the truncated cavity mode. The tag records what the
/// constructor promises (unitarity of displacements holds up to truncation).
struct ModeOperator {
  FockDim dim;
  Matrix entries;
  StructureTag tag = StructureTag::general;
};

/// Collects non-fatal numerical warnings (e.g. truncation guards).
struct Diagnostics {
  std::vector<std::string> notes;
  void add(std::string note) { notes.push_back(std::move(note)); }
};

/// True when |alpha|^2 exceeds n_max/4 and truncation cannot be trusted.
inline bool truncation_guard_triggered(Complex alpha, FockDim dim) {
  return std::norm(alpha) > dim.n_max / 4.0;
}

inline void note_truncation(Complex alpha, FockDim dim, Diagnostics* diag) {
  if (diag != nullptr && truncation_guard_triggered(alpha, dim)) {
    diag->add("TruncationWarning: |alpha|^2 = " + std::to_string(std::norm(alpha)) +
              " exceeds n_max/4 = " + std::to_string(dim.n_max / 4.0));
  }
}

/// <n-1|a|n> = sqrt(n).
inline ModeOperator annihilation(FockDim dim) {
  Matrix a = Matrix::Zero(dim.levels(), dim.levels());
  for (int n = 1; n <= dim.n_max; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return {dim, std::move(a), StructureTag::general};
}

inline ModeOperator creation(FockDim dim) {
  ModeOperator a = annihilation(dim);
  return {dim, a.entries.adjoint(), StructureTag::general};
}

inline ModeOperator number(FockDim dim) {
  Matrix n = Matrix::Zero(dim.levels(), dim.levels());
  for (int k = 0; k <= dim.n_max; ++k) n(k, k) = static_cast<double>(k);
  return {dim, std::move(n), StructureTag::hermitian};
}

inline ModeOperator identity(FockDim dim) {
  return {dim, Matrix::Identity(dim.levels(), dim.levels()), StructureTag::unitary};
}

/// D(alpha) = exp(alpha a+ - alpha* a), evaluated by eigendecomposition of
/// the anti-Hermitian generator.
inline ModeOperator displacement(Complex alpha, FockDim dim, Diagnostics* diag = nullptr) {
  note_truncation(alpha, dim, diag);
  const Matrix a = annihilation(dim).entries;
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return {dim, linalg::expm_antihermitian(gen), StructureTag::unitary};
}

/// Coherent state |alpha>, renormalized to unit norm after truncation.
inline Vector coherent_state(Complex alpha, FockDim dim, Diagnostics* diag = nullptr) {
  note_truncation(alpha, dim, diag);
  Vector v(dim.levels());
  // c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by recurrence.
  Complex c = std::exp(-0.5 * std::norm(alpha));
  v(0) = c;
  for (int n = 1; n <= dim.n_max; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    v(n) = c;
  }
  v.normalize();
  return v;
}

inline Vector vacuum(FockDim dim) {
  Vector v = Vector::Zero(dim.levels());
  v(0) = 1.0;
  return v;
}

}  // namespace geomgate::fock
