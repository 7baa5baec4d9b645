#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>

namespace geomgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};

namespace linalg {

/// Largest absolute entry (max norm).
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

/// exp(A) for anti-Hermitian A, via the eigendecomposition of the
/// Hermitian matrix iA. Unitary up to round-off.
inline Matrix expm_antihermitian(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(kImag * a);
  const auto& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -w(k)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(-i t H) for Hermitian H.
inline Matrix expm_hermitian_mi(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -w(k) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double x) {
  const double two_pi = 2.0 * M_PI;
  double y = std::remainder(x, two_pi);
  if (y <= -M_PI) y += two_pi;
  return y;
}

}  // namespace linalg
}  // namespace geomgate
