#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geomgate/errors.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/linalg.hpp"

namespace geomgate::geompath {

/// Ordered phase-space samples alpha_0 .. alpha_N.
struct DisplacementPath {
  std::vector<Complex> samples;

  static constexpr double kDefaultClosureTol = 1e-12;

  bool closed(double tol = kDefaultClosureTol) const {
    return samples.size() >= 2 &&
           std::abs(samples.back() - samples.front()) <= tol;
  }
};

struct PathPhaseResult {
  double theta = 0.0;             // radians
  Complex net_displacement{0.0};  // alpha_N - alpha_0
  double signed_area = 0.0;       // shoelace area of the sampled polygon
};

/// Discrete geometric phase of a sampled path.
///
/// theta uses the left-endpoint rule Im sum_k alpha_k* (alpha_{k+1}-alpha_k),
/// which matches the ordered product of segment displacements term by term.
/// The rule is exact on straight segments, so theta and the shoelace area
/// satisfy theta = 2*signed_area as an algebraic identity.
inline PathPhaseResult path_phase(const DisplacementPath& path) {
  const auto& s = path.samples;
  if (s.size() < 2) {
    throw DegeneratePathError("path_phase requires at least 2 samples, got " +
                              std::to_string(s.size()));
  }
  double theta = 0.0;
  double area2 = 0.0;  // twice the signed area
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const Complex d = s[k + 1] - s[k];
    theta += std::imag(std::conj(s[k]) * d);
    area2 += s[k].real() * d.imag() - s[k].imag() * d.real();
  }
  return {theta, s.back() - s.front(), 0.5 * area2};
}

/// Ordered product D(d alpha_N) ... D(d alpha_1) of segment displacements,
/// together with the phase accumulated by iterating the composition law.
/// For a closed path the product equals e^{i theta} * I up to truncation
/// and discretization error; for an open path, e^{i theta} D(alpha_N - alpha_0).
///
/// Rows near the truncation edge carry O(1) artifacts of the cut (the
/// truncated [a, a+] corner); the identities hold entrywise on the converged
/// block of levels well below n_max.
inline std::pair<fock::ModeOperator, double> compose_displacements(
    const DisplacementPath& path, fock::FockDim dim,
    fock::Diagnostics* diag = nullptr) {
  const auto& s = path.samples;
  if (s.size() < 2) {
    throw DegeneratePathError("compose_displacements requires at least 2 samples");
  }
  Matrix product = Matrix::Identity(dim.levels(), dim.levels());
  double theta = 0.0;
  Complex partial = 0.0;  // sum of segments applied so far
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const Complex d = s[k + 1] - s[k];
    theta += std::imag(d * std::conj(partial));
    partial += d;
    product = fock::displacement(d, dim, diag).entries * product;
  }
  return {fock::ModeOperator{dim, std::move(product), fock::StructureTag::unitary},
          theta};
}

/// CSV schema used by the CLI `trajectory` subcommand: header `index,re,im`,
/// one row per sample. Lines starting with '#' are comments.
inline void write_path_csv(std::ostream& os, const DisplacementPath& path,
                           const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "index,re,im\n";
  char buf[80];
  for (std::size_t k = 0; k < path.samples.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g", k,
                  path.samples[k].real(), path.samples[k].imag());
    os << buf << "\n";
  }
}

inline DisplacementPath read_path_csv(std::istream& is) {
  DisplacementPath path;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      // Expect the fixed header.
      if (line != "index,re,im") {
        throw Error("BadPathCsv", "expected header 'index,re,im', got: " + line);
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string idx, re, im;
    if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') ||
        !std::getline(row, im, ',')) {
      throw Error("BadPathCsv", "malformed row: " + line);
    }
    const double x = std::stod(re);
    const double y = std::stod(im);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw Error("BadPathCsv", "non-finite sample in row: " + line);
    }
    path.samples.emplace_back(x, y);
  }
  return path;
}

}  // namespace geomgate::geompath
