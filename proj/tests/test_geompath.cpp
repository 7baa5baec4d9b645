#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "geomgate/geompath.hpp"

using namespace geomgate;
using Catch::Approx;

namespace {

geompath::DisplacementPath circle(Complex center, double radius, int segments) {
  geompath::DisplacementPath path;
  path.samples.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    const double th = 2.0 * M_PI * k / segments;
    path.samples.push_back(center + radius * std::exp(Complex(0.0, th)));
  }
  return path;
}

}  // namespace

TEST_CASE("degenerate paths are rejected") {
  geompath::DisplacementPath path;
  REQUIRE_THROWS_AS(geompath::path_phase(path), DegeneratePathError);
  path.samples.push_back(0.1);
  REQUIRE_THROWS_AS(geompath::path_phase(path), DegeneratePathError);
}

TEST_CASE("straight real segment has zero phase") {
  geompath::DisplacementPath path;
  for (int k = 0; k <= 50; ++k) path.samples.push_back(0.1 * k / 50.0);
  const auto res = geompath::path_phase(path);
  REQUIRE(res.theta == Approx(0.0).margin(1e-15));
  REQUIRE(res.net_displacement.real() == Approx(0.1));
}

TEST_CASE("counterclockwise circle phase approaches 2 pi r^2") {
  const auto res = geompath::path_phase(circle(0.0, 0.5, 10000));
  REQUIRE(res.theta == Approx(M_PI / 2.0).margin(1e-3));
  REQUIRE(std::abs(res.net_displacement) < 1e-12);

  // Richardson check: the remaining error shrinks with more segments.
  const auto res2 = geompath::path_phase(circle(0.0, 0.5, 20000));
  REQUIRE(std::abs(res2.theta - M_PI / 2.0) < std::abs(res.theta - M_PI / 2.0));
}

TEST_CASE("square loop phase and area") {
  geompath::DisplacementPath path;
  path.samples = {Complex(0, 0), Complex(0.2, 0), Complex(0.2, 0.2),
                  Complex(0, 0.2), Complex(0, 0)};
  const auto res = geompath::path_phase(path);
  REQUIRE(res.theta == Approx(0.08).epsilon(1e-12));
  REQUIRE(res.signed_area == Approx(0.04).epsilon(1e-12));
  REQUIRE(path.closed());
}

TEST_CASE("area identity holds to round-off for random closed polygons") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int k = 0; k < 20; ++k) {
    geompath::DisplacementPath path;
    const int n = 3 + (k % 7);
    for (int v = 0; v < n; ++v) path.samples.push_back(Complex(u(rng), u(rng)));
    path.samples.push_back(path.samples.front());
    const auto res = geompath::path_phase(path);
    REQUIRE(std::abs(res.theta - 2.0 * res.signed_area) < 1e-15);
  }
}

TEST_CASE("reversing a closed path negates theta") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  geompath::DisplacementPath path;
  for (int v = 0; v < 6; ++v) path.samples.push_back(Complex(u(rng), u(rng)));
  path.samples.push_back(path.samples.front());
  auto reversed = path;
  std::reverse(reversed.samples.begin(), reversed.samples.end());
  REQUIRE(geompath::path_phase(path).theta ==
          Approx(-geompath::path_phase(reversed).theta).epsilon(1e-12));
}

TEST_CASE("back-and-forth composition is the identity") {
  const fock::FockDim dim(12);
  geompath::DisplacementPath path;
  path.samples = {Complex(0, 0), Complex(0.1, 0), Complex(0, 0)};
  const auto [product, theta] = geompath::compose_displacements(path, dim);
  REQUIRE(theta == Approx(0.0).margin(1e-15));
  REQUIRE(linalg::max_abs(product.entries -
                          Matrix::Identity(dim.levels(), dim.levels())) < 1e-12);
}

// Product identities are compared on the converged block (levels <= n_max/2);
// the truncation edge carries O(1) artifacts of the cut.
TEST_CASE("closed circle composition equals e^{i theta} times identity") {
  const fock::FockDim dim(16);
  const int block = dim.n_max / 2 + 1;
  const auto path = circle(0.0, 0.05, 2000);
  const auto [product, theta] = geompath::compose_displacements(path, dim);
  const Matrix target = std::exp(Complex(0.0, theta)) *
                        Matrix::Identity(dim.levels(), dim.levels());
  REQUIRE(linalg::max_abs(product.entries.topLeftCorner(block, block) -
                          target.topLeftCorner(block, block)) < 1e-6);

  // Trace phase over the converged block agrees with the analytic theta.
  const Complex mean_trace =
      product.entries.topLeftCorner(block, block).trace() / double(block);
  REQUIRE(std::arg(mean_trace) == Approx(linalg::wrap_angle(theta)).margin(1e-6));
}

TEST_CASE("open path composition equals e^{i theta} D(net)") {
  const fock::FockDim dim(16);
  const int block = dim.n_max / 2 + 1;
  geompath::DisplacementPath path;
  for (int k = 0; k <= 400; ++k) {
    const double s = static_cast<double>(k) / 400.0;
    path.samples.push_back(Complex(0.2 * s, 0.15 * s * s));  // curved open path
  }
  const auto [product, theta] = geompath::compose_displacements(path, dim);
  const Matrix target =
      std::exp(Complex(0.0, theta)) *
      fock::displacement(path.samples.back() - path.samples.front(), dim).entries;
  REQUIRE(linalg::max_abs(product.entries.topLeftCorner(block, block) -
                          target.topLeftCorner(block, block)) < 1e-6);
}

TEST_CASE("concatenated paths compose like the operator product") {
  const fock::FockDim dim(12);
  geompath::DisplacementPath first, second, whole;
  for (int k = 0; k <= 100; ++k) {
    first.samples.push_back(Complex(0.1 * k / 100.0, 0.0));
  }
  for (int k = 0; k <= 100; ++k) {
    second.samples.push_back(Complex(0.1, 0.08 * k / 100.0));
  }
  whole.samples = first.samples;
  whole.samples.insert(whole.samples.end(), second.samples.begin() + 1,
                       second.samples.end());
  const auto [p1, th1] = geompath::compose_displacements(first, dim);
  const auto [p2, th2] = geompath::compose_displacements(second, dim);
  const auto [pw, thw] = geompath::compose_displacements(whole, dim);
  REQUIRE(linalg::max_abs(pw.entries - p2.entries * p1.entries) < 1e-10);
}

TEST_CASE("csv round trip preserves samples") {
  geompath::DisplacementPath path;
  path.samples = {Complex(0, 0), Complex(0.125, -0.5), Complex(1e-7, 2.25e-3)};
  std::ostringstream os;
  geompath::write_path_csv(os, path, {"provenance line"});
  std::istringstream is(os.str());
  const auto back = geompath::read_path_csv(is);
  REQUIRE(back.samples.size() == path.samples.size());
  for (std::size_t k = 0; k < path.samples.size(); ++k) {
    REQUIRE(std::abs(back.samples[k] - path.samples[k]) < 1e-12);
  }
}
