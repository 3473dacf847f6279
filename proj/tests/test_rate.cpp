#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "qrate/rate.hpp"
#include "qrate/rng.hpp"
#include "test_util.hpp"

using namespace qrate;
using Catch::Matchers::WithinAbs;
using testutil::pauli_x;
using testutil::pauli_z;

namespace {

// Binary entropy rate: the Legendre transform of ln cosh t.
double binary_rate(double u) {
  double s = 0.0;
  if (u > -1.0) s += 0.5 * (1.0 + u) * std::log1p(u);
  if (u < 1.0) s += 0.5 * (1.0 - u) * std::log1p(-u);
  return s;
}

CumulantGF spin_family(double h, bool normalized) {
  cmat H = -h * pauli_x();
  return CumulantGF({HermitianMatrix(pauli_z())}, HermitianMatrix(H),
                    normalized);
}

}  // namespace

TEST_CASE("rate domain is the product of spectral intervals", "[rate]") {
  CumulantGF c({HermitianMatrix(pauli_x()), HermitianMatrix(pauli_z())});
  auto box = rate_domain(c);
  REQUIRE(box.size() == 2);
  for (const auto& b : box) {
    REQUIRE_THAT(b.lo, WithinAbs(-1.0, 1e-14));
    REQUIRE_THAT(b.hi, WithinAbs(1.0, 1e-14));
  }

  HermitianMatrix X = random_hermitian(4, 11);
  CumulantGF single({X});
  auto bx = rate_domain(single);
  SpectralInterval si = spectral_interval(X);
  REQUIRE(bx[0].lo == si.lo);
  REQUIRE(bx[0].hi == si.hi);
}

TEST_CASE("rate vanishes at the zero-tilt expectation", "[rate]") {
  std::vector<HermitianMatrix> obs = {random_hermitian(3, 21),
                                      random_hermitian(3, 22)};
  CumulantGF c(obs, random_hermitian(3, 23), false);
  std::vector<double> u0 = cgf_grad(c, {0.0, 0.0});
  RateEvaluation r = rate_point(c, u0);
  REQUIRE(r.status == rate_status::interior);
  REQUIRE_THAT(r.value, WithinAbs(-cgf(c, {0.0, 0.0}), 1e-10));
  for (double tj : r.maximizer) REQUIRE(std::abs(tj) <= 1e-7);

  // Normalized variant: the minimum of the rate function is exactly zero.
  CumulantGF cn(obs, random_hermitian(3, 23), true);
  RateEvaluation rn = rate_point(cn, cgf_grad(cn, {0.0, 0.0}));
  REQUIRE_THAT(rn.value, WithinAbs(0.0, 1e-10));
}

TEST_CASE("single-spin rate matches the binary entropy form", "[rate]") {
  CumulantGF c({HermitianMatrix(pauli_z())}, HermitianMatrix(cmat::Zero(2, 2)),
               true);
  for (double u : {0.0, 0.3, -0.3, 0.9, -0.9}) {
    RateEvaluation r = rate_point(c, {u});
    REQUIRE(r.status == rate_status::interior);
    REQUIRE_THAT(r.value, WithinAbs(binary_rate(u), 1e-10));
    // The maximizer solves tanh t = u.
    REQUIRE_THAT(r.maximizer[0], WithinAbs(std::atanh(u), 1e-7));
  }
  // Edge value: a single extremal eigenvector leaves ln 2 of entropy to pay.
  RateEvaluation edge = rate_point(c, {1.0});
  REQUIRE(edge.status == rate_status::boundary);
  REQUIRE_THAT(edge.value, WithinAbs(std::log(2.0), 1e-12));
}

TEST_CASE("boundary values compress onto extremal eigenspaces", "[rate]") {
  const double h = 0.7;

  // Unnormalized: the compressed base vanishes on the edge eigenvector.
  RateEvaluation raw = rate_point(spin_family(h, false), {1.0});
  REQUIRE(raw.status == rate_status::boundary);
  REQUIRE_THAT(raw.value, WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(raw.maximizer[0], WithinAbs(1.0, 1e-14));

  // Normalized: the same edge costs the full base log trace.
  RateEvaluation norm = rate_point(spin_family(h, true), {1.0});
  REQUIRE(norm.status == rate_status::boundary);
  REQUIRE_THAT(norm.value, WithinAbs(std::log(2.0 * std::cosh(h)), 1e-12));

  // Degenerate edge: a two-dimensional top eigenspace pays ln m - ln deg.
  cmat D = cmat::Zero(3, 3);
  D(0, 0) = 1.0;
  D(1, 1) = 1.0;
  D(2, 2) = -1.0;
  CumulantGF deg({HermitianMatrix(D)}, HermitianMatrix(cmat::Zero(3, 3)), true);
  RateEvaluation rd = rate_point(deg, {1.0});
  REQUIRE(rd.status == rate_status::boundary);
  REQUIRE_THAT(rd.value, WithinAbs(std::log(3.0) - std::log(2.0), 1e-12));
}

TEST_CASE("corner of a commuting pair reduces to a joint eigenspace", "[rate]") {
  cmat P = cmat::Zero(2, 2);
  P(0, 0) = 1.0;
  CumulantGF c({HermitianMatrix(pauli_z()), HermitianMatrix(P)},
               HermitianMatrix(cmat::Zero(2, 2)), true);
  RateEvaluation r = rate_point(c, {1.0, 1.0});
  REQUIRE(r.status == rate_status::boundary);
  REQUIRE_THAT(r.value, WithinAbs(std::log(2.0), 1e-12));
  REQUIRE(r.maximizer[0] == 1.0);
  REQUIRE(r.maximizer[1] == 1.0);

  REQUIRE_THAT(rate_boundary_value(c, {1, 1}, {1.0, 1.0}),
               WithinAbs(std::log(2.0), 1e-12));

  // Listing the same observable twice reduces to the single-variable edge.
  const double h = 0.7;
  CumulantGF twice({HermitianMatrix(pauli_z()), HermitianMatrix(pauli_z())},
                   HermitianMatrix(cmat(-h * pauli_x())), true);
  RateEvaluation rt = rate_point(twice, {1.0, 1.0});
  REQUIRE(rt.status == rate_status::boundary);
  REQUIRE_THAT(rt.value, WithinAbs(std::log(2.0 * std::cosh(h)), 1e-12));

  // Incompatible corner: opposite observables have no joint top eigenspace.
  CumulantGF opp({HermitianMatrix(pauli_z()), HermitianMatrix(cmat(-pauli_z()))});
  RateEvaluation ri = rate_point(opp, {1.0, 1.0});
  REQUIRE(ri.status == rate_status::infinite);
  REQUIRE(std::isinf(ri.value));
}

TEST_CASE("points outside the domain box are infinite", "[rate]") {
  CumulantGF c({HermitianMatrix(pauli_z())});
  RateEvaluation r = rate_point(c, {1.5});
  REQUIRE(r.status == rate_status::infinite);
  REQUIRE(std::isinf(r.value));
  REQUIRE(r.maximizer[0] == 1.0);

  RateEvaluation rl = rate_point(c, {-2.0});
  REQUIRE(rl.maximizer[0] == -1.0);
}

TEST_CASE("Fenchel-Young inequality holds with equality at the gradient",
          "[rate]") {
  std::vector<HermitianMatrix> obs = {random_hermitian(3, 31),
                                      random_hermitian(3, 32)};
  CumulantGF c(obs, random_hermitian(3, 33), true);
  rng_stream r(77);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> t = {2.0 * (2.0 * r.uniform() - 1.0),
                             2.0 * (2.0 * r.uniform() - 1.0)};
    std::vector<double> u = cgf_grad(c, t);
    RateEvaluation ev = rate_point(c, u);
    REQUIRE(ev.status == rate_status::interior);
    const double young = t[0] * u[0] + t[1] * u[1];
    REQUIRE_THAT(ev.value + cgf(c, t), WithinAbs(young, 1e-9));

    // Independent tilt: the inequality direction.
    std::vector<double> s = {2.0 * r.uniform() - 1.0, 2.0 * r.uniform() - 1.0};
    REQUIRE(s[0] * u[0] + s[1] * u[1] <= cgf(c, s) + ev.value + 1e-9);
  }
}

TEST_CASE("biconjugation never exceeds the CGF", "[rate]") {
  CumulantGF c({HermitianMatrix(pauli_x()), HermitianMatrix(pauli_z())},
               HermitianMatrix(cmat(0.4 * pauli_z())), true);
  const std::vector<double> t = {0.6, -0.3};
  const double ct = cgf(c, t);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      std::vector<double> u = {-1.0 + 0.1 * i, -1.0 + 0.1 * j};
      double value;
      try {
        RateEvaluation ev = rate_point(c, u);
        if (ev.status == rate_status::infinite) continue;
        value = ev.value;
      } catch (const solver_error&) {
        // Box points outside the gradient range (here, outside the unit
        // disc) are reported as divergence; the rate is +infinity there.
        continue;
      }
      const double lower = t[0] * u[0] + t[1] * u[1] - value;
      REQUIRE(lower <= ct + 1e-8);
      best = std::max(best, lower);
    }
  }
  // The gradient point recovers the CGF exactly.
  std::vector<double> ustar = cgf_grad(c, t);
  RateEvaluation at_grad = rate_point(c, ustar);
  REQUIRE_THAT(t[0] * ustar[0] + t[1] * ustar[1] - at_grad.value,
               WithinAbs(ct, 1e-9));
  REQUIRE(best <= ct + 1e-8);
}

TEST_CASE("maximizer steepens monotonically toward the edge", "[rate]") {
  CumulantGF c = spin_family(0.7, true);
  double prev = 0.0;
  for (double u : {0.5, 0.9, 0.99, 0.999}) {
    RateEvaluation ev = rate_point(c, {u});
    REQUIRE(ev.status == rate_status::interior);
    REQUIRE(ev.maximizer[0] > prev);
    // The reported maximizer reproduces u as a tilted expectation.
    REQUIRE_THAT(cgf_grad(c, ev.maximizer)[0], WithinAbs(u, 1e-8));
    prev = ev.maximizer[0];
  }
}

TEST_CASE("rate evaluation validates its inputs", "[rate]") {
  CumulantGF c({HermitianMatrix(pauli_z())});
  REQUIRE_THROWS_AS(rate_point(c, {0.1, 0.2}), usage_error);
  REQUIRE_THROWS_AS(rate_point(c, {std::nan("")}), usage_error);
  REQUIRE_THROWS_AS(rate_boundary_value(c, {0}, {0.5}), usage_error);
  REQUIRE_THROWS_AS(rate_boundary_value(c, {1}, {0.5}), usage_error);
  REQUIRE_THROWS_AS(rate_boundary_value(c, {1, 1}, {1.0}), usage_error);
}
