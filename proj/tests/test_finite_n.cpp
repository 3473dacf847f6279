#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "qrate/finite_n.hpp"
#include "qrate/varsolve.hpp"
#include "test_util.hpp"

using namespace qrate;
using Catch::Matchers::WithinAbs;
using testutil::pauli_x;
using testutil::pauli_z;

namespace {

const auto square = [](double u) { return u * u; };

}  // namespace

TEST_CASE("single-site case reduces to a direct matrix function", "[finiten]") {
  HermitianMatrix X = random_hermitian(3, 201);
  HermitianMatrix H = random_hermitian(3, 202);
  const double got = log_trace_finite_n({X}, {square}, H, 1);
  HermitianMatrix fX = apply_function(X, square);
  const double want =
      log_trace_exp(HermitianMatrix(cmat(fX.entries() - H.entries())));
  REQUIRE_THAT(got, WithinAbs(want, 1e-12));
}

TEST_CASE("linear objectives factorize site by site", "[finiten]") {
  HermitianMatrix X = random_hermitian(2, 203);
  HermitianMatrix H = random_hermitian(2, 204);
  const double a = 0.8;
  auto lin = [a](double u) { return a * u; };
  const double single =
      log_trace_exp(HermitianMatrix(cmat(a * X.entries() - H.entries())));
  for (int n : {1, 2, 3, 4, 6}) {
    REQUIRE_THAT(log_trace_finite_n({X}, {lin}, H, n),
                 WithinAbs(single, 1e-12));
  }
}

TEST_CASE("two-site quadratic exponent is built explicitly", "[finiten]") {
  HermitianMatrix X(pauli_z());
  // X^(2) = diag(1, 0, 0, -1), so u^2 of it is diag(1, 0, 0, 1) and the
  // exponent carries the extra factor n = 2.
  HermitianMatrix E = build_meanfield_exponent({X}, {square}, std::nullopt, 2);
  rvec expected(4);
  expected << 2, 0, 0, 2;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double want = i == j ? expected(i) : 0.0;
      REQUIRE_THAT(E.entries()(i, j).real(), WithinAbs(want, 1e-12));
      REQUIRE_THAT(E.entries()(i, j).imag(), WithinAbs(0.0, 1e-12));
    }
  }
  const double val = log_trace_finite_n({X}, {square}, std::nullopt, 2);
  REQUIRE_THAT(val, WithinAbs(0.5 * std::log(2.0 * std::exp(2.0) + 2.0),
                              1e-12));
}

TEST_CASE("zero objective and no Hamiltonian give ln m", "[finiten]") {
  HermitianMatrix X = random_hermitian(3, 205);
  auto zero = [](double) { return 0.0; };
  for (int n : {1, 2, 4, 7}) {
    REQUIRE_THAT(log_trace_finite_n({X}, {zero}, std::nullopt, n),
                 WithinAbs(std::log(3.0), 1e-12));
  }
}

TEST_CASE("finite-size gap shrinks toward the variational value", "[finiten]") {
  HermitianMatrix X(pauli_z());
  HermitianMatrix H(cmat(-0.5 * pauli_x()));
  VariationalResult limit = prv_value(X, H, square);
  const double v6 = log_trace_finite_n({X}, {square}, H, 6);
  const double v10 = log_trace_finite_n({X}, {square}, H, 10);
  REQUIRE(v6 - limit.value > 0.0);
  REQUIRE(v10 - limit.value > 0.0);
  REQUIRE(v10 - limit.value < v6 - limit.value);
}

TEST_CASE("Trotter product is exact in the commuting case", "[finiten]") {
  HermitianMatrix X(pauli_z());
  HermitianMatrix H(cmat(0.3 * pauli_z()));
  const double exact = log_trace_finite_n({X}, {square}, H, 2);
  for (long long N : {1LL, 2LL, 7LL}) {
    REQUIRE_THAT(trotter_log_trace(X, H, square, 2, N),
                 WithinAbs(exact, 1e-12));
  }
}

TEST_CASE("Trotter error decreases with the step count", "[finiten]") {
  HermitianMatrix X(pauli_z());
  HermitianMatrix H(cmat(-0.7 * pauli_x()));
  const double exact = log_trace_finite_n({X}, {square}, H, 2);
  double prev = std::abs(trotter_log_trace(X, H, square, 2, 4) - exact);
  REQUIRE(prev > 0.0);
  for (long long N : {16LL, 64LL}) {
    const double err = std::abs(trotter_log_trace(X, H, square, 2, N) - exact);
    REQUIRE(err < prev);
    prev = err;
  }
}

TEST_CASE("the exponent is invariant under site permutation", "[finiten]") {
  HermitianMatrix X = random_hermitian(2, 206);
  HermitianMatrix H = random_hermitian(2, 207);
  HermitianMatrix E = build_meanfield_exponent({X}, {square}, H, 2);
  // Swap of the two tensor slots: index i*m+j -> j*m+i.
  const int m = 2;
  cmat P = cmat::Zero(4, 4);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) P(j * m + i, i * m + j) = 1.0;
  }
  cmat swapped = P * E.entries() * P.adjoint();
  REQUIRE((swapped - E.entries()).norm() <= 1e-9);
}

TEST_CASE("convergence table serializes with fixed headers", "[finiten]") {
  ConvergenceRow a;
  a.n = 2;
  a.trotter_steps = std::nullopt;
  a.value = 1.5;
  a.reference = 1.0;
  a.gap = 0.5;
  ConvergenceRow b;
  b.n = 3;
  b.trotter_steps = 32;
  b.value = 1.25;
  b.reference = 1.0;
  b.gap = 0.25;
  const std::string csv = convergence_csv({a, b});
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "n,trotter_steps,value,reference,gap");
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "2,,1.5,1,0.5");
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "3,32,1.25,1,0.25");
  REQUIRE_FALSE(std::getline(in, line));
}

TEST_CASE("finite-n evaluation validates its inputs", "[finiten]") {
  HermitianMatrix X = random_hermitian(2, 208);
  HermitianMatrix H3 = random_hermitian(3, 209);
  auto zero = [](double) { return 0.0; };
  REQUIRE_THROWS_AS(log_trace_finite_n({}, {}, std::nullopt, 2), usage_error);
  REQUIRE_THROWS_AS(log_trace_finite_n({X}, {zero, zero}, std::nullopt, 2),
                    usage_error);
  REQUIRE_THROWS_AS(log_trace_finite_n({X}, {zero}, H3, 2), usage_error);
  REQUIRE_THROWS_AS(log_trace_finite_n({X}, {zero}, std::nullopt, 13),
                    resource_error);
  REQUIRE_THROWS_AS(
      log_trace_finite_n({X}, {[](double) { return std::nan(""); }},
                         std::nullopt, 2),
      usage_error);
  REQUIRE_THROWS_AS(trotter_log_trace(X, X, zero, 2, 0), usage_error);
}
