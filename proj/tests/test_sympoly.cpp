#include <catch2/catch_amalgamated.hpp>
#include <vector>

#include "qrate/rng.hpp"
#include "qrate/sympoly.hpp"

using namespace qrate;
using Catch::Matchers::WithinAbs;

namespace {

PowerTerm term(rational alpha, int p, std::vector<rational> zeta) {
  PowerTerm t;
  t.alpha = std::move(alpha);
  t.p = p;
  t.zeta = std::move(zeta);
  return t;
}

rational monomial_at(const std::vector<int>& exponents,
                     const std::vector<rational>& u) {
  rational v = 1;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    for (int e = 0; e < exponents[j]; ++e) v *= u[j];
  }
  return v;
}

}  // namespace

TEST_CASE("hand-built power-sum fixtures are exact", "[sympoly]") {
  // x1 x2 = 1/4 (x1+x2)^2 - 1/4 (x1-x2)^2.
  PowerDecomposition quad;
  quad.q = 2;
  quad.terms.push_back(term(rational(1, 4), 2, {1, 1}));
  quad.terms.push_back(term(rational(-1, 4), 2, {1, -1}));
  auto mq = expand_to_monomials(quad);
  REQUIRE(mq.size() == 1);
  REQUIRE(mq.at({1, 1}) == 1);
  REQUIRE(evaluate_decomposition_exact(quad, {2, 3}) == 6);
  REQUIRE(evaluate_decomposition_exact(quad, {rational(-5, 2), rational(7, 3)}) ==
          rational(-35, 6));

  // x1 x2 x3 as four cubes of signed sums.
  PowerDecomposition cubic;
  cubic.q = 3;
  cubic.terms.push_back(term(rational(1, 24), 3, {1, 1, 1}));
  cubic.terms.push_back(term(rational(-1, 24), 3, {1, 1, -1}));
  cubic.terms.push_back(term(rational(-1, 24), 3, {1, -1, 1}));
  cubic.terms.push_back(term(rational(1, 24), 3, {1, -1, -1}));
  auto mc = expand_to_monomials(cubic);
  REQUIRE(mc.size() == 1);
  REQUIRE(mc.at({1, 1, 1}) == 1);
  REQUIRE(evaluate_decomposition_exact(cubic, {2, 3, 4}) == 24);
  REQUIRE(evaluate_decomposition_exact(
              cubic, {rational(1, 2), rational(-2, 3), 5}) == rational(-5, 3));

  // 720 x1^3 x2^3 as six sixth powers.
  PowerDecomposition sext;
  sext.q = 2;
  sext.terms.push_back(term(rational(34, 720), 6, {1, 1}));
  sext.terms.push_back(term(rational(-34, 720), 6, {1, -1}));
  sext.terms.push_back(term(rational(-1, 720), 6, {2, 1}));
  sext.terms.push_back(term(rational(1, 720), 6, {2, -1}));
  sext.terms.push_back(term(rational(-1, 720), 6, {1, 2}));
  sext.terms.push_back(term(rational(1, 720), 6, {1, -2}));
  auto ms = expand_to_monomials(sext);
  REQUIRE(ms.size() == 1);
  REQUIRE(ms.at({3, 3}) == 1);
  REQUIRE(evaluate_decomposition_exact(sext, {2, 3}) == 216);
  REQUIRE(evaluate_decomposition_exact(sext, {-1, 2}) == -8);
}

TEST_CASE("monomial polarization on canonical examples", "[sympoly]") {
  PowerDecomposition sq = polarize_monomial({2});
  REQUIRE(sq.terms.size() == 1);
  REQUIRE(sq.terms[0].alpha == 1);
  REQUIRE(sq.terms[0].p == 2);
  REQUIRE(sq.terms[0].zeta[0] == 1);

  PowerDecomposition xy = polarize_monomial({1, 1});
  REQUIRE(xy.terms.size() == 3);
  auto m = expand_to_monomials(xy);
  REQUIRE(m.size() == 1);
  REQUIRE(m.at({1, 1}) == 1);
  REQUIRE(evaluate_decomposition_exact(xy, {2, 3}) == 6);
  REQUIRE(evaluate_decomposition_exact(xy, {1, 1}) == 1);
  REQUIRE(evaluate_decomposition_exact(xy, {0, 0}) == 0);
  REQUIRE_THAT(evaluate_decomposition(xy, {0.5, -0.25}),
               WithinAbs(-0.125, 1e-14));

  // Three binary slots produce the seven-term 0/1 polarization; none of the
  // resulting forms are proportional, so the count survives normalization.
  PowerDecomposition xyz = polarize_monomial({1, 1, 1});
  REQUIRE(xyz.terms.size() == 7);
  auto m3 = expand_to_monomials(xyz);
  REQUIRE(m3.size() == 1);
  REQUIRE(m3.at({1, 1, 1}) == 1);

  REQUIRE_THROWS_AS(polarize_monomial({}), usage_error);
  REQUIRE_THROWS_AS(polarize_monomial({-1, 2}), usage_error);
  REQUIRE_THROWS_AS(polarize_monomial({0, 0}), usage_error);
  REQUIRE_THROWS_AS(polarize_monomial({21}), resource_error);
}

TEST_CASE("polynomial decomposition folds coefficients", "[sympoly]") {
  PowerDecomposition doubled = decompose_symmetric({{{1, 1}, 2}});
  auto md = expand_to_monomials(doubled);
  REQUIRE(md.size() == 1);
  REQUIRE(md.at({1, 1}) == 2);
  REQUIRE(evaluate_decomposition_exact(doubled, {2, 3}) == 12);

  // (x1 + x2)^2 fed in expanded form comes back as that exact square.
  sparse_poly square = {{{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, 1}};
  PowerDecomposition ds = decompose_symmetric(square);
  auto mm = expand_to_monomials(ds);
  REQUIRE(mm.at({2, 0}) == 1);
  REQUIRE(mm.at({1, 1}) == 2);
  REQUIRE(mm.at({0, 2}) == 1);
  REQUIRE_THAT(evaluate_decomposition(ds, {1.3, -0.4}),
               WithinAbs(0.81, 1e-13));

  // Zero coefficients are dropped before polarization.
  PowerDecomposition part = decompose_symmetric({{{2, 0}, 0}, {{0, 2}, 1}});
  auto mp = expand_to_monomials(part);
  REQUIRE(mp.size() == 1);
  REQUIRE(mp.at({0, 2}) == 1);

  REQUIRE_THROWS_AS(decompose_symmetric({}), usage_error);
  REQUIRE_THROWS_AS(decompose_symmetric({{{1, 0}, 1}, {{1}, 1}}), usage_error);
  REQUIRE_THROWS_AS(decompose_symmetric({{{1, 1}, 0}}), usage_error);
}

TEST_CASE("normalization merges proportional forms", "[sympoly]") {
  PowerDecomposition d;
  d.q = 2;
  d.terms.push_back(term(rational(1, 2), 2, {1, 1}));
  d.terms.push_back(term(rational(1, 8), 2, {2, 2}));
  PowerDecomposition n = normalize_decomposition(d);
  REQUIRE(n.terms.size() == 1);
  REQUIRE(n.terms[0].alpha == 1);
  REQUIRE(n.terms[0].zeta[0] == 1);
  REQUIRE(n.terms[0].zeta[1] == 1);

  PowerDecomposition cancel;
  cancel.q = 2;
  cancel.terms.push_back(term(1, 2, {1, 1}));
  cancel.terms.push_back(term(rational(-1, 4), 2, {2, 2}));
  REQUIRE(normalize_decomposition(cancel).terms.empty());

  // Leading-sign convention: the scale's p-th power lands in alpha.
  PowerDecomposition flip;
  flip.q = 2;
  flip.terms.push_back(term(1, 3, {-1, -2}));
  PowerDecomposition nf = normalize_decomposition(flip);
  REQUIRE(nf.terms.size() == 1);
  REQUIRE(nf.terms[0].alpha == -1);
  REQUIRE(nf.terms[0].zeta[0] == 1);
  REQUIRE(nf.terms[0].zeta[1] == 2);

  PowerDecomposition zero;
  zero.q = 2;
  zero.terms.push_back(term(5, 2, {0, 0}));
  REQUIRE(normalize_decomposition(zero).terms.empty());

  PowerDecomposition frac;
  frac.q = 2;
  frac.terms.push_back(term(1, 2, {rational(1, 2), rational(3, 2)}));
  PowerDecomposition nfr = normalize_decomposition(frac);
  REQUIRE(nfr.terms.size() == 1);
  REQUIRE(nfr.terms[0].alpha == rational(1, 4));
  REQUIRE(nfr.terms[0].zeta[1] == 3);

  PowerDecomposition bad;
  bad.q = 2;
  bad.terms.push_back(term(1, 0, {1, 1}));
  REQUIRE_THROWS_AS(normalize_decomposition(bad), usage_error);
  PowerDecomposition arity;
  arity.q = 2;
  arity.terms.push_back(term(1, 2, {1}));
  REQUIRE_THROWS_AS(normalize_decomposition(arity), usage_error);
}

TEST_CASE("low-degree polarizations expand to their monomial", "[sympoly]") {
  rng_stream r(314);
  int monomials = 0;
  for (int q = 1; q <= 3; ++q) {
    std::vector<int> a(q, 0);
    // Odometer over exponent vectors with entries in [0,6].
    while (true) {
      int degree = 0;
      for (int v : a) degree += v;
      if (degree >= 1 && degree <= 6) {
        ++monomials;
        PowerDecomposition d = polarize_monomial(a);
        auto mono = expand_to_monomials(d);
        REQUIRE(mono.size() == 1);
        REQUIRE(mono.at(a) == 1);
        for (int rep = 0; rep < 10; ++rep) {
          std::vector<rational> u(q);
          for (auto& x : u) {
            x = rational(static_cast<int>(r.uniform_int(7)) - 3);
          }
          REQUIRE(evaluate_decomposition_exact(d, u) == monomial_at(a, u));
        }
      }
      int j = 0;
      while (j < q && a[j] == 6) a[j++] = 0;
      if (j == q) break;
      ++a[j];
    }
  }
  REQUIRE(monomials == 6 + 27 + 83);
}

TEST_CASE("decomposition JSON round-trips exactly", "[sympoly]") {
  PowerDecomposition d = polarize_monomial({1, 2});
  std::string text = decomposition_to_json(d);
  PowerDecomposition back = parse_decomposition_json(text, "test");
  REQUIRE(back.q == d.q);
  REQUIRE(back.terms.size() == d.terms.size());
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    REQUIRE(back.terms[i].alpha == d.terms[i].alpha);
    REQUIRE(back.terms[i].p == d.terms[i].p);
    REQUIRE(back.terms[i].zeta == d.terms[i].zeta);
  }

  REQUIRE_THROWS_AS(parse_decomposition_json("{", "test"), usage_error);
  REQUIRE_THROWS_AS(parse_decomposition_json("{}", "test"), usage_error);
  REQUIRE_THROWS_AS(parse_decomposition_json("{\"terms\": []}", "test"),
                    usage_error);
  REQUIRE_THROWS_AS(
      parse_decomposition_json(
          "{\"terms\": [{\"alpha\": [1, 0], \"p\": 2, \"zeta\": [[1, 1]]}]}",
          "test"),
      usage_error);
  REQUIRE_THROWS_AS(
      parse_decomposition_json(
          "{\"terms\": [{\"alpha\": [1, 4], \"p\": 0, \"zeta\": [[1, 1]]}]}",
          "test"),
      usage_error);
}
