#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qrate/error.hpp"

namespace qrate {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

// One term alpha * (zeta . x)^p of a power-of-linear-forms decomposition.
struct PowerTerm {
  rational alpha;
  int p = 1;
  std::vector<rational> zeta;
};

// Q(x) = sum_r alpha_r (zeta_r . x)^{p_r}, exact rational coefficients.
struct PowerDecomposition {
  int q = 0;  // number of variables
  std::vector<PowerTerm> terms;
};

// Sparse polynomial: list of (exponent pattern, coefficient).
using sparse_poly = std::vector<std::pair<std::vector<int>, rational>>;

// Decomposes the monomial x_1^{a_1} ... x_q^{a_q} (total degree p >= 1) via
// the polarization identity over p slots,
//   x_1^{a_1}...x_q^{a_q}
//     = (1/p!) sum_{0 != eps in {0,1}^p} (-1)^{p-|eps|} (sum_i eps_i y_i)^p,
// with slot variables repeated according to multiplicity, then merges
// proportional linear forms.
PowerDecomposition polarize_monomial(const std::vector<int>& exponents);

// Per-monomial polarization with coefficients folded in, merged.
PowerDecomposition decompose_symmetric(const sparse_poly& poly);

double evaluate_decomposition(const PowerDecomposition& d,
                              const std::vector<double>& u);
rational evaluate_decomposition_exact(const PowerDecomposition& d,
                                      const std::vector<rational>& u);

// Canonical form: each zeta scaled to primitive integers with the first
// nonzero entry positive (alpha absorbs the p-th power of the scale),
// proportional terms merged, zero terms dropped, deterministic order.
PowerDecomposition normalize_decomposition(PowerDecomposition d);

// Exact expansion into monomial coefficients, for equality checks.
std::map<std::vector<int>, rational> expand_to_monomials(
    const PowerDecomposition& d);

// JSON schema: {"terms":[{"alpha":[num,den],"p":int,"zeta":[[num,den],...]}]}
std::string decomposition_to_json(const PowerDecomposition& d);
PowerDecomposition parse_decomposition_json(const std::string& text,
                                            const std::string& origin);

}  // namespace qrate
