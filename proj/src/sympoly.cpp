#include "qrate/sympoly.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qrate {

namespace {

constexpr int kDegreeCap = 20;  // 2^p polarization terms; keep p sane

bigint factorial(int n) {
  bigint f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Scales zeta to a primitive integer vector with positive leading entry;
// returns the scale s with zeta = s * primitive.
rational to_primitive(const std::vector<rational>& zeta,
                      std::vector<bigint>* primitive) {
  bigint L = 1;
  for (const auto& z : zeta) L = lcm(L, denominator(z));
  std::vector<bigint> v;
  v.reserve(zeta.size());
  bigint G = 0;
  for (const auto& z : zeta) {
    bigint x = numerator(z) * (L / denominator(z));
    G = gcd(G, abs(x));
    v.push_back(std::move(x));
  }
  if (G == 0) return rational(0);  // zero vector
  int sign = 1;
  for (const auto& x : v) {
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  }
  primitive->clear();
  primitive->reserve(v.size());
  for (auto& x : v) primitive->push_back(x * sign / G);
  return rational(G * sign, L);
}

struct TermKey {
  int p;
  std::vector<bigint> zeta;
  bool operator<(const TermKey& o) const {
    if (p != o.p) return p < o.p;
    return std::lexicographical_compare(zeta.begin(), zeta.end(),
                                        o.zeta.begin(), o.zeta.end());
  }
};

}  // namespace

PowerDecomposition normalize_decomposition(PowerDecomposition d) {
  std::map<TermKey, rational> merged;
  for (const auto& term : d.terms) {
    if (term.p < 1) throw usage_error("decomposition powers must be >= 1");
    if (static_cast<int>(term.zeta.size()) != d.q) {
      throw usage_error("decomposition term arity mismatch");
    }
    std::vector<bigint> prim;
    const rational s = to_primitive(term.zeta, &prim);
    if (s == 0) continue;  // (0 . x)^p contributes nothing
    rational scale = 1;
    for (int i = 0; i < term.p; ++i) scale *= s;
    merged[TermKey{term.p, std::move(prim)}] += term.alpha * scale;
  }
  PowerDecomposition out;
  out.q = d.q;
  for (auto& [key, alpha] : merged) {
    if (alpha == 0) continue;
    PowerTerm t;
    t.alpha = std::move(alpha);
    t.p = key.p;
    t.zeta.reserve(key.zeta.size());
    for (const auto& z : key.zeta) t.zeta.emplace_back(z);
    out.terms.push_back(std::move(t));
  }
  return out;
}

PowerDecomposition polarize_monomial(const std::vector<int>& exponents) {
  const int q = static_cast<int>(exponents.size());
  if (q < 1) throw usage_error("monomial needs at least one variable");
  int p = 0;
  for (int a : exponents) {
    if (a < 0) throw usage_error("monomial exponents must be nonnegative");
    p += a;
  }
  if (p < 1) throw usage_error("degree-0 monomials need no decomposition");
  if (p > kDegreeCap) {
    throw resource_error("polarization degree exceeds the cap of " +
                         std::to_string(kDegreeCap));
  }

  std::vector<int> slot_var;
  slot_var.reserve(p);
  for (int j = 0; j < q; ++j) {
    for (int a = 0; a < exponents[j]; ++a) slot_var.push_back(j);
  }

  const bigint pfac = factorial(p);
  PowerDecomposition d;
  d.q = q;
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    const int bits = __builtin_popcount(mask);
    std::vector<rational> zeta(q, rational(0));
    for (int i = 0; i < p; ++i) {
      if (mask & (1u << i)) zeta[slot_var[i]] += 1;
    }
    PowerTerm t;
    t.alpha = rational(((p - bits) % 2 == 0) ? bigint(1) : bigint(-1), pfac);
    t.p = p;
    t.zeta = std::move(zeta);
    d.terms.push_back(std::move(t));
  }
  return normalize_decomposition(std::move(d));
}

PowerDecomposition decompose_symmetric(const sparse_poly& poly) {
  if (poly.empty()) throw usage_error("empty polynomial");
  const int q = static_cast<int>(poly.front().first.size());
  PowerDecomposition acc;
  acc.q = q;
  for (const auto& [exponents, coef] : poly) {
    if (static_cast<int>(exponents.size()) != q) {
      throw usage_error("inconsistent monomial arity");
    }
    if (coef == 0) continue;
    PowerDecomposition part = polarize_monomial(exponents);
    for (auto& t : part.terms) {
      t.alpha *= coef;
      acc.terms.push_back(std::move(t));
    }
  }
  if (acc.terms.empty()) throw usage_error("polynomial has no degree >= 1 terms");
  return normalize_decomposition(std::move(acc));
}

double evaluate_decomposition(const PowerDecomposition& d,
                              const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != d.q) {
    throw usage_error("evaluation point arity mismatch");
  }
  double acc = 0.0;
  for (const auto& t : d.terms) {
    double dotp = 0.0;
    for (int j = 0; j < d.q; ++j) {
      dotp += static_cast<double>(t.zeta[j]) * u[j];
    }
    double powv = 1.0;
    for (int i = 0; i < t.p; ++i) powv *= dotp;
    acc += static_cast<double>(t.alpha) * powv;
  }
  return acc;
}

rational evaluate_decomposition_exact(const PowerDecomposition& d,
                                      const std::vector<rational>& u) {
  if (static_cast<int>(u.size()) != d.q) {
    throw usage_error("evaluation point arity mismatch");
  }
  rational acc = 0;
  for (const auto& t : d.terms) {
    rational dotp = 0;
    for (int j = 0; j < d.q; ++j) dotp += t.zeta[j] * u[j];
    rational powv = 1;
    for (int i = 0; i < t.p; ++i) powv *= dotp;
    acc += t.alpha * powv;
  }
  return acc;
}

namespace {

// Expands alpha * (zeta . x)^p into the monomial map via multinomials.
void expand_term(const PowerTerm& t, int q,
                 std::map<std::vector<int>, rational>* out) {
  std::vector<int> k(q, 0);
  const bigint pfac = factorial(t.p);
  // Iterate over all compositions of p into q nonnegative parts.
  std::function<void(int, int)> rec = [&](int j, int remaining) {
    if (j == q - 1) {
      k[j] = remaining;
      rational coef = t.alpha * rational(pfac, 1);
      bool zero = false;
      for (int i = 0; i < q; ++i) {
        coef /= rational(factorial(k[i]), 1);
        if (k[i] > 0 && t.zeta[i] == 0) {
          zero = true;
          break;
        }
        for (int e = 0; e < k[i]; ++e) coef *= t.zeta[i];
      }
      if (!zero && coef != 0) (*out)[k] += coef;
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[j] = v;
      rec(j + 1, remaining - v);
    }
  };
  rec(0, t.p);
}

}  // namespace

std::map<std::vector<int>, rational> expand_to_monomials(
    const PowerDecomposition& d) {
  std::map<std::vector<int>, rational> out;
  for (const auto& t : d.terms) expand_term(t, d.q, &out);
  for (auto it = out.begin(); it != out.end();) {
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  }
  return out;
}

namespace {

using nlohmann::json;

json rational_to_json(const rational& r) {
  json pair = json::array();
  pair.push_back(numerator(r).convert_to<long long>());
  pair.push_back(denominator(r).convert_to<long long>());
  return pair;
}

rational rational_from_json(const json& j, const std::string& origin) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw usage_error(origin + ": rationals must be [numerator, denominator]");
  }
  const long long den = j[1].get<long long>();
  if (den == 0) throw usage_error(origin + ": zero denominator");
  return rational(j[0].get<long long>(), den);
}

}  // namespace

std::string decomposition_to_json(const PowerDecomposition& d) {
  json terms = json::array();
  for (const auto& t : d.terms) {
    json jt;
    jt["alpha"] = rational_to_json(t.alpha);
    jt["p"] = t.p;
    json zeta = json::array();
    for (const auto& z : t.zeta) zeta.push_back(rational_to_json(z));
    jt["zeta"] = std::move(zeta);
    terms.push_back(std::move(jt));
  }
  json j;
  j["terms"] = std::move(terms);
  return j.dump(2) + "\n";
}

PowerDecomposition parse_decomposition_json(const std::string& text,
                                            const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw usage_error(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    throw usage_error(origin + ": field \"terms\" missing or not an array");
  }
  PowerDecomposition d;
  d.q = -1;
  for (const auto& jt : j["terms"]) {
    PowerTerm t;
    if (!jt.contains("alpha")) throw usage_error(origin + ": term lacks \"alpha\"");
    t.alpha = rational_from_json(jt["alpha"], origin);
    if (!jt.contains("p") || !jt["p"].is_number_integer() || jt["p"].get<int>() < 1) {
      throw usage_error(origin + ": field \"p\" must be a positive integer");
    }
    t.p = jt["p"].get<int>();
    if (!jt.contains("zeta") || !jt["zeta"].is_array() || jt["zeta"].empty()) {
      throw usage_error(origin + ": field \"zeta\" must be a nonempty array");
    }
    for (const auto& z : jt["zeta"]) t.zeta.push_back(rational_from_json(z, origin));
    if (d.q < 0) d.q = static_cast<int>(t.zeta.size());
    if (static_cast<int>(t.zeta.size()) != d.q) {
      throw usage_error(origin + ": terms have differing arity");
    }
    d.terms.push_back(std::move(t));
  }
  if (d.terms.empty()) throw usage_error(origin + ": no terms");
  return d;
}

}  // namespace qrate
