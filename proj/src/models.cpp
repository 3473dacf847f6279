#include "qrate/models.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>

#include "qrate/rate.hpp"
#include "qrate/varsolve.hpp"

namespace qrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

HermitianMatrix pauli_x() {
  cmat m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return HermitianMatrix(std::move(m));
}

HermitianMatrix pauli_z() {
  cmat m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return HermitianMatrix(std::move(m));
}

struct Min1D {
  double arg = 0.0;
  double value = 0.0;
};

// Closed-grid scan (endpoints included, first best kept on ties) followed by
// golden-section refinement over the bracketing cells; the best point seen
// anywhere is returned, so multimodal objectives cannot regress below the
// grid answer.
Min1D minimize_1d(double lo, double hi, const std::function<double(double)>& F,
                  int grid_n) {
  Min1D best{lo, F(lo)};
  auto track = [&](double x, double v) {
    if (v < best.value) best = {x, v};
  };
  for (int i = 1; i < grid_n; ++i) {
    const double x = (i + 1 == grid_n) ? hi : lo + (hi - lo) * i / (grid_n - 1);
    track(x, F(x));
  }
  const double step = (hi - lo) / (grid_n - 1);
  double a = std::max(lo, best.arg - step);
  double b = std::min(hi, best.arg + step);
  constexpr double gr = 0.61803398874989484820;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = F(c), fd = F(d);
  track(c, fc);
  track(d, fd);
  for (int it = 0;
       it < 120 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = F(c);
      track(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = F(d);
      track(d, fd);
    }
  }
  return best;
}

double logsumexp(const std::vector<double>& terms) {
  double top = -kInf;
  for (double t : terms) top = std::max(top, t);
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

using boost::multiprecision::cpp_int;

cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  cpp_int c = 1;
  for (int i = 0; i < k; ++i) {
    c *= (n - i);
    c /= (i + 1);
  }
  return c;
}

// ln of the multiplicity of the total-spin-j sector of n spin-1/2 sites,
// jj = 2j.
double log_mult(int n, int jj) {
  const int k = (n - jj) / 2;
  const cpp_int m = binomial(n, k) - binomial(n, k - 1);
  return std::log(m.convert_to<double>());
}

void check_sector_args(double beta, int n) {
  if (!(beta > 0.0)) throw usage_error("beta must be positive");
  if (n < 1) throw usage_error("site count must be at least 1");
  if (n > 1020) {
    throw usage_error("sector evaluation supports at most 1020 sites");
  }
}

}  // namespace

double i0(double u) {
  if (!(std::abs(u) <= 1.0)) {
    throw usage_error("i0 requires an argument in [-1, 1]");
  }
  double s = 0.0;
  if (1.0 + u > 0.0) s += 0.5 * (1.0 + u) * std::log1p(u);
  if (1.0 - u > 0.0) s += 0.5 * (1.0 - u) * std::log1p(-u);
  return s;
}

ising_route parse_ising_route(const std::string& name) {
  if (name == "one_var") return ising_route::one_var;
  if (name == "two_var") return ising_route::two_var;
  if (name == "polar") return ising_route::polar;
  throw usage_error("unknown route '" + name +
                    "' (expected one_var, two_var or polar)");
}

ModelResult ising_free_energy(double beta, double h, ising_route route) {
  if (!(beta > 0.0)) throw usage_error("beta must be positive");
  if (!std::isfinite(h)) throw usage_error("h must be finite");

  switch (route) {
    case ising_route::one_var: {
      const CumulantGF c({pauli_z()},
                         HermitianMatrix(-beta * h * pauli_x().entries()),
                         false);
      const auto F = [&](double z) {
        return -z * z + rate_point(c, {z}).value / beta;
      };
      const Min1D r = minimize_1d(-1.0, 1.0, F, 601);
      return {r.value, {r.arg}};
    }
    case ising_route::two_var: {
      const VariationalResult v = multi_observable_value(
          {pauli_x(), pauli_z()},
          {[beta, h](double x) { return beta * h * x; },
           [beta](double z) { return beta * z * z; }});
      return {-v.value / beta, {v.optimizer[0], v.optimizer[1]}};
    }
    case ising_route::polar: {
      const double ah = std::abs(h);
      const auto angle = [ah](double u) {
        return (2.0 * u > ah) ? ah / (2.0 * u) : 1.0;
      };
      const auto F = [&](double u) {
        const double c = angle(u);
        return -u * u + u * c * (u * c - ah) + (i0(u) - kLn2) / beta;
      };
      const Min1D r = minimize_1d(0.0, 1.0, F, 601);
      const double c = angle(r.arg);
      const double sgn = (h >= 0.0) ? 1.0 : -1.0;
      return {r.value,
              {sgn * r.arg * c,
               r.arg * std::sqrt(std::max(0.0, 1.0 - c * c))}};
    }
  }
  throw usage_error("unknown route");
}

ModelResult heisenberg_free_energy(double beta, double J, double Delta) {
  if (!(beta > 0.0)) throw usage_error("beta must be positive");
  if (!std::isfinite(J) || !std::isfinite(Delta)) {
    throw usage_error("J and Delta must be finite");
  }

  const CumulantGF c({pauli_x(), pauli_z()}, std::nullopt, false);
  const auto G = [&](double rho, double z) -> double {
    if (rho < 0.0 || rho * rho + z * z > 1.0 + 1e-14) return kInf;
    try {
      const RateEvaluation r = rate_point(c, {rho, z});
      if (r.status == rate_status::infinite) return kInf;
      return -J * (rho * rho + Delta * z * z) + r.value / beta;
    } catch (const solver_error&) {
      return kInf;
    }
  };

  const int nr = 61, nz = 121;
  double best_r = 0.0, best_z = -1.0, best_v = kInf;
  for (int i = 0; i < nr; ++i) {
    const double rho = static_cast<double>(i) / (nr - 1);
    for (int k = 0; k < nz; ++k) {
      const double z = -1.0 + 2.0 * k / (nz - 1);
      const double v = G(rho, z);
      if (v < best_v) {
        best_v = v;
        best_r = rho;
        best_z = z;
      }
    }
  }

  // Graded compass refinement: moves repeat at each radius until exhausted,
  // then the radius shrinks. Single-pass schedules stall in the steep-edge
  // region of the disc at large beta J.
  static const int dirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                 {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
  double radius = std::max(1.0 / (nr - 1), 2.0 / (nz - 1));
  for (int level = 0; level < 80; ++level) {
    for (int move = 0; move < 4000; ++move) {
      bool improved = false;
      for (const auto& d : dirs) {
        const double rho =
            std::min(1.0, std::max(0.0, best_r + radius * d[0]));
        const double z = std::min(1.0, std::max(-1.0, best_z + radius * d[1]));
        if (rho == best_r && z == best_z) continue;
        const double v = G(rho, z);
        if (v < best_v) {
          best_v = v;
          best_r = rho;
          best_z = z;
          improved = true;
        }
      }
      if (!improved) break;
    }
    radius *= 0.7;
  }
  return {best_v, {best_r, 0.0, best_z}};
}

double ising_log_trace_sector(double beta, double h, int n) {
  check_sector_args(beta, n);
  if (!std::isfinite(h)) throw usage_error("h must be finite");
  std::vector<double> terms;
  for (int jj = n % 2; jj <= n; jj += 2) {
    const int d = jj + 1;
    const double j = jj / 2.0;
    rmat block = rmat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      const double mz = j - i;
      block(i, i) = (4.0 * beta / n) * mz * mz;
      if (i + 1 < d) {
        const double amp = std::sqrt(j * (j + 1.0) - mz * (mz - 1.0));
        block(i, i + 1) = block(i + 1, i) = beta * h * amp;
      }
    }
    Eigen::SelfAdjointEigenSolver<rmat> es(block, Eigen::EigenvaluesOnly);
    const double lm = log_mult(n, jj);
    for (int i = 0; i < d; ++i) terms.push_back(lm + es.eigenvalues()(i));
  }
  return logsumexp(terms) / n;
}

double heisenberg_log_trace_sector(double beta, double J, double Delta,
                                   int n) {
  check_sector_args(beta, n);
  if (!std::isfinite(J) || !std::isfinite(Delta)) {
    throw usage_error("J and Delta must be finite");
  }
  std::vector<double> terms;
  for (int jj = n % 2; jj <= n; jj += 2) {
    const double j = jj / 2.0;
    const double lm = log_mult(n, jj);
    for (int i = 0; i <= jj; ++i) {
      const double mz = j - i;
      terms.push_back(lm + (4.0 * beta * J / n) *
                               (j * (j + 1.0) - (1.0 - Delta) * mz * mz));
    }
  }
  return logsumexp(terms) / n;
}

}  // namespace qrate
