#include "qrate/entropy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qrate/rate.hpp"
#include "qrate/rng.hpp"
#include "qrate/varsolve.hpp"

namespace qrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// e^{-H} up to a positive scale (max-shifted); callers normalize.
cmat scaled_exp_neg(const HermitianMatrix& H) {
  const SpectralDecomposition d = spectral_decompose(H);
  rvec e(d.eigenvalues.size());
  const double shift = d.eigenvalues(0);  // smallest eigenvalue dominates
  for (int i = 0; i < e.size(); ++i) {
    e(i) = std::exp(-(d.eigenvalues(i) - shift));
  }
  return d.basis * e.asDiagonal() * d.basis.adjoint();
}

HermitianMatrix hermitian_clean(cmat A) {
  cmat s = 0.5 * (A + A.adjoint().eval());
  return HermitianMatrix(std::move(s));
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianMatrix matrix) : matrix_(std::move(matrix)) {
  const double tr = matrix_.entries().trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "density matrix trace is " << tr << ", not 1";
    throw usage_error(os.str());
  }
  const rvec w = eigenvalues_of(matrix_);
  if (w(0) < -1e-12) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << w(0);
    throw usage_error(os.str());
  }
}

double DensityMatrix::expectation(const HermitianMatrix& X) const {
  if (X.dim() != dim()) throw usage_error("observable dimension differs");
  return (matrix_.entries() * X.entries()).trace().real();
}

DensityMatrix gibbs_state(const HermitianMatrix& H) {
  cmat s = scaled_exp_neg(H);
  s /= s.trace().real();
  return DensityMatrix(hermitian_clean(std::move(s)));
}

DensityMatrix perturbed_gibbs(const HermitianMatrix& H,
                              const HermitianMatrix& X, double t) {
  if (H.dim() != X.dim()) throw usage_error("H and X dimensions differ");
  if (!std::isfinite(t)) throw usage_error("tilt parameter must be finite");
  return gibbs_state(HermitianMatrix(H.entries() - t * X.entries()));
}

double relative_entropy(const DensityMatrix& phi, const DensityMatrix& rho) {
  if (phi.dim() != rho.dim()) throw usage_error("density dimensions differ");
  const SpectralDecomposition dp = spectral_decompose(phi.matrix());
  const SpectralDecomposition dr = spectral_decompose(rho.matrix());
  const int m = phi.dim();

  const double thr_phi = 1e-12 * dp.eigenvalues(m - 1);
  double s_phi = 0.0;  // Tr[D ln D]
  for (int i = 0; i < m; ++i) {
    const double a = dp.eigenvalues(i);
    if (a > thr_phi && a > 0.0) s_phi += a * std::log(a);
  }

  // Diagonal of phi in the eigenbasis of rho.
  const cmat r = dr.basis.adjoint() * phi.matrix().entries() * dr.basis;
  const double thr_rho = 1e-12 * dr.eigenvalues(m - 1);
  double leak = 0.0;
  double cross = 0.0;  // Tr[D_phi ln D_rho] on the support of rho
  for (int j = 0; j < m; ++j) {
    const double b = dr.eigenvalues(j);
    const double overlap = r(j, j).real();
    if (b > thr_rho && b > 0.0) {
      cross += overlap * std::log(b);
    } else {
      leak += overlap;
    }
  }
  if (leak > 1e-12) return kInf;
  return s_phi - cross;
}

double variational_gap(const DensityMatrix& phi, const HermitianMatrix& X,
                       const HermitianMatrix& H, double t) {
  if (phi.dim() != X.dim() || X.dim() != H.dim()) {
    throw usage_error("dimension mismatch");
  }
  const double s = relative_entropy(phi, gibbs_state(H));
  if (!std::isfinite(s)) return kInf;
  const double c = log_trace_exp(HermitianMatrix(t * X.entries() - H.entries())) -
                   log_trace_exp(HermitianMatrix(-H.entries()));
  return c - (t * phi.expectation(X) - s);
}

double rate_dominance_gap(const DensityMatrix& phi, const HermitianMatrix& X,
                          const HermitianMatrix& H) {
  if (phi.dim() != X.dim() || X.dim() != H.dim()) {
    throw usage_error("dimension mismatch");
  }
  const double s = relative_entropy(phi, gibbs_state(H));
  if (!std::isfinite(s)) return kInf;
  const CumulantGF c({X}, H, true);
  const SpectralInterval box = rate_domain(c).front();
  // Expectations can stray beyond the spectral box by roundoff only.
  const double u = std::min(std::max(phi.expectation(X), box.lo), box.hi);
  return s - rate_point(c, {u}).value;
}

SupEquivalence sup_equivalence_check(const std::function<double(double)>& f,
                                     const HermitianMatrix& X,
                                     const HermitianMatrix& H, int samples,
                                     std::uint64_t seed) {
  if (X.dim() != H.dim()) throw usage_error("H and X dimensions differ");
  if (samples < 0) throw usage_error("sample count must be nonnegative");
  const int m = X.dim();
  const DensityMatrix rho = gibbs_state(H);
  const CumulantGF c({X}, H, true);
  const SpectralInterval box = rate_domain(c).front();

  SupEquivalence out;
  const VariationalResult vr = prv_value(X, H, f);
  out.scalar_side = vr.value - log_trace_exp(HermitianMatrix(-H.entries()));

  double best = -kInf;
  auto consider = [&](const DensityMatrix& phi) {
    const double s = relative_entropy(phi, rho);
    if (!std::isfinite(s)) return;
    const double v = f(phi.expectation(X)) - s;
    if (v > best) best = v;
  };

  // Extremal states P e^{-H} P / Tr, the boundary optimizers.
  const SpectralDecomposition dx = spectral_decompose(X);
  const cmat eh = scaled_exp_neg(H);
  auto extremal_state = [&](double edge) {
    cmat p = cmat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      if (std::abs(dx.eigenvalues(i) - edge) <= 1e-9 * (1.0 + std::abs(edge))) {
        p += dx.basis.col(i) * dx.basis.col(i).adjoint();
      }
    }
    cmat b = p * eh * p;
    b /= b.trace().real();
    return DensityMatrix(hermitian_clean(std::move(b)));
  };
  consider(extremal_state(box.lo));
  consider(extremal_state(box.hi));
  consider(rho);

  // Tilted states along a u-grid, plus the scalar-side optimizer itself.
  std::vector<double> targets;
  const int grid = 33;
  for (int k = 1; k + 1 < grid; ++k) {
    targets.push_back(box.lo + (box.hi - box.lo) * k / (grid - 1));
  }
  targets.push_back(std::min(std::max(vr.optimizer.front(), box.lo), box.hi));
  for (double u : targets) {
    const RateEvaluation r = rate_point(c, {u});
    if (r.status == rate_status::interior) {
      consider(perturbed_gibbs(H, X, r.maximizer.front()));
    }
  }

  const rng_stream root(seed);
  for (int i = 0; i < samples; ++i) {
    consider(random_density(m, root.child(static_cast<std::uint64_t>(i)).seed()));
  }

  out.state_side = best;
  return out;
}

DensityMatrix random_density(int m, std::uint64_t seed) {
  if (m < 1) throw usage_error("dimension must be at least 1");
  rng_stream s = rng_stream(seed).child(1);
  cmat g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = s.cgaussian();
  }
  cmat a = g * g.adjoint();
  a /= a.trace().real();
  return DensityMatrix(hermitian_clean(std::move(a)));
}

}  // namespace qrate
