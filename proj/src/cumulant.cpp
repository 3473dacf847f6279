#include "qrate/cumulant.hpp"

#include <cmath>

namespace qrate {

CumulantGF::CumulantGF(std::vector<HermitianMatrix> obs,
                       std::optional<HermitianMatrix> base_in,
                       bool normalized_in)
    : observables(std::move(obs)),
      base(std::move(base_in)),
      normalized(normalized_in) {
  if (observables.empty()) throw usage_error("need at least one observable");
  const int m = observables.front().dim();
  for (const auto& X : observables) {
    if (X.dim() != m) throw usage_error("observable dimensions differ");
  }
  if (base && base->dim() != m) {
    throw usage_error("base Hamiltonian dimension differs from observables");
  }
  if (normalized && !base) {
    throw usage_error("a normalized CGF requires a base Hamiltonian");
  }
}

HermitianMatrix CumulantGF::exponent(const std::vector<double>& t) const {
  if (static_cast<int>(t.size()) != q()) {
    throw usage_error("tilt vector length does not match observable count");
  }
  cmat K = cmat::Zero(dim(), dim());
  for (int j = 0; j < q(); ++j) {
    if (!std::isfinite(t[j])) throw usage_error("tilt vector must be finite");
    K += t[j] * observables[j].entries();
  }
  if (base) K -= base->entries();
  return HermitianMatrix(std::move(K));
}

double CumulantGF::base_log_trace() const {
  if (!base) return 0.0;
  return log_trace_exp(HermitianMatrix(-base->entries()));
}

double cgf(const CumulantGF& c, const std::vector<double>& t) {
  double v = log_trace_exp(c.exponent(t));
  if (c.normalized) v -= c.base_log_trace();
  return v;
}

std::vector<double> cgf_grad(const CumulantGF& c,
                             const std::vector<double>& t) {
  const SpectralDecomposition d = spectral_decompose(c.exponent(t));
  const int m = c.dim();
  const double wmax = d.eigenvalues(m - 1);
  rvec w(m);
  double Z = 0.0;
  for (int i = 0; i < m; ++i) {
    w(i) = std::exp(d.eigenvalues(i) - wmax);
    Z += w(i);
  }
  std::vector<double> g(c.q());
  for (int j = 0; j < c.q(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto col = d.basis.col(i);
      acc += w(i) * (col.adjoint() * c.observables[j].entries() * col)(0).real();
    }
    g[j] = acc / Z;
  }
  return g;
}

double bogoliubov_inner(const HermitianMatrix& A, const HermitianMatrix& B,
                        const HermitianMatrix& K) {
  if (A.dim() != K.dim() || B.dim() != K.dim()) {
    throw usage_error("Bogoliubov product needs matching dimensions");
  }
  const SpectralDecomposition d = spectral_decompose(K);
  const int m = K.dim();
  const double wmax = d.eigenvalues(m - 1);
  // Shifted eigenvalues keep both the kernel and Z finite; the shift cancels
  // in the ratio.
  rvec mu = d.eigenvalues.array() - wmax;
  rvec emu(m);
  double Z = 0.0;
  for (int i = 0; i < m; ++i) {
    emu(i) = std::exp(mu(i));
    Z += emu(i);
  }
  const cmat At = d.basis.adjoint() * A.entries() * d.basis;
  const cmat Bt = d.basis.adjoint() * B.entries() * d.basis;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double gap = mu(i) - mu(j);
      double kernel;
      if (std::abs(gap) < 1e-9 * (1.0 + std::abs(mu(i)))) {
        kernel = emu(i);
      } else {
        kernel = (emu(i) - emu(j)) / gap;
      }
      acc += (At(i, j) * Bt(j, i)).real() * kernel;
    }
  }
  return acc / Z;
}

rmat cgf_hessian(const CumulantGF& c, const std::vector<double>& t) {
  const HermitianMatrix K = c.exponent(t);
  const std::vector<double> mean = cgf_grad(c, t);
  std::vector<HermitianMatrix> centered;
  centered.reserve(c.q());
  for (int j = 0; j < c.q(); ++j) {
    cmat M = c.observables[j].entries();
    M.diagonal().array() -= mean[j];
    centered.emplace_back(std::move(M));
  }
  rmat H(c.q(), c.q());
  for (int j = 0; j < c.q(); ++j) {
    for (int k = j; k < c.q(); ++k) {
      H(j, k) = bogoliubov_inner(centered[j], centered[k], K);
      H(k, j) = H(j, k);
    }
  }
  return H;
}

TiltedMoments cgf_moments(const CumulantGF& c, const std::vector<double>& t) {
  const SpectralDecomposition d = spectral_decompose(c.exponent(t));
  const int m = c.dim();
  const int q = c.q();
  const double wmax = d.eigenvalues(m - 1);
  rvec mu = d.eigenvalues.array() - wmax;
  rvec emu(m);
  double Z = 0.0;
  for (int i = 0; i < m; ++i) {
    emu(i) = std::exp(mu(i));
    Z += emu(i);
  }

  TiltedMoments out;
  out.value = wmax + std::log(Z);
  if (c.normalized) out.value -= c.base_log_trace();

  std::vector<cmat> tilted;
  tilted.reserve(q);
  out.grad.resize(q);
  for (int j = 0; j < q; ++j) {
    cmat At = d.basis.adjoint() * c.observables[j].entries() * d.basis;
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += emu(i) * At(i, i).real();
    mean /= Z;
    out.grad[j] = mean;
    At.diagonal().array() -= mean;
    tilted.push_back(std::move(At));
  }

  rmat kernel(m, m);
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < m; ++l) {
      const double gap = mu(i) - mu(l);
      if (std::abs(gap) < 1e-9 * (1.0 + std::abs(mu(i)))) {
        kernel(i, l) = emu(i);
      } else {
        kernel(i, l) = (emu(i) - emu(l)) / gap;
      }
    }
  }

  out.hessian.resize(q, q);
  for (int j = 0; j < q; ++j) {
    for (int k = j; k < q; ++k) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        for (int l = 0; l < m; ++l) {
          acc += (tilted[j](i, l) * tilted[k](l, i)).real() * kernel(i, l);
        }
      }
      out.hessian(j, k) = acc / Z;
      out.hessian(k, j) = out.hessian(j, k);
    }
  }
  return out;
}

}  // namespace qrate
