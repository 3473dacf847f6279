#include "qrate/finite_n.hpp"

#include <cmath>
#include <sstream>

#include "qrate/io.hpp"

namespace qrate {

namespace {

// In-place M <- M (I_P (x) U (x) I_Q)^dagger. Columns within a (p, q) group
// mix linearly, so the pass is organized as contiguous column operations.
void right_adjoint_transform(cmat& M, const cmat& U, std::int64_t P,
                             std::int64_t Q) {
  const int m = static_cast<int>(U.rows());
  const std::int64_t D = M.rows();
  cmat buf(D, m);
  const std::int64_t mQ = m * Q;
  for (std::int64_t p = 0; p < P; ++p) {
    for (std::int64_t q = 0; q < Q; ++q) {
      const std::int64_t base = p * mQ + q;
      for (int b = 0; b < m; ++b) buf.col(b) = M.col(base + b * Q);
      for (int a = 0; a < m; ++a) {
        auto col = M.col(base + a * Q);
        col = std::conj(U(a, 0)) * buf.col(0);
        for (int b = 1; b < m; ++b) col += std::conj(U(a, b)) * buf.col(b);
      }
    }
  }
}

// In-place M <- T M T^dagger with T = I_P (x) U (x) I_Q, for Hermitian M.
// Uses M T^dagger twice with an adjoint in between:
//   N = M T^dagger;  N^dagger = T M;  (T M) T^dagger = T M T^dagger.
void site_conjugate(cmat& M, const cmat& U, std::int64_t P, std::int64_t Q) {
  right_adjoint_transform(M, U, P, Q);
  M.adjointInPlace();
  right_adjoint_transform(M, U, P, Q);
}

}  // namespace

HermitianMatrix build_meanfield_exponent(
    const std::vector<HermitianMatrix>& Xs,
    const std::vector<std::function<double(double)>>& fs,
    const std::optional<HermitianMatrix>& H, int n) {
  if (Xs.empty()) throw usage_error("need at least one observable");
  if (Xs.size() != fs.size()) {
    throw usage_error("one scalar function per observable is required");
  }
  const int m = Xs.front().dim();
  for (const auto& X : Xs) {
    if (X.dim() != m) throw usage_error("observable dimensions differ");
  }
  if (H && H->dim() != m) {
    throw usage_error("Hamiltonian dimension differs from observables");
  }
  const std::int64_t D = checked_tensor_dim(m, n);

  cmat acc = cmat::Zero(D, D);
  if (H) {
    for (int k = 1; k <= n; ++k) add_site_lift(acc, H->entries(), k, n, -1.0);
  }

  std::vector<std::int64_t> site_weight(n);  // m^(n-k) for site k (1-based)
  {
    std::int64_t w = 1;
    for (int k = n; k >= 1; --k) {
      site_weight[k - 1] = w;
      w *= m;
    }
  }

  for (std::size_t j = 0; j < Xs.size(); ++j) {
    const SpectralDecomposition d = spectral_decompose(Xs[j]);

    cmat M = cmat::Zero(D, D);
    for (std::int64_t i = 0; i < D; ++i) {
      double avg = 0.0;
      for (int k = 0; k < n; ++k) {
        avg += d.eigenvalues((i / site_weight[k]) % m);
      }
      avg /= n;
      const double v = fs[j](avg);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "function " << j << " is not finite at eigenvalue average " << avg;
        throw usage_error(os.str());
      }
      M(i, i) = v;
    }

    // Identity basis at the site level means the diagonal is already in the
    // product eigenbasis; skip the transforms.
    const bool identity_basis =
        (d.basis - cmat::Identity(m, m)).cwiseAbs().maxCoeff() == 0.0;
    if (!identity_basis) {
      for (int k = 1; k <= n; ++k) {
        site_conjugate(M, d.basis, D / (site_weight[k - 1] * m),
                       site_weight[k - 1]);
      }
    }
    acc += static_cast<double>(n) * M;
  }

  // Clean the roundoff asymmetry accumulated by the site transforms.
  for (std::int64_t j = 0; j < D; ++j) {
    for (std::int64_t i = j + 1; i < D; ++i) {
      const std::complex<double> v =
          0.5 * (acc(i, j) + std::conj(acc(j, i)));
      acc(i, j) = v;
      acc(j, i) = std::conj(v);
    }
    acc(j, j) = acc(j, j).real();
  }
  return HermitianMatrix(std::move(acc));
}

double log_trace_finite_n(const std::vector<HermitianMatrix>& Xs,
                          const std::vector<std::function<double(double)>>& fs,
                          const std::optional<HermitianMatrix>& H, int n) {
  return log_trace_exp(build_meanfield_exponent(Xs, fs, H, n)) / n;
}

double trotter_log_trace(const HermitianMatrix& X, const HermitianMatrix& H,
                         const std::function<double(double)>& f, int n,
                         long long N) {
  if (N < 1) throw usage_error("Trotter step count must be >= 1");
  const std::int64_t D = checked_tensor_dim(X.dim(), n);

  const HermitianMatrix F = build_meanfield_exponent({X}, {f}, std::nullopt, n);
  cmat G = cmat::Zero(D, D);
  for (int k = 1; k <= n; ++k) add_site_lift(G, H.entries(), k, n, 1.0);
  const HermitianMatrix Gm(std::move(G));

  // Shift both factors so neither exponential overflows; the shifts commute
  // out of the product exactly.
  const rvec wf = eigenvalues_of(F);
  const rvec wg = eigenvalues_of(Gm);
  const double a = wf(wf.size() - 1);
  const double b = -wg(0);

  auto scaled_exp = [N](const HermitianMatrix& A, double shift, double sign) {
    const SpectralDecomposition d = spectral_decompose(A);
    rvec e(d.eigenvalues.size());
    for (int i = 0; i < e.size(); ++i) {
      e(i) = std::exp((sign * d.eigenvalues(i) - shift) / static_cast<double>(N));
    }
    return cmat(d.basis * e.asDiagonal() * d.basis.adjoint());
  };
  const cmat EF = scaled_exp(F, a, 1.0);
  const cmat EG = scaled_exp(Gm, b, -1.0);

  cmat base = EF * EG;
  cmat result = cmat::Identity(D, D);
  long long k = N;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  const double tr = result.trace().real();
  if (!(tr > 0.0)) throw error("Trotter trace is not positive");
  return (std::log(tr) + a + b) / n;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  csv_table t({"n", "trotter_steps", "value", "reference", "gap"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.n),
               r.trotter_steps ? std::to_string(*r.trotter_steps) : "",
               csv_table::cell(r.value), csv_table::cell(r.reference),
               csv_table::cell(r.gap)});
  }
  return t.str();
}

}  // namespace qrate
