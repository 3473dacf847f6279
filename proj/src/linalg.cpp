#include "qrate/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "qrate/rng.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qrate {

tolerances& config() {
  static tolerances t;
  return t;
}

std::int64_t& dimension_cap() {
  static std::int64_t cap = 4096;
  return cap;
}

namespace {

// Above this dimension, eigenproblems go to LAPACK's blocked divide-and-
// conquer drivers instead of Eigen's unblocked QR iteration.
constexpr int kLapackThreshold = 128;

void check_lapack_info(int info, const char* routine) {
  if (info != 0) {
    std::ostringstream os;
    os << routine << " failed with info=" << info;
    throw error(os.str());
  }
}

rvec eigen_values_large(const HermitianMatrix& A, cmat* vectors) {
  const int m = A.dim();
  rvec w(m);
  const char jobz = vectors ? 'V' : 'N';
  if (A.is_real()) {
    rmat a = A.entries().real();
    int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', m, a.data(), m,
                              w.data());
    check_lapack_info(info, "dsyevd");
    if (vectors) *vectors = a.cast<std::complex<double>>();
  } else {
    cmat a = A.entries();
    int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, jobz, 'L', m,
        reinterpret_cast<lapack_complex_double*>(a.data()), m, w.data());
    check_lapack_info(info, "zheevd");
    if (vectors) *vectors = std::move(a);
  }
  return w;
}

}  // namespace

HermitianMatrix::HermitianMatrix(cmat entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw usage_error("HermitianMatrix requires a nonempty square matrix");
  }
  const int m = static_cast<int>(entries_.rows());
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const auto v = entries_(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite entry at (" << i << ", " << j << ")";
        throw usage_error(os.str());
      }
      const double dev = std::abs(v - std::conj(entries_(j, i)));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > config().hermiticity) {
    std::ostringstream os;
    os << "matrix is not Hermitian: entries (" << wi << ", " << wj << ") and ("
       << wj << ", " << wi << ") deviate by " << worst;
    throw usage_error(os.str());
  }
}

bool HermitianMatrix::is_real() const {
  for (int j = 0; j < entries_.cols(); ++j) {
    for (int i = 0; i < entries_.rows(); ++i) {
      if (entries_(i, j).imag() != 0.0) return false;
    }
  }
  return true;
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& A) {
  SpectralDecomposition d;
  if (A.dim() > kLapackThreshold) {
    d.eigenvalues = eigen_values_large(A, &d.basis);
    return d;
  }
  Eigen::SelfAdjointEigenSolver<cmat> es(A.entries());
  if (es.info() != Eigen::Success) throw error("eigendecomposition failed");
  d.eigenvalues = es.eigenvalues();
  d.basis = es.eigenvectors();
  return d;
}

rvec eigenvalues_of(const HermitianMatrix& A) {
  if (A.dim() > kLapackThreshold) return eigen_values_large(A, nullptr);
  Eigen::SelfAdjointEigenSolver<cmat> es(A.entries(),
                                         Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw error("eigendecomposition failed");
  return es.eigenvalues();
}

SpectralInterval spectral_interval(const HermitianMatrix& A) {
  const rvec w = eigenvalues_of(A);
  return {w(0), w(w.size() - 1)};
}

HermitianMatrix apply_function(const HermitianMatrix& A,
                               const std::function<double(double)>& f) {
  SpectralDecomposition d = spectral_decompose(A);
  rvec fw(d.eigenvalues.size());
  for (int i = 0; i < fw.size(); ++i) {
    fw(i) = f(d.eigenvalues(i));
    if (!std::isfinite(fw(i))) {
      std::ostringstream os;
      os << "function is not finite at eigenvalue " << d.eigenvalues(i);
      throw usage_error(os.str());
    }
  }
  cmat B = d.basis * fw.asDiagonal() * d.basis.adjoint();
  cmat sym = 0.5 * (B + B.adjoint());
  return HermitianMatrix(std::move(sym));
}

void add_site_lift(cmat& M, const cmat& X, int k, int n,
                   std::complex<double> scale) {
  const int m = static_cast<int>(X.rows());
  std::int64_t P = 1, Q = 1;
  for (int i = 0; i < k - 1; ++i) P *= m;
  for (int i = k; i < n; ++i) Q *= m;
  const std::int64_t mQ = static_cast<std::int64_t>(m) * Q;
  for (std::int64_t p = 0; p < P; ++p) {
    for (int s2 = 0; s2 < m; ++s2) {
      for (int s = 0; s < m; ++s) {
        const std::complex<double> v = scale * X(s, s2);
        if (v == std::complex<double>(0.0, 0.0)) continue;
        for (std::int64_t q = 0; q < Q; ++q) {
          M(p * mQ + s * Q + q, p * mQ + s2 * Q + q) += v;
        }
      }
    }
  }
}

std::int64_t checked_tensor_dim(int m, int n) {
  if (m < 1 || n < 1) throw usage_error("site dimension and count must be >= 1");
  std::int64_t D = 1;
  for (int i = 0; i < n; ++i) {
    D *= m;
    if (D > dimension_cap()) {
      std::ostringstream os;
      os << "tensor dimension " << m << "^" << n << " exceeds the cap of "
         << dimension_cap();
      throw resource_error(os.str());
    }
  }
  return D;
}

HermitianMatrix mean_field_lift(const HermitianMatrix& X, int k, int n) {
  if (k < 1 || k > n) throw usage_error("site index out of range");
  const std::int64_t D = checked_tensor_dim(X.dim(), n);
  cmat M = cmat::Zero(D, D);
  add_site_lift(M, X.entries(), k, n, 1.0);
  return HermitianMatrix(std::move(M));
}

HermitianMatrix mean_field_average(const HermitianMatrix& X, int n) {
  const std::int64_t D = checked_tensor_dim(X.dim(), n);
  cmat M = cmat::Zero(D, D);
  const std::complex<double> scale(1.0 / n, 0.0);
  for (int k = 1; k <= n; ++k) add_site_lift(M, X.entries(), k, n, scale);
  return HermitianMatrix(std::move(M));
}

double log_trace_exp(const HermitianMatrix& A) {
  const rvec w = eigenvalues_of(A);
  const double wmax = w(w.size() - 1);
  double s = 0.0;
  for (int i = 0; i < w.size(); ++i) s += std::exp(w(i) - wmax);
  return wmax + std::log(s);
}

double schatten_norm(const cmat& A, double p) {
  if (A.rows() != A.cols()) throw usage_error("Schatten norm needs a square matrix");
  if (!(p >= 1.0)) throw usage_error("Schatten norm requires p >= 1");
  Eigen::BDCSVD<cmat> svd(A);
  const rvec s = svd.singularValues();
  if (p == 1.0) return s.sum();
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc, 1.0 / p);
}

double operator_norm(const cmat& A) {
  Eigen::BDCSVD<cmat> svd(A);
  return svd.singularValues()(0);
}

HermitianMatrix random_hermitian(int m, std::uint64_t seed) {
  if (m < 1) throw usage_error("dimension must be >= 1");
  rng_stream stream = rng_stream(seed).child(0);
  cmat G(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) G(i, j) = stream.cgaussian();
  }
  cmat H = 0.5 * (G + G.adjoint());
  return HermitianMatrix(std::move(H));
}

}  // namespace qrate
