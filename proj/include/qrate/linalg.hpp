#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qrate/error.hpp"

namespace qrate {

using cmat = Eigen::MatrixXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

// Centralized numeric tolerances, overridable from the CLI.
struct tolerances {
  double hermiticity = 1e-12;     // per-entry conjugate-symmetry slack
  double reconstruction = 1e-10;  // Frobenius slack for eigensystem round-trip
  double cross_check = 1e-8;      // duality / identity cross-checks
};
tolerances& config();

// Dense tensor-product dimension cap (m^n must stay at or below this).
std::int64_t& dimension_cap();

// Dense complex Hermitian matrix. Construction validates squareness,
// finiteness and conjugate symmetry; entries are stored as given.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(cmat entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const cmat& entries() const { return entries_; }

  // True when every imaginary part is exactly zero; such matrices are routed
  // to the real-symmetric eigensolver.
  bool is_real() const;

 private:
  cmat entries_;
};

struct SpectralDecomposition {
  rvec eigenvalues;  // ascending
  cmat basis;        // unitary, columns are eigenvectors
};

struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;
};

SpectralDecomposition spectral_decompose(const HermitianMatrix& A);

// Eigenvalues only (ascending); cheaper than a full decomposition for large
// matrices.
rvec eigenvalues_of(const HermitianMatrix& A);

SpectralInterval spectral_interval(const HermitianMatrix& A);

HermitianMatrix apply_function(const HermitianMatrix& A,
                               const std::function<double(double)>& f);

// X_k = 1 (x) ... (x) X (x) ... (x) 1 on (C^m)^{(x) n}, X in slot k (1-based).
// Site 1 is the leftmost tensor factor; product-state indices are big-endian
// in site digits.
HermitianMatrix mean_field_lift(const HermitianMatrix& X, int k, int n);

// m^n with the dimension cap enforced (resource_error beyond it).
std::int64_t checked_tensor_dim(int m, int n);

// Adds scale * (site-k lift of X) into M (dim m^n) without materializing the
// lift.
void add_site_lift(cmat& M, const cmat& X, int k, int n,
                   std::complex<double> scale);

// (1/n) sum_k X_k.
HermitianMatrix mean_field_average(const HermitianMatrix& X, int n);

// ln Tr e^A, evaluated with a max-eigenvalue shift so that norms up to 1e4
// cause no overflow.
double log_trace_exp(const HermitianMatrix& A);

// Schatten p-norm of a general (not necessarily Hermitian) square matrix.
double schatten_norm(const cmat& A, double p);

// Largest singular value.
double operator_norm(const cmat& A);

// Deterministic Gaussian Hermitian matrix, (G + G^dagger)/2 with independent
// standard complex Gaussian entries, one rng child stream per matrix.
HermitianMatrix random_hermitian(int m, std::uint64_t seed);

}  // namespace qrate
