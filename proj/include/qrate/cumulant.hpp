#pragma once

#include <optional>
#include <vector>

#include "qrate/linalg.hpp"

namespace qrate {

// A family of observables X_1..X_q with an optional base Hamiltonian H.
// cgf evaluates C(t) = ln Tr e^{sum_j t_j X_j - H}; when normalized,
// ln Tr e^{-H} is subtracted so that C(0) = 0.
struct CumulantGF {
  std::vector<HermitianMatrix> observables;
  std::optional<HermitianMatrix> base;
  bool normalized = false;

  CumulantGF(std::vector<HermitianMatrix> obs,
             std::optional<HermitianMatrix> base_in = std::nullopt,
             bool normalized_in = false);

  int q() const { return static_cast<int>(observables.size()); }
  int dim() const { return observables.front().dim(); }

  // sum_j t_j X_j - H.
  HermitianMatrix exponent(const std::vector<double>& t) const;

  // ln Tr e^{-H} (zero when there is no base).
  double base_log_trace() const;
};

double cgf(const CumulantGF& c, const std::vector<double>& t);

// Gradient; component k is the expectation of X_k under the tilted Gibbs
// state e^{exponent}/Tr, so it always lies in [lambda_-(X_k), lambda_+(X_k)].
std::vector<double> cgf_grad(const CumulantGF& c, const std::vector<double>& t);

// (1/Z) integral_0^1 Tr[A e^{sK} B e^{(1-s)K}] ds with Z = Tr e^K, evaluated
// exactly in the eigenbasis of K through the divided-difference kernel
// (e^{li} - e^{lj})/(li - lj).
double bogoliubov_inner(const HermitianMatrix& A, const HermitianMatrix& B,
                        const HermitianMatrix& K);

// Gram matrix of the centered observables under the Bogoliubov product at
// exponent(t); equals the Hessian of cgf and is positive semidefinite.
rmat cgf_hessian(const CumulantGF& c, const std::vector<double>& t);

// Value, gradient and Hessian from a single eigendecomposition of the
// exponent; the workhorse for Newton iterations.
struct TiltedMoments {
  double value = 0.0;
  std::vector<double> grad;
  rmat hessian;
};
TiltedMoments cgf_moments(const CumulantGF& c, const std::vector<double>& t);

}  // namespace qrate
