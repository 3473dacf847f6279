#pragma once

#include <cstdint>
#include <functional>

#include "qrate/linalg.hpp"

namespace qrate {

// Positive semidefinite unit-trace matrix; both properties are validated at
// construction (min eigenvalue >= -1e-12, |trace - 1| <= 1e-12).
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix matrix);

  int dim() const { return matrix_.dim(); }
  const HermitianMatrix& matrix() const { return matrix_; }

  // Tr(D X), real for Hermitian X.
  double expectation(const HermitianMatrix& X) const;

 private:
  HermitianMatrix matrix_;
};

// e^{-H}/Tr e^{-H}, computed spectrally with a max-shift.
DensityMatrix gibbs_state(const HermitianMatrix& H);

// e^{tX-H}/Tr e^{tX-H}.
DensityMatrix perturbed_gibbs(const HermitianMatrix& H,
                              const HermitianMatrix& X, double t);

// Tr[D_phi ln D_phi] - Tr[D_phi ln D_rho], +infinity when the support of phi
// leaks outside the support of rho. Support membership uses an eigenvalue
// threshold of 1e-12 relative to the largest eigenvalue.
double relative_entropy(const DensityMatrix& phi, const DensityMatrix& rho);

// ln(Tr e^{tX-H}/Tr e^{-H}) - [t phi(X) - S(phi||rho)] with rho the Gibbs
// state of H. Nonnegative, zero exactly at the perturbed Gibbs state.
double variational_gap(const DensityMatrix& phi, const HermitianMatrix& X,
                       const HermitianMatrix& H, double t);

// S(phi||rho) - I(phi(X)) with I the normalized rate function of (X, H).
double rate_dominance_gap(const DensityMatrix& phi, const HermitianMatrix& X,
                          const HermitianMatrix& H);

// Two evaluations of the same supremum: over states, of f(phi(X)) -
// S(phi||rho), and over scalars, of f(u) - I(u). The state search mixes
// random densities with the tilted-state family along a u-grid plus the
// extremal-projector states, so the supremum is witnessed rather than only
// bounded.
struct SupEquivalence {
  double state_side = 0.0;
  double scalar_side = 0.0;
};
SupEquivalence sup_equivalence_check(const std::function<double(double)>& f,
                                     const HermitianMatrix& X,
                                     const HermitianMatrix& H, int samples,
                                     std::uint64_t seed = 1234);

// G G^dagger / Tr(G G^dagger) with a seeded complex Gaussian G.
DensityMatrix random_density(int m, std::uint64_t seed);

}  // namespace qrate
