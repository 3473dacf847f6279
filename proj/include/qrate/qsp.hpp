#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qrate/linalg.hpp"
#include "qrate/rng.hpp"

namespace qrate {

// Conservative jump-process generator derived from H written in the
// eigenbasis of X. Off-diagonal moduli drive the jumps, the unit-modulus
// factors carry the complex weight, and the adjusted diagonal H_D enters the
// exponential tilt.
struct GammaGenerator {
  int m = 0;
  rvec diagonal_shift;          // H_D(k) = H_kk - sum_{j != k} |H_jk|
  rmat rates;                   // |H_jk| off the diagonal, zero on it
  cmat phases;                  // -H_jk/|H_jk| where the rate is positive
};

// Piecewise-constant right-continuous path on [0, 1]; states are 0-based.
struct JumpPath {
  int initial_state = 0;
  std::vector<double> jump_times;      // strictly increasing, inside (0, 1)
  std::vector<int> states_after_jump;  // consecutive entries differ

  int final_state() const {
    return states_after_jump.empty() ? initial_state
                                     : states_after_jump.back();
  }
  int state_at(double t) const;
};

struct PathWeight {
  std::complex<double> phase{1.0, 0.0};  // product of jump phases
  double diagonal_action = 0.0;          // int_0^1 H_D(path(t)) dt
  double observable_action = 0.0;        // int_0^1 f(lambda_{path(t)}) dt
};

struct TraceEstimate {
  std::complex<double> estimate{0.0, 0.0};
  double std_error = 0.0;  // sample standard error of the real part
  long long samples = 0;
};

struct JumpWindowEstimate {
  double probability = 0.0;
  double std_error = 0.0;  // linearized standard error of the ratio
  long long samples = 0;
};

GammaGenerator build_generator(const HermitianMatrix& H);

// Tr[e^{-(1-t_N)H} P_{A_N} e^{-(t_N - t_{N-1})H} ... P_{A_1} e^{-t_1 H}] by
// dense products in the eigenbasis of X; sets hold 0-based indices into the
// ascending eigenvalues of X.
std::complex<double> kappa_marginal(const HermitianMatrix& H,
                                    const HermitianMatrix& X,
                                    const std::vector<double>& times,
                                    const std::vector<std::vector<int>>& sets);

// Initial state uniform, exponential holding times with the escape rate,
// jump targets proportional to the rates, truncated at t = 1.
JumpPath sample_path(const GammaGenerator& g, rng_stream& rng);

PathWeight path_weight(const JumpPath& p, const GammaGenerator& g,
                       const rvec& eigenvalues,
                       const std::function<double(double)>& f);

// Monte Carlo mean of m 1{path closed} phase e^{observable - diagonal
// action}; unbiased for Tr e^{f(X)-H}. One rng child stream per path index,
// partial sums combined in fixed block order, so the result is identical for
// every thread count.
TraceEstimate estimate_trace(const HermitianMatrix& H, const HermitianMatrix& X,
                             const std::function<double(double)>& f,
                             long long samples, std::uint64_t seed,
                             int threads = 1);

// Probability, under the normalized phase-free path measure
// 1{closed} e^{-diagonal action}, that the window [0, delta] contains at
// least two jumps. Self-normalized estimator with a linearized error bar.
JumpWindowEstimate jump_excess_stats(const GammaGenerator& g, double window,
                                     long long samples, std::uint64_t seed,
                                     int threads = 1);

double jump_excess_probability(const GammaGenerator& g, double window,
                               long long samples, std::uint64_t seed);

}  // namespace qrate
