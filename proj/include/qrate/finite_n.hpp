#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qrate/linalg.hpp"

namespace qrate {

struct ConvergenceRow {
  int n = 0;
  std::optional<long long> trotter_steps;
  double value = 0.0;      // (1/n) log-trace
  double reference = 0.0;  // variational value
  double gap = 0.0;        // value - reference
};

// n * [sum_j f_j(X_j^{(n)}) - H^{(n)}] on (C^m)^{(x) n}. Each f_j(X_j^{(n)})
// is computed as U_j^{(x)n} f_j(diag of site-eigenvalue averages)
// U_j^{(x)n,dagger}, exploiting that the n lifts of one observable commute.
HermitianMatrix build_meanfield_exponent(
    const std::vector<HermitianMatrix>& Xs,
    const std::vector<std::function<double(double)>>& fs,
    const std::optional<HermitianMatrix>& H, int n);

// (1/n) ln Tr e^{exponent}.
double log_trace_finite_n(const std::vector<HermitianMatrix>& Xs,
                          const std::vector<std::function<double(double)>>& fs,
                          const std::optional<HermitianMatrix>& H, int n);

// (1/n) ln Tr[(e^{n f(X^{(n)})/N} e^{-n H^{(n)}/N})^N].
double trotter_log_trace(const HermitianMatrix& X, const HermitianMatrix& H,
                         const std::function<double(double)>& f, int n,
                         long long N);

// CSV with headers exactly: n,trotter_steps,value,reference,gap
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace qrate
