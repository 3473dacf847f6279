#pragma once

#include <functional>
#include <vector>

#include "qrate/rate.hpp"
#include "qrate/sympoly.hpp"

namespace qrate {

struct VariationalResult {
  std::vector<double> optimizer;
  double value = 0.0;
  long long grid_points = 0;       // nodes in the initial search grid
  double refinement_radius = 0.0;  // final local-search radius
};

// sup over u in [lambda_-, lambda_+] of f(u) - I(u), plus ln Tr e^{-H},
// where I is the normalized rate of (X, H). Derivative-free: a dense closed
// grid followed by golden-section refinement around the best cell; grid ties
// break toward smaller u.
VariationalResult prv_value(const HermitianMatrix& X, const HermitianMatrix& H,
                            const std::function<double(double)>& f,
                            int grid_n = 2001);

// sup over the domain box of sum_j f_j(u_j) - I(u) with I the unnormalized
// multivariable rate (no base Hamiltonian). Coarse closed grid (grid_n per
// axis) plus pattern refinement; lexicographic tie-breaking.
VariationalResult multi_observable_value(
    const std::vector<HermitianMatrix>& Xs,
    const std::vector<std::function<double(double)>>& fs, int grid_n = 41,
    int q_cap = 3);

// Same search with the objective Q(u) - I(u), Q evaluated through its
// power-of-linear-forms decomposition.
VariationalResult general_meanfield_value(const std::vector<HermitianMatrix>& Xs,
                                          const PowerDecomposition& Q,
                                          int grid_n = 41, int q_cap = 3);

}  // namespace qrate
