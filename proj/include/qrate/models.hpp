#pragma once

#include <string>
#include <vector>

#include "qrate/linalg.hpp"

namespace qrate {

// Binary entropy-type function (1/2)(1+u)ln(1+u) + (1/2)(1-u)ln(1-u) on
// [-1, 1], with 0 ln 0 = 0 at the endpoints.
double i0(double u);

enum class ising_route { one_var, two_var, polar };
ising_route parse_ising_route(const std::string& name);

struct ModelResult {
  double value = 0.0;
  // one_var: {z}; two_var and polar: {x, z}; heisenberg: {x, y, z} with the
  // transverse component rotated onto the x axis.
  std::vector<double> optimizer;
};

// Transverse-field free energy by one of three equivalent variational
// formulas, each evaluated through this library's Legendre-transform
// machinery. The routes agree within 1e-8; disagreement indicates a
// convention drift and is tested for.
ModelResult ising_free_energy(double beta, double h, ising_route route);

// inf over the closed unit ball of -J(x^2+y^2+Delta z^2) + I(x,y,z)/beta,
// with I the three-direction spin-1/2 rate function; rotational symmetry in
// (x, y) reduces the search to a half-disc.
ModelResult heisenberg_free_energy(double beta, double J, double Delta);

// (1/n) ln Tr of the same finite-n exponents the dense builder produces,
// evaluated blockwise over total-spin sectors via permutation symmetry.
// Independent of the tensor-product code path and usable far beyond the
// dense dimension cap.
double ising_log_trace_sector(double beta, double h, int n);
double heisenberg_log_trace_sector(double beta, double J, double Delta, int n);

}  // namespace qrate
