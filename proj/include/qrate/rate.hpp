#pragma once

#include <vector>

#include "qrate/cumulant.hpp"

namespace qrate {

enum class rate_status { interior, boundary, infinite };

// Legendre transform evaluation I(u) = sup_t [<t,u> - C(t)].
// interior: maximizer holds t*(u) with grad C(t*) = u.
// boundary: u sits on the closed domain box; maximizer holds the reduced
//   maximizer on free coordinates and the edge sign (+-1) on saturated ones.
// infinite: value is +infinity; maximizer holds a divergence direction.
struct RateEvaluation {
  double value = 0.0;
  std::vector<double> maximizer;
  rate_status status = rate_status::interior;
};

// The closed box prod_j [lambda_-(X_j), lambda_+(X_j)] on which I is finite.
std::vector<SpectralInterval> rate_domain(const CumulantGF& c);

RateEvaluation rate_point(const CumulantGF& c, const std::vector<double>& u);

// Rate value on a face of the domain box. face has one entry per coordinate:
// -1 (at lambda_-), +1 (at lambda_+), 0 (free). Computed by compressing all
// exponent matrices onto the joint extremal eigenspace of the saturated
// coordinates and evaluating the reduced Legendre transform there. Returns
// +infinity when the joint eigenspace is empty.
double rate_boundary_value(const CumulantGF& c, const std::vector<int>& face,
                           const std::vector<double>& u);

}  // namespace qrate
