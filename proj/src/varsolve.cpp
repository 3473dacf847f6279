#include "qrate/varsolve.hpp"

#include <cmath>
#include <limits>

namespace qrate {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

// f(u) - I(u). Points where the Legendre solver diverges lie outside the
// closure of the gradient range, where the true objective is -infinity.
double objective_or_neg_inf(const CumulantGF& c,
                            const std::function<double(const std::vector<double>&)>& scalar,
                            const std::vector<double>& u) {
  double rate;
  try {
    const RateEvaluation r = rate_point(c, u);
    if (r.status == rate_status::infinite) return kNegInf;
    rate = r.value;
  } catch (const solver_error&) {
    return kNegInf;
  }
  const double s = scalar(u);
  if (!std::isfinite(s)) {
    throw usage_error("objective function is not finite inside the domain");
  }
  return s - rate;
}

}  // namespace

VariationalResult prv_value(const HermitianMatrix& X, const HermitianMatrix& H,
                            const std::function<double(double)>& f,
                            int grid_n) {
  if (grid_n < 2) throw usage_error("grid must have at least 2 points");
  CumulantGF c({X}, H, true);
  const SpectralInterval box = rate_domain(c)[0];

  auto obj = [&](double u) {
    return objective_or_neg_inf(
        c, [&](const std::vector<double>& v) { return f(v[0]); }, {u});
  };

  const double lo = box.lo, hi = box.hi;
  const double constant = c.base_log_trace();
  if (hi - lo == 0.0) {
    const double v = obj(lo);
    return {{lo}, v + constant, 1, 0.0};
  }

  double best_u = lo, best_v = kNegInf;
  const double step = (hi - lo) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    const double u = (i == grid_n - 1) ? hi : lo + i * step;
    const double v = obj(u);
    if (v > best_v) {
      best_v = v;
      best_u = u;
    }
  }

  // Golden-section refinement inside the two cells bracketing the best node.
  double a = std::max(lo, best_u - step);
  double b = std::min(hi, best_u + step);
  const double gr = 0.61803398874989485;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 120 && (b - a) > 1e-13 * (1.0 + hi - lo); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = obj(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = obj(x1);
    }
    if (f1 > best_v) {
      best_v = f1;
      best_u = x1;
    }
    if (f2 > best_v) {
      best_v = f2;
      best_u = x2;
    }
  }

  return {{best_u}, best_v + constant, grid_n, 0.5 * (b - a)};
}

namespace {

VariationalResult box_search(
    const std::vector<HermitianMatrix>& Xs,
    const std::function<double(const std::vector<double>&)>& scalar,
    int grid_n, int q_cap) {
  const int q = static_cast<int>(Xs.size());
  if (q < 1) throw usage_error("need at least one observable");
  if (q > q_cap) {
    throw resource_error("observable count " + std::to_string(q) +
                         " exceeds the grid cap of " + std::to_string(q_cap));
  }
  if (grid_n < 2) throw usage_error("grid must have at least 2 points");

  CumulantGF c(Xs, std::nullopt, false);
  const std::vector<SpectralInterval> box = rate_domain(c);

  auto obj = [&](const std::vector<double>& u) {
    return objective_or_neg_inf(c, scalar, u);
  };

  std::vector<std::vector<double>> axes(q);
  long long total = 1;
  for (int j = 0; j < q; ++j) {
    if (box[j].hi - box[j].lo == 0.0) {
      axes[j] = {box[j].lo};
    } else {
      const double step = (box[j].hi - box[j].lo) / (grid_n - 1);
      for (int i = 0; i < grid_n; ++i) {
        axes[j].push_back(i == grid_n - 1 ? box[j].hi : box[j].lo + i * step);
      }
    }
    total *= static_cast<long long>(axes[j].size());
  }

  // Lexicographic scan with strict improvement keeps the smallest maximizer.
  std::vector<std::size_t> idx(q, 0);
  std::vector<double> u(q), best_u(q);
  double best_v = kNegInf;
  bool have_best = false;
  for (long long count = 0; count < total; ++count) {
    for (int j = 0; j < q; ++j) u[j] = axes[j][idx[j]];
    const double v = obj(u);
    if (v > best_v || !have_best) {
      best_v = v;
      best_u = u;
      have_best = true;
    }
    for (int j = q - 1; j >= 0; --j) {
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
    }
  }

  // Newton-free pattern refinement around the best grid node: a full sign
  // stencil (axis and diagonal probes) with expansion on success, plus a
  // doubling pattern move along the net displacement of a successful round.
  // Diagonals matter: near a curved steep ridge both axis probes can fail
  // while an oblique move still improves, and axis-only search stalls.
  std::vector<double> cell(q);
  for (int j = 0; j < q; ++j) {
    cell[j] = axes[j].size() > 1 ? (axes[j][1] - axes[j][0]) * 0.5 : 0.0;
  }
  std::vector<std::vector<int>> stencil;
  {
    std::vector<int> sig(q, -1);
    for (;;) {
      bool nonzero = false;
      for (int s : sig) nonzero = nonzero || s != 0;
      if (nonzero) stencil.push_back(sig);
      int j = q - 1;
      while (j >= 0 && sig[j] == 1) sig[j--] = -1;
      if (j < 0) break;
      ++sig[j];
    }
  }
  auto clamped = [&](std::vector<double> cand) {
    for (int j = 0; j < q; ++j) {
      cand[j] = std::clamp(cand[j], box[j].lo, box[j].hi);
    }
    return cand;
  };
  double scale = 1.0;
  double floor_ratio = 0.0;
  for (int j = 0; j < q; ++j) {
    if (cell[j] > 0.0) {
      floor_ratio = std::max(floor_ratio,
                             1e-12 * (1.0 + box[j].hi - box[j].lo) / cell[j]);
    }
  }
  for (int round = 0; round < 600; ++round) {
    const std::vector<double> origin = best_u;
    bool improved = false;
    for (const auto& sig : stencil) {
      std::vector<double> cand(q);
      for (int j = 0; j < q; ++j) cand[j] = origin[j] + sig[j] * scale * cell[j];
      cand = clamped(std::move(cand));
      if (cand == best_u) continue;
      const double v = obj(cand);
      if (v > best_v) {
        best_v = v;
        best_u = cand;
        improved = true;
      }
    }
    if (improved) {
      // Accelerate along the direction that just worked.
      for (int hop = 0; hop < 60; ++hop) {
        std::vector<double> cand(q);
        for (int j = 0; j < q; ++j) {
          cand[j] = best_u[j] + (best_u[j] - origin[j]);
        }
        cand = clamped(std::move(cand));
        if (cand == best_u) break;
        const double v = obj(cand);
        if (v <= best_v) break;
        best_v = v;
        best_u = cand;
      }
      scale = std::min(scale * 2.0, 1.0);
    } else {
      scale *= 0.5;
      if (scale <= floor_ratio) break;
    }
  }
  double max_radius = 0.0;
  for (int j = 0; j < q; ++j) {
    max_radius = std::max(max_radius, scale * cell[j]);
  }

  // Second phase in tilt space. The substitution u = grad C(t) turns
  // f(u) - I(u) into f(u(t)) - <t, u(t)> + C(t) by Legendre duality, which
  // unfolds the log-steep region near the domain edge into flat, mildly
  // curved terrain where the same direct search converges; maximizers pinned
  // exactly to the edge are still covered by the grid phase above, since the
  // rate is lower semicontinuous there. Evaluations stay derivative-free in
  // the f_j and cost one small eigensolve each.
  auto tilt_value = [&](const std::vector<double>& t,
                        std::vector<double>& u_out) {
    const TiltedMoments mom = cgf_moments(c, t);
    u_out = mom.grad;
    double dot = 0.0;
    for (int j = 0; j < q; ++j) dot += t[j] * mom.grad[j];
    const double s = scalar(mom.grad);
    if (!std::isfinite(s)) {
      throw usage_error("objective function is not finite inside the domain");
    }
    return s - (dot - mom.value);
  };
  std::vector<std::vector<double>> seeds;
  seeds.emplace_back(q, 0.0);
  try {
    const RateEvaluation at_best = rate_point(c, best_u);
    if (at_best.status == rate_status::interior) {
      seeds.push_back(at_best.maximizer);
    }
  } catch (const solver_error&) {
  }
  // A graded compass search: at every step size, moves repeat until none of
  // the stencil directions improves, and only then does the step shrink.
  // The patience matters in narrow oblique valleys, where a single pass per
  // step size stalls far from the optimum.
  const double tilt_cap = 60.0;
  for (const auto& seed : seeds) {
    std::vector<double> t = seed;
    bool in_cap = true;
    for (double tj : t) in_cap = in_cap && std::fabs(tj) <= tilt_cap;
    if (!in_cap) continue;
    std::vector<double> u_here(q);
    double v_here = tilt_value(t, u_here);
    double step = 0.5;
    for (int level = 0; level < 64; ++level) {
      for (int move = 0; move < 4000; ++move) {
        bool improved = false;
        for (const auto& sig : stencil) {
          std::vector<double> cand(q);
          bool ok = true;
          for (int j = 0; j < q; ++j) {
            cand[j] = t[j] + sig[j] * step;
            ok = ok && std::fabs(cand[j]) <= tilt_cap;
          }
          if (!ok) continue;
          std::vector<double> u_cand(q);
          const double v = tilt_value(cand, u_cand);
          if (v > v_here) {
            v_here = v;
            t = cand;
            u_here = u_cand;
            improved = true;
          }
        }
        if (!improved) break;
      }
      step *= 0.7;
    }
    if (v_here > best_v) {
      best_v = v_here;
      best_u = u_here;
    }
  }

  return {best_u, best_v, total, max_radius};
}

}  // namespace

VariationalResult multi_observable_value(
    const std::vector<HermitianMatrix>& Xs,
    const std::vector<std::function<double(double)>>& fs, int grid_n,
    int q_cap) {
  if (fs.size() != Xs.size()) {
    throw usage_error("one scalar function per observable is required");
  }
  auto scalar = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t j = 0; j < fs.size(); ++j) s += fs[j](u[j]);
    return s;
  };
  return box_search(Xs, scalar, grid_n, q_cap);
}

VariationalResult general_meanfield_value(const std::vector<HermitianMatrix>& Xs,
                                          const PowerDecomposition& Q,
                                          int grid_n, int q_cap) {
  if (Q.q != static_cast<int>(Xs.size())) {
    throw usage_error("decomposition arity does not match observable count");
  }
  auto scalar = [&](const std::vector<double>& u) {
    return evaluate_decomposition(Q, u);
  };
  return box_search(Xs, scalar, grid_n, q_cap);
}

}  // namespace qrate
