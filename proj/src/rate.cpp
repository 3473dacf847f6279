#include "qrate/rate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>

namespace qrate {

namespace {

constexpr double kBoundaryTol = 1e-9;   // distance treated as "on a face"
constexpr double kDivergenceCap = 500;  // ||t||_inf beyond which we declare divergence
constexpr int kIterationCap = 200;

const double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Newton ascent of g(t) = <t,u> - C(t) for an interior point u.
RateEvaluation solve_interior(const CumulantGF& c,
                              const std::vector<double>& u) {
  const int q = c.q();
  const double scale = 1.0 + inf_norm(u);
  const double tol = 1e-10 * scale;
  // The line-searched objective goes float-flat once the residual is around
  // sqrt(machine eps); below this the undamped step is taken, and a stall is
  // accepted as converged (the value error is O(residual^2)).
  const double quadratic_regime = 1e-5 * scale;
  const double loose = 1e-7 * scale;
  std::vector<double> t(q, 0.0);

  std::vector<double> best_t = t;
  double best_resid = kInf;
  double best_value = -cgf(c, t);

  auto objective = [&](const std::vector<double>& tt) {
    return dot(tt, u) - cgf(c, tt);
  };

  for (int iter = 0; iter < kIterationCap; ++iter) {
    const TiltedMoments mom = cgf_moments(c, t);
    std::vector<double> r(q);
    for (int j = 0; j < q; ++j) r[j] = u[j] - mom.grad[j];
    const double resid = inf_norm(r);
    if (resid < best_resid) {
      best_resid = resid;
      best_t = t;
      best_value = dot(t, u) - mom.value;
    }
    if (resid <= tol) {
      return {dot(t, u) - mom.value, t, rate_status::interior};
    }

    // Newton direction from the Bogoliubov Hessian, with a small ridge so the
    // factorization survives near-singular Hessians at steep points.
    rmat H = mom.hessian;
    const double ridge = 1e-14 * (1.0 + H.trace());
    for (int j = 0; j < q; ++j) H(j, j) += ridge;
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), q);
    Eigen::VectorXd d = Eigen::LDLT<rmat>(H).solve(rv);
    bool use_newton = d.allFinite() && rv.dot(d) > 0.0;

    const double g0 = dot(t, u) - mom.value;
    auto try_direction = [&](const Eigen::VectorXd& dir) -> bool {
      double alpha = 1.0;
      for (int back = 0; back < 60; ++back) {
        std::vector<double> tn(q);
        for (int j = 0; j < q; ++j) tn[j] = t[j] + alpha * dir(j);
        if (objective(tn) > g0) {
          t = std::move(tn);
          return true;
        }
        alpha *= 0.5;
      }
      return false;
    };

    bool moved = false;
    if (use_newton && resid <= quadratic_regime) {
      for (int j = 0; j < q; ++j) t[j] += d(j);
      moved = true;
    } else {
      moved = use_newton && try_direction(d);
      if (!moved) moved = try_direction(rv);
    }
    if (!moved) {
      if (best_resid <= loose) {
        return {best_value, best_t, rate_status::interior};
      }
      throw solver_error("Legendre solver stalled before reaching tolerance",
                         best_t, best_resid);
    }
    if (inf_norm(t) > kDivergenceCap) {
      throw solver_error(
          "Legendre solver diverged: the target point appears to lie outside "
          "the closure of the gradient range",
          t, best_resid);
    }
  }
  if (best_resid <= loose) {
    return {best_value, best_t, rate_status::interior};
  }
  throw solver_error("Legendre solver hit the iteration cap", best_t,
                     best_resid);
}

struct BoundaryResult {
  double value = 0.0;
  std::vector<double> free_maximizer;  // one entry per free coordinate
  bool infinite = false;
};

BoundaryResult boundary_eval(const CumulantGF& c, const std::vector<int>& face,
                             const std::vector<double>& u,
                             const std::vector<SpectralInterval>& box) {
  const int m = c.dim();
  const int q = c.q();

  cmat B = cmat::Identity(m, m);
  for (int j = 0; j < q; ++j) {
    if (face[j] == 0) continue;
    const double edge = face[j] > 0 ? box[j].hi : box[j].lo;
    const cmat M = B.adjoint() * c.observables[j].entries() * B;
    Eigen::SelfAdjointEigenSolver<cmat> es(M);
    const double tol = 1e-9 * (1.0 + std::abs(edge));
    std::vector<int> keep;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i) - edge) <= tol) keep.push_back(i);
    }
    if (keep.empty()) return {0.0, {}, true};
    cmat next(B.rows(), static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      next.col(static_cast<int>(i)) = B * es.eigenvectors().col(keep[i]);
    }
    B = std::move(next);
  }

  const int d = static_cast<int>(B.cols());
  cmat Hc = c.base ? cmat(B.adjoint() * c.base->entries() * B)
                   : cmat(cmat::Zero(d, d));
  const double norm_const = c.normalized ? c.base_log_trace() : 0.0;

  std::vector<int> free_idx;
  for (int j = 0; j < q; ++j) {
    if (face[j] == 0) free_idx.push_back(j);
  }

  if (free_idx.empty()) {
    const double v = -log_trace_exp(HermitianMatrix(cmat(-Hc))) + norm_const;
    return {v, {}, false};
  }

  std::vector<HermitianMatrix> obs;
  std::vector<double> u_free;
  for (int j : free_idx) {
    obs.emplace_back(cmat(B.adjoint() * c.observables[j].entries() * B));
    u_free.push_back(u[j]);
  }
  CumulantGF reduced(std::move(obs), HermitianMatrix(std::move(Hc)), false);
  const RateEvaluation inner = rate_point(reduced, u_free);
  if (inner.status == rate_status::infinite) return {0.0, {}, true};
  return {inner.value + norm_const, inner.maximizer, false};
}

}  // namespace

std::vector<SpectralInterval> rate_domain(const CumulantGF& c) {
  std::vector<SpectralInterval> box;
  box.reserve(c.q());
  for (const auto& X : c.observables) box.push_back(spectral_interval(X));
  return box;
}

RateEvaluation rate_point(const CumulantGF& c, const std::vector<double>& u) {
  const int q = c.q();
  if (static_cast<int>(u.size()) != q) {
    throw usage_error("evaluation point length does not match observable count");
  }
  for (double x : u) {
    if (!std::isfinite(x)) throw usage_error("evaluation point must be finite");
  }
  const std::vector<SpectralInterval> box = rate_domain(c);

  std::vector<int> face(q, 0);
  bool outside = false, on_face = false;
  std::vector<double> direction(q, 0.0);
  for (int j = 0; j < q; ++j) {
    if (u[j] < box[j].lo - kBoundaryTol) {
      outside = true;
      direction[j] = -1.0;
    } else if (u[j] > box[j].hi + kBoundaryTol) {
      outside = true;
      direction[j] = 1.0;
    } else if (std::abs(u[j] - box[j].hi) <= kBoundaryTol) {
      face[j] = 1;
      on_face = true;
    } else if (std::abs(u[j] - box[j].lo) <= kBoundaryTol) {
      face[j] = -1;
      on_face = true;
    }
  }
  if (outside) return {kInf, direction, rate_status::infinite};

  if (on_face) {
    const BoundaryResult br = boundary_eval(c, face, u, box);
    if (br.infinite) {
      for (int j = 0; j < q; ++j) direction[j] = face[j];
      return {kInf, direction, rate_status::infinite};
    }
    std::vector<double> maximizer(q, 0.0);
    std::size_t fi = 0;
    for (int j = 0; j < q; ++j) {
      maximizer[j] = face[j] != 0
                         ? static_cast<double>(face[j])
                         : br.free_maximizer[fi++];
    }
    return {br.value, maximizer, rate_status::boundary};
  }

  return solve_interior(c, u);
}

double rate_boundary_value(const CumulantGF& c, const std::vector<int>& face,
                           const std::vector<double>& u) {
  const int q = c.q();
  if (static_cast<int>(face.size()) != q || static_cast<int>(u.size()) != q) {
    throw usage_error("face/point length does not match observable count");
  }
  const std::vector<SpectralInterval> box = rate_domain(c);
  bool any = false;
  for (int j = 0; j < q; ++j) {
    if (face[j] == 0) continue;
    any = true;
    const double edge = face[j] > 0 ? box[j].hi : box[j].lo;
    if (std::abs(u[j] - edge) > kBoundaryTol) {
      std::ostringstream os;
      os << "coordinate " << j << " is not on the requested face";
      throw usage_error(os.str());
    }
  }
  if (!any) throw usage_error("face selects no saturated coordinate");
  const BoundaryResult br = boundary_eval(c, face, u, box);
  return br.infinite ? kInf : br.value;
}

}  // namespace qrate
