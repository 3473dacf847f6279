#include "qrate/qsp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace qrate {

namespace {

constexpr long long kBlock = 4096;  // reduction granularity, thread invariant

// Runs body(b) for b in [0, nblocks); blocks are claimed dynamically but each
// writes only its own slot, so the caller's final in-order combine is
// deterministic.
template <typename Body>
void run_blocks(long long nblocks, int threads, Body&& body) {
  if (threads <= 1 || nblocks <= 1) {
    for (long long b = 0; b < nblocks; ++b) body(b);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  const int k = static_cast<int>(
      std::min<long long>(threads, nblocks));
  pool.reserve(k);
  for (int i = 0; i < k; ++i) {
    pool.emplace_back([&] {
      for (long long b = next.fetch_add(1); b < nblocks;
           b = next.fetch_add(1)) {
        body(b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void check_path(const JumpPath& p, int m) {
  auto in_range = [m](int s) { return s >= 0 && s < m; };
  if (!in_range(p.initial_state)) throw usage_error("path state out of range");
  if (p.jump_times.size() != p.states_after_jump.size()) {
    throw usage_error("path has mismatched jump-time and state lists");
  }
  int prev = p.initial_state;
  double t_prev = 0.0;
  for (std::size_t k = 0; k < p.jump_times.size(); ++k) {
    const double t = p.jump_times[k];
    if (!(t > t_prev) || !(t < 1.0)) {
      throw usage_error("jump times must be strictly increasing inside (0,1)");
    }
    if (!in_range(p.states_after_jump[k])) {
      throw usage_error("path state out of range");
    }
    if (p.states_after_jump[k] == prev) {
      throw usage_error("consecutive path states must differ");
    }
    t_prev = t;
    prev = p.states_after_jump[k];
  }
}

}  // namespace

int JumpPath::state_at(double t) const {
  const auto it =
      std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - jump_times.begin());
  return k == 0 ? initial_state : states_after_jump[k - 1];
}

GammaGenerator build_generator(const HermitianMatrix& H) {
  const int m = H.dim();
  const cmat& h = H.entries();
  GammaGenerator g;
  g.m = m;
  g.diagonal_shift = rvec::Zero(m);
  g.rates = rmat::Zero(m, m);
  g.phases = cmat::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    double out = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == k) continue;
      const double r = std::abs(h(j, k));
      g.rates(j, k) = r;
      if (r > 0.0) g.phases(j, k) = -h(j, k) / r;
      out += r;
    }
    g.diagonal_shift(k) = h(k, k).real() - out;
  }
  return g;
}

std::complex<double> kappa_marginal(const HermitianMatrix& H,
                                    const HermitianMatrix& X,
                                    const std::vector<double>& times,
                                    const std::vector<std::vector<int>>& sets) {
  const int m = H.dim();
  if (X.dim() != m) throw usage_error("H and X dimensions differ");
  if (times.empty() || times.size() != sets.size()) {
    throw usage_error("need one eigenvalue set per time point");
  }
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (!(t >= 0.0) || !(t <= 1.0)) {
      throw usage_error("marginal times must lie in [0,1]");
    }
    if (k > 0 && !(t > prev)) {
      throw usage_error("marginal times must be strictly increasing");
    }
    prev = t;
    for (int idx : sets[k]) {
      if (idx < 0 || idx >= m) {
        throw usage_error("eigenvalue index out of range in a marginal set");
      }
    }
  }

  const SpectralDecomposition dx = spectral_decompose(X);
  cmat ht = dx.basis.adjoint() * H.entries() * dx.basis;
  const cmat hs = 0.5 * (ht + ht.adjoint().eval());
  const SpectralDecomposition dh = spectral_decompose(HermitianMatrix(hs));

  auto propagate = [&](double delta, const cmat& M) {
    rvec e(m);
    for (int i = 0; i < m; ++i) e(i) = std::exp(-delta * dh.eigenvalues(i));
    return cmat(dh.basis * e.asDiagonal() * (dh.basis.adjoint() * M));
  };

  cmat acc = propagate(times.front(), cmat::Identity(m, m));
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<bool> keep(m, false);
    for (int idx : sets[k]) keep[static_cast<std::size_t>(idx)] = true;
    for (int i = 0; i < m; ++i) {
      if (!keep[static_cast<std::size_t>(i)]) acc.row(i).setZero();
    }
    const double next_t = (k + 1 < times.size()) ? times[k + 1] : 1.0;
    acc = propagate(next_t - times[k], acc);
  }
  return acc.trace();
}

JumpPath sample_path(const GammaGenerator& g, rng_stream& rng) {
  JumpPath p;
  p.initial_state = rng.uniform_int(g.m);
  int state = p.initial_state;
  double t = 0.0;
  for (;;) {
    const double kappa = g.rates.col(state).sum();
    if (!(kappa > 0.0)) break;
    t += rng.exponential(kappa);
    if (t >= 1.0) break;
    const double u = rng.uniform() * kappa;
    double cum = 0.0;
    int target = -1;
    for (int j = 0; j < g.m; ++j) {
      const double r = g.rates(j, state);
      if (r <= 0.0) continue;
      cum += r;
      target = j;
      if (u < cum) break;
    }
    p.jump_times.push_back(t);
    p.states_after_jump.push_back(target);
    state = target;
  }
  return p;
}

PathWeight path_weight(const JumpPath& p, const GammaGenerator& g,
                       const rvec& eigenvalues,
                       const std::function<double(double)>& f) {
  if (eigenvalues.size() != g.m) {
    throw usage_error("eigenvalue list does not match the generator dimension");
  }
  check_path(p, g.m);

  PathWeight w;
  int state = p.initial_state;
  double t_prev = 0.0;
  auto add_segment = [&](double t_next) {
    const double dur = t_next - t_prev;
    const double fv = f(eigenvalues(state));
    if (!std::isfinite(fv)) {
      std::ostringstream os;
      os << "f is not finite at eigenvalue " << eigenvalues(state);
      throw usage_error(os.str());
    }
    w.diagonal_action += dur * g.diagonal_shift(state);
    w.observable_action += dur * fv;
    t_prev = t_next;
  };
  for (std::size_t k = 0; k < p.jump_times.size(); ++k) {
    add_segment(p.jump_times[k]);
    const int to = p.states_after_jump[k];
    if (!(g.rates(to, state) > 0.0)) {
      throw error("path jumps through a zero-rate pair");
    }
    w.phase *= g.phases(to, state);
    state = to;
  }
  add_segment(1.0);
  return w;
}

TraceEstimate estimate_trace(const HermitianMatrix& H, const HermitianMatrix& X,
                             const std::function<double(double)>& f,
                             long long samples, std::uint64_t seed,
                             int threads) {
  if (H.dim() != X.dim()) throw usage_error("H and X dimensions differ");
  if (samples < 1) throw usage_error("sample count must be at least 1");

  const SpectralDecomposition dx = spectral_decompose(X);
  cmat ht = dx.basis.adjoint() * H.entries() * dx.basis;
  const cmat hs = 0.5 * (ht + ht.adjoint().eval());
  const GammaGenerator g = build_generator(HermitianMatrix(hs));

  const rng_stream root(seed);
  const long long nblocks = (samples + kBlock - 1) / kBlock;
  struct Partial {
    double sre = 0.0, sim = 0.0, sre2 = 0.0;
  };
  std::vector<Partial> parts(static_cast<std::size_t>(nblocks));
  run_blocks(nblocks, threads, [&](long long b) {
    Partial acc;
    const long long lo = b * kBlock;
    const long long hi = std::min(samples, lo + kBlock);
    for (long long i = lo; i < hi; ++i) {
      rng_stream s = root.child(static_cast<std::uint64_t>(i));
      const JumpPath path = sample_path(g, s);
      std::complex<double> w{0.0, 0.0};
      if (path.final_state() == path.initial_state) {
        const PathWeight pw = path_weight(path, g, dx.eigenvalues, f);
        w = static_cast<double>(g.m) * pw.phase *
            std::exp(pw.observable_action - pw.diagonal_action);
      }
      acc.sre += w.real();
      acc.sim += w.imag();
      acc.sre2 += w.real() * w.real();
    }
    parts[static_cast<std::size_t>(b)] = acc;
  });

  double sre = 0.0, sim = 0.0, sre2 = 0.0;
  for (const auto& p : parts) {
    sre += p.sre;
    sim += p.sim;
    sre2 += p.sre2;
  }
  const double n = static_cast<double>(samples);
  const double mre = sre / n;
  double var = 0.0;
  if (samples > 1) var = std::max(0.0, (sre2 - n * mre * mre) / (n - 1.0));
  TraceEstimate out;
  out.estimate = {mre, sim / n};
  out.std_error = std::sqrt(var / n);
  out.samples = samples;
  return out;
}

JumpWindowEstimate jump_excess_stats(const GammaGenerator& g, double window,
                                     long long samples, std::uint64_t seed,
                                     int threads) {
  if (!(window > 0.0) || !(window <= 1.0)) {
    throw usage_error("window length must lie in (0, 1]");
  }
  if (samples < 1) throw usage_error("sample count must be at least 1");

  const rng_stream root(seed);
  const long long nblocks = (samples + kBlock - 1) / kBlock;
  struct Partial {
    double sw = 0.0, sy = 0.0, sw2 = 0.0, sy2 = 0.0, syw = 0.0;
  };
  std::vector<Partial> parts(static_cast<std::size_t>(nblocks));
  run_blocks(nblocks, threads, [&](long long b) {
    Partial acc;
    const long long lo = b * kBlock;
    const long long hi = std::min(samples, lo + kBlock);
    for (long long i = lo; i < hi; ++i) {
      rng_stream s = root.child(static_cast<std::uint64_t>(i));
      const JumpPath path = sample_path(g, s);
      if (path.final_state() != path.initial_state) continue;
      double action = 0.0;
      {
        int state = path.initial_state;
        double t_prev = 0.0;
        for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
          action += (path.jump_times[k] - t_prev) * g.diagonal_shift(state);
          t_prev = path.jump_times[k];
          state = path.states_after_jump[k];
        }
        action += (1.0 - t_prev) * g.diagonal_shift(state);
      }
      const double w = std::exp(-action);
      const auto split = std::upper_bound(path.jump_times.begin(),
                                          path.jump_times.end(), window);
      const bool excess = (split - path.jump_times.begin()) >= 2;
      const double y = excess ? w : 0.0;
      acc.sw += w;
      acc.sy += y;
      acc.sw2 += w * w;
      acc.sy2 += y * y;
      acc.syw += y * w;
    }
    parts[static_cast<std::size_t>(b)] = acc;
  });

  double sw = 0.0, sy = 0.0, sw2 = 0.0, sy2 = 0.0, syw = 0.0;
  for (const auto& p : parts) {
    sw += p.sw;
    sy += p.sy;
    sw2 += p.sw2;
    sy2 += p.sy2;
    syw += p.syw;
  }
  JumpWindowEstimate out;
  out.samples = samples;
  if (!(sw > 0.0)) return out;  // no closed path carried weight
  const double p = sy / sw;
  const double resid2 = std::max(0.0, sy2 - 2.0 * p * syw + p * p * sw2);
  const double n = static_cast<double>(samples);
  const double correction = samples > 1 ? n / (n - 1.0) : 1.0;
  out.probability = p;
  out.std_error = std::sqrt(resid2 * correction) / sw;
  return out;
}

double jump_excess_probability(const GammaGenerator& g, double window,
                               long long samples, std::uint64_t seed) {
  return jump_excess_stats(g, window, samples, seed).probability;
}

}  // namespace qrate
