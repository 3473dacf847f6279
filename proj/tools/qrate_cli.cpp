// Command-line front end: cgf, rate, varsolve, verify-prv, qsp-mc,
// decompose, model. Matrix inputs are JSON files ({"dim","re","im"}); scalar
// functions are polynomial coefficient lists. Output is CSV (17 significant
// digits) or decomposition JSON, written atomically when --out is given.
//
// Exit codes: 0 success, 2 usage error, 3 resource cap exceeded,
// 4 numerical-solver failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrate/cumulant.hpp"
#include "qrate/entropy.hpp"
#include "qrate/error.hpp"
#include "qrate/finite_n.hpp"
#include "qrate/io.hpp"
#include "qrate/models.hpp"
#include "qrate/qsp.hpp"
#include "qrate/rate.hpp"
#include "qrate/sympoly.hpp"
#include "qrate/varsolve.hpp"

namespace {

using namespace qrate;

struct GlobalOpts {
  std::uint64_t seed = 1;
  double tol = 0.0;
  bool tol_set = false;
  std::string out;
  int threads = 1;
};

void emit(const GlobalOpts& g, const std::string& content) {
  if (!g.out.empty()) {
    write_file_atomic(g.out, content);
  } else {
    std::fwrite(content.data(), 1, content.size(), stdout);
  }
}

double parse_double_token(const std::string& tok, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw usage_error("cannot parse " + what + " value '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<double> parse_double_list(const std::string& spec,
                                      const std::string& what) {
  if (spec.empty()) throw usage_error(what + " list is empty");
  std::vector<double> out;
  for (const auto& tok : split(spec, ',')) {
    out.push_back(parse_double_token(tok, what));
  }
  return out;
}

// Coefficient list c0,c1,... for f(u) = sum_k c_k u^k.
std::function<double(double)> poly_function(const std::vector<double>& coeffs) {
  return [coeffs](double u) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * u + coeffs[k];
    return acc;
  };
}

std::vector<HermitianMatrix> load_matrices(const std::vector<std::string>& paths) {
  std::vector<HermitianMatrix> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(read_matrix_json(p));
  if (out.empty()) throw usage_error("at least one observable is required");
  const int m = out.front().dim();
  for (const auto& x : out) {
    if (x.dim() != m) throw usage_error("observable dimensions differ");
  }
  return out;
}

std::string axis_header(const std::string& stem, int q, int j) {
  return q == 1 ? stem : stem + std::to_string(j + 1);
}

// ---------------------------------------------------------------- cgf ----

void run_cgf(const GlobalOpts& g, const std::vector<std::string>& xpaths,
             const std::string& hpath, bool normalized, double tmin,
             double tmax, int tsteps) {
  if (tsteps < 1) throw usage_error("the t-grid needs at least one point");
  if (!(tmin <= tmax)) throw usage_error("--t-min must not exceed --t-max");
  const std::vector<HermitianMatrix> xs = load_matrices(xpaths);
  std::optional<HermitianMatrix> base;
  if (!hpath.empty()) base = read_matrix_json(hpath);
  const CumulantGF c(xs, base, normalized);
  const int q = c.q();

  double rows = 1.0;
  for (int j = 0; j < q; ++j) rows *= tsteps;
  if (rows > 1e6) {
    throw resource_error("t-grid has more than 1e6 points; reduce --t-steps");
  }

  std::vector<std::string> header;
  for (int j = 0; j < q; ++j) header.push_back(axis_header("t", q, j));
  header.push_back("C");
  for (int j = 0; j < q; ++j) header.push_back(axis_header("grad", q, j));
  csv_table table(header);

  std::vector<int> idx(q, 0);
  for (;;) {
    std::vector<double> t(q);
    for (int j = 0; j < q; ++j) {
      t[j] = tsteps == 1 ? tmin
                         : tmin + (tmax - tmin) * idx[j] / (tsteps - 1);
    }
    const TiltedMoments mom = cgf_moments(c, t);
    std::vector<std::string> row;
    for (double v : t) row.push_back(csv_table::cell(v));
    row.push_back(csv_table::cell(mom.value));
    for (double v : mom.grad) row.push_back(csv_table::cell(v));
    table.add_row(row);

    int j = q - 1;
    for (; j >= 0; --j) {
      if (++idx[j] < tsteps) break;
      idx[j] = 0;
    }
    if (j < 0) break;
  }
  emit(g, table.str());
}

// --------------------------------------------------------------- rate ----

void run_rate(const GlobalOpts& g, const std::vector<std::string>& xpaths,
              const std::string& hpath, bool normalized,
              const std::vector<std::string>& points) {
  const std::vector<HermitianMatrix> xs = load_matrices(xpaths);
  std::optional<HermitianMatrix> base;
  if (!hpath.empty()) base = read_matrix_json(hpath);
  const CumulantGF c(xs, base, normalized);
  const int q = c.q();

  std::vector<std::string> header;
  for (int j = 0; j < q; ++j) header.push_back(axis_header("u", q, j));
  header.push_back("value");
  header.push_back("status");
  for (int j = 0; j < q; ++j) header.push_back(axis_header("t", q, j));
  csv_table table(header);

  for (const auto& spec : points) {
    const std::vector<double> u = parse_double_list(spec, "--point");
    if (static_cast<int>(u.size()) != q) {
      throw usage_error("--point arity does not match the observable count");
    }
    const RateEvaluation r = rate_point(c, u);
    std::vector<std::string> row;
    for (double v : u) row.push_back(csv_table::cell(v));
    row.push_back(csv_table::cell(r.value));
    switch (r.status) {
      case rate_status::interior: row.push_back("interior"); break;
      case rate_status::boundary: row.push_back("boundary"); break;
      case rate_status::infinite: row.push_back("infinite"); break;
    }
    for (double v : r.maximizer) row.push_back(csv_table::cell(v));
    table.add_row(row);
  }
  emit(g, table.str());
}

// ----------------------------------------------------------- varsolve ----

void run_varsolve(const GlobalOpts& g, const std::vector<std::string>& xpaths,
                  const std::string& hpath,
                  const std::vector<std::string>& fspecs,
                  const std::string& polypath, int grid_opt) {
  if (grid_opt != 0 && grid_opt < 3) {
    throw usage_error("--grid needs at least 3 points");
  }
  const std::vector<HermitianMatrix> xs = load_matrices(xpaths);
  VariationalResult res;
  if (!polypath.empty()) {
    if (!fspecs.empty()) {
      throw usage_error("--poly and --f are mutually exclusive");
    }
    if (!hpath.empty()) {
      throw usage_error("the polynomial objective does not take --H");
    }
    const PowerDecomposition d = parse_decomposition_json(
        [&] {
          FILE* fp = std::fopen(polypath.c_str(), "rb");
          if (!fp) throw usage_error("cannot open " + polypath);
          std::string text;
          char buf[4096];
          std::size_t got;
          while ((got = std::fread(buf, 1, sizeof buf, fp)) > 0) {
            text.append(buf, got);
          }
          std::fclose(fp);
          return text;
        }(),
        polypath);
    res = general_meanfield_value(xs, d, grid_opt > 0 ? grid_opt : 41);
  } else {
    if (fspecs.size() != xs.size()) {
      throw usage_error("need exactly one --f coefficient list per --X");
    }
    std::vector<std::function<double(double)>> fs;
    for (const auto& s : fspecs) {
      fs.push_back(poly_function(parse_double_list(s, "--f")));
    }
    if (xs.size() == 1 && !hpath.empty()) {
      res = prv_value(xs.front(), read_matrix_json(hpath), fs.front(),
                      grid_opt > 0 ? grid_opt : 2001);
    } else {
      if (!hpath.empty()) {
        throw usage_error(
            "--H is only supported with a single observable");
      }
      res = multi_observable_value(xs, fs, grid_opt > 0 ? grid_opt : 41);
    }
  }

  const int q = static_cast<int>(res.optimizer.size());
  std::vector<std::string> header{"value", "grid_points", "refinement_radius"};
  for (int j = 0; j < q; ++j) header.push_back(axis_header("u", q, j));
  csv_table table(header);
  std::vector<std::string> row{csv_table::cell(res.value),
                               csv_table::cell(res.grid_points),
                               csv_table::cell(res.refinement_radius)};
  for (double v : res.optimizer) row.push_back(csv_table::cell(v));
  table.add_row(row);
  emit(g, table.str());
}

// --------------------------------------------------------- verify-prv ----

void run_verify_prv(const GlobalOpts& g, const std::string& xpath,
                    const std::string& hpath, const std::string& fspec,
                    int nmin, int nmax, const std::vector<long long>& trotter,
                    int grid) {
  if (nmin < 1 || nmax < nmin) throw usage_error("invalid n range");
  const HermitianMatrix X = read_matrix_json(xpath);
  const HermitianMatrix H = read_matrix_json(hpath);
  const auto f = poly_function(parse_double_list(fspec, "--f"));

  const int m = X.dim();
  int feasible = 0;
  for (std::int64_t d = 1; feasible < nmax;) {
    if (d > dimension_cap() / m) break;
    d *= m;
    ++feasible;
  }
  if (nmax > feasible) {
    throw resource_error("n=" + std::to_string(nmax) +
                         " exceeds the dense dimension cap; the largest "
                         "feasible n for m=" +
                         std::to_string(m) + " is " + std::to_string(feasible));
  }

  const VariationalResult ref = prv_value(X, H, f, grid);
  std::vector<ConvergenceRow> rows;
  for (int n = nmin; n <= nmax; ++n) {
    ConvergenceRow row;
    row.n = n;
    row.reference = ref.value;
    row.value = log_trace_finite_n({X}, {f}, H, n);
    row.gap = row.value - row.reference;
    rows.push_back(row);
    for (long long N : trotter) {
      ConvergenceRow tr;
      tr.n = n;
      tr.trotter_steps = N;
      tr.reference = ref.value;
      tr.value = trotter_log_trace(X, H, f, n, N);
      tr.gap = tr.value - tr.reference;
      rows.push_back(tr);
    }
  }
  emit(g, convergence_csv(rows));
}

// -------------------------------------------------------------- qsp-mc ----

void run_qsp(const GlobalOpts& g, const std::string& xpath,
             const std::string& hpath, const std::string& fspec,
             long long samples, const std::vector<double>& windows) {
  if (samples < 1) throw usage_error("--samples must be at least 1");
  const HermitianMatrix X = read_matrix_json(xpath);
  const HermitianMatrix H = read_matrix_json(hpath);

  if (!windows.empty()) {
    const SpectralDecomposition dx = spectral_decompose(X);
    cmat ht = dx.basis.adjoint() * H.entries() * dx.basis;
    const cmat hs = 0.5 * (ht + ht.adjoint().eval());
    const GammaGenerator gen = build_generator(HermitianMatrix(hs));
    csv_table table({"window", "probability", "stderr", "samples"});
    for (double w : windows) {
      const JumpWindowEstimate e =
          jump_excess_stats(gen, w, samples, g.seed, g.threads);
      table.add_row({csv_table::cell(w), csv_table::cell(e.probability),
                     csv_table::cell(e.std_error),
                     csv_table::cell(e.samples)});
    }
    emit(g, table.str());
    return;
  }

  if (X.dim() > 16) {
    throw usage_error("the exact comparison column requires dim <= 16");
  }
  const auto f = poly_function(parse_double_list(fspec, "--f"));
  const TraceEstimate est =
      estimate_trace(H, X, f, samples, g.seed, g.threads);
  const HermitianMatrix expo(apply_function(X, f).entries() - H.entries());
  const double exact = std::exp(log_trace_exp(expo));
  const double diff = std::abs(est.estimate - std::complex<double>(exact, 0.0));
  const double sigma = diff == 0.0 ? 0.0 : diff / est.std_error;

  csv_table table({"estimate_re", "estimate_im", "stderr", "exact",
                   "sigma_distance"});
  table.add_row({csv_table::cell(est.estimate.real()),
                 csv_table::cell(est.estimate.imag()),
                 csv_table::cell(est.std_error), csv_table::cell(exact),
                 csv_table::cell(sigma)});
  emit(g, table.str());
}

// ----------------------------------------------------------- decompose ----

rational parse_rational(const std::string& tok) {
  const auto parts = split(tok, '/');
  if (parts.empty() || parts.size() > 2) {
    throw usage_error("cannot parse rational '" + tok + "'");
  }
  try {
    const long long num = std::stoll(parts[0]);
    const long long den = parts.size() == 2 ? std::stoll(parts[1]) : 1;
    if (den == 0) throw std::invalid_argument("");
    return rational(num, den);
  } catch (const std::exception&) {
    throw usage_error("cannot parse rational '" + tok + "'");
  }
}

void run_decompose(const GlobalOpts& g, const std::vector<std::string>& terms) {
  sparse_poly poly;
  std::size_t arity = 0;
  for (const auto& term : terms) {
    const auto parts = split(term, ':');
    if (parts.size() != 2) {
      throw usage_error("--term must look like coeff:e1,e2,... (got '" + term +
                        "')");
    }
    const rational coeff = parse_rational(parts[0]);
    std::vector<int> exps;
    for (const auto& tok : split(parts[1], ',')) {
      try {
        const int e = std::stoi(tok);
        if (e < 0) throw std::invalid_argument("");
        exps.push_back(e);
      } catch (const std::exception&) {
        throw usage_error("cannot parse exponent '" + tok + "'");
      }
    }
    if (arity == 0) arity = exps.size();
    if (exps.size() != arity) {
      throw usage_error("all --term entries must share one variable count");
    }
    poly.emplace_back(std::move(exps), coeff);
  }
  const PowerDecomposition d = decompose_symmetric(poly);
  emit(g, decomposition_to_json(d) + "\n");
}

// ---------------------------------------------------------------- model ----

void run_model(const GlobalOpts& g, const std::string& kind,
               const std::vector<double>& betas, const std::vector<double>& hs,
               const std::vector<double>& js, const std::vector<double>& deltas) {
  if (betas.empty()) throw usage_error("--beta is required");
  if (kind == "ising") {
    if (hs.empty()) throw usage_error("ising needs --h values");
    csv_table table({"beta", "h", "f_value", "opt_x", "opt_z", "route_spread"});
    for (double beta : betas) {
      for (double h : hs) {
        const ModelResult a = ising_free_energy(beta, h, ising_route::one_var);
        const ModelResult b = ising_free_energy(beta, h, ising_route::two_var);
        const ModelResult c = ising_free_energy(beta, h, ising_route::polar);
        const double spread = std::max({std::abs(a.value - b.value),
                                        std::abs(a.value - c.value),
                                        std::abs(b.value - c.value)});
        table.add_row({csv_table::cell(beta), csv_table::cell(h),
                       csv_table::cell(a.value),
                       csv_table::cell(b.optimizer[0]),
                       csv_table::cell(b.optimizer[1]),
                       csv_table::cell(spread)});
      }
    }
    emit(g, table.str());
  } else if (kind == "heisenberg") {
    if (js.empty() || deltas.empty()) {
      throw usage_error("heisenberg needs --J and --Delta values");
    }
    csv_table table(
        {"beta", "J", "Delta", "f_value", "opt_x", "opt_y", "opt_z"});
    for (double beta : betas) {
      for (double J : js) {
        for (double Delta : deltas) {
          const ModelResult r = heisenberg_free_energy(beta, J, Delta);
          table.add_row({csv_table::cell(beta), csv_table::cell(J),
                         csv_table::cell(Delta), csv_table::cell(r.value),
                         csv_table::cell(r.optimizer[0]),
                         csv_table::cell(r.optimizer[1]),
                         csv_table::cell(r.optimizer[2])});
        }
      }
    }
    emit(g, table.str());
  } else {
    throw usage_error("unknown model kind '" + kind +
                      "' (expected ising or heisenberg)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;

  CLI::App app{"Large-deviation rate-function toolkit for mean-field quantum "
               "spin systems"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Base RNG seed (default 1)");
  auto* tol_opt =
      app.add_option("--tol", g.tol, "Override the cross-check tolerance");
  app.add_option("--out", g.out, "Write output to this path (atomic)");
  app.add_option("--threads", g.threads, "Worker threads for Monte Carlo")
      ->check(CLI::PositiveNumber);

  // cgf
  std::vector<std::string> cgf_x;
  std::string cgf_h;
  bool cgf_norm = false;
  double cgf_tmin = -5.0, cgf_tmax = 5.0;
  int cgf_tsteps = 11;
  auto* cgf_cmd = app.add_subcommand(
      "cgf", "Sweep the cumulant generating function on a t-grid");
  cgf_cmd->add_option("--X", cgf_x, "Observable matrix JSON (repeatable)")
      ->required();
  cgf_cmd->add_option("--H", cgf_h, "Base Hamiltonian matrix JSON");
  cgf_cmd->add_flag("--normalized", cgf_norm, "Subtract ln Tr e^{-H}");
  cgf_cmd->add_option("--t-min", cgf_tmin, "Grid start (default -5)");
  cgf_cmd->add_option("--t-max", cgf_tmax, "Grid end (default 5)");
  cgf_cmd->add_option("--t-steps", cgf_tsteps,
                      "Points per axis (default 11)");

  // rate
  std::vector<std::string> rate_x, rate_points;
  std::string rate_h;
  bool rate_norm = false;
  auto* rate_cmd = app.add_subcommand(
      "rate", "Evaluate the Legendre-transform rate function at points");
  rate_cmd->add_option("--X", rate_x, "Observable matrix JSON (repeatable)")
      ->required();
  rate_cmd->add_option("--H", rate_h, "Base Hamiltonian matrix JSON");
  rate_cmd->add_flag("--normalized", rate_norm, "Use the normalized CGF");
  rate_cmd->add_option("--point", rate_points,
                       "Evaluation point u1,u2,... (repeatable)")
      ->required();

  // varsolve
  std::vector<std::string> var_x, var_f;
  std::string var_h, var_poly;
  int var_grid = 0;
  auto* var_cmd = app.add_subcommand(
      "varsolve", "Maximize f(u) - I(u) over the spectral domain");
  var_cmd->add_option("--X", var_x, "Observable matrix JSON (repeatable)")
      ->required();
  var_cmd->add_option("--H", var_h,
                      "Base Hamiltonian (single-observable mode; adds ln Tr "
                      "e^{-H} to the value)");
  var_cmd->add_option("--f", var_f,
                      "Polynomial coefficients c0,c1,... per observable");
  var_cmd->add_option("--poly", var_poly,
                      "Power-decomposition JSON objective");
  var_cmd->add_option("--grid", var_grid, "Grid points per axis");

  // verify-prv
  std::string vp_x, vp_h, vp_f;
  int vp_nmin = 2, vp_nmax = 6, vp_grid = 2001;
  std::vector<long long> vp_trotter;
  auto* vp_cmd = app.add_subcommand(
      "verify-prv",
      "Finite-n log-traces against the variational value, as CSV rows");
  vp_cmd->add_option("--X", vp_x, "Observable matrix JSON")->required();
  vp_cmd->add_option("--H", vp_h, "Base Hamiltonian matrix JSON")->required();
  vp_cmd->add_option("--f", vp_f, "Polynomial coefficients c0,c1,...")
      ->required();
  vp_cmd->add_option("--n-min", vp_nmin, "Smallest n (default 2)");
  vp_cmd->add_option("--n-max", vp_nmax, "Largest n (default 6)");
  vp_cmd->add_option("--trotter", vp_trotter,
                     "Also emit product-formula rows with N steps "
                     "(repeatable)");
  vp_cmd->add_option("--grid", vp_grid,
                     "Variational grid size (default 2001)");

  // qsp-mc
  std::string qsp_x, qsp_h, qsp_f = "0";
  long long qsp_samples = 0;
  std::vector<double> qsp_windows;
  auto* qsp_cmd = app.add_subcommand(
      "qsp-mc",
      "Jump-path Monte Carlo for Tr e^{f(X)-H}, or two-jump window "
      "statistics with --window");
  qsp_cmd->add_option("--X", qsp_x, "Observable matrix JSON")->required();
  qsp_cmd->add_option("--H", qsp_h, "Hamiltonian matrix JSON")->required();
  qsp_cmd->add_option("--f", qsp_f,
                      "Polynomial coefficients c0,c1,... (default 0)");
  qsp_cmd->add_option("--samples", qsp_samples, "Path count")->required();
  qsp_cmd->add_option("--window", qsp_windows,
                      "Window length for jump statistics (repeatable; "
                      "switches to the probability CSV)");

  // decompose
  std::vector<std::string> dec_terms;
  auto* dec_cmd = app.add_subcommand(
      "decompose",
      "Decompose a symmetric polynomial into powers of linear forms");
  dec_cmd->add_option("--term", dec_terms,
                      "Monomial coeff:e1,e2,... (repeatable)")
      ->required();

  // model
  std::string model_kind;
  std::vector<double> model_beta, model_h, model_j, model_delta;
  auto* model_cmd = app.add_subcommand(
      "model", "Closed-form free-energy tables (ising, heisenberg)");
  // Long-only help so that --h stays available as the field flag.
  model_cmd->set_help_flag("--help", "Print this help message and exit");
  model_cmd->add_option("--kind", model_kind, "ising or heisenberg")
      ->required();
  model_cmd->add_option("--beta", model_beta, "Inverse temperatures")
      ->required()
      ->delimiter(',');
  model_cmd->add_option("--h", model_h, "Transverse fields (ising)")
      ->delimiter(',');
  model_cmd->add_option("--J", model_j, "Couplings (heisenberg)")
      ->delimiter(',');
  model_cmd->add_option("--Delta", model_delta, "Anisotropies (heisenberg)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g.tol_set = tol_opt->count() > 0;
    if (g.tol_set) {
      if (!(g.tol > 0.0)) throw usage_error("--tol must be positive");
      config().cross_check = g.tol;
    }

    if (cgf_cmd->parsed()) {
      run_cgf(g, cgf_x, cgf_h, cgf_norm, cgf_tmin, cgf_tmax, cgf_tsteps);
    } else if (rate_cmd->parsed()) {
      run_rate(g, rate_x, rate_h, rate_norm, rate_points);
    } else if (var_cmd->parsed()) {
      run_varsolve(g, var_x, var_h, var_f, var_poly, var_grid);
    } else if (vp_cmd->parsed()) {
      run_verify_prv(g, vp_x, vp_h, vp_f, vp_nmin, vp_nmax, vp_trotter,
                     vp_grid);
    } else if (qsp_cmd->parsed()) {
      run_qsp(g, qsp_x, qsp_h, qsp_f, qsp_samples, qsp_windows);
    } else if (dec_cmd->parsed()) {
      run_decompose(g, dec_terms);
    } else if (model_cmd->parsed()) {
      run_model(g, model_kind, model_beta, model_h, model_j, model_delta);
    }
    return 0;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const solver_error& e) {
    std::cerr << "solver failure: " << e.what() << " (residual "
              << e.residual() << ")\n";
    return 4;
  } catch (const error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
