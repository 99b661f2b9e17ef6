#include "zlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>
#include <numbers>
#include <random>
#include <sstream>

#include "zlab/errors.hpp"

namespace zlab {

double ExperimentConfig::delta_for(int k) const {
  if (delta_rule == "k^-(2s+2)")
    return std::pow(static_cast<double>(k), -(2.0 * s + 2.0));
  if (delta_rule == "explicit") return delta_explicit;
  throw ConfigError("unknown delta_rule: " + delta_rule);
}

ZakharovConfig ExperimentConfig::zakharov_for(int k) const {
  ZakharovConfig z;
  z.k = k;
  z.Z = Z;
  z.E = E;
  z.s = s;
  z.delta = std::min(delta_for(k), 1.0);
  z.truncation = truncation;
  z.grid_dt_factor = grid_dt_factor;
  z.finalize();
  return z;
}

void ExperimentConfig::validate() const {
  if (s < 1) throw ConfigError("config: s must be a positive integer");
  if (!(c0 > 0.0 && c0 < 1.0)) throw ConfigError("config: c0 must lie in (0, 1)");
  if (truncation < 2) throw ConfigError("config: truncation must be >= 2");
  if (delta_rule != "k^-(2s+2)" && delta_rule != "explicit")
    throw ConfigError("config: delta_rule must be \"k^-(2s+2)\" or \"explicit\"");
  if (delta_rule == "explicit" && !(delta_explicit > 0.0 && delta_explicit <= 1.0))
    throw ConfigError("config: explicit delta must lie in (0, 1]");
  for (int k : k_list)
    if (k < 1) throw ConfigError("config: k values must be >= 1");
}

ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig cfg;
  if (j.contains("k_list")) cfg.k_list = j.at("k_list").get<std::vector<int>>();
  if (j.contains("Z")) {
    const auto& z = j.at("Z");
    if (z.is_array())
      cfg.Z = Rational(z.at(0).get<std::int64_t>(), z.at(1).get<std::int64_t>());
    else
      cfg.Z = Rational(z.get<std::int64_t>(), 1);
  }
  if (j.contains("E")) {
    const auto& e = j.at("E");
    if (e.is_array())
      cfg.E = cx(e.at(0).get<double>(), e.at(1).get<double>());
    else
      cfg.E = cx(e.get<double>(), 0.0);
  }
  if (j.contains("s")) cfg.s = j.at("s").get<int>();
  if (j.contains("c0")) cfg.c0 = j.at("c0").get<double>();
  if (j.contains("delta_rule")) {
    const auto& d = j.at("delta_rule");
    if (d.is_number()) {
      cfg.delta_rule = "explicit";
      cfg.delta_explicit = d.get<double>();
    } else {
      cfg.delta_rule = d.get<std::string>();
    }
  }
  if (j.contains("delta_explicit")) cfg.delta_explicit = j.at("delta_explicit").get<double>();
  if (j.contains("truncation")) cfg.truncation = j.at("truncation").get<int>();
  if (j.contains("grid_dt_factor")) cfg.grid_dt_factor = j.at("grid_dt_factor").get<double>();
  if (j.contains("growth_delta")) cfg.growth_delta = j.at("growth_delta").get<double>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("norm_ceiling")) cfg.norm_ceiling = j.at("norm_ceiling").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("oracle")) cfg.oracle = j.at("oracle").get<bool>();
  cfg.validate();
  return cfg;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["k_list"] = cfg.k_list;
  j["Z"] = {cfg.Z.num, cfg.Z.den};
  j["E"] = {cfg.E.real(), cfg.E.imag()};
  j["s"] = cfg.s;
  j["c0"] = cfg.c0;
  j["delta_rule"] = cfg.delta_rule;
  j["delta_explicit"] = cfg.delta_explicit;
  j["truncation"] = cfg.truncation;
  j["grid_dt_factor"] = cfg.grid_dt_factor;
  j["growth_delta"] = cfg.growth_delta;
  j["out_dir"] = cfg.out_dir;
  j["norm_ceiling"] = cfg.norm_ceiling;
  j["seed"] = cfg.seed;
  j["oracle"] = cfg.oracle;
  return j;
}

namespace {

ordered_json cx_json(cx z) { return ordered_json::array({z.real(), z.imag()}); }

}  // namespace

ordered_json to_json(const FourierField& v) {
  ordered_json j;
  j["truncation"] = v.truncation();
  j["is_real"] = v.is_real();
  ordered_json coeffs = ordered_json::array();
  for (int p = -v.truncation(); p <= v.truncation(); ++p) coeffs.push_back(cx_json(v.at(p)));
  j["coeffs"] = coeffs;
  return j;
}

FourierField fourier_field_from_json(const ordered_json& j) {
  const int P = j.at("truncation").get<int>();
  FourierField v(P, j.at("is_real").get<bool>());
  const auto& coeffs = j.at("coeffs");
  if (static_cast<int>(coeffs.size()) != 2 * P + 1)
    throw ConfigError("fourier_field_from_json: coefficient count mismatch");
  for (int p = -P; p <= P; ++p) {
    const auto& c = coeffs.at(static_cast<std::size_t>(p + P));
    v.at(p) = cx(c.at(0).get<double>(), c.at(1).get<double>());
  }
  return v;
}

ordered_json to_json(const SpectrumReport& rep) {
  ordered_json j;
  j["k"] = rep.k;
  j["m"] = rep.m;
  j["E"] = cx_json(rep.E);
  j["sigma"] = rep.sigma;
  if (rep.k0 >= 0) j["k0"] = rep.k0;
  ordered_json lam = ordered_json::array();
  for (const auto& l : rep.lambda) lam.push_back(cx_json(l));
  j["lambda"] = lam;
  auto vecs = [](const std::array<Eigen::Vector4cd, 4>& vs) {
    ordered_json out = ordered_json::array();
    for (const auto& v : vs) {
      ordered_json one = ordered_json::array();
      for (int i = 0; i < 4; ++i) one.push_back(cx_json(v(i)));
      out.push_back(one);
    }
    return out;
  };
  j["right_eigenvectors"] = vecs(rep.r);
  j["left_eigenvectors"] = vecs(rep.l);
  ordered_json A = ordered_json::array();
  for (int r = 0; r < 4; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < 4; ++c) row.push_back(cx_json(rep.A(r, c)));
    A.push_back(row);
  }
  j["A"] = A;
  j["warnings"] = rep.warnings;
  return j;
}

// ---- dispersion audit ----

namespace {

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

double quartic_scale(const std::array<double, 4>& c, cx tau) {
  const double at = std::abs(tau);
  double s = std::pow(at, 4);
  double ap = 1.0;
  for (int i = 0; i < 4; ++i) {
    s += std::abs(c[static_cast<std::size_t>(i)]) * ap;
    ap *= at;
  }
  return s;
}

}  // namespace

DispersionAudit run_dispersion_audit(const ExperimentConfig& cfg) {
  DispersionAudit audit;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<double> logk_s, logsig, logk_l, logl1;
  for (int k : cfg.k_list) {
    DispersionRow row;
    row.k = k;
    const ModeChoice mc = resonant_m(k, cfg.Z);
    row.m = mc.m;
    row.m_prime = mc.m_prime;

    // Factored-determinant identity at zeta = -|xi| - |xi|^2, xi = k.
    const double xi = static_cast<double>(k);
    for (int trial = 0; trial < 20; ++trial) {
      const double tau = xi * (1.0 + (2.0 * u01(rng) - 1.0));
      const double st = (tau - xi) / xi;  // slope of the representable tau
      const double e2 = 4.0 * u01(rng);
      SymbolPoint pt{cx(tau, 0.0), -xi - xi * xi, xi, e2};
      const cx lhs = dispersion_det(pt);
      const double x5 = std::pow(xi, 5);
      const cx rhs = -x5 * (st * st * (2.0 - st / xi) * (2.0 + st) + 2.0 * e2 / xi);
      row.max_identity_err =
          std::max(row.max_identity_err, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }

    // Quartic root residuals at the block's frequencies.
    {
      const double e2 = std::norm(cfg.E);
      const auto roots = tau_roots(-mc.m, xi, e2);
      const auto c = tau_quartic_coeffs(-mc.m, xi, e2);
      for (const auto& tau : roots) {
        const cx val = (((tau + c[3]) * tau + c[2]) * tau + c[1]) * tau + c[0];
        row.max_root_residual =
            std::max(row.max_root_residual, std::abs(val) / quartic_scale(c, tau));
      }
    }

    try {
      const Eigen::Matrix4cd A = mode_matrix(k, mc.m, cfg.E);
      const SpectrumReport rep = analyze_spectrum(A, k, mc.m, cfg.E);
      row.lambda = rep.lambda;
      row.sigma = rep.sigma;
      const double kd = xi;
      row.ratio_l1 = rep.lambda[0].real() / (2.0 * kd * kd);
      row.ratio_l2 = rep.lambda[1].real() / (-kd);
      row.ratio_re_l3 = rep.lambda[2].real() / kd;
      row.ratio_sigma = rep.sigma / (std::abs(cfg.E) * std::sqrt(kd / 2.0));
      const double anorm = A.norm();
      for (int j = 0; j < 4; ++j) {
        const auto& r = rep.r[static_cast<std::size_t>(j)];
        const double res =
            (A * r - rep.lambda[static_cast<std::size_t>(j)] * r).norm() / (anorm * r.norm());
        row.max_eig_residual = std::max(row.max_eig_residual, res);
      }
      logk_s.push_back(std::log(kd));
      logsig.push_back(std::log(rep.sigma));
      logk_l.push_back(std::log(kd));
      logl1.push_back(std::log(std::abs(rep.lambda[0])));
    } catch (const ClassificationError& err) {
      row.error = err.what();
      audit.warnings.push_back("k=" + std::to_string(k) + ": " + err.what());
    }
    audit.rows.push_back(std::move(row));
  }
  audit.slope_sigma = regression_slope(logk_s, logsig);
  audit.slope_lambda1 = regression_slope(logk_l, logl1);
  return audit;
}

// ---- growth fit ----

double fit_sinh_rate(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                     double t_hi, double gamma_lo, double gamma_hi) {
  std::vector<double> tt, ly;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_lo && t[i] <= t_hi && y[i] > 0.0) {
      tt.push_back(t[i]);
      ly.push_back(std::log(y[i]));
    }
  if (tt.size() < 4) throw Error("fit_sinh_rate: not enough samples in the window");

  auto sse = [&](double gamma) {
    double mean = 0.0;
    std::vector<double> r(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i) {
      r[i] = ly[i] - std::log(std::sinh(gamma * tt[i]));
      mean += r[i];
    }
    mean /= static_cast<double>(tt.size());
    double acc = 0.0;
    for (double v : r) acc += (v - mean) * (v - mean);
    return acc;
  };

  // Golden-section search; the residual is smooth and unimodal around the
  // generating rate for sinh-like data.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = gamma_lo, b = gamma_hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = sse(c), fd = sse(d);
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = sse(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = sse(d);
    }
  }
  return 0.5 * (a + b);
}

GrowthFit run_growth_fit(const ExperimentConfig& cfg, int k) {
  GrowthFit fit;
  fit.k = k;
  try {
    const ZakharovConfig zc = cfg.zakharov_for(k);
    const SpectrumReport rep = analyze_spectrum(mode_matrix(k, zc.m, zc.E), k, zc.m, zc.E);
    const double sigma = rep.sigma;
    fit.sigma = sigma;
    fit.window_lo = 1.0 / sigma;
    fit.window_hi = 3.0 / sigma;
    const UnstableMode mode(rep, zc.truncation);

    // Closed-form linear mode.
    {
      const double T = fit.window_hi;
      const std::size_t mpts = 240;
      std::vector<double> ts(mpts + 1), ys(mpts + 1);
      for (std::size_t i = 0; i <= mpts; ++i) {
        ts[i] = T * static_cast<double>(i) / static_cast<double>(mpts);
        ys[i] = l2_norm(mode.state(ts[i]).n);
      }
      fit.gamma_linear =
          fit_sinh_rate(ts, ys, fit.window_lo, fit.window_hi, 0.2 * sigma, 3.0 * sigma);
    }

    // Nonlinear run seeded with growth_delta * U^a(0).
    {
      const double delta = cfg.growth_delta;
      StateU s0 = mode.state(0.0);
      s0.e *= delta;
      s0.n *= delta;
      s0.n_t *= delta;
      const double dt = 0.05 / sigma;
      const EvolveResult run = evolve_direct(zc, s0, fit.window_hi, dt, cfg.norm_ceiling);
      double hi = fit.window_hi;
      if (run.blowup_time) {
        hi = std::min(hi, *run.blowup_time * 0.95);
        fit.blowup_shrunk_window = true;
      }
      std::vector<double> ts(run.traj.size()), ys(run.traj.size());
      for (std::size_t i = 0; i < run.traj.size(); ++i) {
        ts[i] = run.traj.time(i);
        ys[i] = l2_norm(run.traj.samples[i].n);
      }
      fit.gamma_direct = fit_sinh_rate(ts, ys, fit.window_lo, hi, 0.2 * sigma, 3.0 * sigma);
    }
  } catch (const Error& err) {
    fit.error = err.what();
  }
  return fit;
}

// ---- theorem ----

double zx_l2_norm(const FourierField& v, const Rational& z) {
  const double meas = (2.0 * std::numbers::pi * z.value()) * (2.0 * std::numbers::pi);
  return std::sqrt(meas) * sobolev_norm(v, 0.0);
}

double zx_hs_norm(const FourierField& v, int s, int k, double m, const Rational& z) {
  const double meas = (2.0 * std::numbers::pi * z.value()) * (2.0 * std::numbers::pi);
  double acc = 0.0;
  for (int p = -v.truncation(); p <= v.truncation(); ++p) {
    const double pd = static_cast<double>(p);
    const double w = std::pow(1.0 + m * m * pd * pd + static_cast<double>(k) * k * pd * pd,
                              static_cast<double>(s));
    acc += w * std::norm(v.at(p));
  }
  return std::sqrt(meas * acc);
}

namespace {

Trajectory scale_trajectory(Trajectory tr, double a) {
  for (auto& s : tr.samples) {
    s.e *= a;
    s.e_t *= a;
    s.n *= a;
    s.n_t *= a;
  }
  return tr;
}

TheoremRow theorem_row(const ExperimentConfig& cfg, int k, bool inner_parallel) {
  TheoremRow row;
  row.k = k;
  try {
    const ZakharovConfig zc = cfg.zakharov_for(k);
    const SpectrumReport rep = analyze_spectrum(mode_matrix(k, zc.m, zc.E), k, zc.m, zc.E);
    const double sigma = rep.sigma;
    const double delta = cfg.delta_for(k);
    const double T =
        ((2.0 * cfg.s + 2.25) * std::log(static_cast<double>(k)) - std::log(cfg.c0)) / sigma;
    row.sigma = sigma;
    row.T_k = T;
    row.delta = delta;

    const UnstableMode mode(rep, zc.truncation);
    PicardOptions popts;
    popts.c0 = cfg.c0;
    popts.linear.parallel_blocks = inner_parallel;
    const PicardResult pic = picard_solve(zc, mode, delta, T, popts);
    row.picard_iterations = pic.iterations;

    const double dt = pic.u.dt;
    const std::size_t n = pic.u.size();
    const double mu = pic.u.shift_rate;
    const Trajectory full =
        scale_trajectory(traj_add(mode.trajectory(dt, n, mu), pic.u), delta);

    // Independent route: direct split-step integration of the same data.
    // Its Strang step dominates the route difference, so it runs at a third
    // of the shared grid step and records on the shared grid.
    StateU s0 = mode.state(0.0);
    s0.e *= delta;
    s0.n *= delta;
    s0.n_t *= delta;
    const EvolveResult direct =
        evolve_direct(zc, s0, T, dt / 3.0, cfg.norm_ceiling, /*record_stride=*/3);
    if (direct.blowup_time) throw Error("direct integrator hit the norm ceiling");

    const Trajectory full0 = with_shift_rate(full, 0.0);
    const double dist = e1_norm(traj_sub(direct.traj, full0), k, cfg.s, sigma);
    const double ref = e1_norm(full0, k, cfg.s, sigma);
    row.cross_residual = dist / ref;
    row.verified = row.cross_residual <= 1e-3;

    // Theorem columns in the (z, x) variables.
    const StateU init = full0.state_at(0);
    const double i_e = zx_hs_norm(init.e, cfg.s, k, zc.m, cfg.Z);
    const double i_n = zx_hs_norm(init.n, cfg.s, k, zc.m, cfg.Z);
    const double i_nt = zx_hs_norm(init.n_t, cfg.s, k, zc.m, cfg.Z);
    row.initial_hs = std::sqrt(i_e * i_e + i_n * i_n + i_nt * i_nt);
    row.terminal_l2 = zx_l2_norm(full0.state_at(n - 1).n, cfg.Z);
    row.amplification = row.terminal_l2 / row.initial_hs;

    if (cfg.oracle) {
      // Grid-refinement drift of the terminal norm (slow cross-check).
      ZakharovConfig fine = zc;
      fine.grid_dt_factor = zc.grid_dt_factor / 2.0;
      const PicardResult pic2 = picard_solve(fine, mode, delta, T, popts);
      const Trajectory full2 = scale_trajectory(
          traj_add(mode.trajectory(pic2.u.dt, pic2.u.size(), pic2.u.shift_rate), pic2.u), delta);
      const double term2 = zx_l2_norm(with_shift_rate(full2, 0.0).state_at(full2.size() - 1).n,
                                      cfg.Z);
      row.oracle_refinement_drift = std::abs(term2 / row.terminal_l2 - 1.0);
    }
  } catch (const Error& err) {
    row.error = err.what();
  }
  return row;
}

}  // namespace

TheoremTable run_theorem(const ExperimentConfig& cfg) {
  TheoremTable table;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const bool outer_parallel = hw > 1 && cfg.k_list.size() > 1;

  if (outer_parallel) {
    std::vector<std::future<TheoremRow>> futs;
    futs.reserve(cfg.k_list.size());
    for (int k : cfg.k_list)
      futs.push_back(std::async(std::launch::async, theorem_row, std::cref(cfg), k, false));
    for (auto& f : futs) table.rows.push_back(f.get());
  } else {
    for (int k : cfg.k_list) table.rows.push_back(theorem_row(cfg, k, true));
  }
  for (const auto& row : table.rows) {
    if (!row.error.empty())
      table.warnings.push_back("k=" + std::to_string(row.k) + ": " + row.error);
    else if (!row.verified)
      table.warnings.push_back("k=" + std::to_string(row.k) + ": row UNVERIFIED");
  }
  return table;
}

// ---- emission ----

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << contents;
  if (!os) throw Error("write failed: " + path);
}

ordered_json report_shell(const ExperimentConfig& cfg) {
  ordered_json j;
  j["schema_version"] = "1";
  j["config"] = config_to_json(cfg);
  return j;
}

}  // namespace

std::vector<std::string> emit_dispersion(const ExperimentConfig& cfg, const DispersionAudit& a) {
  std::ostringstream csv;
  csv << "k,m,m_prime,sigma,re_lambda1,im_lambda1,re_lambda2,im_lambda2,re_lambda3,im_lambda3,"
         "re_lambda4,im_lambda4,ratio_l1,ratio_l2,ratio_re_l3,ratio_sigma,max_eig_residual,"
         "max_root_residual,max_identity_err,error\n";
  for (const auto& r : a.rows) {
    csv << r.k << ',' << fmt17(r.m) << ',' << fmt17(r.m_prime) << ',' << fmt17(r.sigma);
    for (const auto& l : r.lambda) csv << ',' << fmt17(l.real()) << ',' << fmt17(l.imag());
    csv << ',' << fmt17(r.ratio_l1) << ',' << fmt17(r.ratio_l2) << ',' << fmt17(r.ratio_re_l3)
        << ',' << fmt17(r.ratio_sigma) << ',' << fmt17(r.max_eig_residual) << ','
        << fmt17(r.max_root_residual) << ',' << fmt17(r.max_identity_err) << ','
        << csv_escape(r.error) << '\n';
  }

  ordered_json j = report_shell(cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& r : a.rows) {
    ordered_json row;
    row["k"] = r.k;
    row["m"] = r.m;
    row["m_prime"] = r.m_prime;
    row["sigma"] = r.sigma;
    ordered_json lam = ordered_json::array();
    for (const auto& l : r.lambda) lam.push_back(cx_json(l));
    row["lambda"] = lam;
    row["ratio_l1"] = r.ratio_l1;
    row["ratio_l2"] = r.ratio_l2;
    row["ratio_re_l3"] = r.ratio_re_l3;
    row["ratio_sigma"] = r.ratio_sigma;
    row["max_eig_residual"] = r.max_eig_residual;
    row["max_root_residual"] = r.max_root_residual;
    row["max_identity_err"] = r.max_identity_err;
    row["error"] = r.error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["slopes"] = ordered_json{{"sigma_vs_k", a.slope_sigma}, {"lambda1_vs_k", a.slope_lambda1}};
  j["warnings"] = a.warnings;

  const std::string p1 = out_path(cfg, "dispersion.csv");
  const std::string p2 = out_path(cfg, "dispersion.json");
  write_file(p1, csv.str());
  write_file(p2, j.dump(2) + "\n");
  return {p1, p2};
}

std::vector<std::string> emit_growth(const ExperimentConfig& cfg,
                                     const std::vector<GrowthFit>& fits) {
  std::ostringstream csv;
  csv << "k,sigma,gamma_linear,gamma_direct,ratio_linear,ratio_direct,window_lo,window_hi,"
         "blowup_shrunk_window,error\n";
  for (const auto& f : fits) {
    const double rl = f.sigma > 0.0 ? f.gamma_linear / f.sigma : 0.0;
    const double rd = f.sigma > 0.0 ? f.gamma_direct / f.sigma : 0.0;
    csv << f.k << ',' << fmt17(f.sigma) << ',' << fmt17(f.gamma_linear) << ','
        << fmt17(f.gamma_direct) << ',' << fmt17(rl) << ',' << fmt17(rd) << ','
        << fmt17(f.window_lo) << ',' << fmt17(f.window_hi) << ','
        << (f.blowup_shrunk_window ? 1 : 0) << ',' << csv_escape(f.error) << '\n';
  }

  ordered_json j = report_shell(cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& f : fits) {
    ordered_json row;
    row["k"] = f.k;
    row["sigma"] = f.sigma;
    row["gamma_linear"] = f.gamma_linear;
    row["gamma_direct"] = f.gamma_direct;
    row["window"] = {f.window_lo, f.window_hi};
    row["blowup_shrunk_window"] = f.blowup_shrunk_window;
    row["error"] = f.error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  ordered_json warnings = ordered_json::array();
  for (const auto& f : fits)
    if (!f.error.empty()) warnings.push_back("k=" + std::to_string(f.k) + ": " + f.error);
  j["warnings"] = warnings;

  const std::string p1 = out_path(cfg, "growth.csv");
  const std::string p2 = out_path(cfg, "growth.json");
  write_file(p1, csv.str());
  write_file(p2, j.dump(2) + "\n");
  return {p1, p2};
}

std::vector<std::string> emit_theorem(const ExperimentConfig& cfg, const TheoremTable& table) {
  std::ostringstream csv;
  csv << "k,sigma,T_k,delta,initial_hs,terminal_l2,amplification,cross_residual,"
         "picard_iterations,verified,oracle_refinement_drift,error\n";
  for (const auto& r : table.rows) {
    csv << r.k << ',' << fmt17(r.sigma) << ',' << fmt17(r.T_k) << ',' << fmt17(r.delta) << ','
        << fmt17(r.initial_hs) << ',' << fmt17(r.terminal_l2) << ',' << fmt17(r.amplification)
        << ',' << fmt17(r.cross_residual) << ',' << r.picard_iterations << ','
        << (r.verified ? 1 : 0) << ',' << fmt17(r.oracle_refinement_drift) << ','
        << csv_escape(r.error) << '\n';
  }

  ordered_json j = report_shell(cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json row;
    row["k"] = r.k;
    row["sigma"] = r.sigma;
    row["T_k"] = r.T_k;
    row["delta"] = r.delta;
    row["initial_hs"] = r.initial_hs;
    row["terminal_l2"] = r.terminal_l2;
    row["amplification"] = r.amplification;
    row["cross_residual"] = r.cross_residual;
    row["picard_iterations"] = r.picard_iterations;
    row["verified"] = r.verified;
    row["oracle_refinement_drift"] = r.oracle_refinement_drift;
    row["error"] = r.error;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["warnings"] = table.warnings;

  const std::string p1 = out_path(cfg, "theorem.csv");
  const std::string p2 = out_path(cfg, "theorem.json");
  write_file(p1, csv.str());
  write_file(p2, j.dump(2) + "\n");
  return {p1, p2};
}

std::vector<std::string> emit_trace(const ExperimentConfig& cfg, int k, const NormTrace& trace,
                                    const ordered_json& meta) {
  std::ostringstream csv;
  norm_trace_to_csv(trace, csv);
  ordered_json j = report_shell(cfg);
  j["meta"] = meta;
  const std::string p1 = out_path(cfg, "trace_k" + std::to_string(k) + ".csv");
  const std::string p2 = out_path(cfg, "trace_k" + std::to_string(k) + ".json");
  write_file(p1, csv.str());
  write_file(p2, j.dump(2) + "\n");
  return {p1, p2};
}

}  // namespace zlab
