#include "zlab/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "zlab/errors.hpp"

namespace zlab {

namespace {

FourierField as_complex(const FourierField& v) {
  FourierField out = v;
  out.set_real_flag(false);
  return out;
}

FourierField drop_mode1(const FourierField& v) {
  FourierField out = v;
  out.at(1) = cx(0.0, 0.0);
  return out;
}

}  // namespace

ForcingSample bilinear_forcing(const TrajectorySample& u, const TrajectorySample& v, int k) {
  const double k2 = static_cast<double>(k) * k;
  const int P = u.e.truncation();
  if (v.e.truncation() != P) throw TruncationMismatch("bilinear_forcing: truncation mismatch");
  const int n_pad = (3 * (2 * P + 1) + 1) / 2;  // same grid as product()

  // All three outputs come from one batch of padded-grid transforms.  The
  // pointwise combinations below are symmetric in (u, v) term by term, and
  // the quadratic term N(U) is this very call with u and v aliased, so
  // N(U) = bilinear(U, U) holds exactly.
  const auto eu = synthesize(u.e, n_pad);
  const auto nu = synthesize(u.n, n_pad);
  const auto deu = synthesize(u.e_t, n_pad);
  const auto dnu = synthesize(u.n_t, n_pad);
  const bool diag = (&u == &v);
  const auto ev = diag ? eu : synthesize(v.e, n_pad);
  const auto nv = diag ? nu : synthesize(v.n, n_pad);
  const auto dev = diag ? deu : synthesize(v.e_t, n_pad);
  const auto dnv = diag ? dnu : synthesize(v.n_t, n_pad);

  std::vector<cx> pf(eu.size()), pft(eu.size()), pw(eu.size());
  for (std::size_t j = 0; j < eu.size(); ++j) {
    pf[j] = 0.5 * (nu[j] * ev[j] + nv[j] * eu[j]);
    pft[j] = 0.5 * (dnu[j] * ev[j] + nu[j] * dev[j] + dnv[j] * eu[j] + nv[j] * deu[j]);
    pw[j] = cx(0.5 * ((std::conj(eu[j]) * ev[j]).real() + (std::conj(ev[j]) * eu[j]).real()), 0.0);
  }

  ForcingSample out;
  out.f = analyze(pf, P);
  out.f_t = analyze(pft, P);
  const FourierField w = analyze(pw, P, true);  // real samples: exactly hermitian
  out.g = cx(k2, 0.0) * second_theta_derivative(w);
  out.g.set_real_flag(true);
  out.g.at(0) = cx(0.0, 0.0);  // exact: g is a theta derivative
  return out;
}

ForcingSample quadratic_forcing(const TrajectorySample& u, int k) {
  return bilinear_forcing(u, u, k);
}

ForcingTrajectory bilinear_forcing(const Trajectory& u, const Trajectory& v, int k) {
  if (u.dt != v.dt || u.size() != v.size())
    throw Error("bilinear_forcing: trajectory grid mismatch");
  ForcingTrajectory out;
  out.dt = u.dt;
  out.shift_rate = u.shift_rate + v.shift_rate;
  out.samples.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out.samples.push_back(bilinear_forcing(u.samples[i], v.samples[i], k));
  return out;
}

ForcingTrajectory quadratic_forcing(const Trajectory& u, int k) {
  return bilinear_forcing(u, u, k);
}

namespace {

double e1_brace(const TrajectorySample& s, double k, int sobolev_s) {
  const double sk = std::sqrt(k);
  return sk * std::abs(s.e.at(1)) + std::abs(s.e_t.at(1)) / sk +
         std::pow(k, 0.75) * sobolev_norm(drop_mode1(s.e), sobolev_s + 2) +
         sobolev_norm(drop_mode1(s.e_t), sobolev_s) / sk + sobolev_norm(s.n, sobolev_s) +
         sobolev_norm(s.n_t, sobolev_s) / k;
}

double e2_brace(const TrajectorySample& s, double k, int sobolev_s) {
  const double sk = std::sqrt(k);
  return k * std::abs(s.e.at(1)) + std::abs(s.e_t.at(1)) +
         k * sobolev_norm(drop_mode1(s.e), sobolev_s + 2) +
         std::pow(k, -0.25) * sobolev_norm(drop_mode1(s.e_t), sobolev_s) +
         sk * sobolev_norm(s.n, sobolev_s) + sobolev_norm(s.n_t, sobolev_s) / sk;
}

double f2_brace(const ForcingSample& s, double k, int sobolev_s) {
  const double sk = std::sqrt(k);
  return sk * sobolev_norm(s.f, sobolev_s) + sobolev_norm(s.f_t, sobolev_s) / sk +
         std::pow(k, -0.75) * sobolev_norm(s.g, sobolev_s);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

WeightedNorms weighted_norms(const Trajectory& u, int k, int s, double sigma) {
  WeightedNorms out;
  out.k = k;
  out.s = s;
  out.sigma = sigma;
  const double kd = static_cast<double>(k);
  double log_e1 = kNegInf, log_e2 = kNegInf;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.time(i);
    const double b1 = e1_brace(u.samples[i], kd, s);
    const double b2 = e2_brace(u.samples[i], kd, s);
    if (b1 > 0.0) log_e1 = std::max(log_e1, std::log(b1) + (u.shift_rate - sigma) * t);
    if (b2 > 0.0) log_e2 = std::max(log_e2, std::log(b2) + (u.shift_rate - 2.0 * sigma) * t);
  }
  out.log_E1 = log_e1;
  out.log_E2 = log_e2;
  out.E1 = std::exp(log_e1);
  out.E2 = std::exp(log_e2);
  return out;
}

double f2_norm(const ForcingTrajectory& f, int k, int s, double sigma) {
  const double kd = static_cast<double>(k);
  double log_f2 = kNegInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double b = f2_brace(f.samples[i], kd, s);
    if (b > 0.0)
      log_f2 = std::max(log_f2, std::log(b) + (f.shift_rate - 2.0 * sigma) * f.time(i));
  }
  return std::exp(log_f2);
}

double e1_norm(const Trajectory& u, int k, int s, double sigma) {
  return weighted_norms(u, k, s, sigma).E1;
}

PicardResult picard_solve(const ZakharovConfig& cfg, const UnstableMode& mode, double delta,
                          double T, const PicardOptions& opts) {
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("picard_solve: delta must be in (0, 1]");
  const int k = cfg.k;
  const int P = cfg.truncation;
  const double sigma = mode.sigma();

  const auto steps = static_cast<std::size_t>(std::ceil(T / cfg.grid_dt()));
  const double dt = T / static_cast<double>(std::max<std::size_t>(steps, 1));
  const std::size_t n = std::max<std::size_t>(steps, 1) + 1;
  const double mu = (sigma * T > opts.shift_threshold) ? sigma : 0.0;

  PicardResult res;
  res.smallness_value = std::exp(std::log(delta) - 0.25 * std::log(static_cast<double>(k)) +
                                 sigma * T);
  res.smallness_ok = res.smallness_value <= opts.c0;

  const Trajectory ua = mode.trajectory(dt, n, mu);
  Trajectory u = zero_trajectory(P, dt, n, mu);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const Trajectory w = traj_add(ua, u);
    ForcingTrajectory F = quadratic_forcing(w, k);
    for (auto& smp : F.samples) {
      smp.f *= delta;
      smp.f_t *= delta;
      smp.g *= delta;
    }
    const ForcingTrajectory Fmu = forcing_with_shift_rate(F, mu);
    Trajectory u_next =
        apply_linear_inverse(k, cfg.m, cfg.E, P, mode.spectrum(), Fmu, opts.linear);

    const double inc = e1_norm(traj_sub(u_next, u), k, cfg.s, sigma);
    const double un = e1_norm(u_next, k, cfg.s, sigma);
    res.iterate_e1.push_back(un);
    res.increment_e1.push_back(inc);
    u = std::move(u_next);
    res.iterations = iter;
    if (inc <= opts.tol * std::max(un, 1e-300)) {
      res.u = std::move(u);
      return res;
    }
  }
  throw NoConvergence("picard_solve: no contraction after max iterations");
}

namespace {

// Exact one-step propagators of the linear part, one 4x4 matrix per
// harmonic pair.
std::vector<Eigen::Matrix4cd> linear_step_matrices(int k, double m, cx E, int P, double dt) {
  const cx I(0.0, 1.0);
  std::vector<Eigen::Matrix4cd> props(static_cast<std::size_t>(P) + 1,
                                      Eigen::Matrix4cd::Zero());
  for (int p = 1; p <= P; ++p) {
    if (std::abs(E) == 0.0) {
      // Decoupled: pure Schroedinger phases and the free wave rotation on
      // (n, v) with v = -i dt n / (k p).
      const double kd = k, pd = p;
      const double a1 = m * pd - kd * kd * pd * pd;
      const double a2 = m * pd + kd * kd * pd * pd;
      const double w = kd * pd;
      Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
      M(0, 0) = std::exp(I * a1 * dt);
      M(1, 1) = std::exp(I * a2 * dt);
      // n(t+dt) = cos n + sin/w dtn; v = -i dtn / w  ->  in (n, v) variables
      // the rotation is [[cos, i sin], [i sin, cos]].
      M(2, 2) = std::cos(w * dt);
      M(2, 3) = I * std::sin(w * dt);
      M(3, 2) = I * std::sin(w * dt);
      M(3, 3) = std::cos(w * dt);
      props[static_cast<std::size_t>(p)] = M;
      continue;
    }
    const Eigen::Matrix4cd A = mode_matrix(k, m, E, p);
    const Eigensystem4 sys = block_eigensystem(A);
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    for (int j = 0; j < 4; ++j) {
      const Eigen::Vector4cd r = sys.right.col(j);
      const Eigen::Vector4cd l = sys.left.row(j).transpose();
      const cx den = (l.transpose() * r)(0, 0);
      M += std::exp(I * sys.lambda[static_cast<std::size_t>(j)] * dt) * (r * l.transpose()) / den;
    }
    props[static_cast<std::size_t>(p)] = M;
  }
  return props;
}

}  // namespace

EvolveResult evolve_direct(const ZakharovConfig& cfg, const StateU& state0, double T, double dt,
                           double norm_ceiling, int record_stride) {
  state0.validate();
  const int P = cfg.truncation;
  const int k = cfg.k;
  const double kd = static_cast<double>(k);
  const cx E = cfg.E;
  const cx I(0.0, 1.0);

  if (record_stride < 1) throw ConfigError("evolve_direct: record_stride must be >= 1");
  // tolerate T being an exact multiple of dt up to rounding; round the step
  // count up to a multiple of the recording stride
  auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt - 1e-9)));
  const auto stride = static_cast<std::size_t>(record_stride);
  steps = ((steps + stride - 1) / stride) * stride;
  const double h = T / static_cast<double>(steps);
  const auto props = linear_step_matrices(k, cfg.m, E, P, h);
  const int n_pad = (3 * (2 * P + 1) + 1) / 2;

  FourierField e = state0.e;
  FourierField n = state0.n;
  FourierField vn = state0.n_t;

  EvolveResult res;
  res.traj.dt = h * static_cast<double>(stride);
  res.traj.shift_rate = 0.0;
  res.traj.samples.reserve(steps / stride + 1);

  auto record = [&](void) {
    TrajectorySample smp;
    smp.e = e;
    smp.n = n;
    smp.n_t = vn;
    // dt e = -i (n e + E n - k^2 d2 e) + m d1 e, from the equation.
    FourierField tmp = product(n, e);
    tmp += E * as_complex(n);
    tmp -= cx(kd * kd, 0.0) * second_theta_derivative(e);
    smp.e_t = (-I) * tmp + cx(cfg.m, 0.0) * first_theta_derivative(e);
    res.traj.samples.push_back(std::move(smp));
  };

  auto half_kick = [&](double hk) {
    auto e_vals = synthesize(e, n_pad);
    const auto n_vals = synthesize(n, n_pad);
    std::vector<cx> w_vals(e_vals.size());
    for (std::size_t j = 0; j < e_vals.size(); ++j) {
      e_vals[j] *= std::exp(cx(0.0, -hk * n_vals[j].real()));
      w_vals[j] = cx(std::norm(e_vals[j]), 0.0);
    }
    e = analyze(e_vals, P, false);
    FourierField w = analyze(w_vals, P, true);
    symmetrize_real(w);
    vn += cx(hk * kd * kd, 0.0) * second_theta_derivative(w);
    symmetrize_real(vn);
  };

  auto linear_step = [&](void) {
    // Mean mode: i dt e0 = E n0 with n0 linear in t over the step.
    const cx n0 = n.at(0), dn0 = vn.at(0);
    e.at(0) += -I * E * (n0 * h + 0.5 * dn0 * h * h);
    n.at(0) = n0 + dn0 * h;
    for (int p = 1; p <= P; ++p) {
      const double w = kd * static_cast<double>(p);
      Eigen::Vector4cd V(e.at(p), std::conj(e.at(-p)), n.at(p), -I * vn.at(p) / w);
      V = props[static_cast<std::size_t>(p)] * V;
      e.at(p) = V(0);
      e.at(-p) = std::conj(V(1));
      n.at(p) = V(2);
      n.at(-p) = std::conj(V(2));
      const cx nt = I * w * V(3);
      vn.at(p) = nt;
      vn.at(-p) = std::conj(nt);
    }
  };

  record();
  for (std::size_t i = 0; i < steps; ++i) {
    half_kick(0.5 * h);
    linear_step();
    half_kick(0.5 * h);
    if ((i + 1) % stride == 0) record();
    const double gauge = std::max({sobolev_norm(e, cfg.s), sobolev_norm(n, cfg.s), l2_norm(n)});
    if (gauge > norm_ceiling) {
      res.blowup_time = h * static_cast<double>(i + 1);
      break;
    }
  }
  return res;
}

NormTrace norm_trace(const Trajectory& tr, int k, int s, double sigma) {
  NormTrace nt;
  nt.k = k;
  nt.s = s;
  nt.sigma = sigma;
  nt.rows.reserve(tr.size());
  const double kd = static_cast<double>(k);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& smp = tr.samples[i];
    const double t = tr.time(i);
    NormTraceRow row;
    row.t = t;
    const double l2_stored = l2_norm(smp.n);
    const double log_l2 = (l2_stored > 0.0 ? std::log(l2_stored) : kNegInf) + tr.shift_rate * t;
    row.l2_n = std::exp(log_l2);
    row.hs_n = sobolev_norm(smp.n, s) * std::exp(tr.shift_rate * t);
    row.hs_e = sobolev_norm(smp.e, s) * std::exp(tr.shift_rate * t);
    row.log_sinh_fit = log_l2 - 0.5 * std::log(std::numbers::pi);
    row.e1_partial = e1_brace(smp, kd, s) * std::exp((tr.shift_rate - sigma) * t);
    nt.rows.push_back(row);
  }
  return nt;
}

void norm_trace_to_csv(const NormTrace& nt, std::ostream& os) {
  os << "t,l2_n,hs_n,hs_e,log_sinh_fit,E1_partial\n";
  char buf[256];
  for (const auto& r : nt.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.l2_n, r.hs_n,
                  r.hs_e, r.log_sinh_fit, r.e1_partial);
    os << buf;
  }
}

}  // namespace zlab
