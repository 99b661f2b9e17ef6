#include "zlab/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "zlab/errors.hpp"
#include "zlab/exp_kernels.hpp"

namespace zlab {

std::vector<cx> integrate_mean_mode(std::span<const cx> samples, double dt, double shift_rate) {
  std::vector<cx> out(samples.size());
  if (samples.empty()) return out;
  out[0] = 0.0;
  const cx z = cx(-shift_rate, 0.0);
  const cx decay = std::exp(z * dt);
  const cx w0 = wlin0(z * dt), w1 = wlin1(z * dt);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    out[i + 1] = decay * out[i] + dt * (w0 * samples[i] + w1 * samples[i + 1]);
  return out;
}

BlockSolveResult solve_unstable_block(const SpectrumReport& rep, const ForcingBlock& forcing,
                                      double dt, double shift_rate) {
  const std::size_t n = forcing.f.size();
  if (forcing.ft.size() != n || forcing.g.size() != n)
    throw Error("solve_unstable_block: ragged forcing block");
  const double k = static_cast<double>(rep.k);
  const cx I(0.0, 1.0);

  // Per-direction projections phi_j(t) = -i (l_j . F1(t)) / (l_j . r_j).
  std::array<cx, 4> denom;
  std::array<Eigen::Vector4cd, 4> lrow;
  for (int j = 0; j < 4; ++j) {
    lrow[static_cast<std::size_t>(j)] = rep.l[static_cast<std::size_t>(j)];
    denom[static_cast<std::size_t>(j)] =
        (rep.l[static_cast<std::size_t>(j)].transpose() * rep.r[static_cast<std::size_t>(j)])(0,
                                                                                              0);
  }

  std::array<std::vector<cx>, 4> phi;
  for (auto& v : phi) v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4cd F1(forcing.f[i], forcing.ft[i], cx(0.0, 0.0), forcing.g[i] / k);
    for (int j = 0; j < 4; ++j) {
      const std::size_t ji = static_cast<std::size_t>(j);
      phi[ji][i] = -I * (lrow[ji].transpose() * F1)(0, 0) / denom[ji];
    }
  }

  // psi_j(t_{m+1}) = e^{z_j} psi_j(t_m) + h (w0 phi_m + w1 phi_{m+1}).
  std::array<cx, 4> zj, stepj, w0j, w1j;
  for (int j = 0; j < 4; ++j) {
    const std::size_t ji = static_cast<std::size_t>(j);
    zj[ji] = (I * rep.lambda[ji] - shift_rate) * dt;
    stepj[ji] = std::exp(zj[ji]);
    w0j[ji] = wlin0(zj[ji]);
    w1j[ji] = wlin1(zj[ji]);
  }

  std::array<cx, 4> psi{};
  BlockSolveResult out;
  out.e.resize(n);
  out.e_t.resize(n);
  out.et.resize(n);
  out.et_t.resize(n);
  out.n.resize(n);
  out.n_t.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0)
      for (int j = 0; j < 4; ++j) {
        const std::size_t ji = static_cast<std::size_t>(j);
        psi[ji] = stepj[ji] * psi[ji] + dt * (w0j[ji] * phi[ji][i - 1] + w1j[ji] * phi[ji][i]);
      }
    Eigen::Vector4cd V = Eigen::Vector4cd::Zero();
    for (int j = 0; j < 4; ++j)
      V += psi[static_cast<std::size_t>(j)] * rep.r[static_cast<std::size_t>(j)];
    const Eigen::Vector4cd F1(forcing.f[i], forcing.ft[i], cx(0.0, 0.0), forcing.g[i] / k);
    const Eigen::Vector4cd dV = I * (rep.A * V) - I * F1;  // shifted true derivative
    out.e[i] = V(0);
    out.et[i] = V(1);
    out.n[i] = V(2);
    out.e_t[i] = dV(0);
    out.et_t[i] = dV(1);
    out.n_t[i] = I * k * V(3);  // dt n = i k v
  }
  return out;
}

namespace {

// Constants of one substep of the p >= 2 scheme (everything that does not
// depend on the forcing values).
struct StableStepKernel {
  double h = 0.0;
  double omega = 0.0;
  cx a1, a2, bp, bm;      // i alpha1 - mu, i alpha2 - mu, +/- i omega - mu
  cx ea1, ea2, ebp, ebm;  // e^{a h} factors
  cx w0_a1, w1_a1, w0_a2, w1_a2, w0_bp, w1_bp, w0_bm, w1_bm;
  cx x_a1_bp, x_a1_bm;  // int_0^h e^{a1(h-s)} e^{b s} ds
  cx x_a2_bp, x_a2_bm;
  cx inv_a1, inv_a1_2, inv_a2, inv_a2_2;  // 1/a, 1/a^2
  cx r_a1_bp, r_a1_bm, r_a2_bp, r_a2_bm;  // 1/(b - a)
  // Integrals of the waveform basis {e^{a1 s}, e^{a2 s}, 1, s, e^{bp s},
  // e^{bm s}} against the wave kernels e^{b(h-s)}:
  cx y_bp_a1, y_bp_a2, y_bp_1, y_bp_s, y_bp_bp, y_bp_bm;
  cx y_bm_a1, y_bm_a2, y_bm_1, y_bm_s, y_bm_bp, y_bm_bm;

  StableStepKernel(double alpha1, double alpha2, double omega_, double mu, double h_) {
    const cx I(0.0, 1.0);
    h = h_;
    omega = omega_;
    a1 = I * alpha1 - mu;
    a2 = I * alpha2 - mu;
    bp = I * omega_ - mu;
    bm = -I * omega_ - mu;
    ea1 = std::exp(a1 * h);
    ea2 = std::exp(a2 * h);
    ebp = std::exp(bp * h);
    ebm = std::exp(bm * h);
    w0_a1 = wlin0(a1 * h);
    w1_a1 = wlin1(a1 * h);
    w0_a2 = wlin0(a2 * h);
    w1_a2 = wlin1(a2 * h);
    w0_bp = wlin0(bp * h);
    w1_bp = wlin1(bp * h);
    w0_bm = wlin0(bm * h);
    w1_bm = wlin1(bm * h);
    x_a1_bp = int_exp_exp(a1, bp, h);
    x_a1_bm = int_exp_exp(a1, bm, h);
    x_a2_bp = int_exp_exp(a2, bp, h);
    x_a2_bm = int_exp_exp(a2, bm, h);
    inv_a1 = 1.0 / a1;
    inv_a1_2 = inv_a1 * inv_a1;
    inv_a2 = 1.0 / a2;
    inv_a2_2 = inv_a2 * inv_a2;
    r_a1_bp = 1.0 / (bp - a1);
    r_a1_bm = 1.0 / (bm - a1);
    r_a2_bp = 1.0 / (bp - a2);
    r_a2_bm = 1.0 / (bm - a2);
    y_bp_a1 = int_exp_exp(bp, a1, h);
    y_bp_a2 = int_exp_exp(bp, a2, h);
    y_bp_1 = int_exp_exp(bp, cx(0.0, 0.0), h);
    y_bp_s = h * h * wlin1(bp * h);
    y_bp_bp = int_exp_exp(bp, bp, h);
    y_bp_bm = int_exp_exp(bp, bm, h);
    y_bm_a1 = int_exp_exp(bm, a1, h);
    y_bm_a2 = int_exp_exp(bm, a2, h);
    y_bm_1 = int_exp_exp(bm, cx(0.0, 0.0), h);
    y_bm_s = h * h * wlin1(bm * h);
    y_bm_bp = int_exp_exp(bm, bp, h);
    y_bm_bm = int_exp_exp(bm, bm, h);
  }
};

struct StableState {
  cx e, et, n, nt;
};

// Closed-form waveform of a Schroedinger component over one substep,
// e(s) = c_own e^{a s} + c_1 + c_s s + c_p e^{bp s} + c_m e^{bm s}.
struct EWaveform {
  cx own, one, lin, p, m;
};

// One substep [0, h] with linear forcing endpoints.  Gauss-Seidel sweeps:
// the Schroedinger rows integrate the exact phases against the current wave
// waveform (free motion plus a linear bridge to the endpoint guess); the
// wave row then integrates its exact kernel against the closed-form
// Schroedinger waveforms, so only the n-bridge and the truncated coupling
// series limit the accuracy.
StableState stable_substep(const StableStepKernel& K, const StableState& y, cx f0, cx f1, cx ft0,
                           cx ft1, cx g0, cx g1, cx E, int sweeps) {
  const cx I(0.0, 1.0);
  const double w = K.omega;
  const cx Ec = std::conj(E);

  // Free wave motion written as c+ e^{bp s} + c- e^{bm s}.
  const cx cp = 0.5 * (y.n - I * y.nt / w);
  const cx cm = 0.5 * (y.n + I * y.nt / w);
  const cx hom_n_h = cp * K.ebp + cm * K.ebm;
  const cx hom_nt_h = I * w * (cp * K.ebp - cm * K.ebm);

  const cx df = (f1 - f0) / K.h;
  const cx dft = (ft1 - ft0) / K.h;

  StableState out;
  out.e = K.ea1 * y.e;
  out.et = K.ea2 * y.et;
  out.n = hom_n_h;
  out.nt = hom_nt_h;

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const cx dn = (out.n - hom_n_h) / K.h;  // linear bridge slope of the n guess

    // e(s) = e^{a1 s} y.e - i int_0^s e^{a1(s-r)} [f(r) + E n(r)] dr, with
    // n(r) = cp e^{bp r} + cm e^{bm r} + dn r.  Collect the basis
    // coefficients; the forcing slope and bridge share the r-ramp kernel
    // (e^{as} - 1 - as)/a^2.
    EWaveform we;
    {
      const cx ramp = df + E * dn;                     // coefficient of r
      const cx cpE = E * cp * K.r_a1_bp;               // e^{bp r} response
      const cx cmE = E * cm * K.r_a1_bm;
      we.own = y.e - I * (f0 * K.inv_a1 + ramp * K.inv_a1_2) + I * (cpE + cmE);
      we.one = I * (f0 * K.inv_a1 + ramp * K.inv_a1_2);
      we.lin = I * ramp * K.inv_a1;
      we.p = -I * cpE;
      we.m = -I * cmE;
    }
    // etilde(s): d/ds et = a2 et - i ft(r) + i conj(E) n(r).
    EWaveform wt;
    {
      const cx ramp = dft - Ec * dn;
      const cx cpE = -Ec * cp * K.r_a2_bp;
      const cx cmE = -Ec * cm * K.r_a2_bm;
      wt.own = y.et - I * (ft0 * K.inv_a2 + ramp * K.inv_a2_2) + I * (cpE + cmE);
      wt.one = I * (ft0 * K.inv_a2 + ramp * K.inv_a2_2);
      wt.lin = I * ramp * K.inv_a2;
      wt.p = -I * cpE;
      wt.m = -I * cmE;
    }
    out.e = we.own * K.ea1 + we.one + we.lin * K.h + we.p * K.ebp + we.m * K.ebm;
    out.et = wt.own * K.ea2 + wt.one + wt.lin * K.h + wt.p * K.ebp + wt.m * K.ebm;

    // Wave row: J+- = int_0^h e^{b(h-s)} [g(s) - w^2 (conj(E) e(s) + E et(s))] ds
    // with the closed-form e/et waveforms.
    const cx mix_p = Ec * we.own * K.y_bp_a1 + E * wt.own * K.y_bp_a2 +
                     (Ec * we.one + E * wt.one) * K.y_bp_1 +
                     (Ec * we.lin + E * wt.lin) * K.y_bp_s +
                     (Ec * we.p + E * wt.p) * K.y_bp_bp + (Ec * we.m + E * wt.m) * K.y_bp_bm;
    const cx mix_m = Ec * we.own * K.y_bm_a1 + E * wt.own * K.y_bm_a2 +
                     (Ec * we.one + E * wt.one) * K.y_bm_1 +
                     (Ec * we.lin + E * wt.lin) * K.y_bm_s +
                     (Ec * we.p + E * wt.p) * K.y_bm_bp + (Ec * we.m + E * wt.m) * K.y_bm_bm;
    const cx Jp = K.h * (K.w0_bp * g0 + K.w1_bp * g1) - w * w * mix_p;
    const cx Jm = K.h * (K.w0_bm * g0 + K.w1_bm * g1) - w * w * mix_m;
    out.n = hom_n_h + (Jp - Jm) / (2.0 * I * w);
    out.nt = hom_nt_h + 0.5 * (Jp + Jm);
  }
  return out;
}

}  // namespace

BlockSolveResult solve_stable_block(int k, double m, cx E, int p, const ForcingBlock& forcing,
                                    double dt, double shift_rate, const StableBlockOptions& opts) {
  if (p < 2) throw Error("solve_stable_block: p must be >= 2");
  const std::size_t n = forcing.f.size();
  if (forcing.ft.size() != n || forcing.g.size() != n)
    throw Error("solve_stable_block: ragged forcing block");

  const double kd = static_cast<double>(k), pd = static_cast<double>(p);
  const double alpha1 = m * pd - kd * kd * pd * pd;
  const double alpha2 = m * pd + kd * kd * pd * pd;
  const double omega = kd * pd;

  const double h_cap = opts.substep_factor /
                       ((kd * std::abs(E) + 1.0) * std::pow(pd, opts.p_power));
  int n_sub = static_cast<int>(std::ceil(dt / h_cap));
  n_sub = std::clamp(n_sub, 1, opts.max_substeps);
  const double h = dt / n_sub;
  const StableStepKernel K(alpha1, alpha2, omega, shift_rate, h);

  BlockSolveResult out;
  out.e.assign(n, 0.0);
  out.e_t.assign(n, 0.0);
  out.et.assign(n, 0.0);
  out.et_t.assign(n, 0.0);
  out.n.assign(n, 0.0);
  out.n_t.assign(n, 0.0);

  const cx I(0.0, 1.0);
  auto store_derivs = [&](std::size_t i, const StableState& y) {
    out.e_t[i] = I * alpha1 * y.e - I * (forcing.f[i] + E * y.n);
    out.et_t[i] = I * alpha2 * y.et - I * (forcing.ft[i] - std::conj(E) * y.n);
    out.n_t[i] = y.nt;
  };

  StableState y{0.0, 0.0, 0.0, 0.0};
  store_derivs(0, y);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int sub = 0; sub < n_sub; ++sub) {
      const double u0 = static_cast<double>(sub) / n_sub;
      const double u1 = static_cast<double>(sub + 1) / n_sub;
      const auto lerp = [&](const std::vector<cx>& v, double u) {
        return v[i] * (1.0 - u) + v[i + 1] * u;
      };
      y = stable_substep(K, y, lerp(forcing.f, u0), lerp(forcing.f, u1), lerp(forcing.ft, u0),
                         lerp(forcing.ft, u1), lerp(forcing.g, u0), lerp(forcing.g, u1), E,
                         opts.sweeps);
    }
    out.e[i + 1] = y.e;
    out.et[i + 1] = y.et;
    out.n[i + 1] = y.n;
    store_derivs(i + 1, y);
  }
  return out;
}

ForcingBlock forcing_block_of(const ForcingTrajectory& forcing, int p) {
  ForcingBlock b;
  b.p = p;
  const std::size_t n = forcing.size();
  b.f.resize(n);
  b.ft.resize(n);
  b.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.f[i] = forcing.samples[i].f.at(p);
    b.ft[i] = -std::conj(forcing.samples[i].f.at(-p));
    b.g[i] = forcing.samples[i].g.at(p);
  }
  return b;
}

Trajectory apply_linear_inverse(int k, double m, cx E, int truncation, const SpectrumReport& rep,
                                const ForcingTrajectory& forcing, const LinearSolveOptions& opts) {
  const std::size_t n = forcing.size();
  if (n == 0) throw Error("apply_linear_inverse: empty forcing");
  if (forcing.truncation() != truncation)
    throw TruncationMismatch("apply_linear_inverse: forcing truncation mismatch");

  // The mean of g must vanish for the p = 0 block to be solvable.
  double gscale = 0.0, g0max = 0.0;
  for (const auto& s : forcing.samples) {
    gscale = std::max(gscale, s.g.max_abs());
    g0max = std::max(g0max, std::abs(s.g.at(0)));
  }
  if (g0max > 1e-12 * std::max(gscale, 1e-300))
    throw NonzeroMeanForcing("apply_linear_inverse: ghat_0 does not vanish");

  const double mu = forcing.shift_rate;
  const double dt = forcing.dt;
  const cx I(0.0, 1.0);

  // Mean mode: i dt e0 = fhat_0 once n0 = 0, i.e. e0 = -i * cumulative f0.
  std::vector<cx> f0(n);
  for (std::size_t i = 0; i < n; ++i) f0[i] = -I * forcing.samples[i].f.at(0);
  const std::vector<cx> e0 = integrate_mean_mode(f0, dt, mu);

  // Harmonic blocks, independent given the forcing.
  std::vector<BlockSolveResult> blocks(static_cast<std::size_t>(truncation) + 1);
  auto run_block = [&](int p) {
    const ForcingBlock fb = forcing_block_of(forcing, p);
    if (p == 1)
      blocks[1] = solve_unstable_block(rep, fb, dt, mu);
    else
      blocks[static_cast<std::size_t>(p)] =
          solve_stable_block(k, m, E, p, fb, dt, mu, opts.stable);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (opts.parallel_blocks && hw > 1 && truncation >= 4) {
    std::vector<std::future<void>> futs;
    futs.reserve(static_cast<std::size_t>(truncation));
    for (int p = 1; p <= truncation; ++p)
      futs.push_back(std::async(std::launch::async, run_block, p));
    for (auto& f : futs) f.get();
  } else {
    for (int p = 1; p <= truncation; ++p) run_block(p);
  }

  Trajectory tr = zero_trajectory(truncation, dt, n, mu);
  for (std::size_t i = 0; i < n; ++i) {
    TrajectorySample& s = tr.samples[i];
    s.e.at(0) = e0[i];
    s.e_t.at(0) = f0[i];
    for (int p = 1; p <= truncation; ++p) {
      const BlockSolveResult& b = blocks[static_cast<std::size_t>(p)];
      s.e.at(p) = b.e[i];
      s.e_t.at(p) = b.e_t[i];
      s.e.at(-p) = std::conj(b.et[i]);
      s.e_t.at(-p) = std::conj(b.et_t[i]);
      s.n.at(p) = b.n[i];
      s.n.at(-p) = std::conj(b.n[i]);
      s.n_t.at(p) = b.n_t[i];
      s.n_t.at(-p) = std::conj(b.n_t[i]);
    }
  }
  return tr;
}

}  // namespace zlab
