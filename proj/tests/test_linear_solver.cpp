#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "support/rk45.hpp"
#include "zlab/errors.hpp"
#include "zlab/linear_solver.hpp"
#include "zlab/nonlinear.hpp"

using namespace zlab;
using zlab::testing::cxv;
using zlab::testing::rk45_integrate;

namespace {

std::vector<cx> smooth_samples(std::mt19937_64& rng, std::size_t n, double dt, double f_max,
                               double amp = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cx> v(n, cx(0.0, 0.0));
  for (int mode = 0; mode < 5; ++mode) {
    const double w = f_max * u(rng);
    const cx a = amp * cx(u(rng), u(rng));
    for (std::size_t i = 0; i < n; ++i)
      v[i] += a * std::exp(cx(0.0, w * dt * static_cast<double>(i)));
  }
  return v;
}

cx lerp(const std::vector<cx>& v, double t, double dt) {
  const double x = t / dt;
  auto i = static_cast<std::size_t>(x);
  if (i >= v.size() - 1) i = v.size() - 2;
  const double u = x - static_cast<double>(i);
  return v[i] * (1.0 - u) + v[i + 1] * u;
}

SpectrumReport spectrum_for(int k, cx E) {
  const auto mc = resonant_m(k, Rational(1, 1));
  return analyze_spectrum(mode_matrix(k, mc.m, E), k, mc.m, E);
}

struct GridSpec {
  double dt;
  std::size_t n;
};

GridSpec make_grid(int k, cx E, double T, double factor = 0.02) {
  const double dt_raw = factor / (static_cast<double>(k) * std::abs(E) + 1.0);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt_raw));
  return {T / static_cast<double>(steps), steps + 1};
}

}  // namespace

TEST_CASE("resonant m selection") {
  const auto a = resonant_m(5, Rational(1, 1));
  CHECK(a.m == 30.0);
  CHECK(a.m_prime == 0.0);

  const auto b = resonant_m(3, Rational(3, 1));
  CHECK(b.m == 12.0);
  CHECK(b.m_prime == 0.0);

  const auto c = resonant_m(4, Rational(7, 1));
  CHECK(c.m == 20.0);
  CHECK(c.m_prime == 0.0);

  // Brute-force scan over multiples of 1/Z for non-integer windows.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kk(1, 200);
  std::uniform_int_distribution<std::int64_t> num(1, 12), den(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = kk(rng);
    const Rational Z(num(rng), den(rng));
    const auto mc = resonant_m(k, Z);
    const double target = static_cast<double>(k) * k + k;
    CHECK(mc.m <= target + 1e-12);
    CHECK(mc.m > target - 1.0 / Z.value() - 1e-9);
    const double mz = mc.m * Z.value();
    CHECK(std::abs(mz - std::round(mz)) < 1e-9);
    // no larger multiple of 1/Z fits inside the window
    const double next = (static_cast<double>(mc.j) + 1.0) / (Z.value());
    CHECK(next > target);
  }
}

TEST_CASE("mean mode integration") {
  const double dt = 0.01;
  const std::size_t n = 101;

  std::vector<cx> zero(n, cx(0.0, 0.0));
  for (const auto& v : integrate_mean_mode(zero, dt)) CHECK(std::abs(v) == 0.0);

  std::vector<cx> constant(n, cx(2.0, -1.0));
  const auto ramp = integrate_mean_mode(constant, dt);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(ramp[i] - cx(2.0, -1.0) * (dt * static_cast<double>(i))) < 1e-13);

  std::vector<cx> cosine(n);
  for (std::size_t i = 0; i < n; ++i) cosine[i] = std::cos(dt * static_cast<double>(i));
  const auto sine = integrate_mean_mode(cosine, dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    // trapezoid rule: global error below h^2 t / 12 for this integrand
    CHECK(std::abs(sine[i] - std::sin(t)) <= 1.05 * dt * dt * t / 12.0 + 1e-15);
  }
}

TEST_CASE("unstable block: zero forcing gives the zero trajectory") {
  const int k = 32;
  const auto rep = spectrum_for(k, cx(1.0, 0.0));
  const auto grid = make_grid(k, cx(1.0, 0.0), 0.3);
  ForcingBlock fb;
  fb.p = 1;
  fb.f.assign(grid.n, cx(0.0, 0.0));
  fb.ft.assign(grid.n, cx(0.0, 0.0));
  fb.g.assign(grid.n, cx(0.0, 0.0));
  const auto out = solve_unstable_block(rep, fb, grid.dt);
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK(std::abs(out.e[i]) == 0.0);
    CHECK(std::abs(out.n[i]) == 0.0);
  }
}

TEST_CASE("unstable block: resonant forcing along the l3 dual direction") {
  const int k = 48;
  const cx E(1.0, 0.0);
  const auto rep = spectrum_for(k, E);
  const double T = 0.4;
  const auto grid = make_grid(k, E, T, 0.005);
  const cx I(0.0, 1.0);

  // Forcing rotating at lambda3: the aligned component responds secularly
  // (t e^{i lambda3 t}), the rest by the explicit two-phase formula.
  const Eigen::Vector4cd w(cx(1.0, 0.0), cx(0.5, -0.2), cx(0.0, 0.0), cx(0.2, 0.1));

  ForcingBlock fb;
  fb.p = 1;
  fb.f.resize(grid.n);
  fb.ft.resize(grid.n);
  fb.g.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const cx ph = std::exp(I * rep.lambda[2] * (grid.dt * static_cast<double>(i)));
    fb.f[i] = w(0) * ph;
    fb.ft[i] = w(1) * ph;
    fb.g[i] = w(3) * ph * static_cast<double>(k);
  }

  const auto out = solve_unstable_block(rep, fb, grid.dt);
  double worst = 0.0;
  for (std::size_t i = 1; i < grid.n; ++i) {
    const double t = grid.dt * static_cast<double>(i);
    Eigen::Vector4cd want = Eigen::Vector4cd::Zero();
    for (int j = 0; j < 4; ++j) {
      const auto ji = static_cast<std::size_t>(j);
      const cx cj = -I * (rep.l[ji].transpose() * w)(0, 0) /
                    (rep.l[ji].transpose() * rep.r[ji])(0, 0);
      // int_0^t e^{i lj (t-s)} e^{i l3 s} ds, secular when j = 2
      const cx integral =
          (j == 2) ? t * std::exp(I * rep.lambda[2] * t)
                   : (std::exp(I * rep.lambda[2] * t) - std::exp(I * rep.lambda[ji] * t)) /
                         (I * rep.lambda[2] - I * rep.lambda[ji]);
      want += cj * integral * rep.r[ji];
    }
    const Eigen::Vector4cd got(out.e[i], out.et[i], out.n[i],
                               out.n_t[i] / (I * static_cast<double>(k)));
    worst = std::max(worst, (got - want).norm() / want.norm());
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("unstable block matches the RK oracle on random smooth forcing") {
  std::mt19937_64 rng(21);
  const cx I(0.0, 1.0);
  for (int k : {32, 64}) {
    const cx E(1.0, 0.0);
    const auto rep = spectrum_for(k, E);
    const double T = 0.4;
    const auto grid = make_grid(k, E, T);
    for (int trial = 0; trial < 3; ++trial) {
      ForcingBlock fb;
      fb.p = 1;
      fb.f = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
      fb.ft = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
      fb.g = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
      const auto mine = solve_unstable_block(rep, fb, grid.dt);

      auto rhsf = [&](double t, const cxv& y) {
        Eigen::Vector4cd V(y[0], y[1], y[2], y[3]);
        Eigen::Vector4cd F1(lerp(fb.f, t, grid.dt), lerp(fb.ft, t, grid.dt), cx(0.0, 0.0),
                            lerp(fb.g, t, grid.dt) / static_cast<double>(k));
        Eigen::Vector4cd d = I * (rep.A * V) - I * F1;
        return cxv{d(0), d(1), d(2), d(3)};
      };
      cxv y(4, cx(0.0, 0.0));
      double sup_err = 0.0, sup_ref = 0.0;
      for (std::size_t i = 1; i < grid.n; ++i) {
        y = rk45_integrate(rhsf, y, grid.dt * static_cast<double>(i - 1),
                           grid.dt * static_cast<double>(i));
        const cx vals[4] = {mine.e[i], mine.et[i], mine.n[i],
                            mine.n_t[i] / (I * static_cast<double>(k))};
        for (int cidx = 0; cidx < 4; ++cidx) {
          sup_err = std::max(sup_err, std::abs(vals[cidx] - y[static_cast<std::size_t>(cidx)]));
          sup_ref = std::max(sup_ref, std::abs(y[static_cast<std::size_t>(cidx)]));
        }
      }
      CHECK(sup_err <= 1e-6 * sup_ref);
    }
  }
}

TEST_CASE("stable block: zero forcing and the decoupled closed form") {
  const int k = 24, p = 3;
  const auto mc = resonant_m(k, Rational(1, 1));
  const auto grid = make_grid(k, cx(0.0, 0.0), 0.5);

  ForcingBlock zerofb;
  zerofb.p = p;
  zerofb.f.assign(grid.n, cx(0.0, 0.0));
  zerofb.ft.assign(grid.n, cx(0.0, 0.0));
  zerofb.g.assign(grid.n, cx(0.0, 0.0));
  const auto znull = solve_stable_block(k, mc.m, cx(1.0, 0.0), p, zerofb, grid.dt);
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK(std::abs(znull.e[i]) == 0.0);
    CHECK(std::abs(znull.n[i]) == 0.0);
  }

  // E = 0, f == 1: e(t) = (1 - e^{i alpha t}) / alpha with alpha = mp - k^2 p^2.
  ForcingBlock onefb = zerofb;
  onefb.f.assign(grid.n, cx(1.0, 0.0));
  const auto one = solve_stable_block(k, mc.m, cx(0.0, 0.0), p, onefb, grid.dt);
  const double alpha = mc.m * p - static_cast<double>(k) * k * p * p;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.dt * static_cast<double>(i);
    const cx want = (1.0 - std::exp(cx(0.0, alpha * t))) / alpha;
    worst = std::max(worst, std::abs(one.e[i] - want) * alpha);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("stable block matches the RK oracle on random smooth forcing") {
  std::mt19937_64 rng(23);
  const cx I(0.0, 1.0);
  const cx E(1.0, 0.3);
  for (int k : {32, 64}) {
    const auto mc = resonant_m(k, Rational(1, 1));
    const double T = 0.4;
    const auto grid = make_grid(k, E, T);
    for (int p : {2, 3}) {
      const double kd = k, pd = p;
      const double a1 = mc.m * pd - kd * kd * pd * pd;
      const double a2 = mc.m * pd + kd * kd * pd * pd;
      const double w = kd * pd;
      for (int trial = 0; trial < 2; ++trial) {
        ForcingBlock fb;
        fb.p = p;
        fb.f = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
        fb.ft = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
        fb.g = smooth_samples(rng, grid.n, grid.dt, 2.0 * k);
        const auto mine = solve_stable_block(k, mc.m, E, p, fb, grid.dt);

        auto rhsf = [&](double t, const cxv& y) {
          cxv d(4);
          d[0] = I * a1 * y[0] - I * (lerp(fb.f, t, grid.dt) + E * y[2]);
          d[1] = I * a2 * y[1] - I * (lerp(fb.ft, t, grid.dt) - std::conj(E) * y[2]);
          d[2] = y[3];
          d[3] = -w * w * y[2] - w * w * (std::conj(E) * y[0] + E * y[1]) +
                 lerp(fb.g, t, grid.dt);
          return d;
        };
        cxv y(4, cx(0.0, 0.0));
        double sup_err = 0.0, sup_ref = 0.0;
        for (std::size_t i = 1; i < grid.n; ++i) {
          y = rk45_integrate(rhsf, y, grid.dt * static_cast<double>(i - 1),
                             grid.dt * static_cast<double>(i));
          const cx vals[4] = {mine.e[i], mine.et[i], mine.n[i], mine.n_t[i]};
          for (int cidx = 0; cidx < 4; ++cidx) {
            sup_err =
                std::max(sup_err, std::abs(vals[cidx] - y[static_cast<std::size_t>(cidx)]));
            sup_ref = std::max(sup_ref, std::abs(y[static_cast<std::size_t>(cidx)]));
          }
        }
        CHECK(sup_err <= 1e-6 * sup_ref);
      }
    }
  }
}

namespace {

// Band-limited manufactured solution, polynomial in time, with zero data.
struct Manufactured {
  int P = 6;
  int band = 3;
  std::vector<cx> a, b;  // e coefficients of t^2, t^3 (index p + P)
  std::vector<cx> c, d;  // n coefficients (hermitian, zero mean)

  Manufactured(std::mt19937_64& rng, int P_, int band_) : P(P_), band(band_) {
    std::normal_distribution<double> g(0.0, 1.0);
    const auto sz = static_cast<std::size_t>(2 * P + 1);
    a.assign(sz, cx(0.0, 0.0));
    b.assign(sz, cx(0.0, 0.0));
    c.assign(sz, cx(0.0, 0.0));
    d.assign(sz, cx(0.0, 0.0));
    for (int p = -band; p <= band; ++p) {
      const double dec = std::pow(0.6, std::abs(p));
      at(a, p) = dec * cx(g(rng), g(rng));
      at(b, p) = dec * cx(g(rng), g(rng));
    }
    for (int p = 1; p <= band; ++p) {
      const double dec = std::pow(0.6, p);
      at(c, p) = dec * cx(g(rng), g(rng));
      at(d, p) = dec * cx(g(rng), g(rng));
      at(c, -p) = std::conj(at(c, p));
      at(d, -p) = std::conj(at(d, p));
    }
  }

  cx& at(std::vector<cx>& v, int p) { return v[static_cast<std::size_t>(p + P)]; }
  cx at(const std::vector<cx>& v, int p) const { return v[static_cast<std::size_t>(p + P)]; }

  cx e(int p, double t) const { return at(a, p) * t * t + at(b, p) * t * t * t; }
  cx de(int p, double t) const { return 2.0 * at(a, p) * t + 3.0 * at(b, p) * t * t; }
  cx n(int p, double t) const { return at(c, p) * t * t + at(d, p) * t * t * t; }
  cx dn(int p, double t) const { return 2.0 * at(c, p) * t + 3.0 * at(d, p) * t * t; }
  cx d2n(int p, double t) const { return 2.0 * at(c, p) + 6.0 * at(d, p) * t; }

  // The linear rows applied analytically: f from the Schroedinger row at
  // every p (including the mean), g from the wave row.
  ForcingTrajectory forcing(int k, double m, cx E, double dt, std::size_t nsamp) const {
    ForcingTrajectory F;
    F.dt = dt;
    F.samples.resize(nsamp);
    const double kd = k;
    const cx I(0.0, 1.0);
    for (std::size_t i = 0; i < nsamp; ++i) {
      const double t = dt * static_cast<double>(i);
      FourierField f(P, false), f_t(P, false), g(P, true);
      for (int p = -P; p <= P; ++p) {
        const double alpha = m * p - kd * kd * p * p;
        f.at(p) = I * de(p, t) + alpha * e(p, t) - E * n(p, t);
        f_t.at(p) =
            I * (2.0 * at(a, p) + 6.0 * at(b, p) * t) + alpha * de(p, t) - E * dn(p, t);
        g.at(p) = d2n(p, t) + kd * kd * p * p * n(p, t) +
                  kd * kd * p * p * (std::conj(E) * e(p, t) + E * std::conj(e(-p, t)));
      }
      g.at(0) = cx(0.0, 0.0);  // n has zero mean, so the wave row does too
      F.samples[i].f = std::move(f);
      F.samples[i].f_t = std::move(f_t);
      F.samples[i].g = std::move(g);
    }
    return F;
  }
};

}  // namespace

TEST_CASE("manufactured polynomial solution is recovered") {
  std::mt19937_64 rng(29);
  const int k = 32, P = 6;
  const cx E(0.8, 0.4);
  const auto mc = resonant_m(k, Rational(1, 1));
  const auto rep = spectrum_for(k, E);
  const double T = 0.4;
  const auto grid = make_grid(k, E, T, 0.004);

  const Manufactured mf(rng, P, 3);
  const auto F = mf.forcing(k, mc.m, E, grid.dt, grid.n);
  const auto u = apply_linear_inverse(k, mc.m, E, P, rep, F);

  double sup_err_e = 0.0, sup_ref_e = 0.0, sup_err_n = 0.0, sup_ref_n = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.dt * static_cast<double>(i);
    for (int p = -P; p <= P; ++p) {
      sup_err_e = std::max(sup_err_e, std::abs(u.samples[i].e.at(p) - mf.e(p, t)));
      sup_ref_e = std::max(sup_ref_e, std::abs(mf.e(p, t)));
      sup_err_n = std::max(sup_err_n, std::abs(u.samples[i].n.at(p) - mf.n(p, t)));
      sup_ref_n = std::max(sup_ref_n, std::abs(mf.n(p, t)));
    }
  }
  CHECK(sup_err_e <= 1e-6 * sup_ref_e);
  CHECK(sup_err_n <= 1e-6 * sup_ref_n);
}

TEST_CASE("solver is linear and causal; the g mean is enforced") {
  std::mt19937_64 rng(31);
  const int k = 16, P = 4;
  const cx E(1.0, 0.0);
  const auto mc = resonant_m(k, Rational(1, 1));
  const auto rep = spectrum_for(k, E);
  const auto grid = make_grid(k, E, 0.3);

  auto random_forcing = [&](void) {
    ForcingTrajectory F;
    F.dt = grid.dt;
    F.samples.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      F.samples[i].f = zlab::testing::random_field(rng, P, false);
      F.samples[i].f_t = FourierField(P, false);
      F.samples[i].g = zlab::testing::random_field(rng, P, true);
      F.samples[i].g.at(0) = cx(0.0, 0.0);
    }
    return F;
  };

  const auto F = random_forcing();
  const auto G = random_forcing();
  // Real scalars: complex ones would destroy the reality of g and leave the
  // operator's domain.
  const cx al(0.3, 0.0), be(-0.7, 0.0);

  ForcingTrajectory comb = F;
  for (std::size_t i = 0; i < grid.n; ++i) {
    comb.samples[i].f = al * F.samples[i].f + be * G.samples[i].f;
    comb.samples[i].f_t = al * F.samples[i].f_t + be * G.samples[i].f_t;
    auto g = al * F.samples[i].g + be * G.samples[i].g;
    g.set_real_flag(true);
    comb.samples[i].g = g;
  }

  const auto uF = apply_linear_inverse(k, mc.m, E, P, rep, F);
  const auto uG = apply_linear_inverse(k, mc.m, E, P, rep, G);
  const auto uC = apply_linear_inverse(k, mc.m, E, P, rep, comb);

  double sup = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i)
    for (int p = -P; p <= P; ++p) {
      const cx lin = al * uF.samples[i].e.at(p) + be * uG.samples[i].e.at(p);
      sup = std::max(sup, std::abs(uC.samples[i].e.at(p) - lin));
      ref = std::max(ref, std::abs(lin));
      const cx linn = al * uF.samples[i].n.at(p) + be * uG.samples[i].n.at(p);
      sup = std::max(sup, std::abs(uC.samples[i].n.at(p) - linn));
    }
  CHECK(sup <= 1e-9 * ref);

  // Causality: zeroing the forcing after t* leaves [0, t*] untouched.
  ForcingTrajectory trunc = F;
  const std::size_t icut = grid.n / 2;
  for (std::size_t i = icut; i < grid.n; ++i) {
    trunc.samples[i].f = FourierField(P, false);
    trunc.samples[i].f_t = FourierField(P, false);
    trunc.samples[i].g = FourierField(P, true);
  }
  const auto uT = apply_linear_inverse(k, mc.m, E, P, rep, trunc);
  double dcut = 0.0;
  for (std::size_t i = 0; i < icut; ++i)
    for (int p = -P; p <= P; ++p)
      dcut = std::max({dcut, std::abs(uT.samples[i].e.at(p) - uF.samples[i].e.at(p)),
                       std::abs(uT.samples[i].n.at(p) - uF.samples[i].n.at(p))});
  CHECK(dcut == 0.0);

  // A nonzero g mean is rejected.
  ForcingTrajectory bad = F;
  bad.samples[3].g.at(0) = cx(1e-3, 0.0);
  CHECK_THROWS_AS((void)apply_linear_inverse(k, mc.m, E, P, rep, bad), NonzeroMeanForcing);
}

TEST_CASE("discrete residual at grid midpoints via Hermite interpolation") {
  std::mt19937_64 rng(37);
  const int k = 32, P = 5;
  const cx E(1.0, 0.2);
  const auto mc = resonant_m(k, Rational(1, 1));
  const auto rep = spectrum_for(k, E);
  const auto grid = make_grid(k, E, 0.25);

  ForcingTrajectory F;
  F.dt = grid.dt;
  F.samples.resize(grid.n);
  std::vector<std::vector<cx>> fs(static_cast<std::size_t>(2 * P + 1)),
      gs(static_cast<std::size_t>(2 * P + 1));
  for (auto& v : fs) v = smooth_samples(rng, grid.n, grid.dt, 1.5 * k, 0.8);
  for (auto& v : gs) v = smooth_samples(rng, grid.n, grid.dt, 1.5 * k, 0.8);
  for (std::size_t i = 0; i < grid.n; ++i) {
    FourierField f(P, false), g(P, true);
    for (int p = -P; p <= P; ++p) f.at(p) = fs[static_cast<std::size_t>(p + P)][i];
    for (int p = 1; p <= P; ++p) {
      g.at(p) = gs[static_cast<std::size_t>(p + P)][i];
      g.at(-p) = std::conj(g.at(p));
    }
    F.samples[i].f = std::move(f);
    F.samples[i].f_t = FourierField(P, false);
    F.samples[i].g = std::move(g);
  }

  const auto u = apply_linear_inverse(k, mc.m, E, P, rep, F);

  // The p = 1 block is checked as a pointwise midpoint residual (its fast
  // eigencontent is k^-4 suppressed).  For p >= 2 the grid deliberately
  // undersamples the Schroedinger phases (that is what the exponential
  // integrator is for), so no sampled-data interpolant can certify 1e-6
  // there; those rows are held to the quadrature-limited integral residual
  // here and to the 1e-6 RK-oracle equivalence in the block tests above.
  const double h = grid.dt;
  const cx I(0.0, 1.0);
  auto hermite_mid = [&](cx y0, cx y1, cx d0, cx d1) {
    return 0.5 * (y0 + y1) + h * (d0 - d1) / 8.0;
  };
  auto hermite_dmid = [&](cx y0, cx y1, cx d0, cx d1) {
    return 1.5 * (y1 - y0) / h - 0.25 * (d0 + d1);
  };

  {
    const int p = 1;
    const double alpha1 = mc.m - static_cast<double>(k) * k;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
      const auto& s0 = u.samples[i];
      const auto& s1 = u.samples[i + 1];
      const cx e_mid = hermite_mid(s0.e.at(p), s1.e.at(p), s0.e_t.at(p), s1.e_t.at(p));
      const cx de_mid = hermite_dmid(s0.e.at(p), s1.e.at(p), s0.e_t.at(p), s1.e_t.at(p));
      const cx n_mid = hermite_mid(s0.n.at(p), s1.n.at(p), s0.n_t.at(p), s1.n_t.at(p));
      const cx f_mid = 0.5 * (F.samples[i].f.at(p) + F.samples[i + 1].f.at(p));
      const cx resid = I * de_mid + alpha1 * e_mid - E * n_mid - f_mid;
      const double scale = std::abs(alpha1 * e_mid) + std::abs(f_mid) + std::abs(de_mid) +
                           std::abs(E) * std::abs(n_mid) + 1e-12;
      worst = std::max(worst, std::abs(resid) / scale);
    }
    CHECK(worst <= 1e-6);
  }

  // Interval-integrated residual for every p: the fast integrals int e,
  // int etilde are eliminated through the integrated Schroedinger rows, so
  // only the slow int n is quadratured (Simpson with Hermite midpoint).
  double worst_wave = 0.0;
  for (int p = 1; p <= P; ++p) {
    const double kd = k;
    const double w2 = kd * kd * p * p;
    const double alpha1 = mc.m * p - kd * kd * p * p;
    const double alpha2 = mc.m * p + kd * kd * p * p;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
      const auto& s0 = u.samples[i];
      const auto& s1 = u.samples[i + 1];
      const cx n_mid = hermite_mid(s0.n.at(p), s1.n.at(p), s0.n_t.at(p), s1.n_t.at(p));
      const cx int_n = h / 6.0 * (s0.n.at(p) + 4.0 * n_mid + s1.n.at(p));
      const cx int_f = h / 2.0 * (F.samples[i].f.at(p) + F.samples[i + 1].f.at(p));
      const cx int_ft =
          h / 2.0 * (-std::conj(F.samples[i].f.at(-p)) - std::conj(F.samples[i + 1].f.at(-p)));
      const cx int_g = h / 2.0 * (F.samples[i].g.at(p) + F.samples[i + 1].g.at(p));
      const cx de = s1.e.at(p) - s0.e.at(p);
      const cx det = std::conj(s1.e.at(-p)) - std::conj(s0.e.at(-p));
      const cx dnt = s1.n_t.at(p) - s0.n_t.at(p);
      const cx int_e = (int_f + E * int_n - I * de) / alpha1;
      const cx int_et = (int_ft - std::conj(E) * int_n - I * det) / alpha2;
      const cx resid = dnt + w2 * int_n + w2 * (std::conj(E) * int_e + E * int_et) - int_g;
      const double scale = std::abs(dnt) + w2 * std::abs(int_n) + w2 * std::abs(int_e) +
                           w2 * std::abs(int_et) + std::abs(int_g) + 1e-12;
      worst_wave = std::max(worst_wave, std::abs(resid) / scale);
    }
  }
  CHECK(worst_wave <= 1e-3);
}

TEST_CASE("growth bound: measured E2/F2 ratio is grid stable") {
  const int k = 64, P = 4, s = 1;
  const cx E(1.0, 0.0);
  const auto mc = resonant_m(k, Rational(1, 1));
  const auto rep = spectrum_for(k, E);
  const double sigma = rep.sigma;
  const double T = 0.5;

  auto run = [&](double factor) {
    const auto grid = make_grid(k, E, T, factor);
    ForcingTrajectory F;
    F.dt = grid.dt;
    F.samples.resize(grid.n);
    std::mt19937_64 rng_local(99);
    const auto base_f = zlab::testing::random_field(rng_local, P, false);
    auto base_g = zlab::testing::random_field(rng_local, P, true);
    base_g.at(0) = cx(0.0, 0.0);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double t = grid.dt * static_cast<double>(i);
      const cx env = std::exp(cx(2.0 * sigma * t, 0.5 * k * t));
      F.samples[i].f = env * base_f;
      F.samples[i].f_t = (cx(2.0 * sigma, 0.5 * k) * env) * base_f;
      auto g = env.real() * base_g;
      g.set_real_flag(true);
      F.samples[i].g = g;
    }
    const double fn = f2_norm(F, k, s, sigma);
    const auto u = apply_linear_inverse(k, mc.m, E, P, rep, F);
    return weighted_norms(u, k, s, sigma).E2 / fn;
  };

  const double c1_coarse = run(0.02);
  const double c1_fine = run(0.01);
  MESSAGE("measured C1 (coarse, fine): ", c1_coarse, " ", c1_fine);
  CHECK(std::isfinite(c1_coarse));
  CHECK(c1_coarse > 0.0);
  CHECK(std::abs(c1_fine / c1_coarse - 1.0) < 0.05);
}

TEST_CASE("p = 1 block obeys the forced growth envelope uniformly in k") {
  // Premise: k^{1/2}|f1| + k^{-1/2}|dt f1| + k^{-3/4}|g1| <= K e^{2 sigma t};
  // conclusion: k|e1| + |dt e1| <= C K e^{2 sigma t} with C bounded and
  // non-increasing along k = 64, 128, 256.
  std::vector<double> cs;
  for (int k : {64, 128, 256}) {
    const cx E(1.0, 0.0);
    const auto rep = spectrum_for(k, E);
    const double sigma = rep.sigma;
    const double T = 1.0;
    const auto grid = make_grid(k, E, T, 0.02);
    const double kd = k;

    ForcingBlock fb;
    fb.p = 1;
    fb.f.resize(grid.n);
    fb.ft.resize(grid.n);
    fb.g.resize(grid.n);
    double K = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double t = grid.dt * static_cast<double>(i);
      const cx env = std::exp(cx(2.0 * sigma * t, 0.3 * kd * t));
      fb.f[i] = std::pow(kd, -0.5) * env;
      fb.ft[i] = 0.5 * std::pow(kd, -0.5) * env;
      fb.g[i] = 0.4 * std::pow(kd, 0.75) * env.real();
      const double fmag = std::hypot(std::abs(fb.f[i]), std::abs(fb.ft[i]));
      const double dfmag = std::abs(cx(2.0 * sigma, 0.3 * kd)) * fmag;
      const double prem = (std::sqrt(kd) * fmag + dfmag / std::sqrt(kd) +
                           std::pow(kd, -0.75) * std::abs(fb.g[i])) *
                          std::exp(-2.0 * sigma * t);
      K = std::max(K, prem);
    }
    const auto out = solve_unstable_block(rep, fb, grid.dt);
    double c = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double t = grid.dt * static_cast<double>(i);
      c = std::max(c, (kd * std::abs(out.e[i]) + std::abs(out.e_t[i])) *
                          std::exp(-2.0 * sigma * t));
    }
    cs.push_back(c / K);
  }
  MESSAGE("measured envelope constants: ", cs[0], " ", cs[1], " ", cs[2]);
  CHECK(cs[1] <= 1.10 * cs[0]);
  CHECK(cs[2] <= 1.10 * cs[1]);
}
