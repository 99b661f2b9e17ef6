#include "zlab/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cassert>
#include <cmath>

#include "zlab/errors.hpp"

namespace zlab {

cx dispersion_det0(const SymbolPoint& pt) {
  // Fully factored difference-of-squares form with |xi|^2 + zeta grouped
  // first; near the double root (zeta = -|xi| - |xi|^2, tau = |xi|) the
  // plain (|xi|^4 - (tau+zeta)^2) arrangement loses most digits.
  const double axi = std::abs(pt.xi);
  const double a = axi * axi;  // |xi|^2
  const cx f1 = axi - pt.tau;
  const cx f2 = axi + pt.tau;
  const cx f3 = (a - pt.zeta) - pt.tau;
  const cx f4 = (a + pt.zeta) + pt.tau;
  return f1 * f2 * f3 * f4;
}

cx dispersion_det(const SymbolPoint& pt) {
  const double b = pt.xi * pt.xi * pt.xi * pt.xi;
  return dispersion_det0(pt) - 2.0 * pt.e_amp2 * b;
}

std::array<double, 4> tau_quartic_coeffs(double zeta, double xi, double e_amp2) {
  const double a = xi * xi;
  const double b = a * a;
  // (a - tau^2)(b - (tau+zeta)^2) - 2|E|^2 b
  //  = tau^4 + 2 zeta tau^3 + (zeta^2 - a - b) tau^2 - 2 a zeta tau
  //    + a b - a zeta^2 - 2|E|^2 b
  return {a * b - a * zeta * zeta - 2.0 * e_amp2 * b,  // tau^0
          -2.0 * a * zeta,                             // tau^1
          zeta * zeta - a - b,                         // tau^2
          2.0 * zeta};                                 // tau^3
}

namespace {

cx quartic_eval(const std::array<double, 4>& c, cx t) {
  return (((t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
}

cx quartic_deriv(const std::array<double, 4>& c, cx t) {
  return ((4.0 * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1];
}

}  // namespace

std::array<cx, 4> tau_roots(double zeta, double xi, double e_amp2) {
  assert(xi != 0.0 && "tau_roots: xi must be nonzero");
  const auto c = tau_quartic_coeffs(zeta, xi, e_amp2);

  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  for (int i = 0; i < 4; ++i) comp(i, 3) = -c[static_cast<std::size_t>(i)];
  const Eigen::Vector4cd ev = Eigen::EigenSolver<Eigen::Matrix4d>(comp, false).eigenvalues();

  std::array<cx, 4> roots;
  for (int i = 0; i < 4; ++i) {
    cx t = ev(i);
    const cx d = quartic_deriv(c, t);
    if (std::abs(d) > 0.0) t -= quartic_eval(c, t) / d;  // one Newton polish
    roots[static_cast<std::size_t>(i)] = t;
  }

  // Restore exact conjugate pairing after the polish.
  std::array<bool, 4> used{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (used[i] || roots[i].imag() == 0.0) continue;
    std::size_t best = i;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i || used[j]) continue;
      const double d = std::abs(roots[j] - std::conj(roots[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best != i) {
      const cx avg = 0.5 * (roots[i] + std::conj(roots[best]));
      roots[i] = avg;
      roots[best] = std::conj(avg);
      used[i] = used[best] = true;
    }
  }
  return roots;
}

Eigen::Matrix4cd mode_matrix(int k, double m, cx E, int p) {
  if (k < 1) throw ConfigError("mode_matrix: k must be >= 1");
  if (p < 1) throw ConfigError("mode_matrix: p must be >= 1");
  const double kd = static_cast<double>(k);
  const double pd = static_cast<double>(p);
  const double kp = kd * pd;
  Eigen::Matrix4cd A = Eigen::Matrix4cd::Zero();
  A(0, 0) = m * pd - kd * kd * pd * pd;
  A(0, 2) = -E;
  A(1, 1) = m * pd + kd * kd * pd * pd;
  A(1, 2) = std::conj(E);
  A(2, 3) = kp;
  A(3, 0) = kp * std::conj(E);
  A(3, 1) = kp * E;
  A(3, 2) = kp;
  return A;
}

Eigensystem4 block_eigensystem(const Eigen::Matrix4cd& A) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es_r(A, true);
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es_l(A.transpose(), true);
  if (es_r.info() != Eigen::Success || es_l.info() != Eigen::Success)
    throw Error("block_eigensystem: eigensolver failed");

  Eigensystem4 sys;
  sys.right = es_r.eigenvectors();
  for (int i = 0; i < 4; ++i) sys.lambda[static_cast<std::size_t>(i)] = es_r.eigenvalues()(i);

  // Pair left eigenvectors (right eigenvectors of A^T) to the right set by
  // eigenvalue proximity.
  std::array<bool, 4> used{};
  for (int i = 0; i < 4; ++i) {
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int j = 0; j < 4; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(es_l.eigenvalues()(j) - sys.lambda[static_cast<std::size_t>(i)]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    sys.left.row(i) = es_l.eigenvectors().col(best).transpose();
  }
  return sys;
}

SpectrumReport analyze_spectrum(const Eigen::Matrix4cd& A, int k, double m, cx E) {
  const Eigensystem4 sys = block_eigensystem(A);

  double scale = 0.0;
  for (const auto& lam : sys.lambda) scale = std::max(scale, std::abs(lam));
  const double real_tol = 1e-9 * scale;

  std::vector<int> re_idx, im_idx;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(sys.lambda[static_cast<std::size_t>(i)].imag()) <= real_tol)
      re_idx.push_back(i);
    else
      im_idx.push_back(i);
  }
  if (re_idx.size() != 2 || im_idx.size() != 2)
    throw ClassificationError(
        "analyze_spectrum: expected two real eigenvalues and one conjugate "
        "pair (k below instability threshold, or E = 0)");

  // lambda3: maximal imaginary part; lambda4 must be its conjugate.
  int i3 = im_idx[0], i4 = im_idx[1];
  if (sys.lambda[static_cast<std::size_t>(i3)].imag() <
      sys.lambda[static_cast<std::size_t>(i4)].imag())
    std::swap(i3, i4);
  const cx l3 = sys.lambda[static_cast<std::size_t>(i3)];
  const cx l4 = sys.lambda[static_cast<std::size_t>(i4)];
  if (std::abs(l4 - std::conj(l3)) > 1e-7 * scale)
    throw ClassificationError("analyze_spectrum: complex eigenvalues are not conjugate");

  // lambda1: the real eigenvalue of larger magnitude; tie is a failure.
  int i1 = re_idx[0], i2 = re_idx[1];
  const double a1 = std::abs(sys.lambda[static_cast<std::size_t>(i1)]);
  const double a2 = std::abs(sys.lambda[static_cast<std::size_t>(i2)]);
  if (std::abs(a1 - a2) <= 1e-12 * scale)
    throw ClassificationError("analyze_spectrum: real eigenvalues tie in magnitude");
  if (a2 > a1) std::swap(i1, i2);

  SpectrumReport rep;
  rep.A = A;
  rep.k = k;
  rep.m = m;
  rep.E = E;
  const std::array<int, 4> order = {i1, i2, i3, i4};
  for (int j = 0; j < 4; ++j) {
    const int i = order[static_cast<std::size_t>(j)];
    rep.lambda[static_cast<std::size_t>(j)] = sys.lambda[static_cast<std::size_t>(i)];
    rep.r[static_cast<std::size_t>(j)] = sys.right.col(i);
    rep.l[static_cast<std::size_t>(j)] = sys.left.row(i).transpose();
  }
  rep.sigma = rep.lambda[2].imag();

  // r3, r4 carry the third component normalized to exactly one.
  for (int j : {2, 3}) {
    const cx third = rep.r[static_cast<std::size_t>(j)](2);
    if (std::abs(third) < 1e-12)
      throw ClassificationError("analyze_spectrum: vanishing third eigenvector component");
    rep.r[static_cast<std::size_t>(j)] /= third;
    rep.r[static_cast<std::size_t>(j)](2) = cx(1.0, 0.0);
  }

  for (int j = 0; j < 4; ++j) {
    const auto& lv = rep.l[static_cast<std::size_t>(j)];
    const auto& rv = rep.r[static_cast<std::size_t>(j)];
    const cx pairing = (lv.transpose() * rv)(0, 0);
    if (std::abs(pairing) < 1e-6 * lv.norm() * rv.norm())
      rep.warnings.push_back("near-defective eigenpair " + std::to_string(j + 1));
  }
  return rep;
}

Eigen::Vector4cd propagate(const SpectrumReport& rep, double t, const Eigen::Vector4cd& phi) {
  Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
  for (int j = 0; j < 4; ++j) {
    const auto& lv = rep.l[static_cast<std::size_t>(j)];
    const auto& rv = rep.r[static_cast<std::size_t>(j)];
    const cx num = (lv.transpose() * phi)(0, 0);
    const cx den = (lv.transpose() * rv)(0, 0);
    out += std::exp(cx(0.0, 1.0) * rep.lambda[static_cast<std::size_t>(j)] * t) * (num / den) * rv;
  }
  return out;
}

double growth_rate(int k, cx E, const Rational& z) {
  const ModeChoice mc = resonant_m(k, z);
  return analyze_spectrum(mode_matrix(k, mc.m, E), k, mc.m, E).sigma;
}

int discover_k0(cx E, const Rational& z, int k_max) {
  for (int k = 1; k <= k_max; ++k) {
    try {
      (void)growth_rate(k, E, z);
      return k;
    } catch (const ClassificationError&) {
    }
  }
  throw ClassificationError("discover_k0: no unstable k found up to k_max");
}

std::array<cx, 4> char_poly_coeffs(const Eigen::Matrix4cd& A) {
  // Faddeev-LeVerrier: M_{j+1} = A (M_j + c_{4-j} I).
  const Eigen::Matrix4cd I = Eigen::Matrix4cd::Identity();
  std::array<cx, 4> c;
  Eigen::Matrix4cd M = A;
  cx cj = -M.trace();
  c[3] = cj;
  for (int j = 2; j >= 0; --j) {
    M = A * (M + cj * I);
    cj = -M.trace() / static_cast<double>(4 - j);
    c[static_cast<std::size_t>(j)] = cj;
  }
  return c;
}

}  // namespace zlab
