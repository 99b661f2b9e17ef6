#include "zlab/unstable_mode.hpp"

#include <cmath>

#include "zlab/errors.hpp"

namespace zlab {

UnstableMode::UnstableMode(const SpectrumReport& rep, int truncation)
    : rep_(rep), trunc_(truncation) {
  if (truncation < 1) throw Error("UnstableMode: truncation must cover |p| = 1");
}

Eigen::Vector4cd UnstableMode::v1(double t) const {
  const cx I(0.0, 1.0);
  return 0.25 * (std::exp(I * rep_.lambda[3] * t) * rep_.r[3] -
                 std::exp(I * rep_.lambda[2] * t) * rep_.r[2]);
}

Eigen::Vector4cd UnstableMode::v1_dot(double t) const {
  const cx I(0.0, 1.0);
  return 0.25 * (I * rep_.lambda[3] * std::exp(I * rep_.lambda[3] * t) * rep_.r[3] -
                 I * rep_.lambda[2] * std::exp(I * rep_.lambda[2] * t) * rep_.r[2]);
}

TrajectorySample UnstableMode::sample(double t, double shift_rate) const {
  const cx I(0.0, 1.0);
  const cx g3 = std::exp((I * rep_.lambda[2] - shift_rate) * t);
  const cx g4 = std::exp((I * rep_.lambda[3] - shift_rate) * t);
  const Eigen::Vector4cd V = 0.25 * (g4 * rep_.r[3] - g3 * rep_.r[2]);
  const Eigen::Vector4cd dV =
      0.25 * (I * rep_.lambda[3] * g4 * rep_.r[3] - I * rep_.lambda[2] * g3 * rep_.r[2]);
  const double k = static_cast<double>(rep_.k);

  TrajectorySample s;
  s.e = FourierField(trunc_, false);
  s.e_t = FourierField(trunc_, false);
  s.n = FourierField(trunc_, true);
  s.n_t = FourierField(trunc_, true);
  s.e.at(1) = V(0);
  s.e.at(-1) = std::conj(V(1));
  s.e_t.at(1) = dV(0);
  s.e_t.at(-1) = std::conj(dV(1));
  s.n.at(1) = V(2);
  s.n.at(-1) = std::conj(V(2));
  const cx nt = I * k * V(3);
  s.n_t.at(1) = nt;
  s.n_t.at(-1) = std::conj(nt);
  return s;
}

StateU UnstableMode::state(double t) const {
  const TrajectorySample s = sample(t, 0.0);
  StateU u;
  u.e = s.e;
  u.n = s.n;
  u.n_t = s.n_t;
  u.t = t;
  return u;
}

Trajectory UnstableMode::trajectory(double dt, std::size_t n_samples, double shift_rate) const {
  Trajectory tr;
  tr.dt = dt;
  tr.shift_rate = shift_rate;
  tr.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    tr.samples.push_back(sample(dt * static_cast<double>(i), shift_rate));
  return tr;
}

}  // namespace zlab
