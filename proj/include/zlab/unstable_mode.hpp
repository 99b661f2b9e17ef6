#pragma once

#include "zlab/dispersion.hpp"
#include "zlab/state.hpp"

namespace zlab {

/// The closed-form growing solution of the homogeneous linear system,
/// supported on the harmonics +-1:
///   V1(t) = (1/4) (e^{it lambda4} r4 - e^{it lambda3} r3),
/// so n(t, theta) = sinh(t sigma) cos(t Re lambda3 + theta) and the e
/// coefficients carry one growing (e^{t sigma}) and one decaying branch.
class UnstableMode {
 public:
  UnstableMode(const SpectrumReport& rep, int truncation);

  const SpectrumReport& spectrum() const { return rep_; }
  double sigma() const { return rep_.sigma; }
  int truncation() const { return trunc_; }

  // V1(t) and its time derivative.
  Eigen::Vector4cd v1(double t) const;
  Eigen::Vector4cd v1_dot(double t) const;

  StateU state(double t) const;

  // Field sample with derivatives; stored values scaled by e^{-shift_rate*t}.
  TrajectorySample sample(double t, double shift_rate = 0.0) const;

  Trajectory trajectory(double dt, std::size_t n_samples, double shift_rate = 0.0) const;

  // Branch coefficients e^a_{+-1,+-} of the e expansion
  // ehat_{+-1}(t) = (c_plus e^{t sigma} + c_minus e^{-t sigma}) e^{it Re lambda3}.
  cx e_plus1_growing() const { return 0.25 * rep_.r[3](0); }
  cx e_plus1_decaying() const { return -0.25 * rep_.r[2](0); }
  cx e_minus1_growing() const { return std::conj(0.25 * rep_.r[3](1)); }
  cx e_minus1_decaying() const { return std::conj(-0.25 * rep_.r[2](1)); }

 private:
  SpectrumReport rep_;
  int trunc_;
};

}  // namespace zlab
