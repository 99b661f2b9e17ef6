#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "zlab/fourier.hpp"

namespace zlab {

// Perturbation state (e, n, dt n) at one time.  n and n_t are real fields;
// all three share one truncation.
struct StateU {
  FourierField e;
  FourierField n;
  FourierField n_t;
  double t = 0.0;

  static StateU zero(int truncation, double t = 0.0);
  void validate() const;  // reality flags, shared truncation
};

// One time sample of a trajectory: values and time derivatives taken from
// the equation (never from finite differences).
struct TrajectorySample {
  FourierField e, e_t;
  FourierField n, n_t;
};

// Uniformly sampled trajectory.  When shift_rate is nonzero the stored
// fields are e^{-shift_rate * t} times the true values (and stored
// derivatives are e^{-shift_rate*t} times the true derivatives); this keeps
// exponentially growing runs inside double range and norms are then taken
// in log space.
struct Trajectory {
  double dt = 0.0;
  double shift_rate = 0.0;
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return dt * static_cast<double>(i); }
  int truncation() const;

  // True-value state at sample i (rescales when shift_rate != 0).
  StateU state_at(std::size_t i) const;
};

Trajectory zero_trajectory(int truncation, double dt, std::size_t n_samples,
                           double shift_rate = 0.0);

// Sample-wise sum/difference; both inputs must share grid and shift.
Trajectory traj_add(const Trajectory& a, const Trajectory& b);
Trajectory traj_sub(const Trajectory& a, const Trajectory& b);

// Multiply every stored field by e^{(old_shift - new_shift) * t_i} so the
// represented true values are unchanged.
Trajectory with_shift_rate(const Trajectory& tr, double new_shift);

// Right-hand-side samples (f complex, g real) with the time derivative of f
// carried for the weighted-norm layer.
struct ForcingSample {
  FourierField f, f_t;
  FourierField g;
};

struct ForcingTrajectory {
  double dt = 0.0;
  double shift_rate = 0.0;
  std::vector<ForcingSample> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return dt * static_cast<double>(i); }
  int truncation() const;
};

ForcingTrajectory forcing_with_shift_rate(const ForcingTrajectory& f, double new_shift);

// CSV rows (t, p, re/im of e, e_t, n, n_t); RFC-4180, LF endings.
void trajectory_to_csv(const Trajectory& tr, std::ostream& os);

}  // namespace zlab
