#pragma once

#include <iosfwd>
#include <optional>

#include "zlab/linear_solver.hpp"
#include "zlab/unstable_mode.hpp"

namespace zlab {

// Symmetric bilinear form behind the quadratic nonlinearity:
//   f = (n_u e_v + n_v e_u) / 2,
//   g = k^2 d2/dtheta2 Re(conj(e_u) e_v),
// so that bilinear(U, U) is exactly the quadratic term (n e, k^2 d2 |e|^2)
// and the g mean vanishes identically.  f_t is assembled from the samples'
// stored derivatives.
ForcingSample bilinear_forcing(const TrajectorySample& u, const TrajectorySample& v, int k);
ForcingSample quadratic_forcing(const TrajectorySample& u, int k);

// Whole-trajectory versions; the result's shift rate is the sum of the
// factors' (products of shifted values are (2 shift)-shifted values).
ForcingTrajectory bilinear_forcing(const Trajectory& u, const Trajectory& v, int k);
ForcingTrajectory quadratic_forcing(const Trajectory& u, int k);

// Time-weighted norms.  E1 uses the e^{-sigma t} weight, E2 and F2 the
// e^{-2 sigma t} weight, with the k-power ladder on |ehat_1|, its derivative,
// the remainder e' = e - ehat_1 e^{i theta}, n and their derivatives.  The
// suprema are evaluated in log space so shifted (large sigma T) runs stay
// finite; the plain fields may be +inf in extreme cases, the log_* fields
// are always meaningful.
struct WeightedNorms {
  double E1 = 0.0, E2 = 0.0, F2 = 0.0;
  double log_E1 = 0.0, log_E2 = 0.0, log_F2 = 0.0;
  double sigma = 0.0;
  int k = 0;
  int s = 1;
};

WeightedNorms weighted_norms(const Trajectory& u, int k, int s, double sigma);
double f2_norm(const ForcingTrajectory& f, int k, int s, double sigma);
double e1_norm(const Trajectory& u, int k, int s, double sigma);

// Picard iteration for L_k u = delta N_k(U^a + u) with vanishing data.
struct PicardOptions {
  double tol = 1e-8;  // relative E1 increment
  int max_iters = 50;
  double c0 = 0.05;  // smallness threshold for delta k^{-1/4} e^{sigma T}
  double shift_threshold = 30.0;  // store e^{-sigma t}-scaled values once sigma T exceeds this
  LinearSolveOptions linear{.stable = {.substep_factor = 0.1}, .parallel_blocks = true};
};

struct PicardResult {
  Trajectory u;
  std::vector<double> iterate_e1;    // E1 of u after each iteration
  std::vector<double> increment_e1;  // E1 of u_{m+1} - u_m
  int iterations = 0;
  bool smallness_ok = true;
  double smallness_value = 0.0;  // delta k^{-1/4} e^{sigma T}
};

// Throws NoConvergence when the increment fails to contract within the
// iteration budget; a violated smallness condition is a warning in the
// result, not an error.
PicardResult picard_solve(const ZakharovConfig& cfg, const UnstableMode& mode, double delta,
                          double T, const PicardOptions& opts = {});

// Direct split-step integrator for the full quadratic system: each harmonic
// pair advanced by its exact 4x4 block propagator (the instability lives in
// the linear step), the genuinely quadratic terms applied as a Strang
// half-kick (pointwise phase rotation of e plus the |e|^2 source in dt n).
struct EvolveResult {
  Trajectory traj;
  std::optional<double> blowup_time;  // set when a norm crossed the ceiling
};

// record_stride > 1 stores only every record_stride-th step (the trajectory
// then has dt * record_stride between samples).
EvolveResult evolve_direct(const ZakharovConfig& cfg, const StateU& state0, double T, double dt,
                           double norm_ceiling = 1e12, int record_stride = 1);

// Scalar diagnostics per sample; log_sinh_fit = log(l2_n / sqrt(pi)) is the
// quantity to fit against log(c sinh(sigma t)).
struct NormTraceRow {
  double t = 0.0;
  double l2_n = 0.0, hs_n = 0.0, hs_e = 0.0;
  double log_sinh_fit = 0.0;
  double e1_partial = 0.0;
};

struct NormTrace {
  int k = 0;
  int s = 1;
  double sigma = 0.0;
  std::vector<NormTraceRow> rows;
};

NormTrace norm_trace(const Trajectory& tr, int k, int s, double sigma);
void norm_trace_to_csv(const NormTrace& nt, std::ostream& os);

}  // namespace zlab
