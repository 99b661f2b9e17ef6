#pragma once

#include <span>
#include <vector>

#include "zlab/dispersion.hpp"
#include "zlab/state.hpp"

namespace zlab {

// Forcing of one harmonic block on the shared uniform grid.  For harmonic p:
// f = fhat_p, ft = ftilde_p = -conj(fhat_{-p}), g = ghat_p.  When the parent
// trajectory carries a shift rate these samples are the shifted values.
struct ForcingBlock {
  int p = 0;
  std::vector<cx> f;
  std::vector<cx> ft;
  std::vector<cx> g;
};

// Solution samples of one block, with time derivatives taken from the block
// ODE.  Arrays are indexed by grid node.
struct BlockSolveResult {
  std::vector<cx> e, e_t;    // ehat_p
  std::vector<cx> et, et_t;  // etilde_p
  std::vector<cx> n, n_t;    // nhat_p (empty for p = 0)
};

// Mean mode, zero data: cumulative integral of the given samples by the
// exponential-trapezoid rule (plain trapezoid when shift_rate = 0).
std::vector<cx> integrate_mean_mode(std::span<const cx> samples, double dt,
                                    double shift_rate = 0.0);

// p = 1 block with vanishing initial data via the eigen-decomposed Duhamel
// integral, one exponential-trapezoid recurrence per eigendirection; exact
// for forcing that is piecewise linear on the grid.
BlockSolveResult solve_unstable_block(const SpectrumReport& rep, const ForcingBlock& forcing,
                                      double dt, double shift_rate = 0.0);

struct StableBlockOptions {
  int sweeps = 2;               // Gauss-Seidel passes over the coupling per substep
  double substep_factor = 0.01;  // substep <= factor / ((k|E|+1) p^p_power)
  double p_power = 2.0;
  int max_substeps = 4096;      // per grid interval
};

// p >= 2 block, vanishing initial data: integrating-factor scheme with the
// exact Schroedinger phases and the exact wave kernel; the cross coupling is
// handled by fixed-point sweeps within each substep.
BlockSolveResult solve_stable_block(int k, double m, cx E, int p, const ForcingBlock& forcing,
                                    double dt, double shift_rate = 0.0,
                                    const StableBlockOptions& opts = {});

struct LinearSolveOptions {
  StableBlockOptions stable;
  bool parallel_blocks = true;
};

// L_k^{-1} F with vanishing initial data: mean mode in closed form, p = 1 by
// the spectral Duhamel solver, p >= 2 by the integrating-factor scheme;
// blocks (p, -p) reassembled through etilde_p = conj(ehat_{-p}) and the
// reality of n.  Throws NonzeroMeanForcing when the g mean does not vanish
// and propagates ClassificationError from the p = 1 spectrum.
Trajectory apply_linear_inverse(int k, double m, cx E, int truncation,
                                const SpectrumReport& rep, const ForcingTrajectory& forcing,
                                const LinearSolveOptions& opts = {});

// Extract the harmonic-p forcing block from field-valued forcing samples.
ForcingBlock forcing_block_of(const ForcingTrajectory& forcing, int p);

}  // namespace zlab
