#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "zlab/nonlinear.hpp"

namespace zlab {

using ordered_json = nlohmann::ordered_json;

// Run-level configuration; parsed from a JSON file plus command-line
// overrides.  delta_rule is either the theorem scaling "k^-(2s+2)" or
// "explicit" with delta_explicit set.
struct ExperimentConfig {
  std::vector<int> k_list{32, 64, 128};
  Rational Z{1, 1};
  cx E{1.0, 0.0};
  int s = 1;
  double c0 = 0.05;
  std::string delta_rule = "k^-(2s+2)";
  double delta_explicit = 0.0;
  int truncation = 16;
  double grid_dt_factor = 0.005;
  double growth_delta = 1e-10;
  std::string out_dir = "out";
  double norm_ceiling = 1e12;
  std::uint64_t seed = 12345;
  bool oracle = false;

  double delta_for(int k) const;
  ZakharovConfig zakharov_for(int k) const;
  void validate() const;
};

ExperimentConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const ExperimentConfig& cfg);

ordered_json to_json(const FourierField& v);        // {truncation, is_real, coeffs: [[re,im],...]}
FourierField fourier_field_from_json(const ordered_json& j);
ordered_json to_json(const SpectrumReport& rep);    // documented field names, complex as [re,im]

// ---- dispersion audit ----

struct DispersionRow {
  int k = 0;
  double m = 0.0, m_prime = 0.0;
  std::array<cx, 4> lambda{};
  double sigma = 0.0;
  double ratio_l1 = 0.0, ratio_l2 = 0.0, ratio_re_l3 = 0.0, ratio_sigma = 0.0;
  double max_eig_residual = 0.0;   // ||A r - lambda r|| / (||A|| ||r||)
  double max_root_residual = 0.0;  // |P(tau*)| / scale over tau_roots
  double max_identity_err = 0.0;   // relative error of the factored determinant identity
  std::string error;               // nonempty when classification failed
};

struct DispersionAudit {
  std::vector<DispersionRow> rows;
  double slope_sigma = 0.0;    // d log sigma / d log k
  double slope_lambda1 = 0.0;  // d log |lambda1| / d log k
  std::vector<std::string> warnings;
};

DispersionAudit run_dispersion_audit(const ExperimentConfig& cfg);

// ---- growth-rate fit ----

struct GrowthFit {
  int k = 0;
  double sigma = 0.0;
  double gamma_linear = 0.0;  // sinh-model fit on the closed-form mode
  double gamma_direct = 0.0;  // same fit on the nonlinear run at growth_delta
  double window_lo = 0.0, window_hi = 0.0;
  bool blowup_shrunk_window = false;
  std::string error;
};

GrowthFit run_growth_fit(const ExperimentConfig& cfg, int k);

// Least-squares fit of log y against log(c sinh(gamma t)) over [t_lo, t_hi].
double fit_sinh_rate(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                     double t_hi, double gamma_lo, double gamma_hi);

// ---- theorem reproduction ----

struct TheoremRow {
  int k = 0;
  double sigma = 0.0;
  double T_k = 0.0;
  double delta = 0.0;
  double initial_hs = 0.0;    // H^s of (e, n, dt n)(0) in the (z, x) variables
  double terminal_l2 = 0.0;   // ||n(T_k)||_{L2} in the (z, x) variables
  double amplification = 0.0;
  double cross_residual = 0.0;  // relative E1 distance, Picard vs direct
  int picard_iterations = 0;
  bool verified = false;
  double oracle_refinement_drift = 0.0;  // filled with --oracle
  std::string error;
};

struct TheoremTable {
  std::vector<TheoremRow> rows;
  std::vector<std::string> warnings;
};

TheoremTable run_theorem(const ExperimentConfig& cfg);

// Norms in the (z, x) variables: the theta harmonic p sits at the
// (z, x)-frequency (-m p, k p); meas T = (2 pi Z)(2 pi).
double zx_l2_norm(const FourierField& v, const Rational& z);
double zx_hs_norm(const FourierField& v, int s, int k, double m, const Rational& z);

// ---- emission ----

// Writes the artifact files under cfg.out_dir with deterministic names and
// byte-identical reruns (17-significant-digit CSV floats, no clocks).
// Returns the paths written.
std::vector<std::string> emit_dispersion(const ExperimentConfig& cfg, const DispersionAudit& a);
std::vector<std::string> emit_growth(const ExperimentConfig& cfg,
                                     const std::vector<GrowthFit>& fits);
std::vector<std::string> emit_theorem(const ExperimentConfig& cfg, const TheoremTable& table);
std::vector<std::string> emit_trace(const ExperimentConfig& cfg, int k, const NormTrace& trace,
                                    const ordered_json& meta);

// 17-significant-digit formatting used by every CSV writer.
std::string fmt17(double x);

}  // namespace zlab
