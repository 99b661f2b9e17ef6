#pragma once

#include <complex>
#include <span>
#include <vector>

#include "zlab/params.hpp"

namespace zlab {

/// Truncated Fourier series on the 2*pi circle: coefficients for the modes
/// e^{ip*theta}, p in [-P, P].  Fields flagged is_real keep the Hermitian
/// symmetry c[-p] = conj(c[p]); nonlinear steps restore it by symmetrization
/// and treat drift beyond 1e-8 (relative) as an error.
class FourierField {
 public:
  FourierField() = default;
  explicit FourierField(int truncation, bool is_real = false);

  // Single mode c[p] = amp, everything else zero.
  static FourierField mode(int truncation, int p, cx amp, bool is_real = false);

  int truncation() const { return trunc_; }
  bool is_real() const { return real_; }
  void set_real_flag(bool r) { real_ = r; }
  int size() const { return 2 * trunc_ + 1; }

  cx& at(int p) { return c_[static_cast<std::size_t>(p + trunc_)]; }
  const cx& at(int p) const { return c_[static_cast<std::size_t>(p + trunc_)]; }

  std::span<const cx> coeffs() const { return c_; }
  std::span<cx> coeffs() { return c_; }

  FourierField& operator+=(const FourierField& o);
  FourierField& operator-=(const FourierField& o);
  FourierField& operator*=(cx a);

  double max_abs() const;
  bool all_finite() const;

 private:
  int trunc_ = 0;
  bool real_ = false;
  std::vector<cx> c_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(cx a, FourierField v);

// (sum_p (1+p^2)^s |c_p|^2)^{1/2}; exact on single modes, monotone in s.
double sobolev_norm(const FourierField& v, double s);

// L2 norm on the circle with the physical 2*pi factor:
// sqrt(2*pi) * sobolev_norm(v, 0).
double l2_norm(const FourierField& v);

// Pointwise values on the uniform grid theta_j = 2*pi*j/n, j = 0..n-1.
std::vector<cx> synthesize(const FourierField& v, int n_points);

// Fourier coefficients |p| <= truncation of grid samples (inverse of
// synthesize when the underlying function is band-limited below Nyquist).
FourierField analyze(std::span<const cx> grid, int truncation, bool is_real = false);

// Dealiased pointwise product: both inputs synthesized on the 2/3-rule grid
// (ceil(3*(2P+1)/2) points), multiplied, re-analyzed, truncated back to P.
// Exact for the quadratic nonlinearity.  Throws TruncationMismatch.
FourierField product(const FourierField& a, const FourierField& b);

// Coefficient-wise multiplication by -p^2 (second theta derivative).
FourierField second_theta_derivative(const FourierField& v);

// Coefficient-wise multiplication by i p (first theta derivative).
FourierField first_theta_derivative(const FourierField& v);

// conj(v) as a field: coefficient p of the result is conj(c[-p]).
FourierField conj_field(const FourierField& v);

// Hermitian part: coefficient p -> (c[p] + conj(c[-p]))/2.  Result is_real.
FourierField real_part_field(const FourierField& v);

// max_p |c[-p] - conj(c[p])| / max(max_abs, floor) for an is_real field.
double reality_drift(const FourierField& v);

// Symmetrize c[-p], conj(c[p]); throws RealityDrift if the pre-existing
// drift exceeded max_rel_drift (default 1e-8).
void symmetrize_real(FourierField& v, double max_rel_drift = 1e-8);

}  // namespace zlab
