#pragma once

#include <complex>
#include <cstdint>

namespace zlab {

using cx = std::complex<double>;

// Exact positive rational, used for the spatial period ratio Z so that the
// frequency m with m*Z integer can be selected without rounding.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Largest m with m*Z integer in the window (k^2 + k - 1/Z, k^2 + k].
// The returned m is j/Z with j integer; m_prime = m - k^2 - k lies in (-1/Z, 0].
struct ModeChoice {
  double m = 0.0;
  double m_prime = 0.0;
  std::int64_t j = 0;  // m * Z
};

ModeChoice resonant_m(int k, const Rational& z);

// Model parameters for one run: wavenumber k, period ratio Z, background
// amplitude E, Sobolev index s, data size delta, spectral truncation P and
// the time-grid refinement factor (grid step = grid_dt_factor / (k|E|+1)).
struct ZakharovConfig {
  int k = 64;
  Rational Z{1, 1};
  cx E{1.0, 0.0};
  int s = 1;
  double delta = 1e-6;
  int truncation = 16;
  double grid_dt_factor = 0.02;

  double m = 0.0;        // filled by finalize()
  double m_prime = 0.0;

  void finalize();       // picks m from (k, Z), validates ranges
  double grid_dt() const;
};

}  // namespace zlab
