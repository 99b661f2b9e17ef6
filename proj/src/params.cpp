#include "zlab/params.hpp"

#include <cmath>
#include <numeric>

#include "zlab/errors.hpp"

namespace zlab {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw ConfigError("Rational: zero denominator");
  if (num <= 0 || den < 0) throw ConfigError("Rational: must be positive");
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
}

ModeChoice resonant_m(int k, const Rational& z) {
  if (k < 1) throw ConfigError("resonant_m: k must be >= 1");
  // Candidates are j/Z, j integer.  Want the largest j with j/Z <= k^2 + k,
  // i.e. j = floor(Z * (k^2 + k)) computed exactly in integers.
  const std::int64_t kk = static_cast<std::int64_t>(k) * k + k;
  const std::int64_t j = (z.num * kk) / z.den;  // Z*(k^2+k) = num*kk/den >= 0
  ModeChoice out;
  out.j = j;
  out.m = static_cast<double>(j) * static_cast<double>(z.den) / static_cast<double>(z.num);
  out.m_prime = out.m - static_cast<double>(kk);
  return out;
}

void ZakharovConfig::finalize() {
  if (k < 1) throw ConfigError("config: k must be >= 1");
  if (s < 1) throw ConfigError("config: s must be >= 1");
  if (truncation < 2) throw ConfigError("config: truncation must be >= 2");
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("config: delta must be in (0, 1]");
  const ModeChoice mc = resonant_m(k, Z);
  m = mc.m;
  m_prime = mc.m_prime;
}

double ZakharovConfig::grid_dt() const {
  return grid_dt_factor / (static_cast<double>(k) * std::abs(E) + 1.0);
}

}  // namespace zlab
