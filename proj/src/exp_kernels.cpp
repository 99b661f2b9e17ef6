#include "zlab/exp_kernels.hpp"

#include <cmath>

namespace zlab {

namespace {
constexpr double kSeriesRadius = 1.0;
constexpr int kSeriesTerms = 22;
}  // namespace

cx phi1(cx z) {
  if (std::abs(z) <= kSeriesRadius) {
    // sum_m z^m / (m+1)!
    cx term = 1.0, acc = 1.0;
    for (int m = 1; m < kSeriesTerms; ++m) {
      term *= z / static_cast<double>(m + 1);
      acc += term;
    }
    return acc;
  }
  return (std::exp(z) - 1.0) / z;
}

cx wlin0(cx z) {
  if (std::abs(z) <= kSeriesRadius) {
    // sum_m z^m / (m! (m+2))
    cx zp = 1.0, acc = 0.5;
    double fact = 1.0;
    for (int m = 1; m < kSeriesTerms; ++m) {
      zp *= z;
      fact *= m;
      acc += zp / (fact * (m + 2));
    }
    return acc;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

cx wlin1(cx z) {
  if (std::abs(z) <= kSeriesRadius) {
    // sum_m z^m / (m! (m+1) (m+2))
    cx zp = 1.0, acc = 0.5;
    double fact = 1.0;
    for (int m = 1; m < kSeriesTerms; ++m) {
      zp *= z;
      fact *= m;
      acc += zp / (fact * (m + 1) * (m + 2));
    }
    return acc;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

cx int_exp_linear(cx a, double h, cx c0, cx c1) {
  const cx z = a * h;
  return h * (c0 * wlin0(z) + c1 * wlin1(z));
}

cx int_exp_exp(cx a, cx b, double h) {
  // h e^{b h} phi1((a - b) h); symmetric form is stable for a ~ b.
  return h * std::exp(b * h) * phi1((a - b) * h);
}

}  // namespace zlab
