#pragma once

#include "zlab/params.hpp"

namespace zlab {

// Stable evaluations of the small quadrature kernels used by the exponential
// trapezoid rule.  All switch to truncated series near z = 0.

// (e^z - 1) / z
cx phi1(cx z);

// int_0^1 e^{z u} u du        = (e^z (z-1) + 1) / z^2
cx wlin0(cx z);

// int_0^1 e^{z u} (1 - u) du  = (e^z - 1 - z) / z^2
cx wlin1(cx z);

// int_0^h e^{a (h-s)} (c0 (1 - s/h) + c1 s/h) ds = h (c0 wlin0(a h) + c1 wlin1(a h)).
// Exact for a linear-in-s integrand against the exponential kernel.
cx int_exp_linear(cx a, double h, cx c0, cx c1);

// int_0^h e^{a (h-s)} e^{b s} ds
cx int_exp_exp(cx a, cx b, double h);

}  // namespace zlab
