#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "zlab/params.hpp"

namespace zlab {

// One evaluation point of the dispersion polynomial: temporal frequency tau,
// longitudinal frequency zeta, transverse frequency xi and |E|^2.
struct SymbolPoint {
  cx tau;
  double zeta = 0.0;
  double xi = 0.0;
  double e_amp2 = 0.0;  // |E|^2 >= 0
};

// P0 = (|xi|^2 - tau^2) (|xi|^4 - (tau + zeta)^2)
cx dispersion_det0(const SymbolPoint& pt);

// P = P0 - 2 |E|^2 |xi|^4
cx dispersion_det(const SymbolPoint& pt);

// Monic quartic in tau equal to dispersion_det: coefficients of tau^0..tau^3
// (the tau^4 coefficient is 1).  All coefficients are real.
std::array<double, 4> tau_quartic_coeffs(double zeta, double xi, double e_amp2);

// The four tau-roots of the quartic, via companion-matrix eigenvalues plus
// one Newton polish per root.  Unordered; closed under conjugation.
// Requires xi != 0.
std::array<cx, 4> tau_roots(double zeta, double xi, double e_amp2);

// First-order mode matrix of the harmonic-p block (p = 1 is the unstable
// one): rows act on (e_p, etilde_p, n_p, v_p) with v_p = -i (kp)^{-1} dt n_p.
Eigen::Matrix4cd mode_matrix(int k, double m, cx E, int p = 1);

// Unclassified eigensystem of a diagonalizable 4x4: eigenvalues, right
// eigenvectors (columns of `right`) and left row-eigenvectors (rows of
// `left`), paired index-by-index.  l_j A = lambda_j l_j with the plain
// bilinear pairing (no conjugation).
struct Eigensystem4 {
  std::array<cx, 4> lambda;
  Eigen::Matrix4cd right;  // column j = r_j
  Eigen::Matrix4cd left;   // row j    = l_j
};

Eigensystem4 block_eigensystem(const Eigen::Matrix4cd& A);

// Classified spectral data of the p = 1 mode matrix: lambda1, lambda2 real
// (|lambda1| > |lambda2|), lambda3 the eigenvalue of maximal imaginary part,
// lambda4 = conj(lambda3); r3 and r4 rescaled so their third component is
// exactly one; sigma = Im lambda3 is the growth rate.
struct SpectrumReport {
  Eigen::Matrix4cd A;
  std::array<cx, 4> lambda;
  std::array<Eigen::Vector4cd, 4> r;
  std::array<Eigen::Vector4cd, 4> l;
  double sigma = 0.0;
  int k = 0;
  double m = 0.0;
  cx E;
  int k0 = -1;  // filled when a threshold scan was run
  std::vector<std::string> warnings;
};

// Throws ClassificationError when the (two real, one conjugate pair) pattern
// is absent.  A pairing with |l_j . r_j| below 1e-6 |l_j||r_j| is recorded as
// a near-defective warning, not an error.
SpectrumReport analyze_spectrum(const Eigen::Matrix4cd& A, int k, double m, cx E);

// e^{itA} Phi by the spectral decomposition of the report.
Eigen::Vector4cd propagate(const SpectrumReport& rep, double t, const Eigen::Vector4cd& phi);

// Im lambda3 for the p=1 block at (k, resonant_m(k, Z), E).
double growth_rate(int k, cx E, const Rational& z);

// Smallest k for which classification succeeds.  Throws ClassificationError
// if none is found up to k_max.
int discover_k0(cx E, const Rational& z, int k_max = 4096);

// Monic characteristic polynomial coefficients (lambda^0..lambda^3) by
// Faddeev-LeVerrier; the lambda^4 coefficient is 1.
std::array<cx, 4> char_poly_coeffs(const Eigen::Matrix4cd& A);

}  // namespace zlab
