#include "zlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "zlab/errors.hpp"

namespace zlab {

namespace {

void check_same_truncation(const FourierField& a, const FourierField& b, const char* op) {
  if (a.truncation() != b.truncation())
    throw TruncationMismatch(std::string(op) + ": truncation mismatch");
}

void check_finite(const FourierField& v, const char* op) {
  if (!v.all_finite()) throw Error(std::string(op) + ": non-finite coefficient");
}

}  // namespace

FourierField::FourierField(int truncation, bool is_real)
    : trunc_(truncation), real_(is_real), c_(static_cast<std::size_t>(2 * truncation + 1)) {
  if (truncation < 0) throw Error("FourierField: negative truncation");
}

FourierField FourierField::mode(int truncation, int p, cx amp, bool is_real) {
  FourierField v(truncation, is_real);
  v.at(p) = amp;
  if (is_real && p != 0) v.at(-p) = std::conj(amp);
  return v;
}

FourierField& FourierField::operator+=(const FourierField& o) {
  check_same_truncation(*this, o, "operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  real_ = real_ && o.real_;
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& o) {
  check_same_truncation(*this, o, "operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  real_ = real_ && o.real_;
  return *this;
}

FourierField& FourierField::operator*=(cx a) {
  for (auto& c : c_) c *= a;
  if (a.imag() != 0.0) real_ = false;
  return *this;
}

double FourierField::max_abs() const {
  double m = 0.0;
  for (const auto& c : c_) m = std::max(m, std::abs(c));
  return m;
}

bool FourierField::all_finite() const {
  for (const auto& c : c_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(cx a, FourierField v) { return v *= a; }

double sobolev_norm(const FourierField& v, double s) {
  if (s < 0.0) throw Error("sobolev_norm: s must be >= 0");
  double acc = 0.0;
  const int P = v.truncation();
  const int si = static_cast<int>(s);
  const bool integral = (static_cast<double>(si) == s && si <= 8);
  for (int p = -P; p <= P; ++p) {
    const double base = 1.0 + static_cast<double>(p) * p;
    double w = 1.0;
    if (integral)
      for (int j = 0; j < si; ++j) w *= base;
    else
      w = std::pow(base, s);
    acc += w * std::norm(v.at(p));
  }
  return std::sqrt(acc);
}

double l2_norm(const FourierField& v) {
  return std::sqrt(2.0 * std::numbers::pi) * sobolev_norm(v, 0.0);
}

namespace {

// Twiddle matrix W[j, i] = e^{i (i - P) theta_j} for the (n, P) transform
// pair, cached per thread; grids here are tiny (tens of points) so a direct
// matrix-vector product beats any planning machinery.
struct DftPlan {
  int n = 0, P = 0;
  std::vector<cx> w;  // row-major n x (2P+1)
};

const DftPlan& dft_plan(int n, int P) {
  thread_local std::map<std::pair<int, int>, DftPlan> cache;
  auto [it, inserted] = cache.try_emplace({n, P});
  DftPlan& plan = it->second;
  if (inserted) {
    plan.n = n;
    plan.P = P;
    plan.w.resize(static_cast<std::size_t>(n) * (2 * P + 1));
    const double dtheta = 2.0 * std::numbers::pi / n;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= 2 * P; ++i)
        plan.w[static_cast<std::size_t>(j) * (2 * P + 1) + static_cast<std::size_t>(i)] =
            std::polar(1.0, dtheta * j * (i - P));
  }
  return plan;
}

}  // namespace

std::vector<cx> synthesize(const FourierField& v, int n_points) {
  if (n_points < 1) throw Error("synthesize: need at least one point");
  const int P = v.truncation();
  const auto c = v.coeffs();
  const DftPlan& plan = dft_plan(n_points, P);
  std::vector<cx> out(static_cast<std::size_t>(n_points));
  const std::size_t stride = static_cast<std::size_t>(2 * P + 1);
  for (int j = 0; j < n_points; ++j) {
    const cx* row = plan.w.data() + static_cast<std::size_t>(j) * stride;
    cx acc = 0.0;
    for (std::size_t i = 0; i < stride; ++i) acc += c[i] * row[i];
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

FourierField analyze(std::span<const cx> grid, int truncation, bool is_real) {
  const int n = static_cast<int>(grid.size());
  if (n < 2 * truncation + 1) throw Error("analyze: grid too coarse for truncation");
  const DftPlan& plan = dft_plan(n, truncation);
  FourierField v(truncation, is_real);
  const std::size_t stride = static_cast<std::size_t>(2 * truncation + 1);
  auto coeffs = v.coeffs();
  for (int j = 0; j < n; ++j) {
    const cx* row = plan.w.data() + static_cast<std::size_t>(j) * stride;
    const cx gj = grid[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < stride; ++i) coeffs[i] += gj * std::conj(row[i]);
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : coeffs) c *= inv;
  check_finite(v, "analyze");
  return v;
}

FourierField product(const FourierField& a, const FourierField& b) {
  check_same_truncation(a, b, "product");
  const int P = a.truncation();
  const int n_pad = (3 * (2 * P + 1) + 1) / 2;  // ceil(3(2P+1)/2), alias-free
  const auto ga = synthesize(a, n_pad);
  auto gb = synthesize(b, n_pad);
  for (int j = 0; j < n_pad; ++j)
    gb[static_cast<std::size_t>(j)] *= ga[static_cast<std::size_t>(j)];
  FourierField out = analyze(gb, P, a.is_real() && b.is_real());
  if (out.is_real()) symmetrize_real(out);
  check_finite(out, "product");
  return out;
}

FourierField second_theta_derivative(const FourierField& v) {
  const int P = v.truncation();
  FourierField out(P, v.is_real());
  for (int p = -P; p <= P; ++p)
    out.at(p) = -static_cast<double>(p) * p * v.at(p);
  check_finite(out, "second_theta_derivative");
  return out;
}

FourierField first_theta_derivative(const FourierField& v) {
  const int P = v.truncation();
  FourierField out(P, false);
  for (int p = -P; p <= P; ++p) out.at(p) = cx(0.0, static_cast<double>(p)) * v.at(p);
  check_finite(out, "first_theta_derivative");
  return out;
}

FourierField conj_field(const FourierField& v) {
  const int P = v.truncation();
  FourierField out(P, v.is_real());
  for (int p = -P; p <= P; ++p) out.at(p) = std::conj(v.at(-p));
  return out;
}

FourierField real_part_field(const FourierField& v) {
  const int P = v.truncation();
  FourierField out(P, true);
  for (int p = -P; p <= P; ++p)
    out.at(p) = 0.5 * (v.at(p) + std::conj(v.at(-p)));
  return out;
}

double reality_drift(const FourierField& v) {
  const int P = v.truncation();
  double drift = 0.0;
  for (int p = 0; p <= P; ++p)
    drift = std::max(drift, std::abs(v.at(-p) - std::conj(v.at(p))));
  const double scale = std::max(v.max_abs(), 1e-300);
  return drift / scale;
}

void symmetrize_real(FourierField& v, double max_rel_drift) {
  const double drift = reality_drift(v);
  if (drift > max_rel_drift)
    throw RealityDrift("symmetrize_real: drift " + std::to_string(drift));
  const int P = v.truncation();
  for (int p = 1; p <= P; ++p) {
    const cx h = 0.5 * (v.at(p) + std::conj(v.at(-p)));
    v.at(p) = h;
    v.at(-p) = std::conj(h);
  }
  v.at(0) = cx(v.at(0).real(), 0.0);
  v.set_real_flag(true);
}

}  // namespace zlab
