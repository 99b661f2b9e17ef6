#include "zlab/state.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "zlab/errors.hpp"

namespace zlab {

StateU StateU::zero(int truncation, double t) {
  StateU u;
  u.e = FourierField(truncation, false);
  u.n = FourierField(truncation, true);
  u.n_t = FourierField(truncation, true);
  u.t = t;
  return u;
}

void StateU::validate() const {
  if (e.truncation() != n.truncation() || n.truncation() != n_t.truncation())
    throw TruncationMismatch("StateU: fields disagree on truncation");
  if (!n.is_real() || !n_t.is_real())
    throw Error("StateU: n and n_t must be real fields");
}

int Trajectory::truncation() const {
  return samples.empty() ? 0 : samples.front().e.truncation();
}

StateU Trajectory::state_at(std::size_t i) const {
  const TrajectorySample& s = samples.at(i);
  StateU u;
  u.e = s.e;
  u.n = s.n;
  u.n_t = s.n_t;
  u.t = time(i);
  if (shift_rate != 0.0) {
    const cx boost = std::exp(cx(shift_rate * time(i), 0.0));
    u.e *= boost;
    u.n *= boost;
    u.n_t *= boost;
  }
  return u;
}

Trajectory zero_trajectory(int truncation, double dt, std::size_t n_samples, double shift_rate) {
  Trajectory tr;
  tr.dt = dt;
  tr.shift_rate = shift_rate;
  tr.samples.resize(n_samples);
  for (auto& s : tr.samples) {
    s.e = FourierField(truncation, false);
    s.e_t = FourierField(truncation, false);
    s.n = FourierField(truncation, true);
    s.n_t = FourierField(truncation, true);
  }
  return tr;
}

namespace {

void check_compatible(double dta, double dtb, double sa, double sb, std::size_t na, std::size_t nb,
                      const char* op) {
  if (dta != dtb || na != nb) throw Error(std::string(op) + ": grid mismatch");
  if (sa != sb) throw Error(std::string(op) + ": shift-rate mismatch");
}

}  // namespace

Trajectory traj_add(const Trajectory& a, const Trajectory& b) {
  check_compatible(a.dt, b.dt, a.shift_rate, b.shift_rate, a.size(), b.size(), "traj_add");
  Trajectory out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i].e += b.samples[i].e;
    out.samples[i].e_t += b.samples[i].e_t;
    out.samples[i].n += b.samples[i].n;
    out.samples[i].n_t += b.samples[i].n_t;
  }
  return out;
}

Trajectory traj_sub(const Trajectory& a, const Trajectory& b) {
  check_compatible(a.dt, b.dt, a.shift_rate, b.shift_rate, a.size(), b.size(), "traj_sub");
  Trajectory out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i].e -= b.samples[i].e;
    out.samples[i].e_t -= b.samples[i].e_t;
    out.samples[i].n -= b.samples[i].n;
    out.samples[i].n_t -= b.samples[i].n_t;
  }
  return out;
}

Trajectory with_shift_rate(const Trajectory& tr, double new_shift) {
  Trajectory out = tr;
  out.shift_rate = new_shift;
  if (new_shift == tr.shift_rate) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cx boost = std::exp(cx((tr.shift_rate - new_shift) * tr.time(i), 0.0));
    out.samples[i].e *= boost;
    out.samples[i].e_t *= boost;
    out.samples[i].n *= boost;
    out.samples[i].n_t *= boost;
  }
  return out;
}

int ForcingTrajectory::truncation() const {
  return samples.empty() ? 0 : samples.front().f.truncation();
}

ForcingTrajectory forcing_with_shift_rate(const ForcingTrajectory& f, double new_shift) {
  ForcingTrajectory out = f;
  out.shift_rate = new_shift;
  if (new_shift == f.shift_rate) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cx boost = std::exp(cx((f.shift_rate - new_shift) * f.time(i), 0.0));
    out.samples[i].f *= boost;
    out.samples[i].f_t *= boost;
    out.samples[i].g *= boost;
  }
  return out;
}

void trajectory_to_csv(const Trajectory& tr, std::ostream& os) {
  char buf[512];
  os << "t,p,re_e,im_e,re_e_t,im_e_t,re_n,im_n,re_n_t,im_n_t\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& s = tr.samples[i];
    const int P = s.e.truncation();
    for (int p = -P; p <= P; ++p) {
      std::snprintf(buf, sizeof buf,
                    "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.time(i), p,
                    s.e.at(p).real(), s.e.at(p).imag(), s.e_t.at(p).real(), s.e_t.at(p).imag(),
                    s.n.at(p).real(), s.n.at(p).imag(), s.n_t.at(p).real(), s.n_t.at(p).imag());
      os << buf;
    }
  }
}

}  // namespace zlab
