#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "zlab/errors.hpp"
#include "zlab/fourier.hpp"

using namespace zlab;
using zlab::testing::quadrature_product;
using zlab::testing::random_field;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sobolev norm on simple fields") {
  FourierField zero(5);
  CHECK(sobolev_norm(zero, 0.0) == 0.0);
  CHECK(sobolev_norm(zero, 2.5) == 0.0);

  const auto one_mode = FourierField::mode(5, 1, cx(1.0, 0.0));
  CHECK(sobolev_norm(one_mode, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  FourierField v(5);
  v.at(0) = cx(3.0, 0.0);
  v.at(2) = cx(0.0, 4.0);
  CHECK(sobolev_norm(v, 0.0) == doctest::Approx(5.0).epsilon(1e-14));

  CHECK_THROWS_AS((void)sobolev_norm(v, -1.0), Error);
}

TEST_CASE("l2 norm carries the 2 pi factor") {
  const auto e1 = FourierField::mode(4, 1, cx(1.0, 0.0));
  CHECK(l2_norm(e1) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-14));

  CHECK(l2_norm(FourierField(4)) == 0.0);

  FourierField cos_theta(4, true);
  cos_theta.at(1) = cx(0.5, 0.0);
  cos_theta.at(-1) = cx(0.5, 0.0);
  CHECK(l2_norm(cos_theta) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
}

TEST_CASE("product of unit modes and the double angle identity") {
  const int P = 4;
  const auto ep = FourierField::mode(P, 1, cx(1.0, 0.0));
  const auto em = FourierField::mode(P, -1, cx(1.0, 0.0));
  const auto unit = product(ep, em);
  for (int p = -P; p <= P; ++p) {
    const cx want = (p == 0) ? cx(1.0, 0.0) : cx(0.0, 0.0);
    CHECK(std::abs(unit.at(p) - want) < 1e-14);
  }

  FourierField c(P, true);
  c.at(1) = c.at(-1) = cx(0.5, 0.0);
  const auto c2 = product(c, c);  // (1 + cos 2 theta) / 2
  CHECK(std::abs(c2.at(0) - cx(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(c2.at(2) - cx(0.25, 0.0)) < 1e-14);
  CHECK(std::abs(c2.at(-2) - cx(0.25, 0.0)) < 1e-14);
  CHECK(std::abs(c2.at(1)) < 1e-14);
  CHECK(c2.is_real());
}

TEST_CASE("product matches the quadrature oracle at P = 8") {
  std::mt19937_64 rng(7);
  const int P = 8;
  const auto a = random_field(rng, P, false);
  const auto b = random_field(rng, P, false);
  const auto ours = product(a, b);
  const auto ref = quadrature_product(a, b, 64);
  for (int p = -P; p <= P; ++p) CHECK(std::abs(ours.at(p) - ref.at(p)) < 1e-12);
}

TEST_CASE("product demands matching truncations") {
  CHECK_THROWS_AS((void)product(FourierField(4), FourierField(5)), TruncationMismatch);
}

TEST_CASE("second theta derivative") {
  const auto e1 = FourierField::mode(4, 1, cx(1.0, 0.0));
  CHECK(std::abs(second_theta_derivative(e1).at(1) - cx(-1.0, 0.0)) < 1e-15);

  const auto c0 = FourierField::mode(4, 0, cx(3.0, 0.0));
  CHECK(second_theta_derivative(c0).max_abs() == 0.0);

  FourierField c3(4, true);
  c3.at(3) = c3.at(-3) = cx(0.5, 0.0);
  const auto d = second_theta_derivative(c3);
  CHECK(std::abs(d.at(3) - cx(-4.5, 0.0)) < 1e-15);  // -9 cos(3theta) has c_3 = -4.5
  CHECK(d.is_real());
}

TEST_CASE("Parseval against a synthesis grid") {
  std::mt19937_64 rng(11);
  const int P = 6;
  const auto v = random_field(rng, P, false);
  for (int n : {2 * P + 2, 4 * P + 1, 64}) {
    const auto grid = synthesize(v, n);
    double acc = 0.0;
    for (const auto& x : grid) acc += std::norm(x);
    const double grid_l2_sq = 2.0 * kPi / n * acc;
    CHECK(grid_l2_sq == doctest::Approx(l2_norm(v) * l2_norm(v)).epsilon(1e-10));
  }
}

TEST_CASE("product is bilinear, commutative, and unital") {
  std::mt19937_64 rng(13);
  const int P = 5;
  const auto a = random_field(rng, P, false);
  const auto b = random_field(rng, P, false);
  const auto c = random_field(rng, P, false);

  const auto ab = product(a, b);
  const auto ba = product(b, a);
  const auto lin = product(cx(2.0, 1.0) * a + b, c);
  const auto lin_ref = cx(2.0, 1.0) * product(a, c) + product(b, c);
  const auto unit = product(a, FourierField::mode(P, 0, cx(1.0, 0.0)));
  for (int p = -P; p <= P; ++p) {
    CHECK(std::abs(ab.at(p) - ba.at(p)) < 1e-13);
    CHECK(std::abs(lin.at(p) - lin_ref.at(p)) < 1e-12);
    CHECK(std::abs(unit.at(p) - a.at(p)) < 1e-13);
  }
}

TEST_CASE("derivatives have zero mean and reality is preserved") {
  std::mt19937_64 rng(17);
  const auto v = random_field(rng, 6, false, 2.0);
  CHECK(std::abs(second_theta_derivative(v).at(0)) == 0.0);

  const auto r1 = random_field(rng, 6, true);
  const auto r2 = random_field(rng, 6, true);
  const auto pr = product(r1, r2);
  CHECK(pr.is_real());
  CHECK(reality_drift(pr) < 1e-13);
  CHECK(second_theta_derivative(r1).is_real());
}

TEST_CASE("reality drift detection and symmetrization") {
  FourierField v(3, true);
  v.at(1) = cx(1.0, 0.5);
  v.at(-1) = std::conj(v.at(1)) + cx(1e-10, 0.0);
  symmetrize_real(v);  // small drift is repaired
  CHECK(reality_drift(v) < 1e-15);

  FourierField bad(3, true);
  bad.at(1) = cx(1.0, 0.0);
  bad.at(-1) = cx(0.5, 0.0);  // gross violation
  CHECK_THROWS_AS(symmetrize_real(bad), RealityDrift);
}
