#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "smoothdisc/errors.hpp"
#include "smoothdisc/frozen_constants.hpp"
#include "smoothdisc/weights.hpp"

using namespace smoothdisc;

namespace {
constexpr double kPi = 3.14159265358979323846;

const std::vector<std::pair<int, Rational>> kAdmissible{
    {4, {1, 2}}, {4, {1, 1}}, {6, {2, 3}}, {6, {1, 3}}, {8, {1, 2}}, {10, {2, 5}}};
}  // namespace

TEST_CASE("make_weight enforces order and support") {
  CHECK_THROWS_AS(make_weight(2, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(make_weight(5, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(make_weight(6, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(make_weight(6, {-1, 3}), InvalidArgument);
  CHECK_NOTHROW(make_weight(6, {2, 3}));
}

TEST_CASE("default weight: support [-2, 2], mass 2/3") {
  const auto w = default_weight();
  CHECK(w.support_radius() == doctest::Approx(2.0));
  CHECK(w.fourier(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w(2.1) == 0.0);
  CHECK(w(-2.0) == 0.0);
  CHECK(w.smoothness() == 4);
}

TEST_CASE("order 4, scale 1 has a Fourier zero at 1") {
  const auto w = make_weight(4, {1, 1});
  CHECK(std::fabs(w.fourier(1.0)) < 1e-30);
  CHECK(w.fourier(0.5) == doctest::Approx(std::pow(2.0 / kPi, 4)).epsilon(1e-14));
}

TEST_CASE("unit triangle peak") { CHECK(cardinal_bspline(2, 0.0) == doctest::Approx(1.0)); }

TEST_CASE("B_6(0) agrees with the closed form and the frozen value") {
  CHECK(cardinal_bspline(6, 0.0) == doctest::Approx(frozen::kB6AtZero).epsilon(1e-15));
  CHECK(static_cast<double>(oracle::bspline_closed_form(6, 0.0L)) == doctest::Approx(frozen::kB6AtZero).epsilon(1e-15));
}

TEST_CASE("piecewise evaluation matches the truncated-power closed form") {
  std::mt19937_64 rng(3);
  for (int m : {1, 2, 3, 4, 5, 6, 8, 12}) {
    std::uniform_real_distribution<double> x(-m / 2.0 - 0.5, m / 2.0 + 0.5);
    for (int i = 0; i < 500; ++i) {
      const double v = x(rng);
      CHECK(cardinal_bspline(m, v) == doctest::Approx(static_cast<double>(oracle::bspline_closed_form(m, v))).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("weights and transforms are nonnegative") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, kAdmissible.size() - 1);
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  std::uniform_real_distribution<double> xi(-50.0, 50.0);
  int negative = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& [m, s] = kAdmissible[pick(rng)];
    const auto w = make_weight(m, s);
    if (w(x(rng)) < 0.0 || w.fourier(xi(rng)) < 0.0) ++negative;
  }
  CHECK(negative == 0);
}

TEST_CASE("Fourier transform matches quadrature") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xi(-20.0, 20.0);
  for (const auto& [m, s] : kAdmissible) {
    const auto w = make_weight(m, s);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double f = xi(rng);
      const double quad = oracle::integrate_against(w, [&](double x) { return std::cos(2.0 * kPi * f * x); });
      worst = std::max(worst, std::fabs(quad - w.fourier(f)));
    }
    CHECK(worst < 1e-9);
  }
  const auto w = default_weight();
  const double quad = oracle::integrate_against(w, [](double x) { return std::cos(kPi * x); });
  CHECK(std::fabs(quad - w.fourier(0.5)) < 1e-10);
}

TEST_CASE("mass equals the scale") {
  for (const auto& [m, s] : kAdmissible) {
    const auto w = make_weight(m, s);
    CHECK(std::fabs(oracle::integrate_against(w, [](double) { return 1.0; }) - s.value()) < 1e-10);
  }
}

TEST_CASE("envelope dominates the transform") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xi(0.0, 200.0);
  for (const auto& [m, s] : kAdmissible) {
    const auto w = make_weight(m, s);
    const double sv = s.value();
    for (int i = 0; i < 1000; ++i) {
      const double f = xi(rng);
      CHECK(w.fourier(f) <= w.fourier_envelope(f) * (1 + 1e-14));
      if (f >= 1.0 / sv) CHECK(w.fourier(f) <= sv * std::pow(kPi * sv * f, -m) * (1 + 1e-14));
    }
  }
}

TEST_CASE("sinc is continuous across the Taylor branch") {
  for (double t : {0.0, 1e-9, 9.999e-5, 1e-4, 1.0001e-4, 0.3}) {
    const double ref = t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t);
    CHECK(sinc(t) == doctest::Approx(ref).epsilon(1e-15));
  }
}

TEST_CASE("weight system parsing") {
  const auto ws = WeightSystem::parse("bspline:m=6,s=2/3", 3);
  CHECK(ws.dimension() == 3);
  CHECK(ws.smoothness() == 4);
  CHECK(ws.expect_constant() == doctest::Approx(8.0 / 27.0).epsilon(1e-15));
  CHECK(ws.spec() == "bspline:m=6,s=2/3");
  CHECK_THROWS_AS(WeightSystem::parse("bspline:m=3,s=1/2", 2), InvalidArgument);
  CHECK_THROWS_AS(WeightSystem::parse("gauss:sigma=1", 2), InvalidArgument);
  CHECK(Rational::parse("0.25").value() == 0.25);
}
