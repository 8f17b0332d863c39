#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smoothdisc/errors.hpp"
#include "smoothdisc/frozen_constants.hpp"
#include "smoothdisc/numbers.hpp"

using namespace smoothdisc;

TEST_CASE("continued fraction of the golden ratio") {
  const auto cf = continued_fraction(RealAlgebraic::golden(), 12);
  CHECK(cf.quotients == std::vector<std::int64_t>(12, 1));
  REQUIRE(cf.period_length.has_value());
  CHECK(*cf.period_length == 1);
}

TEST_CASE("continued fraction of sqrt 2") {
  const auto cf = continued_fraction(RealAlgebraic::sqrt(2), 10);
  CHECK(cf.quotients[0] == 1);
  for (std::size_t i = 1; i < cf.quotients.size(); ++i) CHECK(cf.quotients[i] == 2);
  REQUIRE(cf.period_length.has_value());
  CHECK(*cf.period_length == 1);
}

TEST_CASE("continued fraction of 2 cos(2 pi / 7)") {
  // 256-bit reference expansion.
  const std::vector<std::int64_t> ref{1, 4, 20, 2, 3, 1, 6, 10, 5, 2, 2, 1, 2, 2, 1, 18, 1, 1, 3, 2};
  const auto cf = continued_fraction(RealAlgebraic::cubic7(), 20);
  CHECK(cf.quotients == ref);
  CHECK_FALSE(cf.period_length.has_value());
}

TEST_CASE("convergents satisfy |alpha - p/q| < 1/q^2") {
  for (const auto& alpha : {RealAlgebraic::cubic7(), RealAlgebraic::sqrt(3), RealAlgebraic::quadratic(1, 2, 7, 3)}) {
    const auto cf = continued_fraction(alpha, 18);
    const HpFloat a = alpha.high_precision();
    HpFloat p0 = 1, q0 = 0, p1 = HpFloat(cf.quotients[0]), q1 = 1;
    for (std::size_t i = 1; i < cf.quotients.size(); ++i) {
      const HpFloat p = HpFloat(cf.quotients[i]) * p1 + p0;
      const HpFloat q = HpFloat(cf.quotients[i]) * q1 + q0;
      CHECK(abs(a - p / q) < 1 / (q * q));
      p0 = p1, q0 = q1, p1 = p, q1 = q;
    }
  }
}

TEST_CASE("binary64 inputs run out of certified quotients") {
  const auto x = RealAlgebraic::parse("0.7071067811865476");
  CHECK_THROWS_AS(continued_fraction(x, 80), PrecisionError);
  CHECK(continued_fraction(x, 5).quotients.size() == 5);
}

TEST_CASE("rational and degenerate inputs are rejected") {
  CHECK_THROWS_AS(RealAlgebraic::parse("1/2"), InvalidArgument);
  CHECK_THROWS_AS(RealAlgebraic::quadratic(1, 1, 4, 2), InvalidArgument);
  CHECK_THROWS_AS(RealAlgebraic::cubic({0, 0, -2}, 1), InvalidArgument);  // complex roots
  CHECK_THROWS_AS(RealAlgebraic::parse("nonsense"), InvalidArgument);
}

TEST_CASE("squaring a cubic embedding stays in the field") {
  const auto t = RealAlgebraic::cubic7();
  const auto t2 = t.squared();
  CHECK(t2.value() == doctest::Approx(t.value() * t.value()).epsilon(1e-15));
  CHECK(t2.is_exact());
}

TEST_CASE("golden ratio: worst quality up to 1e5 is attained at m = 1") {
  std::vector<RealAlgebraic> a{RealAlgebraic::golden()};
  const auto scan = mult_badness(a, 100000);
  CHECK(scan.worst.m == std::vector<std::int64_t>{1});
  CHECK(scan.worst.quality == doctest::Approx(frozen::kGoldenWorstQuality).epsilon(1e-15));
  CHECK(scan.worst.quality >= 1.0 / 3.0);
  CHECK(scan.worst.quality <= (3.0 - std::sqrt(5.0)) / 2.0 + 1e-15);
}

TEST_CASE("(theta, theta^2) over H <= 200") {
  std::vector<RealAlgebraic> a{RealAlgebraic::cubic7(), RealAlgebraic::cubic7().squared()};
  const auto scan = mult_badness(a, 200);
  CHECK(scan.worst.quality == doctest::Approx(frozen::kCubic7WorstQuality).epsilon(1e-12));
  CHECK(scan.worst.m == std::vector<std::int64_t>{18, 1});
}

TEST_CASE("mult_badness agrees with the naive scan") {
  std::vector<RealAlgebraic> golden{RealAlgebraic::golden()};
  std::vector<RealAlgebraic> pair{RealAlgebraic::sqrt(2), RealAlgebraic::sqrt(3)};
  for (const auto& alpha : {golden, pair}) {
    for (std::int64_t M : {17, 120, 500}) {
      const auto fast = mult_badness(alpha, M, 0.3);
      const auto slow = oracle::naive_badness(alpha, M, 0.3);
      CHECK(fast.worst.quality == doctest::Approx(slow.quality).epsilon(1e-13));
      CHECK(fast.worst.m == slow.m);
      CHECK(fast.below_threshold.size() == slow.below);
    }
  }
}

TEST_CASE("scan budgets are enforced") {
  std::vector<RealAlgebraic> a{RealAlgebraic::golden(), RealAlgebraic::sqrt(2)};
  CHECK_THROWS_AS(mult_badness(a, 5000), BudgetExceeded);
}

TEST_CASE("fit_phi: golden ratio gets a constant") {
  std::vector<RealAlgebraic> a{RealAlgebraic::golden()};
  const auto fit = fit_phi(mult_badness(a, 100000).record_stream);
  CHECK(fit.member_index == 0);
  CHECK(fit.phi.is_constant());
  CHECK(fit.phi.C == doctest::Approx(frozen::kGoldenPhiConstant).epsilon(1e-12));
}

TEST_CASE("fit_phi covers every record") {
  std::vector<RealAlgebraic> a{RealAlgebraic::cubic7(), RealAlgebraic::cubic7().squared()};
  const auto records = mult_badness(a, 400).record_stream;
  const auto fit = fit_phi(records);
  for (const auto& r : records) CHECK(r.height * fit.phi(r.height) * r.error >= 1.0 - 1e-12);
  CHECK(fit.verified_up_to >= 1.0);
}

TEST_CASE("phi family") {
  const auto p = PhiFunction::parse("logpow:C=2,a=1,b=1");
  CHECK(p.to_string() == "logpow:C=2,a=1,b=1");
  CHECK(PhiFunction::parse(p.to_string()).C == 2.0);
  CHECK(p(1.0) >= 1.0);
  double prev = 0.0;
  for (double x = 1.0; x < 1e12; x *= 1.7) {
    CHECK(p(x) >= prev);
    prev = p(x);
  }
  CHECK(PhiFunction::parse("const:3")(1e9) == 3.0);
  CHECK_THROWS_AS(PhiFunction::parse("exp:1"), InvalidArgument);
  CHECK(p(2e100) / p(1e100) < 1.01);
}

TEST_CASE("invert_L solves H phi(H) = x") {
  CHECK(invert_L(10.0, PhiFunction::constant(2.0)) == doctest::Approx(5.0));
  const auto p = PhiFunction::log_power(1.0, 2.0, 0.0);
  for (double x : {3.0, 100.0, 1e6, 1e12}) {
    const double H = invert_L(x, p);
    CHECK(H * p(H) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS_AS(invert_L(1.0, PhiFunction::constant(2.0)), DomainError);
}

TEST_CASE("multiplicative height") {
  const std::vector<std::int64_t> m{0, -3, 4};
  CHECK(multiplicative_height(m) == 12.0);
}

TEST_CASE("Littlewood trajectory of (golden, golden)") {
  const auto g = RealAlgebraic::golden();
  const auto t = littlewood_trajectory(g, g, 10000);
  REQUIRE_FALSE(t.records.empty());
  CHECK(t.records.front().n == 1);
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    CHECK(t.records[i].product < t.records[i - 1].product);
    CHECK(t.records[i].n > t.records[i - 1].n);
  }
  // Naive recomputation of the final record.
  const auto& last = t.records.back();
  const long double a = (1.0L + std::sqrt(5.0L)) / 2.0L;
  const long double f = std::fabs(last.n * a - std::nearbyint(last.n * a));
  CHECK(last.product == doctest::Approx(static_cast<double>(last.n * f * f)).epsilon(1e-9));
  CHECK_FALSE(t.precision_warning);
}

TEST_CASE("Littlewood trajectory of a cubic pair") {
  const auto t = littlewood_trajectory(RealAlgebraic::cubic7(), RealAlgebraic::cubic7().squared(), 1000000);
  CHECK(t.records.size() >= 3);
  CHECK_THROWS_AS(littlewood_trajectory(RealAlgebraic::golden(), RealAlgebraic::golden(), 0), InvalidArgument);
}
