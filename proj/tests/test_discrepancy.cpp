#include <doctest.h>

#include <cmath>
#include <random>

#include "smoothdisc/discrepancy.hpp"
#include "smoothdisc/errors.hpp"
#include "smoothdisc/frozen_constants.hpp"

using namespace smoothdisc;

namespace {

const WeightSystem& w2() {
  static const WeightSystem w = WeightSystem::uniform(default_weight(), 2);
  return w;
}

const WeightSystem& w3() {
  static const WeightSystem w = WeightSystem::uniform(default_weight(), 3);
  return w;
}

// Independent sum over n of omega(n/N) sum_a omega((a + n alpha - gamma)/rho), long double.
double naive_golden(double rho, double gamma, double N) {
  const auto w = default_weight();
  const long double alpha = (1.0L + std::sqrt(5.0L)) / 2.0L;
  long double sum = 0.0L;
  const auto n_max = static_cast<long>(2.0 * N);
  for (long n = -n_max; n <= n_max; ++n) {
    const double outer = w(static_cast<double>(n) / N);
    if (outer == 0.0) continue;
    const long double x = n * alpha - gamma;
    const long double base = std::floor(x);
    long double inner = 0.0L;
    for (int a = -2; a <= 3; ++a) inner += w(static_cast<double>((x - base - a) / rho));
    sum += outer * inner;
  }
  return static_cast<double>(sum - 4.0L / 9.0L * rho * N);
}

Lattice golden() { return Lattice::parse("dani:golden"); }

}  // namespace

TEST_CASE("identity lattice has a closed form") {
  const auto lat = Lattice::parse("identity:2");
  const auto w = default_weight();
  for (double N : {3.0, 17.5, 100.0}) {
    double s = 0.0;
    for (int n = -300; n <= 300; ++n) s += w(n / N);
    const double expect = w(0.0) * s - 4.0 / 9.0 * 0.2 * N;
    const auto box = TestBox::centered_at_origin({0.2});
    CHECK(direct_discrepancy(lat, w2(), box, N).value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(dual_discrepancy(lat, w2(), box, N).value == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("a box missing every lattice point gives minus the expected mass") {
  const auto lat = Lattice::parse("identity:2");
  const TestBox box{{0.5}, {0.2}};
  const auto r = direct_discrepancy(lat, w2(), box, 30.0);
  CHECK(r.terms == 0);
  CHECK(r.value == doctest::Approx(-4.0 / 9.0 * 0.2 * 30.0));
  const auto d = dual_discrepancy(lat, w2(), box, 30.0);
  CHECK(std::fabs(d.value - r.value) <= d.tail_bound + 1e-9);
}

TEST_CASE("golden sequence against a naive sum") {
  for (double gamma : {0.0, 0.25}) {
    const TestBox box{{gamma}, {0.3}};
    const double ref = naive_golden(0.3, gamma, 1000.0);
    const auto direct = direct_discrepancy(golden(), w2(), box, 1000.0);
    CHECK(direct.value == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    const auto dual = dual_discrepancy(golden(), w2(), box, 1000.0);
    CHECK(std::fabs(dual.value - ref) <= dual.tail_bound + 1e-9);
  }
}

TEST_CASE("Dani fast path agrees with generic enumeration") {
  const std::vector<double> a{0.41421356237309503, 0.7320508075688772};
  const auto dani = dani_lattice(a);
  const Lattice generic(dani.basis());  // same basis, explicit provenance
  const TestBox box{{0.1, 0.7}, {0.2, 0.3}};
  const auto f = direct_discrepancy(dani, w3(), box, 500.0);
  const auto g = direct_discrepancy(generic, w3(), box, 500.0);
  CHECK(f.value == doctest::Approx(g.value).epsilon(1e-10).scale(1.0));
}

TEST_CASE("Poisson summation: direct equals dual on random configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::string> specs{"dani:golden", "dani:sqrt:2", "minkowski:cubic:7", "dani:cubic:7;cubic:7^2"};
  int checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const auto lat = Lattice::parse(specs[static_cast<std::size_t>(trial) % specs.size()]);
    const int d = lat.dim() - 1;
    const auto& w = d == 1 ? w2() : w3();
    TestBox box;
    for (int i = 0; i < d; ++i) {
      box.rho.push_back(0.499 * std::ldexp(1.0, -static_cast<int>(u(rng) * 5)));
      box.gamma.push_back(trial % 3 == 0 ? 0.0 : u(rng));
    }
    const double N = std::pow(10.0, 1.0 + 2.0 * u(rng));
    DualOptions o;
    o.tol = 1e-6;
    const auto direct = direct_discrepancy(lat, w, box, N);
    const auto dual = dual_discrepancy(lat, w, box, N, o);
    CAPTURE(trial);
    CHECK(std::fabs(direct.value - dual.value) <= dual.tail_bound + direct.rounding + dual.rounding + 1e-9);
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("centered discrepancy of a unimodular lattice is bounded below") {
  for (const char* spec : {"dani:golden", "minkowski:cubic:7"}) {
    const auto lat = Lattice::parse(spec);
    const int d = lat.dim() - 1;
    const auto& w = d == 1 ? w2() : w3();
    for (double rho : {0.4, 0.1, 0.02}) {
      const auto box = TestBox::centered_at_origin(std::vector<double>(static_cast<std::size_t>(d), rho));
      const auto r = dual_discrepancy(lat, w, box, 200.0);
      CHECK(r.value >= -r.tail_bound - 1e-12);
    }
  }
}

TEST_CASE("dropping phases bounds every shifted box") {
  const auto lat = golden();
  DualOptions drop;
  drop.drop_phases = true;
  const TestBox centered = TestBox::centered_at_origin({0.15});
  const auto bound = dual_discrepancy(lat, w2(), centered, 300.0);
  for (double g : {0.1, 0.37, 0.5, 0.91}) {
    const TestBox box{{g}, {0.15}};
    const auto with = dual_discrepancy(lat, w2(), box, 300.0);
    const auto without = dual_discrepancy(lat, w2(), box, 300.0, drop);
    CHECK(without.value == doctest::Approx(bound.value).epsilon(1e-12));
    CHECK(std::fabs(with.value) <= without.value + with.tail_bound + without.tail_bound + 1e-12);
  }
}

TEST_CASE("tail bounds are honest") {
  const auto lat = Lattice::parse("minkowski:cubic:7");
  const auto box = TestBox::centered_at_origin({0.3, 0.05});
  DualOptions loose;
  loose.tol = 1e-2;
  DualOptions tight;
  tight.tol = 1e-10;
  const auto a = dual_discrepancy(lat, w3(), box, 50.0, loose);
  const auto b = dual_discrepancy(lat, w3(), box, 50.0, tight);
  CHECK(a.tail_bound <= 1e-2);
  CHECK(b.tail_bound <= 1e-10);
  CHECK(a.terms <= b.terms);
  CHECK(std::fabs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-12);
  const auto direct = direct_discrepancy(lat, w3(), box, 50.0);
  CHECK(std::fabs(a.value - direct.value) <= a.tail_bound + 1e-10);
}

TEST_CASE("budget is reported for infeasible tolerances") {
  DualOptions o;
  o.tol = 1e-14;
  o.budget = 1e3;
  CHECK_THROWS_AS(dual_discrepancy(Lattice::parse("minkowski:cubic:7"), w3(), TestBox::centered_at_origin({0.01, 0.01}),
                                   1e4, o),
                  BudgetExceeded);
}

TEST_CASE("discrepancy is invariant under unimodular diagonal rescaling") {
  std::mt19937_64 rng(8);
  const auto lat = random_unimodular(2, rng);
  const double t = 1.7;
  Matrix s(2, 2);
  s << t, 0.0, 0.0, 1.0 / t;
  const Lattice scaled(s * lat.basis());
  const auto box = TestBox::centered_at_origin({0.2});
  const auto box_t = TestBox::centered_at_origin({0.2 * t});
  const auto a = direct_discrepancy(lat, w2(), box, 80.0);
  const auto b = direct_discrepancy(scaled, w2(), box_t, 80.0 / t);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10).scale(1.0));
  const auto c = dual_discrepancy(scaled, w2(), box_t, 80.0 / t);
  CHECK(std::fabs(c.value - a.value) <= c.tail_bound + 1e-10);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(direct_discrepancy(golden(), w2(), TestBox::centered_at_origin({0.5}), 10.0), InvalidArgument);
  CHECK_THROWS_AS(direct_discrepancy(golden(), w2(), TestBox::centered_at_origin({0.2, 0.2}), 10.0), InvalidArgument);
  CHECK_THROWS_AS(direct_discrepancy(golden(), w3(), TestBox::centered_at_origin({0.2}), 10.0), InvalidArgument);
  CHECK_THROWS_AS(dual_discrepancy(golden(), w2(), TestBox::centered_at_origin({0.2}), 0.0), InvalidArgument);
}

TEST_CASE("witness constant") {
  CHECK(witness_constant(w2()) == doctest::Approx(frozen::kWitnessConstant).epsilon(1e-12));
  const double c = witness_constant(w2());
  CHECK(default_weight().fourier(c) >= c);
  CHECK(default_weight().fourier(c + 2e-5) < c + 2e-5);
}

TEST_CASE("Liouville witnesses certify their lower bound") {
  const auto lat = Lattice::parse("dani:liouville:5");
  const auto phi = PhiFunction::log_power(1.0, 2.0, 0.0);
  double prev = 0.0;
  for (std::int64_t m : {4LL, 64LL, 1LL << 24}) {
    const auto approx = dani_dual_point(lat, std::vector<std::int64_t>{m});
    const auto w = lower_bound_witness(lat, w2(), approx, phi);
    CAPTURE(m);
    CHECK(w.holds);
    CHECK(w.measured.value >= w.lower_bound - w.measured.tail_bound);
    CHECK(w.measured.value > prev);
    CHECK(w.N == std::floor(w.c * phi(w.height) * w.height));
    prev = w.measured.value;
  }
}

TEST_CASE("golden ratio admits no witness for a constant phi") {
  const auto lat = golden();
  const auto phi = PhiFunction::constant(3.0);
  for (std::int64_t q : {1LL, 2LL, 3LL, 5LL, 8LL, 13LL, 21LL, 34LL, 55LL, 89LL}) {
    CHECK_THROWS_AS(lower_bound_witness(lat, w2(), dani_dual_point(lat, std::vector<std::int64_t>{q}), phi), DomainError);
  }
}

TEST_CASE("witness rejects points outside the dual lattice") {
  DualApprox fake;
  fake.lambda = {3.0, 0.001};
  fake.height = 3.0;
  fake.error = 0.001;
  CHECK_THROWS_AS(lower_bound_witness(golden(), w2(), fake, PhiFunction::constant(2.0)), InvalidArgument);
}

TEST_CASE("dual record stream") {
  // The golden ratio has a single record (m = 1); the cubic pair has several.
  const auto g = dual_record_stream(golden(), 1000.0);
  REQUIRE(g.size() == 1);
  CHECK(g[0].quality == doctest::Approx(frozen::kGoldenWorstQuality).epsilon(1e-12));
  const auto lat = Lattice::parse("dani:cubic:7;cubic:7^2");
  const auto records = dual_record_stream(lat, 200.0);
  REQUIRE(records.size() >= 3);
  double best = 1e300;
  for (const auto& r : records) {
    if (r.height <= 200.0) best = std::min(best, r.quality);
  }
  CHECK(best == doctest::Approx(frozen::kCubic7WorstQuality).epsilon(1e-9));
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(records[i].height > records[i - 1].height);
    CHECK(records[i].quality < records[i - 1].quality);
  }
  const auto p = dual_point_of(lat, records.back());
  CHECK(p.height == records.back().height);
}

TEST_CASE("sup scan is monotone in depth") {
  const auto lat = golden();
  double prev = 0.0;
  for (int depth : {2, 4, 6}) {
    auto grid = ScanGrid::make(1, depth, 2, 7);
    grid.threads = 1;
    const auto s = sup_discrepancy(lat, w2(), 1000.0, grid);
    CHECK(s.estimate >= prev);
    CHECK(s.boxes == static_cast<std::size_t>((depth + 1) * 3));
    CHECK(std::fabs(s.result.value) == doctest::Approx(s.estimate));
    prev = s.estimate;
  }
  CHECK(prev <= frozen::kGoldenSupBound);
}

TEST_CASE("sup scan is reproducible across thread counts") {
  const auto lat = Lattice::parse("minkowski:cubic:7");
  auto grid = ScanGrid::make(2, 3, 1, 3);
  grid.threads = 1;
  const auto a = sup_discrepancy(lat, w3(), 300.0, grid);
  grid.threads = 3;
  const auto b = sup_discrepancy(lat, w3(), 300.0, grid);
  CHECK(a.estimate == b.estimate);
  CHECK(a.argmax_level == b.argmax_level);
}

TEST_CASE("classical star discrepancy") {
  const auto g = RealAlgebraic::golden();
  CHECK(classical_star_discrepancy_1d(g, 1) == doctest::Approx(0.6180339887498949));
  // Sorted-points formula evaluated independently in 40-digit arithmetic.
  CHECK(classical_star_discrepancy_1d(g, 100) == doctest::Approx(1.4175).epsilon(1e-4));
  for (std::int64_t N : {10LL, 100LL, 1000LL, 10000LL}) {
    CHECK(classical_star_discrepancy_1d(g, N) <= frozen::kGoldenClassicalLogConstant * std::log(static_cast<double>(N)) + 1.0);
  }
  CHECK_THROWS_AS(classical_star_discrepancy_1d(g, 0), InvalidArgument);
}
