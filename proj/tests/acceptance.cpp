// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "smoothdisc/discrepancy.hpp"
#include "smoothdisc/frozen_constants.hpp"

namespace fs = std::filesystem;
using namespace smoothdisc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path work_dir() {
  const auto p = fs::temp_directory_path() / "smoothdisc_acceptance";
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome poisson_identity() {
  const auto dir = work_dir() / "poisson";
  std::string err;
  const int code = run_cli({"poisson-check", "--configs", "200", "--seed", "1", "--out", dir.string()}, &err);
  const auto meta = read_json(dir / "metadata.json");
  const int failures = meta["summary"]["failures"].get<int>();
  return {code == 0 && failures == 0, "200 configurations, " + std::to_string(failures) + " failures" + (err.empty() ? "" : "; " + err)};
}

Outcome golden_bounded() {
  const std::vector<RealAlgebraic> alpha{RealAlgebraic::golden()};
  const auto scan = mult_badness(alpha, 1000000);
  const double C = fit_phi(scan.record_stream).phi.C;
  const bool c_ok = std::fabs(C - frozen::kGoldenPhiConstant) <= 1e-9 && scan.worst.m == std::vector<std::int64_t>{1};

  const auto lattice = dani_lattice(alpha);
  const auto weights = WeightSystem::uniform(default_weight(), 2);
  std::vector<double> sups;
  std::string detail = "C=" + num(C) + " sups:";
  for (double N : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const int depth = static_cast<int>(std::ceil(std::log2(N)));
    const auto grid = ScanGrid::make(1, depth, 2, 1);
    sups.push_back(sup_discrepancy(lattice, weights, N, grid).estimate);
    detail += " " + num(sups.back());
  }
  const double head = std::max({sups[0], sups[1], sups[2]});
  const bool bounded = std::all_of(sups.begin(), sups.end(), [](double s) { return s <= frozen::kGoldenSupBound; });
  const bool flat = sups.back() <= 1.2 * head;
  return {c_ok && bounded && flat, detail + " (bound " + num(frozen::kGoldenSupBound) + ", last/max(first three) " +
                                       num(sups.back() / head) + ")"};
}

Outcome classical_contrast() {
  std::vector<double> x, y;
  for (double N : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    x.push_back(std::log10(N));
    y.push_back(classical_star_discrepancy_1d(RealAlgebraic::golden(), static_cast<std::int64_t>(N)));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= 0.5, "slope " + num(slope) + " per decade"};
}

Outcome liouville_witnesses() {
  const auto lattice = Lattice::parse("dani:liouville:5");
  const auto weights = WeightSystem::uniform(default_weight(), 2);
  const auto phi = PhiFunction::log_power(1.0, 2.0, 0.0);
  bool ok = true;
  double prev = -1e300;
  std::string detail = "measured vs bound:";
  for (std::int64_t m : {4LL, 64LL, 1LL << 24}) {
    const auto w = lower_bound_witness(lattice, weights, dani_dual_point(lattice, std::vector<std::int64_t>{m}), phi);
    ok = ok && w.measured.value >= w.lower_bound - w.measured.tail_bound && w.measured.value > prev;
    prev = w.measured.value;
    detail += " " + num(w.measured.value) + ">=" + num(w.lower_bound);
  }
  return {ok, detail};
}

Outcome bohr_sets() {
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<std::vector<std::string>, std::string>> runs{
      {{"--alpha", "golden", "--phi", "fit:1000000"}, "golden"},
      {{"--lattice", "minkowski:cubic:7", "--phi", "fit:1000"}, "cubic:7"}};
  for (const auto& [target, name] : runs) {
    const auto dir = work_dir() / ("bohr_" + std::to_string(detail.size()));
    std::vector<std::string> args{"bohr"};
    args.insert(args.end(), target.begin(), target.end());
    for (const char* a : {"--configs", "25", "--seed", "1", "--out"}) args.emplace_back(a);
    args.push_back(dir.string());
    const int code = run_cli(args);
    const auto s = read_json(dir / "metadata.json")["summary"];
    const double ratio = s["max_ratio"].get<double>();
    const bool empty = s["all_empty"].get<bool>();
    ok = ok && code == 0 && empty && ratio <= frozen::kBohrRatioBound;
    detail += name + ": max ratio " + num(ratio) + (empty ? ", U empty; " : ", U NOT empty; ");
  }
  return {ok, detail + "bound " + num(frozen::kBohrRatioBound)};
}

Outcome geometry_of_numbers() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_mahler = 1e300;
  for (int t = 0; t < 100; ++t) {
    const auto lat = random_unimodular(3, rng, 20.0);
    std::vector<double> s;
    for (int i = 0; i < 3; ++i) s.push_back(std::exp(u(rng)));
    const double lk = successive_minima(lat, BodyNorm::box(s)).back().value;
    const double l1 = successive_minima(dual_lattice(lat), BodyNorm::cross(s)).front().value;
    worst_mahler = std::min(worst_mahler, lk * l1);
  }
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x, s;
    for (int i = 0; i < 3; ++i) {
      x.push_back(u(rng));
      s.push_back(std::exp(u(rng)));
    }
    const double g = BodyNorm::cross(s)(x);
    if (std::fabs(g - 1.0) > 1e-12 && in_polar_of_box(x, s) != (g <= 1.0)) ++mismatches;
  }
  const auto m = minkowski_lattice("cubic:7");
  double worst_norm = 1e300;
  std::size_t points = 0;
  for (const auto& p : enumerate_box(m.unscaled, SymBox{{8.0, 8.0, 8.0}})) {
    if (std::all_of(p.coeffs.begin(), p.coeffs.end(), [](auto c) { return c == 0; })) continue;
    worst_norm = std::min(worst_norm, std::fabs(p.x[0] * p.x[1] * p.x[2]));
    ++points;
  }
  const double det2 = m.det_unscaled * m.det_unscaled;
  const bool ok = worst_mahler >= 1.0 - 1e-9 && mismatches == 0 && worst_norm >= 1.0 - 1e-9 && std::fabs(det2 - 49.0) <= 1e-6;
  return {ok, "min lambda_k lambda_1* " + num(worst_mahler) + ", polar mismatches " + std::to_string(mismatches) +
                  ", min |norm| " + num(worst_norm) + " over " + std::to_string(points) + " points, det^2 " + num(det2)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.3, 2.0), g(-0.5, 0.5);
  int mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + t % 3;
    const auto lat = random_unimodular(k, rng, 10.0);
    SymBox box;
    std::vector<double> shift;
    for (int i = 0; i < k; ++i) {
      box.s.push_back(u(rng));
      shift.push_back(t % 2 ? g(rng) : 0.0);
    }
    std::vector<std::vector<std::int64_t>> got;
    for (const auto& p : enumerate_box(lat, box, shift)) got.push_back(p.coeffs);
    if (got != oracle::naive_enumerate(lat, box, shift)) ++mismatches;
  }
  int badness_mismatches = 0;
  const std::vector<std::vector<RealAlgebraic>> inputs{
      {RealAlgebraic::golden()}, {RealAlgebraic::cubic7()}, {RealAlgebraic::sqrt(2), RealAlgebraic::sqrt(3)},
      {RealAlgebraic::cubic7(), RealAlgebraic::cubic7().squared()}};
  for (const auto& alpha : inputs) {
    for (std::int64_t M : {50, 500}) {
      const auto fast = mult_badness(alpha, M);
      const auto slow = oracle::naive_badness(alpha, M);
      if (fast.worst.m != slow.m || std::fabs(fast.worst.quality - slow.quality) > 1e-12 * std::max(1.0, slow.quality)) {
        ++badness_mismatches;
      }
    }
  }
  return {mismatches == 0 && badness_mismatches == 0,
          "enumeration mismatches " + std::to_string(mismatches) + "/100, badness mismatches " +
              std::to_string(badness_mismatches) + "/8"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Poisson identity", poisson_identity},
      {"golden ratio bounded", golden_bounded},
      {"classical contrast", classical_contrast},
      {"Liouville witnesses", liouville_witnesses},
      {"Bohr sets", bohr_sets},
      {"geometry of numbers", geometry_of_numbers},
      {"oracle equivalence", oracle_equivalence}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
