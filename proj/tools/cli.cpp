#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smoothdisc/discrepancy.hpp"
#include "smoothdisc/errors.hpp"
#include "smoothdisc/frozen_constants.hpp"
#include "smoothdisc/report.hpp"

namespace smoothdisc::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using report::fmt;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// "start:ratio:count" or a comma list.
std::vector<double> parse_schedule(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw InvalidArgument("N schedule must be start:ratio:count");
    const double start = std::stod(parts[0]);
    const double ratio = std::stod(parts[1]);
    const int count = std::stoi(parts[2]);
    if (!(start >= 1.0) || !(ratio > 1.0) || count < 1) throw InvalidArgument("N schedule needs start >= 1, ratio > 1, count >= 1");
    double n = start;
    for (int i = 0; i < count; ++i, n *= ratio) out.push_back(std::round(n));
  } else {
    for (const auto& p : split(spec, ',')) out.push_back(std::stod(p));
  }
  if (out.empty()) throw InvalidArgument("empty N schedule");
  for (double n : out) {
    if (!(n >= 1.0)) throw InvalidArgument("N values must be at least 1");
  }
  return out;
}

std::vector<RealAlgebraic> parse_alpha(const std::string& spec) {
  std::vector<RealAlgebraic> out;
  for (const auto& p : split(spec, ';')) out.push_back(RealAlgebraic::parse(p));
  if (out.empty()) throw InvalidArgument("empty alpha");
  return out;
}

struct Target {
  std::string alpha;
  std::string lattice;

  void add_options(CLI::App* app) {
    app->add_option("--alpha", alpha, "Kronecker vector, entries separated by ';' (golden, sqrt:2, cubic:7, cubic:7^2, liouville:5, ...)");
    app->add_option("--lattice", lattice, "Lattice spec (dani:..., minkowski:cubic:7, identity:k, explicit:...)");
  }

  [[nodiscard]] Lattice resolve() const {
    if (!alpha.empty() && !lattice.empty()) throw InvalidArgument("give either --alpha or --lattice, not both");
    if (!alpha.empty()) return dani_lattice(parse_alpha(alpha));
    if (!lattice.empty()) return Lattice::parse(lattice);
    throw InvalidArgument("one of --alpha or --lattice is required");
  }

  [[nodiscard]] std::string label() const { return alpha.empty() ? lattice : "dani:" + alpha; }
};

struct PhiChoice {
  PhiFunction phi;
  json info;
};

// "fit:M" fits the family to a scan up to height M; anything else is a phi spec.
PhiChoice resolve_phi(const std::string& spec, const Target& target, const Lattice& lattice) {
  PhiChoice c;
  if (!spec.starts_with("fit:")) {
    c.phi = PhiFunction::parse(spec);
    c.info = {{"phi", c.phi.to_string()}, {"source", "declared"}};
    return c;
  }
  const double max_height = std::stod(spec.substr(4));
  std::vector<ApproxRecord> records;
  if (!target.alpha.empty()) {
    const auto alpha = parse_alpha(target.alpha);
    records = mult_badness(alpha, static_cast<std::int64_t>(max_height)).record_stream;
  } else {
    records = dual_record_stream(lattice, max_height);
  }
  const PhiFit fit = fit_phi(records);
  c.phi = fit.phi;
  c.info = {{"phi", c.phi.to_string()},
            {"source", "fit"},
            {"member_index", fit.member_index},
            {"verified_up_to", fit.verified_up_to},
            {"holdout_consistent", fit.holdout_consistent},
            {"records", records.size()}};
  return c;
}

void write_metadata(const fs::path& dir, const std::string& command, const json& config, const json& summary) {
  json meta = report::run_metadata(command, config);
  meta["summary"] = summary;
  report::write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

std::vector<std::string> level_headers(const char* prefix, int d) {
  std::vector<std::string> h;
  for (int i = 1; i <= d; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

// ---------------------------------------------------------------- discrepancy

struct DiscrepancyArgs {
  Target target;
  std::string weight = "bspline:m=6,s=2/3";
  std::string phi = "fit:10000";
  std::string schedule = "100:10:5";
  int depth = -1;
  int samples = 2;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  unsigned threads = 0;
  std::string out = "out/discrepancy";
};

int cmd_discrepancy(const DiscrepancyArgs& a, std::ostream& out) {
  const Lattice lattice = a.target.resolve();
  const int k = lattice.dim();
  const int d = k - 1;
  const WeightSystem weights = WeightSystem::parse(a.weight, k);
  const auto schedule = parse_schedule(a.schedule);
  const PhiChoice phi = resolve_phi(a.phi, a.target, lattice);

  std::vector<std::string> sup_header{"N", "sup", "phi_L", "ratio", "method", "depth"};
  for (auto& h : level_headers("level_", d)) sup_header.push_back(h);
  sup_header.push_back("tail");
  sup_header.push_back("boxes");
  report::CsvTable sup_csv(sup_header);
  std::vector<std::string> eval_header{"method", "N"};
  for (auto& h : level_headers("rho_", d)) eval_header.push_back(h);
  for (auto& h : level_headers("gamma_", d)) eval_header.push_back(h);
  for (const char* h : {"value", "tail", "terms", "expected"}) eval_header.emplace_back(h);
  report::CsvTable eval_csv(eval_header);

  report::Series sup_series{"sup |D| (grid)", {}, {}};
  report::Series phi_series{"phi(L(N))", {}, {}};
  double max_ratio = 0.0;
  for (double N : schedule) {
    const int depth = a.depth >= 0 ? a.depth : std::clamp(static_cast<int>(std::ceil(std::log2(N) / d)), 1, 24);
    ScanGrid grid = ScanGrid::make(d, depth, a.samples, a.seed);
    grid.dual.tol = a.tol;
    grid.threads = a.threads;
    const SupEstimate s = sup_discrepancy(lattice, weights, N, grid);
    const double phi_l = phi.phi(invert_L(N, phi.phi));
    const double ratio = s.estimate / phi_l;
    max_ratio = std::max(max_ratio, ratio);
    std::vector<std::string> row{fmt(N), fmt(s.estimate), fmt(phi_l), fmt(ratio), to_string(s.method), std::to_string(depth)};
    for (int l : s.argmax_level) row.push_back(std::to_string(l));
    row.push_back(fmt(s.tail_bound));
    row.push_back(std::to_string(s.boxes));
    sup_csv.add_row(row);

    std::vector<std::string> ev{to_string(s.result.method), fmt(N)};
    for (double r : s.argmax.rho) ev.push_back(fmt(r));
    for (double g : s.argmax.gamma) ev.push_back(fmt(g));
    ev.push_back(fmt(s.result.value));
    ev.push_back(fmt(s.result.tail_bound));
    ev.push_back(std::to_string(s.result.terms));
    ev.push_back(fmt(s.result.expected));
    eval_csv.add_row(ev);

    sup_series.x.push_back(N);
    sup_series.y.push_back(s.estimate);
    phi_series.x.push_back(N);
    phi_series.y.push_back(phi_l);
    out << "N=" << fmt(N) << " sup=" << fmt(s.estimate) << " phi(L(N))=" << fmt(phi_l) << " ratio=" << fmt(ratio) << '\n';
  }

  const fs::path dir(a.out);
  sup_csv.write(dir / "sup.csv");
  eval_csv.write(dir / "evaluations.csv");
  report::write_text(dir / "sup.svg", report::svg_line_plot({sup_series, phi_series},
                                                            {"Smooth discrepancy, " + a.target.label(), "N", "value", true}));
  const json config{{"target", a.target.label()}, {"weight", weights.spec()}, {"phi", a.phi}, {"schedule", a.schedule},
                    {"depth", a.depth},           {"samples", a.samples},    {"seed", a.seed}, {"tol", a.tol}};
  write_metadata(dir, "discrepancy", config, {{"phi", phi.info}, {"max_ratio", max_ratio}});
  return kOk;
}

// -------------------------------------------------------------- poisson-check

struct PoissonArgs {
  int configs = 200;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string weight = "bspline:m=6,s=2/3";
  bool inject_fault = false;
  std::string out = "out/poisson";
};

int cmd_poisson_check(const PoissonArgs& a, std::ostream& out, std::ostream& err) {
  if (a.configs < 1) throw InvalidArgument("--configs must be positive");
  if (!(a.tol > 0.0)) throw InvalidArgument("--tol must be positive");
  const std::vector<std::pair<std::string, Lattice>> lattices{
      {"golden", dani_lattice(std::vector<RealAlgebraic>{RealAlgebraic::golden()})},
      {"sqrt:2", dani_lattice(std::vector<RealAlgebraic>{RealAlgebraic::sqrt(2)})},
      {"cubic:7;cubic:7^2", dani_lattice(std::vector<RealAlgebraic>{RealAlgebraic::cubic7(), RealAlgebraic::cubic7().squared()})}};
  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<int> level(0, 8);
  std::uniform_real_distribution<double> log_n(2.0, 4.0);
  std::uniform_int_distribution<int> pick_1d(0, 1);

  report::CsvTable csv({"index", "d", "alpha", "N", "rho_1", "rho_2", "direct", "dual", "tail", "abs_diff", "tol", "dual_terms", "pass"});
  int failures = 0;
  for (int idx = 0; idx < a.configs; ++idx) {
    const int d = idx % 2 == 0 ? 1 : 2;
    const auto& [name, lattice] = d == 1 ? lattices[static_cast<std::size_t>(pick_1d(rng))] : lattices[2];
    std::vector<double> rho;
    for (int i = 0; i < d; ++i) rho.push_back(std::ldexp(0.499, -level(rng)));
    const double N = std::round(std::pow(10.0, log_n(rng)));
    const WeightSystem weights = WeightSystem::parse(a.weight, d + 1);
    const TestBox box = TestBox::centered_at_origin(rho);

    const DiscrepancyResult direct = direct_discrepancy(lattice, weights, box, N);
    DualOptions opt;
    opt.tol = a.tol;
    DiscrepancyResult dual;
    while (true) {
      try {
        dual = dual_discrepancy(lattice, weights, box, N, opt);
        break;
      } catch (const BudgetExceeded&) {
        if (opt.tol >= 1e-3) throw;
        opt.tol *= 10.0;
      }
    }
    if (a.inject_fault) dual.value = -dual.value;
    const double diff = std::fabs(direct.value - dual.value);
    const bool pass = diff <= dual.tail_bound + 1e-8;
    csv.add_row({std::to_string(idx), std::to_string(d), name, fmt(N), fmt(rho[0]), d > 1 ? fmt(rho[1]) : "", fmt(direct.value),
                 fmt(dual.value), fmt(dual.tail_bound), fmt(diff), fmt(opt.tol), std::to_string(dual.terms), pass ? "1" : "0"});
    if (!pass) {
      if (failures == 0) {
        err << "poisson-check: first failure at config " << idx << ": alpha=" << name << " N=" << fmt(N) << " rho=" << fmt(rho[0])
            << (d > 1 ? "," + fmt(rho[1]) : "") << " direct=" << fmt(direct.value) << " dual=" << fmt(dual.value)
            << " tail=" << fmt(dual.tail_bound) << '\n';
      }
      ++failures;
    }
  }
  const fs::path dir(a.out);
  csv.write(dir / "poisson.csv");
  const json config{{"configs", a.configs}, {"seed", a.seed}, {"tol", a.tol}, {"weight", a.weight}, {"inject_fault", a.inject_fault}};
  write_metadata(dir, "poisson-check", config, {{"failures", failures}});
  out << "poisson-check: " << a.configs - failures << "/" << a.configs << " configurations pass\n";
  return failures == 0 ? kOk : kCheckFailed;
}

// -------------------------------------------------------------------- witness

struct WitnessArgs {
  Target target;
  std::string weight = "bspline:m=6,s=2/3";
  std::string phi = "fit:10000";
  std::string m;
  int count = 0;
  double max_height = 1e4;
  double tol = 1e-9;
  std::string out = "out/witness";
};

std::vector<DualApprox> witness_candidates(const WitnessArgs& a, const Lattice& lattice) {
  std::vector<DualApprox> out;
  const int d = lattice.dim() - 1;
  const bool dani = lattice.provenance().kind == Provenance::Kind::Dani;
  if (!a.m.empty()) {
    if (!dani) throw InvalidArgument("--m needs a Dani lattice (--alpha)");
    for (const auto& group : split(a.m, ';')) {
      std::vector<std::int64_t> m;
      for (const auto& v : split(group, ',')) m.push_back(std::stoll(v));
      if (static_cast<int>(m.size()) == d) {
        out.push_back(dani_dual_point(lattice, m));
      } else if (d == 1) {
        for (auto v : m) out.push_back(dani_dual_point(lattice, std::vector<std::int64_t>{v}));
      } else {
        throw InvalidArgument("each --m group needs d entries");
      }
    }
    return out;
  }
  if (dani && d == 1 && !a.target.alpha.empty()) {
    // Convergent denominators are the record approximations in dimension one.
    const auto alpha = parse_alpha(a.target.alpha);
    ContinuedFraction cf;
    for (std::size_t n = 64; n >= 2; n /= 2) {
      try {
        cf = continued_fraction(alpha[0], n);
        break;
      } catch (const PrecisionError&) {
      }
    }
    // The lattice holds alpha in binary64. Past q^2 |alpha - alpha_64| ~ 1e-6
    // its dual points stop tracking the approximations of alpha itself.
    const double representation_error = std::fabs(alpha[0].double_double()[1]) + alpha[0].radius();
    const double q_limit = representation_error > 0.0 ? std::sqrt(1e-6 / representation_error) : 0x1p52;
    std::int64_t q_prev = 0;
    std::int64_t q = 1;
    for (std::size_t i = 1; i < cf.quotients.size(); ++i) {
      const auto next = static_cast<double>(cf.quotients[i]) * static_cast<double>(q) + static_cast<double>(q_prev);
      if (next > std::min(q_limit, 0x1p52)) break;
      q_prev = q;
      q = static_cast<std::int64_t>(next);
      out.push_back(dani_dual_point(lattice, std::vector<std::int64_t>{q}));
    }
    return out;
  }
  for (const auto& r : dual_record_stream(lattice, a.max_height)) out.push_back(dual_point_of(lattice, r));
  return out;
}

int cmd_witness(const WitnessArgs& a, std::ostream& out, std::ostream& err) {
  const Lattice lattice = a.target.resolve();
  const int k = lattice.dim();
  const int d = k - 1;
  const WeightSystem weights = WeightSystem::parse(a.weight, k);
  const PhiChoice phi = resolve_phi(a.phi, a.target, lattice);
  DualOptions opt;
  opt.tol = a.tol;

  std::vector<std::string> header{"j", "H", "lambda_k", "N"};
  for (auto& h : level_headers("rho_", d)) header.push_back(h);
  for (const char* h : {"lower_bound", "measured", "tail", "holds"}) header.emplace_back(h);
  report::CsvTable csv(header);
  report::Series measured{"measured", {}, {}};
  report::Series bound{"vol c^k", {}, {}};
  int accepted = 0;
  int skipped = 0;
  bool all_hold = true;
  const auto candidates = witness_candidates(a, lattice);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (a.count > 0 && accepted >= a.count) break;
    const auto& c = candidates[j];
    Witness w;
    try {
      w = lower_bound_witness(lattice, weights, c, phi.phi, opt);
    } catch (const DomainError& e) {
      err << "witness: skipping candidate " << j << " (H=" << fmt(c.height) << "): " << e.what() << '\n';
      ++skipped;
      continue;
    }
    ++accepted;
    all_hold = all_hold && w.holds;
    std::vector<std::string> row{std::to_string(j), fmt(w.height), fmt(c.lambda.back()), fmt(w.N)};
    for (double r : w.box.rho) row.push_back(fmt(r));
    row.push_back(fmt(w.lower_bound));
    row.push_back(fmt(w.measured.value));
    row.push_back(fmt(w.measured.tail_bound));
    row.push_back(w.holds ? "1" : "0");
    csv.add_row(row);
    measured.x.push_back(w.N);
    measured.y.push_back(w.measured.value);
    bound.x.push_back(w.N);
    bound.y.push_back(w.lower_bound);
    out << "witness j=" << j << " H=" << fmt(w.height) << " N=" << fmt(w.N) << " bound=" << fmt(w.lower_bound)
        << " measured=" << fmt(w.measured.value) << (w.holds ? "" : "  VIOLATED") << '\n';
  }
  const fs::path dir(a.out);
  csv.write(dir / "witness.csv");
  report::write_text(dir / "witness.svg",
                     report::svg_line_plot({measured, bound}, {"Lower-bound witnesses, " + a.target.label(), "N", "value", true}));
  const json config{{"target", a.target.label()}, {"weight", weights.spec()}, {"phi", a.phi}, {"m", a.m},
                    {"count", a.count},           {"max_height", a.max_height}, {"tol", a.tol}};
  write_metadata(dir, "witness", config,
                 {{"phi", phi.info}, {"accepted", accepted}, {"skipped", skipped}, {"all_hold", all_hold},
                  {"witness_constant", witness_constant(weights)}});
  out << "witness: " << accepted << " accepted, " << skipped << " skipped\n";
  return all_hold ? kOk : kCheckFailed;
}

// ----------------------------------------------------------------- littlewood

struct LittlewoodArgs {
  std::string alpha;
  std::string beta;
  std::int64_t horizon = 10000;
  std::string out = "out/littlewood";
};

int cmd_littlewood(const LittlewoodArgs& a, std::ostream& out) {
  const RealAlgebraic alpha = RealAlgebraic::parse(a.alpha);
  const RealAlgebraic beta = RealAlgebraic::parse(a.beta);
  const auto t = littlewood_trajectory(alpha, beta, a.horizon);
  report::CsvTable csv({"n", "product", "dist_alpha", "dist_beta", "n_log_n_product"});
  report::Series s{"n ||n a|| ||n b||", {}, {}};
  for (const auto& r : t.records) {
    const double n = static_cast<double>(r.n);
    csv.add_row({fmt(r.n), fmt(r.product), fmt(r.dist_alpha), fmt(r.dist_beta), fmt(r.product * std::max(1.0, std::log(n)))});
    s.x.push_back(n);
    s.y.push_back(r.product);
  }
  const fs::path dir(a.out);
  csv.write(dir / "littlewood.csv");
  report::write_text(dir / "littlewood.svg", report::svg_line_plot({s}, {"Littlewood record minima", "n", "product", true}));
  write_metadata(dir, "littlewood", {{"alpha", a.alpha}, {"beta", a.beta}, {"horizon", a.horizon}},
                 {{"records", t.records.size()}, {"precision_warning", t.precision_warning}, {"first_warning_n", t.first_warning_n}});
  out << "littlewood: " << t.records.size() << " records up to n=" << a.horizon
      << (t.precision_warning ? " (precision warning)" : "") << '\n';
  return kOk;
}

// ----------------------------------------------------------------------- bohr

struct BohrArgs {
  Target target;
  std::string phi = "fit:10000";
  int configs = 50;
  std::uint64_t seed = 1;
  double min_N = 1e2;
  double max_N = 1e5;
  std::string out = "out/bohr";
};

int cmd_bohr(const BohrArgs& a, std::ostream& out, std::ostream& err) {
  const Lattice lattice = a.target.resolve();
  const Lattice dual = dual_lattice(lattice);
  const int k = lattice.dim();
  const int d = k - 1;
  const PhiChoice phi = resolve_phi(a.phi, a.target, lattice);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::string> header{"index", "N"};
  for (auto& h : level_headers("rho_", d)) header.push_back(h);
  for (const char* h : {"vol", "phi_L", "count", "ratio", "uncertainty_empty", "quarter_empty", "inhom_count", "inhom_ratio"}) {
    header.emplace_back(h);
  }
  report::CsvTable csv(header);
  double max_ratio = 0.0;
  double max_inhom = 0.0;
  bool all_empty = true;
  for (int idx = 0; idx < a.configs; ++idx) {
    double N = 0.0;
    double phi_l = 0.0;
    std::vector<double> rho(static_cast<std::size_t>(d));
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw Error("could not sample a Bohr configuration with vol >= phi(L(N))");
      N = std::round(std::exp(std::log(a.min_N) + unit(rng) * (std::log(a.max_N) - std::log(a.min_N))));
      phi_l = phi.phi(invert_L(N, phi.phi));
      const double room = std::log2(N / phi_l);
      if (room < 0) continue;
      double prod = N;
      for (auto& r : rho) {
        r = 0.499 * std::exp2(-unit(rng) * room / d);
        prod *= r;
      }
      if (prod >= phi_l) break;
    }
    const auto hom = bohr_count(lattice, {}, N, rho);
    std::vector<double> gamma(static_cast<std::size_t>(k));
    for (auto& g : gamma) g = unit(rng);
    const auto inhom = bohr_count(lattice, gamma, N, rho);

    // U: nonzero dual points with lambda <= rho^-1 componentwise and |lambda_k| <= 1/N.
    SymBox ubox;
    for (double r : rho) ubox.s.push_back(1.0 / r);
    ubox.s.push_back(1.0 / N);
    bool uncertainty_empty = true;
    for_each_in_box(dual, ubox, {}, [&](std::span<const std::int64_t> c, std::span<const double> x) {
      if (std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v == 0; })) return;
      if (std::any_of(x.begin(), x.end() - 1, [](double v) { return v != 0.0; })) uncertainty_empty = false;
    });
    SymBox qbox;
    for (double s : ubox.s) qbox.s.push_back(0.25 * s);
    bool quarter_empty = true;
    for_each_in_box(dual, qbox, {}, [&](std::span<const std::int64_t> c, std::span<const double>) {
      if (std::any_of(c.begin(), c.end(), [](std::int64_t v) { return v != 0; })) quarter_empty = false;
    });
    all_empty = all_empty && uncertainty_empty && quarter_empty;
    max_ratio = std::max(max_ratio, hom.ratio);
    max_inhom = std::max(max_inhom, inhom.ratio);
    std::vector<std::string> row{std::to_string(idx), fmt(N)};
    for (double r : rho) row.push_back(fmt(r));
    for (const auto& v : {fmt(hom.vol), fmt(phi_l), std::to_string(hom.count), fmt(hom.ratio), std::string(uncertainty_empty ? "1" : "0"),
                          std::string(quarter_empty ? "1" : "0"), std::to_string(inhom.count), fmt(inhom.ratio)}) {
      row.push_back(v);
    }
    csv.add_row(row);
    if (!uncertainty_empty || !quarter_empty) err << "bohr: nonzero dual point in the uncertainty box at config " << idx << '\n';
  }
  const bool bounded = max_ratio <= frozen::kBohrRatioBound;
  if (!bounded) err << "bohr: #B/vol(B) = " << fmt(max_ratio) << " exceeds " << fmt(frozen::kBohrRatioBound) << '\n';
  const fs::path dir(a.out);
  csv.write(dir / "bohr.csv");
  write_metadata(dir, "bohr",
                 {{"target", a.target.label()}, {"phi", a.phi}, {"configs", a.configs}, {"seed", a.seed}, {"min_N", a.min_N}, {"max_N", a.max_N}},
                 {{"phi", phi.info}, {"max_ratio", max_ratio}, {"max_inhomogeneous_ratio", max_inhom}, {"all_empty", all_empty}});
  out << "bohr: max #B/vol(B) = " << fmt(max_ratio) << ", inhomogeneous max = " << fmt(max_inhom)
      << (all_empty ? ", uncertainty set empty throughout" : ", uncertainty set NOT empty") << '\n';
  return all_empty && bounded ? kOk : kCheckFailed;
}

// ------------------------------------------------------------- scan-classical

struct ClassicalArgs {
  std::string alpha = "golden";
  std::string schedule = "100:10:5";
  std::string out = "out/classical";
};

int cmd_scan_classical(const ClassicalArgs& a, std::ostream& out) {
  const RealAlgebraic alpha = RealAlgebraic::parse(a.alpha);
  const auto schedule = parse_schedule(a.schedule);
  report::CsvTable csv({"N", "log10_N", "star_discrepancy"});
  report::Series s{"N D*_N", {}, {}};
  std::vector<double> xs, ys;
  for (double N : schedule) {
    const double v = classical_star_discrepancy_1d(alpha, static_cast<std::int64_t>(N));
    csv.add_row({fmt(N), fmt(std::log10(N)), fmt(v)});
    s.x.push_back(N);
    s.y.push_back(v);
    xs.push_back(std::log10(N));
    ys.push_back(v);
  }
  double slope = 0.0;
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = sxy / sxx;
  }
  const fs::path dir(a.out);
  csv.write(dir / "classical.csv");
  report::write_text(dir / "classical.svg", report::svg_line_plot({s}, {"Classical star discrepancy, " + a.alpha, "N", "N D*_N", true}));
  write_metadata(dir, "scan-classical", {{"alpha", a.alpha}, {"schedule", a.schedule}}, {{"slope_per_decade", slope}});
  out << "scan-classical: slope per decade " << fmt(slope) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth discrepancy of Kronecker sequences and lattices"};
  app.require_subcommand(1);

  DiscrepancyArgs disc;
  auto* c_disc = app.add_subcommand("discrepancy", "Grid sup of the smooth discrepancy against phi(L(N))");
  disc.target.add_options(c_disc);
  c_disc->add_option("--weight", disc.weight, "Weight spec");
  c_disc->add_option("--phi", disc.phi, "phi spec (const:C, logpow:C=..,a=..,b=..) or fit:M");
  c_disc->add_option("--N", disc.schedule, "N schedule start:ratio:count or a comma list");
  c_disc->add_option("--depth", disc.depth, "Dyadic radius depth J (default ceil(log2 N / d))");
  c_disc->add_option("--samples", disc.samples, "Random centers besides the origin");
  c_disc->add_option("--seed", disc.seed, "Seed for sampled centers");
  c_disc->add_option("--tol", disc.tol, "Dual tail tolerance");
  c_disc->add_option("--threads", disc.threads, "Worker threads (0: all cores)");
  c_disc->add_option("--out", disc.out, "Output directory");

  PoissonArgs pois;
  auto* c_pois = app.add_subcommand("poisson-check", "Randomised direct-vs-dual equality suite");
  c_pois->add_option("--configs", pois.configs, "Number of configurations");
  c_pois->add_option("--seed", pois.seed, "Seed");
  c_pois->add_option("--tol", pois.tol, "Initial dual tail tolerance");
  c_pois->add_option("--weight", pois.weight, "Weight spec");
  c_pois->add_flag("--inject-fault", pois.inject_fault, "Flip the sign of every dual value (self-test of the checker)");
  c_pois->add_option("--out", pois.out, "Output directory");

  WitnessArgs wit;
  auto* c_wit = app.add_subcommand("witness", "Lower-bound witnesses from good dual approximations");
  wit.target.add_options(c_wit);
  c_wit->add_option("--weight", wit.weight, "Weight spec");
  c_wit->add_option("--phi", wit.phi, "phi spec or fit:M");
  c_wit->add_option("--m", wit.m, "Explicit integer vectors m (groups separated by ';', entries by ',')");
  c_wit->add_option("--count", wit.count, "Stop after this many accepted witnesses (0: all)");
  c_wit->add_option("--max-height", wit.max_height, "Height bound for dual record streams");
  c_wit->add_option("--tol", wit.tol, "Dual tail tolerance");
  c_wit->add_option("--out", wit.out, "Output directory");

  LittlewoodArgs lw;
  auto* c_lw = app.add_subcommand("littlewood", "Record minima of n ||n alpha|| ||n beta||");
  c_lw->add_option("--alpha", lw.alpha, "alpha")->required();
  c_lw->add_option("--beta", lw.beta, "beta")->required();
  c_lw->add_option("--horizon", lw.horizon, "Largest n");
  c_lw->add_option("--out", lw.out, "Output directory");

  BohrArgs bohr;
  auto* c_bohr = app.add_subcommand("bohr", "Bohr-set size sweep with uncertainty-set checks");
  bohr.target.add_options(c_bohr);
  c_bohr->add_option("--phi", bohr.phi, "phi spec or fit:M");
  c_bohr->add_option("--configs", bohr.configs, "Number of configurations");
  c_bohr->add_option("--seed", bohr.seed, "Seed");
  c_bohr->add_option("--min-N", bohr.min_N, "Smallest N");
  c_bohr->add_option("--max-N", bohr.max_N, "Largest N");
  c_bohr->add_option("--out", bohr.out, "Output directory");

  ClassicalArgs cl;
  auto* c_cl = app.add_subcommand("scan-classical", "Classical star discrepancy of a 1-d Kronecker sequence");
  c_cl->add_option("--alpha", cl.alpha, "alpha");
  c_cl->add_option("--N", cl.schedule, "N schedule");
  c_cl->add_option("--out", cl.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_disc->parsed()) return cmd_discrepancy(disc, out);
    if (c_pois->parsed()) return cmd_poisson_check(pois, out, err);
    if (c_wit->parsed()) return cmd_witness(wit, out, err);
    if (c_lw->parsed()) return cmd_littlewood(lw, out);
    if (c_bohr->parsed()) return cmd_bohr(bohr, out, err);
    if (c_cl->parsed()) return cmd_scan_classical(cl, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: malformed number (" << e.what() << ")\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace smoothdisc::cli
