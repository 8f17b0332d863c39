#include <algorithm>
#include <cmath>

#include "smoothdisc/discrepancy.hpp"
#include "smoothdisc/eft.hpp"
#include "smoothdisc/errors.hpp"

namespace smoothdisc {

double witness_constant(const WeightSystem& weights) {
  constexpr double step = 1e-5;
  double best = 0.0;
  // hat(omega_i) decreases on [0, 1/s_i] and c < 1/2 < 1/s_i, so the minimum
  // over |x| <= c is attained at x = c.
  for (int j = 1; j * step < 0.5; ++j) {
    const double c = j * step;
    double low = std::numeric_limits<double>::infinity();
    for (const auto& w : weights.components()) {
      if (c * w.scale_value() >= 1.0) return best;
      low = std::min(low, w.fourier(c));
    }
    if (low < c * (1.0 + 1e-12)) break;
    best = c;
  }
  if (best <= 0.0) throw DomainError("no admissible witness constant for this weight system");
  return best;
}

DualApprox dani_dual_point(const Lattice& dani, std::span<const std::int64_t> m) {
  const auto& p = dani.provenance();
  if (p.kind != Provenance::Kind::Dani) throw InvalidArgument("dani_dual_point needs a Dani lattice");
  if (m.size() != p.alpha.size()) throw InvalidArgument("m must have d entries");
  eft::CompensatedSum dot;
  for (std::size_t i = 0; i < m.size(); ++i) dot.add(eft::two_prod(static_cast<double>(m[i]), p.alpha[i]));
  const double v = dot.value();
  const double n = std::nearbyint(v);
  DualApprox a;
  for (auto mi : m) a.lambda.push_back(static_cast<double>(mi));
  a.lambda.push_back(n - v);
  a.height = multiplicative_height(m);
  a.error = std::fabs(n - v);
  return a;
}

std::vector<ApproxRecord> dual_record_stream(const Lattice& lattice, double max_height, const EnumerateOptions& options) {
  const int k = lattice.dim();
  if (!(max_height >= 1.0)) throw InvalidArgument("max_height must be at least 1");
  const Lattice dual = dual_lattice(lattice);
  SymBox box;
  box.s.assign(static_cast<std::size_t>(k - 1), max_height);
  box.s.push_back(0.5);
  std::vector<ApproxRecord> all;
  for_each_in_box(
      dual, box, {},
      [&](std::span<const std::int64_t> c, std::span<const double> x) {
        const auto first = std::find_if(c.begin(), c.end(), [](std::int64_t v) { return v != 0; });
        if (first == c.end() || *first < 0) return;  // zero, or the negative of a canonical point
        double h = 1.0;
        for (int i = 0; i + 1 < k; ++i) h *= std::max(1.0, std::fabs(x[static_cast<std::size_t>(i)]));
        ApproxRecord r;
        r.m.assign(c.begin(), c.end());
        r.height = h;
        r.error = std::fabs(x[static_cast<std::size_t>(k - 1)]);
        r.quality = h * r.error;
        all.push_back(std::move(r));
      },
      options);
  std::sort(all.begin(), all.end(), [](const ApproxRecord& a, const ApproxRecord& b) {
    if (a.height != b.height) return a.height < b.height;
    if (a.quality != b.quality) return a.quality < b.quality;
    return a.m < b.m;
  });
  std::vector<ApproxRecord> records;
  for (auto& r : all) {
    if (records.empty() || r.quality < records.back().quality) records.push_back(std::move(r));
  }
  return records;
}

DualApprox dual_point_of(const Lattice& lattice, const ApproxRecord& record) {
  const int k = lattice.dim();
  if (static_cast<int>(record.m.size()) != k) throw InvalidArgument("record coefficients must have k entries");
  const auto x = dual_lattice(lattice).point(record.m);
  DualApprox a;
  a.lambda = x;
  a.height = 1.0;
  for (int i = 0; i + 1 < k; ++i) a.height *= std::max(1.0, std::fabs(x[static_cast<std::size_t>(i)]));
  a.error = std::fabs(x[static_cast<std::size_t>(k - 1)]);
  return a;
}

Witness lower_bound_witness(const Lattice& lattice, const WeightSystem& weights, const DualApprox& approx,
                            const PhiFunction& phi, const DualOptions& options) {
  const int k = lattice.dim();
  if (static_cast<int>(approx.lambda.size()) != k) throw InvalidArgument("dual point must have k entries");
  const double H = approx.height;
  const double ph = phi(H);
  if (!(H * approx.error < 1.0 / ph)) {
    throw DomainError("approximation violates H |lambda_k| < 1/phi(H)");
  }
  // The point must really lie in the dual lattice.
  const Matrix& a = lattice.basis();
  for (int j = 0; j < k; ++j) {
    std::vector<double> col(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) col[static_cast<std::size_t>(i)] = a(i, j);
    const double pairing = eft::dot2(col, approx.lambda);
    if (std::fabs(pairing - std::nearbyint(pairing)) > 1e-6) throw InvalidArgument("point is not in the dual lattice");
  }

  Witness w;
  w.c = witness_constant(weights);
  w.height = H;
  w.N = std::floor(w.c * ph * H);
  if (w.N < 1.0) throw DomainError("witness too small: N < 1");
  w.box.gamma.assign(static_cast<std::size_t>(k - 1), 0.0);
  for (int i = 0; i + 1 < k; ++i) {
    const double r = w.c / (1.0 + std::fabs(approx.lambda[static_cast<std::size_t>(i)]));
    if (!(r < 0.5)) throw DomainError("witness too small: rho >= 1/2");
    w.box.rho.push_back(r);
  }
  w.lower_bound = w.box.volume(w.N) / lattice.det_abs() * std::pow(w.c, k);
  w.measured = dual_discrepancy(lattice, weights, w.box, w.N, options);
  w.holds = w.measured.value >= w.lower_bound - w.measured.tail_bound;
  return w;
}

}  // namespace smoothdisc
