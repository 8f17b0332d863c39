#include "smoothdisc/discrepancy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "smoothdisc/eft.hpp"
#include "smoothdisc/errors.hpp"

namespace smoothdisc {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_plain_dani(const Lattice& lattice) {
  const auto& p = lattice.provenance();
  return p.kind == Provenance::Kind::Dani && static_cast<int>(p.alpha.size()) == lattice.dim() - 1;
}

void check_inputs(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N) {
  const int k = lattice.dim();
  if (k < 2) throw InvalidArgument("discrepancy needs k >= 2");
  if (weights.dimension() != k) throw InvalidArgument("weight system dimension does not match the lattice");
  box.validate(k - 1);
  if (!(N > 0.0) || !std::isfinite(N)) throw InvalidArgument("horizon N must be positive");
}

std::vector<double> scales(const TestBox& box, double N) {
  std::vector<double> sigma(box.rho);
  sigma.push_back(N);
  return sigma;
}

// Dyadic cells in scaled frequency space xi = sigma o lambda. Along axis i,
// level -1 is |xi_i| <= x0_i = 1/(pi s_i), where the envelope is flat, and
// level j >= 0 is 2^j x0_i < |xi_i| <= 2^(j+1) x0_i, where it is at most
// s_i 2^(-m_i j). A truncation keeps the cells whose envelope bound is at
// least tau (a hyperbolic cross) and bounds everything else cell by cell.
class CellModel {
 public:
  CellModel(const Lattice& dual, const WeightSystem& weights, std::span<const double> sigma)
      : k_(dual.dim()), sigma_(sigma.begin(), sigma.end()) {
    const IntMatrix u = lll_reduce(dual.basis(), sigma);
    const Matrix g = transformed_basis(dual.basis(), u, sigma);
    det_ = std::abs(g.fullPivLu().determinant());
    const Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix r = qr.matrixQR();
    for (int i = 0; i < k_; ++i) {
      half_extent_.push_back(0.5 * g.row(i).cwiseAbs().sum());
      gso_.push_back(std::abs(r(i, i)));
      const auto& w = weights[i];
      if (w.order() <= 1) throw InvalidArgument("dual tail bound needs order >= 2");
      order_.push_back(w.order());
      scale_.push_back(w.scale_value());
      x0_.push_back(1.0 / (kPi * w.scale_value()));
    }
  }

  [[nodiscard]] int dim() const noexcept { return k_; }
  [[nodiscard]] double sigma(int i) const noexcept { return sigma_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] int level(int i, double v) const noexcept {
    const double x0 = x0_[static_cast<std::size_t>(i)];
    if (v <= x0) return -1;
    int j = std::max(0, std::ilogb(v / x0) - 1);
    while (v > std::ldexp(x0, j + 1)) ++j;
    while (j > 0 && v <= std::ldexp(x0, j)) --j;
    return j;
  }

  [[nodiscard]] double half_width(int i, int j) const noexcept {
    return std::ldexp(x0_[static_cast<std::size_t>(i)], j < 0 ? 0 : j + 1);
  }

  [[nodiscard]] double axis_value(int i, int j) const noexcept {
    return std::ldexp(scale_[static_cast<std::size_t>(i)], -order_[static_cast<std::size_t>(i)] * std::max(j, 0));
  }

  [[nodiscard]] double cell_value(std::span<const int> j) const noexcept {
    double v = 1.0;
    for (int i = 0; i < k_; ++i) v *= axis_value(i, j[static_cast<std::size_t>(i)]);
    return v;
  }

  // Points of Gamma in the box with the cell's outer half-widths.
  [[nodiscard]] double count_bound(std::span<const int> j) const noexcept {
    double vol_bound = 1.0;
    double r2 = 0.0;
    for (int i = 0; i < k_; ++i) {
      const double b = half_width(i, j[static_cast<std::size_t>(i)]);
      vol_bound *= 2.0 * b + 2.0 * half_extent_[static_cast<std::size_t>(i)];
      r2 += b * b;
    }
    double gso_bound = 1.0;
    for (int i = 0; i < k_; ++i) gso_bound *= 2.0 * std::sqrt(r2) / gso_[static_cast<std::size_t>(i)] + 1.0;
    return std::min(vol_bound / det_, gso_bound) * (1.0 + 1e-12);
  }

  // Factorised volume bound: value * count of axis i at level j, up to 1/det.
  [[nodiscard]] double axis_mass(int i, int j) const noexcept {
    return axis_value(i, j) * (2.0 * half_width(i, j) + 2.0 * half_extent_[static_cast<std::size_t>(i)]);
  }
  [[nodiscard]] double axis_ratio(int i) const noexcept { return std::ldexp(1.0, 1 - order_[static_cast<std::size_t>(i)]); }
  [[nodiscard]] double det() const noexcept { return det_; }
  [[nodiscard]] int top_level(double tau) const noexcept {
    double prod = 1.0;
    for (double s : scale_) prod *= s;
    int top = 0;
    for (int i = 0; i < k_; ++i) {
      const double lv = std::log2(prod / tau) / order_[static_cast<std::size_t>(i)];
      top = std::max(top, static_cast<int>(std::ceil(std::max(0.0, lv))));
    }
    return top;
  }

 private:
  int k_;
  std::vector<double> sigma_;
  double det_ = 1.0;
  std::vector<double> half_extent_, gso_, scale_, x0_;
  std::vector<int> order_;
};

struct Plan {
  double tau = 0.0;
  int top = 0;  // levels -1..top along every axis are tabulated
  std::vector<std::vector<int>> maximal;
  std::vector<int> owner;  // per tabulated cell: index into maximal, or -1
  double tail = 0.0;       // in discrepancy units
  double cost = 0.0;
};

std::size_t cell_index(std::span<const int> j, int top) {
  std::size_t idx = 0;
  for (int v : j) idx = idx * static_cast<std::size_t>(top + 2) + static_cast<std::size_t>(v + 1);
  return idx;
}

bool next_cell(std::vector<int>& j, int top) {
  for (int i = static_cast<int>(j.size()) - 1; i >= 0; --i) {
    if (++j[static_cast<std::size_t>(i)] <= top) return true;
    j[static_cast<std::size_t>(i)] = -1;
  }
  return false;
}

Plan make_plan(const CellModel& model, double tau, double prefactor) {
  const int k = model.dim();
  Plan plan;
  plan.tau = tau;
  plan.top = model.top_level(tau) + 3;
  const int top = plan.top;
  std::size_t cells = 1;
  for (int i = 0; i < k; ++i) cells *= static_cast<std::size_t>(top + 2);
  std::vector<char> kept(cells, 0);
  double excluded = 0.0;
  std::vector<int> j(static_cast<std::size_t>(k), -1);
  do {
    const double v = model.cell_value(j);
    if (v >= tau) {
      kept[cell_index(j, top)] = 1;
    } else {
      excluded += v * model.count_bound(j);
    }
  } while (next_cell(j, top));

  // Cells beyond the table: some axis above `top`.
  double beyond = 0.0;
  for (int i = 0; i < k; ++i) {
    const double r = model.axis_ratio(i);
    double rest = model.axis_mass(i, top + 1) / (1.0 - r);
    for (int o = 0; o < k; ++o) {
      if (o == i) continue;
      double total = model.axis_mass(o, top + 1) / (1.0 - model.axis_ratio(o));
      for (int l = -1; l <= top; ++l) total += model.axis_mass(o, l);
      rest *= total;
    }
    beyond += rest / model.det();
  }
  plan.tail = prefactor * (excluded + beyond) * (1.0 + 1e-12);

  j.assign(static_cast<std::size_t>(k), -1);
  do {
    if (!kept[cell_index(j, top)]) continue;
    bool is_max = true;
    for (int i = 0; i < k && is_max; ++i) {
      auto up = j;
      ++up[static_cast<std::size_t>(i)];
      if (up[static_cast<std::size_t>(i)] <= top && kept[cell_index(up, top)]) is_max = false;
    }
    if (is_max) {
      plan.maximal.push_back(j);
      plan.cost += model.count_bound(j);
    }
  } while (next_cell(j, top));

  plan.owner.assign(cells, -1);
  j.assign(static_cast<std::size_t>(k), -1);
  do {
    const auto idx = cell_index(j, top);
    if (!kept[idx]) continue;
    for (std::size_t t = 0; t < plan.maximal.size(); ++t) {
      bool below = true;
      for (int i = 0; i < k; ++i) below = below && j[static_cast<std::size_t>(i)] <= plan.maximal[t][static_cast<std::size_t>(i)];
      if (below) {
        plan.owner[idx] = static_cast<int>(t);
        break;
      }
    }
  } while (next_cell(j, top));
  return plan;
}

Plan choose_plan(const CellModel& model, double prefactor, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("dual tolerance must be positive");
  double tau = 1.0;
  for (int iter = 0; iter < 900; ++iter, tau *= 0.5) {
    Plan plan = make_plan(model, tau, prefactor);
    if (plan.tail <= tol) return plan;
  }
  throw BudgetExceeded("tol too small for budget");
}

}  // namespace

double TestBox::volume(double N) const noexcept {
  double v = N;
  for (double r : rho) v *= r;
  return v;
}

bool TestBox::centered() const noexcept {
  return std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; });
}

void TestBox::validate(int d) const {
  if (static_cast<int>(rho.size()) != d) throw InvalidArgument("box needs d = " + std::to_string(d) + " radii");
  if (!gamma.empty() && static_cast<int>(gamma.size()) != d) throw InvalidArgument("box center must have d entries");
  for (double r : rho) {
    if (!(r > 0.0 && r < 0.5)) throw InvalidArgument("box radii must lie in (0, 1/2)");
  }
  for (double g : gamma) {
    if (!std::isfinite(g)) throw InvalidArgument("box center must be finite");
  }
}

TestBox TestBox::centered_at_origin(std::vector<double> rho) {
  TestBox b;
  b.gamma.assign(rho.size(), 0.0);
  b.rho = std::move(rho);
  return b;
}

const char* to_string(Method m) noexcept { return m == Method::Direct ? "direct" : "dual"; }

DiscrepancyResult direct_discrepancy(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                                     const EnumerateOptions& options) {
  check_inputs(lattice, weights, box, N);
  const int k = lattice.dim();
  const int d = k - 1;
  auto gamma_at = [&](int i) { return box.gamma.empty() ? 0.0 : box.gamma[static_cast<std::size_t>(i)]; };
  const auto& wk = weights[d];
  eft::CompensatedSum sum;
  std::size_t terms = 0;

  if (is_plain_dani(lattice)) {
    // Points (a + n alpha, n): only the integers a_i nearest to gamma_i - n alpha_i
    // can reach the support, since the support radius in x is below 1.
    const auto& alpha = lattice.provenance().alpha;
    const double reach = wk.support_radius() * N;
    const auto n_max = static_cast<std::int64_t>(std::floor(reach));
    const double cells = 2.0 * static_cast<double>(n_max) + 1.0;
    if (cells > options.budget) throw BudgetExceeded("direct sum over " + std::to_string(cells) + " integers exceeds budget");
    for (std::int64_t n = -n_max; n <= n_max; ++n) {
      const double outer = wk(static_cast<double>(n) / N);
      if (outer == 0.0) continue;
      double prod = outer;
      for (int i = 0; i < d && prod != 0.0; ++i) {
        const auto p = eft::two_prod(static_cast<double>(n), alpha[static_cast<std::size_t>(i)]);
        const auto q = eft::two_sum(p.hi, -gamma_at(i));
        const double t = eft::signed_frac_distance(q.hi, q.lo + p.lo);
        const double rho = box.rho[static_cast<std::size_t>(i)];
        double part = 0.0;
        for (int j = -1; j <= 1; ++j) part += weights[i]((t + j) / rho);
        prod *= part;
      }
      if (prod != 0.0) {
        sum.add(prod);
        ++terms;
      }
    }
  } else {
    SymBox sbox;
    std::vector<double> shift(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < d; ++i) {
      sbox.s.push_back(weights[i].support_radius() * box.rho[static_cast<std::size_t>(i)]);
      shift[static_cast<std::size_t>(i)] = gamma_at(i);
    }
    sbox.s.push_back(wk.support_radius() * N);
    for_each_in_box(
        lattice, sbox, shift,
        [&](std::span<const std::int64_t>, std::span<const double> x) {
          double prod = wk(x[static_cast<std::size_t>(d)] / N);
          for (int i = 0; i < d && prod != 0.0; ++i) prod *= weights[i](x[static_cast<std::size_t>(i)] / box.rho[static_cast<std::size_t>(i)]);
          if (prod != 0.0) {
            sum.add(prod);
            ++terms;
          }
        },
        options);
  }

  DiscrepancyResult r;
  r.method = Method::Direct;
  r.expected = weights.expect_constant() * box.volume(N);
  const auto total = eft::two_sum(sum.value(), -r.expected);
  r.value = total.hi + total.lo;
  r.terms = terms;
  r.rounding = sum.rounding_bound() + 4.0 * 0x1p-53 * (std::fabs(r.value) + r.expected);
  return r;
}

DiscrepancyResult dual_discrepancy(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                                   const DualOptions& options) {
  check_inputs(lattice, weights, box, N);
  const int k = lattice.dim();
  const int d = k - 1;
  const Lattice dual = dual_lattice(lattice);
  const auto sigma = scales(box, N);
  const double vol = box.volume(N);
  const double prefactor = vol / lattice.det_abs();

  const CellModel model(dual, weights, sigma);
  const Plan plan = choose_plan(model, prefactor, options.tol);
  if (plan.cost > options.budget) {
    throw BudgetExceeded("tol too small for budget: about " + std::to_string(plan.cost) + " dual points needed");
  }

  const bool phases = !options.drop_phases && !box.centered();
  std::vector<double> gamma(box.gamma.begin(), box.gamma.end());
  if (gamma.empty()) gamma.assign(static_cast<std::size_t>(d), 0.0);

  eft::CompensatedSum sum;
  std::size_t terms = 0;
  EnumerateOptions eo;
  eo.budget = std::max(1e6, 8.0 * options.budget);
  std::vector<int> cell(static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < plan.maximal.size(); ++t) {
    SymBox sbox;
    for (int i = 0; i < k; ++i) {
      sbox.s.push_back(model.half_width(i, plan.maximal[t][static_cast<std::size_t>(i)]) / sigma[static_cast<std::size_t>(i)]);
    }
    for_each_in_box(
        dual, sbox, {},
        [&](std::span<const std::int64_t> c, std::span<const double> lam) {
          if (std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v == 0; })) return;
          for (int i = 0; i < k; ++i) {
            const int l = model.level(i, std::fabs(sigma[static_cast<std::size_t>(i)] * lam[static_cast<std::size_t>(i)]));
            if (l > plan.top) return;
            cell[static_cast<std::size_t>(i)] = l;
          }
          if (plan.owner[cell_index(cell, plan.top)] != static_cast<int>(t)) return;
          double w = 1.0;
          for (int i = 0; i < k && w != 0.0; ++i) {
            w *= weights[i].fourier(sigma[static_cast<std::size_t>(i)] * lam[static_cast<std::size_t>(i)]);
          }
          if (phases && w != 0.0) {
            const double dot = eft::dot2(lam.subspan(0, static_cast<std::size_t>(d)), gamma);
            const double f = dot - std::nearbyint(dot);
            w *= std::cos(2.0 * kPi * f);
          }
          sum.add(w);
          ++terms;
        },
        eo);
  }

  DiscrepancyResult r;
  r.method = Method::Dual;
  r.expected = weights.expect_constant() * vol;
  // (vol/det)(c + S) - c vol = (vol/det) S + c (vol/det - vol)
  const double c = weights.expect_constant();
  r.value = prefactor * sum.value() + c * (prefactor - vol);
  r.tail_bound = plan.tail;
  r.terms = terms;
  r.cutoff = plan.tau;
  r.rounding = prefactor * sum.rounding_bound() + 4.0 * 0x1p-53 * (std::fabs(r.value) + r.expected);
  return r;
}

double direct_cost(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N) {
  check_inputs(lattice, weights, box, N);
  const int d = lattice.dim() - 1;
  if (is_plain_dani(lattice)) return 2.0 * weights[d].support_radius() * N + 1.0;
  double v = 2.0 * weights[d].support_radius() * N;
  for (int i = 0; i < d; ++i) v *= 2.0 * weights[i].support_radius() * box.rho[static_cast<std::size_t>(i)];
  return v / lattice.det_abs() + 1.0;
}

double dual_cost(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                 const DualOptions& options) {
  check_inputs(lattice, weights, box, N);
  const Lattice dual = dual_lattice(lattice);
  const auto sigma = scales(box, N);
  const CellModel model(dual, weights, sigma);
  try {
    return choose_plan(model, box.volume(N) / lattice.det_abs(), options.tol).cost;
  } catch (const BudgetExceeded&) {
    return std::numeric_limits<double>::infinity();
  }
}

ScanGrid ScanGrid::make(int d, int depth, int samples, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("scan grid needs d >= 1");
  if (depth < 0) throw InvalidArgument("scan depth must be nonnegative");
  ScanGrid g;
  g.depth = depth;
  g.gammas.emplace_back(static_cast<std::size_t>(d), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> gamma(static_cast<std::size_t>(d));
    for (auto& v : gamma) v = unit(rng);
    g.gammas.push_back(std::move(gamma));
  }
  return g;
}

SupEstimate sup_discrepancy(const Lattice& lattice, const WeightSystem& weights, double N, const ScanGrid& grid) {
  const int d = lattice.dim() - 1;
  if (grid.gammas.empty()) throw InvalidArgument("scan grid has no centers");
  const int levels = grid.depth + 1;
  std::size_t per_gamma = 1;
  for (int i = 0; i < d; ++i) per_gamma *= static_cast<std::size_t>(levels);

  struct Cell {
    std::vector<int> level;
    std::size_t gamma_index;
  };
  std::vector<Cell> cells;
  for (std::size_t gi = 0; gi < grid.gammas.size(); ++gi) {
    for (std::size_t idx = 0; idx < per_gamma; ++idx) {
      std::vector<int> level(static_cast<std::size_t>(d));
      std::size_t rest = idx;
      for (int i = d - 1; i >= 0; --i) {
        level[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(levels));
        rest /= static_cast<std::size_t>(levels);
      }
      cells.push_back({std::move(level), gi});
    }
  }
  // Deterministic order for tie-breaking: coarsest depth first, then
  // lexicographic levels, then center index.
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    const int ma = *std::max_element(a.level.begin(), a.level.end());
    const int mb = *std::max_element(b.level.begin(), b.level.end());
    if (ma != mb) return ma < mb;
    if (a.level != b.level) return a.level < b.level;
    return a.gamma_index < b.gamma_index;
  });

  std::vector<DiscrepancyResult> results(cells.size());
  std::vector<TestBox> boxes(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    boxes[c].gamma = grid.gammas[cells[c].gamma_index];
    for (int l : cells[c].level) boxes[c].rho.push_back(std::ldexp(0.499, -l));
  }

  auto evaluate = [&](std::size_t c) {
    const TestBox& box = boxes[c];
    if (!box.centered()) {
      results[c] = direct_discrepancy(lattice, weights, box, N);
      return;
    }
    bool use_dual = true;
    if (grid.cheapest_engine) {
      use_dual = dual_cost(lattice, weights, box, N, grid.dual) < direct_cost(lattice, weights, box, N);
    }
    results[c] = use_dual ? dual_discrepancy(lattice, weights, box, N, grid.dual)
                          : direct_discrepancy(lattice, weights, box, N);
  };

  unsigned threads = grid.threads ? grid.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      try {
        evaluate(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SupEstimate best;
  best.boxes = cells.size();
  bool first = true;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double v = std::fabs(results[c].value);
    if (first || v > best.estimate) {
      first = false;
      best.estimate = v;
      best.argmax = boxes[c];
      best.argmax_level = cells[c].level;
      best.method = results[c].method;
      best.tail_bound = results[c].tail_bound;
      best.result = results[c];
    }
  }
  return best;
}

double classical_star_discrepancy_1d(const RealAlgebraic& alpha, std::int64_t N) {
  if (N < 1) throw InvalidArgument("N must be positive");
  if (N > 10'000'000) throw InvalidArgument("classical discrepancy supports N <= 1e7");
  const auto [hi, lo] = alpha.double_double();
  std::vector<double> x(static_cast<std::size_t>(N));
  for (std::int64_t n = 1; n <= N; ++n) {
    const auto p = eft::two_prod(static_cast<double>(n), hi);
    const double fl = std::floor(p.hi);
    double f = (p.hi - fl) + (p.lo + static_cast<double>(n) * lo);
    f -= std::floor(f);
    x[static_cast<std::size_t>(n - 1)] = f;
  }
  std::sort(x.begin(), x.end());
  const auto nd = static_cast<double>(N);
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pos = nd * x[i];
    best = std::max({best, static_cast<double>(i + 1) - pos, pos - static_cast<double>(i)});
  }
  return best;
}

}  // namespace smoothdisc
