#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smoothdisc/eft.hpp"
#include "smoothdisc/errors.hpp"
#include "smoothdisc/lattice.hpp"

namespace smoothdisc {

namespace {

using i128 = __int128;

// diag(scale) * (A * U), each entry of A * U as a compensated dot product.
Matrix accurate_product(const Matrix& a, const IntMatrix& u, const std::vector<double>& scale) {
  const auto k = a.rows();
  Matrix out(k, k);
  std::vector<double> row(static_cast<std::size_t>(k));
  std::vector<double> col(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index r = 0; r < k; ++r) col[static_cast<std::size_t>(r)] = static_cast<double>(u(r, j));
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index r = 0; r < k; ++r) row[static_cast<std::size_t>(r)] = a(i, r);
      out(i, j) = scale[static_cast<std::size_t>(i)] * eft::dot2(row, col);
    }
  }
  return out;
}

struct Gso {
  std::vector<double> norm2;
  Matrix mu;
};

Gso gram_schmidt(const Matrix& c) {
  const auto k = c.cols();
  Matrix star = c;
  Gso g{std::vector<double>(static_cast<std::size_t>(k)), Matrix::Zero(k, k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double m = c.col(i).dot(star.col(j)) / g.norm2[static_cast<std::size_t>(j)];
      g.mu(i, j) = m;
      star.col(i) -= m * star.col(j);
    }
    g.norm2[static_cast<std::size_t>(i)] = star.col(i).squaredNorm();
  }
  return g;
}

bool add_overflows(std::int64_t a, i128 b, std::int64_t& out) {
  const i128 s = static_cast<i128>(a) + b;
  if (s > (i128{1} << 62) || s < -(i128{1} << 62)) return true;
  out = static_cast<std::int64_t>(s);
  return false;
}

// LLL of diag(scale) * A with the basis recomputed accurately from the
// integer transform after every update. Stops early (returning a valid but
// less reduced transform) on overflow or after an iteration cap.
IntMatrix lll_transform(const Matrix& a, const std::vector<double>& scale) {
  constexpr double delta = 0.99;
  const auto k = a.rows();
  IntMatrix u = IntMatrix::Identity(k, k);
  if (k == 1) return u;
  Matrix c = accurate_product(a, u, scale);
  Eigen::Index kk = 1;
  for (int iter = 0; iter < 20000 && kk < k; ++iter) {
    bool overflow = false;
    for (Eigen::Index j = kk - 1; j >= 0 && !overflow; --j) {
      const Gso g = gram_schmidt(c);
      const double m = g.mu(kk, j);
      if (!(std::fabs(m) > 0.5 + 1e-9)) continue;
      if (!(std::fabs(m) < 0x1p61)) {
        overflow = true;
        break;
      }
      const auto r = static_cast<std::int64_t>(std::llround(m));
      IntMatrix next = u;
      for (Eigen::Index i = 0; i < k && !overflow; ++i) {
        overflow = add_overflows(u(i, kk), -static_cast<i128>(r) * u(i, j), next(i, kk));
      }
      if (overflow) break;
      u = next;
      c = accurate_product(a, u, scale);
    }
    if (overflow) break;
    const Gso g = gram_schmidt(c);
    const double lhs = g.norm2[static_cast<std::size_t>(kk)];
    const double m = g.mu(kk, kk - 1);
    if (lhs >= (delta - m * m) * g.norm2[static_cast<std::size_t>(kk - 1)]) {
      ++kk;
    } else {
      u.col(kk).swap(u.col(kk - 1));
      c = accurate_product(a, u, scale);
      kk = std::max<Eigen::Index>(kk - 1, 1);
    }
  }
  return u;
}

struct Frame {
  IntMatrix u;
  Matrix au;    // A U (unscaled)
  std::vector<std::int64_t> lo, hi;
};

Frame coefficient_frame(const Lattice& lattice, const SymBox& box, std::span<const double> shift,
                        const EnumerateOptions& options) {
  const int k = lattice.dim();
  std::vector<double> inv_s(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) inv_s[static_cast<std::size_t>(i)] = 1.0 / box.s[static_cast<std::size_t>(i)];
  Frame f;
  f.u = options.reduce ? lll_transform(lattice.basis(), inv_s) : IntMatrix::Identity(k, k);
  const std::vector<double> ones(static_cast<std::size_t>(k), 1.0);
  f.au = accurate_product(lattice.basis(), f.u, ones);
  Matrix scaled = f.au;
  for (int i = 0; i < k; ++i) scaled.row(i) *= inv_s[static_cast<std::size_t>(i)];
  Eigen::FullPivLU<Matrix> lu(scaled);
  if (!lu.isInvertible()) throw SingularBasis("box-scaled basis is numerically singular");
  const Matrix inv = lu.inverse();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k && !shift.empty(); ++i) g(i) = shift[static_cast<std::size_t>(i)] * inv_s[static_cast<std::size_t>(i)];
  const Eigen::VectorXd center = inv * g;
  const double grow = (1.0 + options.rel_tol) * (1.0 + 1e-9);
  for (int i = 0; i < k; ++i) {
    const double r = inv.row(i).cwiseAbs().sum() * grow + 1e-9;
    const double lo = std::ceil(center(i) - r);
    const double hi = std::floor(center(i) + r);
    if (!(std::fabs(lo) < 0x1p62) || !(std::fabs(hi) < 0x1p62)) {
      throw BudgetExceeded("coefficient range overflows 64 bits");
    }
    f.lo.push_back(static_cast<std::int64_t>(lo));
    f.hi.push_back(static_cast<std::int64_t>(hi));
  }
  return f;
}

void validate(const Lattice& lattice, const SymBox& box, std::span<const double> shift) {
  const auto k = static_cast<std::size_t>(lattice.dim());
  if (box.s.size() != k) throw InvalidArgument("box dimension does not match the lattice");
  if (!shift.empty() && shift.size() != k) throw InvalidArgument("shift dimension does not match the lattice");
  for (double s : box.s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("box half-widths must be positive and finite");
  }
}

// Canonical representative of +-x: first nonzero coordinate positive.
bool canonical_positive(std::span<const std::int64_t> c) {
  for (auto v : c) {
    if (v != 0) return v > 0;
  }
  return false;
}

bool independent_of(const std::vector<std::vector<std::int64_t>>& chosen, const std::vector<std::int64_t>& v) {
  // Fraction-free Gaussian elimination on the rows chosen + v.
  const std::size_t rows = chosen.size() + 1;
  const std::size_t k = v.size();
  std::vector<std::vector<i128>> m;
  for (const auto& c : chosen) m.emplace_back(c.begin(), c.end());
  m.emplace_back(v.begin(), v.end());
  std::size_t rank = 0;
  for (std::size_t col = 0; col < k && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const i128 f = m[r][col];
      const i128 p = m[rank][col];
      if (f == 0) continue;
      const i128 g = std::gcd(f < 0 ? -f : f, p < 0 ? -p : p);
      for (std::size_t c = col; c < k; ++c) m[r][c] = m[r][c] * (p / g) - m[rank][c] * (f / g);
    }
    ++rank;
  }
  return rank == rows;
}

}  // namespace

IntMatrix lll_reduce(const Matrix& basis) {
  return lll_transform(basis, std::vector<double>(static_cast<std::size_t>(basis.rows()), 1.0));
}

IntMatrix lll_reduce(const Matrix& basis, std::span<const double> row_scale) {
  return lll_transform(basis, {row_scale.begin(), row_scale.end()});
}

Matrix transformed_basis(const Matrix& basis, const IntMatrix& u, std::span<const double> row_scale) {
  return accurate_product(basis, u, {row_scale.begin(), row_scale.end()});
}

std::size_t for_each_in_box(const Lattice& lattice, const SymBox& box, std::span<const double> shift,
                            const PointVisitor& visit, const EnumerateOptions& options) {
  validate(lattice, box, shift);
  const int k = lattice.dim();
  const Frame f = coefficient_frame(lattice, box, shift, options);
  const auto& a = lattice.basis();

  std::vector<double> limit(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) limit[static_cast<std::size_t>(i)] = box.s[static_cast<std::size_t>(i)] * (1.0 + options.rel_tol);
  auto shift_at = [&](int i) { return shift.empty() ? 0.0 : shift[static_cast<std::size_t>(i)]; };

  double outer_cells = 1.0;
  for (int i = 0; i + 1 < k; ++i) outer_cells *= static_cast<double>(f.hi[static_cast<std::size_t>(i)] - f.lo[static_cast<std::size_t>(i)] + 1);
  if (outer_cells > options.budget) {
    throw BudgetExceeded("enumeration needs " + std::to_string(outer_cells) + " outer cells, budget " +
                         std::to_string(options.budget));
  }

  std::vector<std::int64_t> cp(f.lo.begin(), f.lo.end());  // reduced coefficients
  std::vector<std::int64_t> v(static_cast<std::size_t>(k));
  std::vector<double> row(static_cast<std::size_t>(k) + 1);
  std::vector<double> vec(static_cast<std::size_t>(k) + 1);
  std::vector<double> x(static_cast<std::size_t>(k));
  double cells = 0.0;
  const int last = k - 1;

  auto emit_if_inside = [&]() {
    for (int i = 0; i < k; ++i) {
      i128 s = 0;
      for (int j = 0; j < k; ++j) s += static_cast<i128>(f.u(i, j)) * cp[static_cast<std::size_t>(j)];
      if (s > (i128{1} << 53) || s < -(i128{1} << 53)) throw BudgetExceeded("lattice coefficient beyond 2^53");
      v[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(s);
    }
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        row[static_cast<std::size_t>(j)] = a(i, j);
        vec[static_cast<std::size_t>(j)] = static_cast<double>(v[static_cast<std::size_t>(j)]);
      }
      row[static_cast<std::size_t>(k)] = shift_at(i);
      vec[static_cast<std::size_t>(k)] = -1.0;
      const double xi = eft::dot2(row, vec);
      if (!(std::fabs(xi) <= limit[static_cast<std::size_t>(i)])) return;
      x[static_cast<std::size_t>(i)] = xi;
    }
    visit(v, x);
  };

  while (true) {
    // Slice along the last reduced coordinate: x = base + t * au.col(last).
    double t_lo = static_cast<double>(f.lo[static_cast<std::size_t>(last)]);
    double t_hi = static_cast<double>(f.hi[static_cast<std::size_t>(last)]);
    for (int i = 0; i < k; ++i) {
      double base = -shift_at(i);
      for (int j = 0; j < last; ++j) base += f.au(i, j) * static_cast<double>(cp[static_cast<std::size_t>(j)]);
      const double step = f.au(i, last);
      const double lim = limit[static_cast<std::size_t>(i)];
      if (step == 0.0) {
        if (std::fabs(base) > lim * (1.0 + 1e-6) + 1e-6 * std::fabs(base)) t_hi = t_lo - 1.0;
        continue;
      }
      double a1 = (-lim - base) / step;
      double a2 = (lim - base) / step;
      if (a1 > a2) std::swap(a1, a2);
      const double slack = 1e-7 * (1.0 + std::fabs(a1) + std::fabs(a2));
      t_lo = std::max(t_lo, std::floor(a1 - slack) - 1.0);
      t_hi = std::min(t_hi, std::ceil(a2 + slack) + 1.0);
    }
    cells += 1.0;
    if (t_lo <= t_hi) {
      cells += t_hi - t_lo + 1.0;
      if (cells > options.budget) throw BudgetExceeded("enumeration exceeded its cell budget");
      for (auto t = static_cast<std::int64_t>(t_lo); t <= static_cast<std::int64_t>(t_hi); ++t) {
        cp[static_cast<std::size_t>(last)] = t;
        emit_if_inside();
      }
    }
    // Odometer over the outer coordinates.
    int i = last - 1;
    while (i >= 0) {
      auto& c = cp[static_cast<std::size_t>(i)];
      if (c < f.hi[static_cast<std::size_t>(i)]) {
        ++c;
        break;
      }
      c = f.lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
  }
  return static_cast<std::size_t>(cells);
}

std::vector<LatticePoint> enumerate_box(const Lattice& lattice, const SymBox& box, std::span<const double> shift,
                                        const EnumerateOptions& options) {
  std::vector<LatticePoint> out;
  for_each_in_box(
      lattice, box, shift,
      [&](std::span<const std::int64_t> c, std::span<const double> x) {
        out.push_back({{c.begin(), c.end()}, {x.begin(), x.end()}});
      },
      options);
  std::sort(out.begin(), out.end(), [](const LatticePoint& p, const LatticePoint& q) { return p.coeffs < q.coeffs; });
  return out;
}

std::vector<Minimum> successive_minima(const Lattice& lattice, const BodyNorm& norm, const EnumerateOptions& options) {
  const int k = lattice.dim();
  if (static_cast<int>(norm.w.size()) != k) throw InvalidArgument("norm dimension does not match the lattice");
  std::vector<double> scale(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double w = norm.w[static_cast<std::size_t>(i)];
    if (!(w > 0.0)) throw InvalidArgument("norm weights must be positive");
    scale[static_cast<std::size_t>(i)] = norm.kind == BodyNorm::Kind::Box ? 1.0 / w : w;
  }
  // Reduced basis vectors are k independent lattice points; the largest of
  // their norms bounds lambda_k.
  const IntMatrix u = lll_transform(lattice.basis(), scale);
  double t_max = 0.0;
  for (int j = 0; j < k; ++j) {
    std::vector<std::int64_t> c(u.col(j).data(), u.col(j).data() + k);
    t_max = std::max(t_max, norm(lattice.point(c)));
  }
  t_max *= 1.0 + 1e-9;

  std::vector<Minimum> candidates;
  for_each_in_box(
      lattice, norm.bounding_box(t_max), {},
      [&](std::span<const std::int64_t> c, std::span<const double> x) {
        if (!canonical_positive(c)) return;
        const double n = norm(x);
        if (n <= t_max) candidates.push_back({n, {{c.begin(), c.end()}, {x.begin(), x.end()}}});
      },
      options);
  std::sort(candidates.begin(), candidates.end(), [](const Minimum& p, const Minimum& q) {
    if (p.value != q.value) return p.value < q.value;
    return p.witness.x < q.witness.x;
  });

  std::vector<Minimum> out;
  std::vector<std::vector<std::int64_t>> chosen;
  for (auto& m : candidates) {
    if (static_cast<int>(out.size()) == k) break;
    if (!independent_of(chosen, m.witness.coeffs)) continue;
    chosen.push_back(m.witness.coeffs);
    out.push_back(std::move(m));
  }
  if (static_cast<int>(out.size()) != k) throw Error("successive minima: fewer than k independent vectors found");
  return out;
}

Minimum shortest_in_box(const Lattice& lattice, const SymBox& box, const EnumerateOptions& options) {
  const BodyNorm norm = BodyNorm::box(box.s);
  const double lambda1 = successive_minima(lattice, norm, options).front().value;
  // Among near-ties prefer the lexicographically smallest point with a
  // positive leading coordinate.
  const double tol = 1e-12 * lambda1;
  std::optional<Minimum> best;
  for_each_in_box(
      lattice, norm.bounding_box(lambda1 * (1.0 + 1e-9)), {},
      [&](std::span<const std::int64_t> c, std::span<const double> x) {
        if (!canonical_positive(c)) return;
        const double n = norm(x);
        if (n > lambda1 + tol) return;
        Minimum m{n, {{c.begin(), c.end()}, {x.begin(), x.end()}}};
        const auto lead = std::find_if(m.witness.x.begin(), m.witness.x.end(), [](double v) { return v != 0.0; });
        if (lead != m.witness.x.end() && *lead < 0.0) {
          for (auto& v : m.witness.x) v = -v;
          for (auto& v : m.witness.coeffs) v = -v;
        }
        if (!best || m.witness.x < best->witness.x) best = std::move(m);
      },
      options);
  best->value = lambda1;
  return *best;
}

}  // namespace smoothdisc
