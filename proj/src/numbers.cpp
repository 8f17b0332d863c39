#include "smoothdisc/numbers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "smoothdisc/eft.hpp"
#include "smoothdisc/errors.hpp"

namespace smoothdisc {

namespace {

namespace mp = boost::multiprecision;
using mp::cpp_int;
using mp::cpp_rational;
using i128 = __int128;

std::int64_t isqrt64(std::int64_t n) {
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (static_cast<i128>(s) * s > n) --s;
  while (static_cast<i128>(s + 1) * (s + 1) <= n) ++s;
  return s;
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  const auto s = isqrt64(n);
  return static_cast<i128>(s) * s == n;
}

std::int64_t narrow(i128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw PrecisionError(std::string("64-bit overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::int64_t parse_i64(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0) {
    throw InvalidArgument("not an integer: '" + s + "'");
  }
  return v;
}

HpFloat eval_cubic(const std::array<std::int64_t, 3>& c, const HpFloat& x) {
  return ((x + c[0]) * x + c[1]) * x + c[2];
}

// Exact rational value of a binary float.
template <class F>
cpp_rational to_rational(const F& x) {
  if (x == 0) return cpp_rational(0);
  int e = 0;
  F m = frexp(x, &e);  // x = m 2^e, 0.5 <= |m| < 1
  constexpr int bits = 256;
  F scaled = ldexp(m, bits);
  cpp_int num = static_cast<cpp_int>(scaled);
  cpp_rational r(num);
  const int shift = e - bits;
  if (shift >= 0) {
    r *= cpp_rational(cpp_int(1) << shift);
  } else {
    r /= cpp_rational(cpp_int(1) << (-shift));
  }
  return r;
}

cpp_rational to_rational_double(double x) {
  if (x == 0.0) return cpp_rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto num = static_cast<std::int64_t>(std::ldexp(m, 53));
  cpp_rational r{cpp_int(num)};
  const int shift = e - 53;
  if (shift >= 0) return r * cpp_rational(cpp_int(1) << shift);
  return r / cpp_rational(cpp_int(1) << (-shift));
}

cpp_int floor_rational(const cpp_rational& x) {
  cpp_int n = mp::numerator(x);
  const cpp_int d = mp::denominator(x);  // > 0
  cpp_int q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

// Quotients shared by every number in [lo, hi].
ContinuedFraction certified_cf(cpp_rational lo, cpp_rational hi, std::size_t count) {
  ContinuedFraction out;
  while (out.quotients.size() < count) {
    const cpp_int a_lo = floor_rational(lo);
    const cpp_int a_hi = floor_rational(hi);
    if (a_lo != a_hi) break;
    if (a_lo > std::numeric_limits<std::int64_t>::max() || a_lo < std::numeric_limits<std::int64_t>::min()) break;
    const cpp_rational f_lo = lo - cpp_rational(a_lo);
    const cpp_rational f_hi = hi - cpp_rational(a_hi);
    if (f_lo == 0 || f_hi == 0) break;
    out.quotients.push_back(static_cast<std::int64_t>(a_lo));
    lo = 1 / f_hi;
    hi = 1 / f_lo;
  }
  if (out.quotients.size() < count) {
    throw PrecisionError("continued fraction ambiguous after " + std::to_string(out.quotients.size()) +
                         " certified quotients (error interval too wide)");
  }
  return out;
}

ContinuedFraction quadratic_cf(const QuadraticIrrational& x, std::size_t count) {
  // Represent x = (P + sqrt(D)) / Q with Q | D - P^2.
  i128 P = x.p;
  i128 D = static_cast<i128>(x.q) * x.q * x.D;
  i128 Q = x.r;
  if (x.q < 0) {
    P = -P;
    Q = -Q;
  }
  if ((D - P * P) % Q != 0) {
    const i128 aq = Q < 0 ? -Q : Q;
    P *= aq;
    D *= Q * Q;
    Q *= aq;
  }
  const std::int64_t Dn = narrow(D, "quadratic continued fraction");
  const std::int64_t s = isqrt64(Dn);
  std::int64_t p = narrow(P, "quadratic continued fraction");
  std::int64_t q = narrow(Q, "quadratic continued fraction");

  ContinuedFraction out;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  while (out.quotients.size() < count) {
    if (!out.period_start) {
      const auto [it, inserted] = seen.emplace(std::make_pair(p, q), out.quotients.size());
      if (!inserted) {
        out.period_start = it->second;
        out.period_length = out.quotients.size() - it->second;
      }
    }
    const std::int64_t a = q > 0 ? floor_div(narrow(static_cast<i128>(p) + s, "cf"), q)
                                 : -floor_div(narrow(static_cast<i128>(p) + s, "cf"), -q) - 1;
    out.quotients.push_back(a);
    const i128 p_next = static_cast<i128>(a) * q - p;
    const i128 num = static_cast<i128>(Dn) - p_next * p_next;
    p = narrow(p_next, "cf");
    q = narrow(num / q, "cf");
  }
  // Detect the period even when count stopped right before the repeat.
  if (!out.period_start) {
    if (const auto it = seen.find({p, q}); it != seen.end()) {
      out.period_start = it->second;
      out.period_length = out.quotients.size() - it->second;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RealAlgebraic

RealAlgebraic RealAlgebraic::quadratic(std::int64_t p, std::int64_t q, std::int64_t D, std::int64_t r) {
  if (r == 0) throw InvalidArgument("quadratic irrational with zero denominator");
  if (q == 0) throw InvalidArgument("quadratic irrational with q = 0 is rational");
  if (D <= 0 || is_square(D)) {
    throw InvalidArgument("D must be a positive non-square for an irrational: D = " + std::to_string(D));
  }
  if (r < 0) {
    p = -p;
    q = -q;
    r = -r;
  }
  std::string name;
  if (p == 1 && q == 1 && D == 5 && r == 2) {
    name = "golden";
  } else if (p == 0 && q == 1 && r == 1) {
    name = "sqrt:" + std::to_string(D);
  } else {
    name = "quad:" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(D) + "," + std::to_string(r);
  }
  return RealAlgebraic(QuadraticIrrational{p, q, D, r}, std::move(name));
}

std::int64_t cubic_discriminant(std::array<std::int64_t, 3> c) {
  const i128 b = c[0], cc = c[1], d = c[2];
  const i128 disc = b * b * cc * cc - 4 * cc * cc * cc - 4 * b * b * b * d - 27 * d * d + 18 * b * cc * d;
  return narrow(disc, "cubic discriminant");
}

std::array<HpFloat, 3> cubic_real_roots(std::array<std::int64_t, 3> c) {
  if (cubic_discriminant(c) <= 0) {
    throw InvalidArgument("cubic x^3 + " + std::to_string(c[0]) + "x^2 + " + std::to_string(c[1]) + "x + " +
                          std::to_string(c[2]) + " is not totally real with distinct roots (complex embedding)");
  }
  // Critical points of f: 3x^2 + 2 c2 x + c1 = 0 (real because disc > 0).
  const HpFloat b2 = HpFloat(c[0]);
  const HpFloat disc_d = b2 * b2 - 3 * HpFloat(c[1]);
  const HpFloat r = sqrt(disc_d);
  const HpFloat x1 = (-b2 - r) / 3;
  const HpFloat x2 = (-b2 + r) / 3;
  HpFloat bound = 1;
  for (auto v : c) bound = std::max(bound, HpFloat(1) + abs(HpFloat(v)));

  auto bisect = [&](HpFloat lo, HpFloat hi) {
    HpFloat flo = eval_cubic(c, lo);
    for (int it = 0; it < 600; ++it) {
      const HpFloat mid = (lo + hi) / 2;
      if (mid == lo || mid == hi) break;
      const HpFloat fm = eval_cubic(c, mid);
      if (fm == 0) return mid;
      if ((fm < 0) == (flo < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return (lo + hi) / 2;
  };
  return {bisect(-bound, x1), bisect(x1, x2), bisect(x2, bound)};
}

RealAlgebraic RealAlgebraic::cubic(std::array<std::int64_t, 3> coeffs, int root_index) {
  if (root_index < 1 || root_index > 3) throw InvalidArgument("cubic root index must be 1..3");
  const auto roots = cubic_real_roots(coeffs);
  // A rational root of a monic integer cubic is an integer dividing c0.
  for (const auto& rt : roots) {
    const HpFloat n = round(rt);
    if (abs(eval_cubic(coeffs, n)) == 0) {
      throw InvalidArgument("cubic has a rational root; its roots are not of degree 3");
    }
  }
  std::string name = (coeffs == std::array<std::int64_t, 3>{1, -2, -1} && root_index == 3)
                         ? std::string("cubic:7")
                         : "cubicpoly:" + std::to_string(coeffs[0]) + "," + std::to_string(coeffs[1]) + "," +
                               std::to_string(coeffs[2]) + ":" + std::to_string(root_index);
  return RealAlgebraic(CubicEmbedding{coeffs, root_index, roots[static_cast<std::size_t>(root_index - 1)]},
                       std::move(name));
}

RealAlgebraic RealAlgebraic::from_double(double value, double radius) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite value");
  const double half_ulp = 0.5 * (std::nextafter(std::fabs(value), INFINITY) - std::fabs(value));
  return RealAlgebraic(DoubleValue{value, std::max(radius, half_ulp)}, format_double(value));
}

RealAlgebraic RealAlgebraic::liouville(int terms) {
  if (terms < 1 || terms > 6) throw InvalidArgument("liouville terms must be in 1..6");
  HpFloat sum = 0;
  long long fact = 1;
  for (int j = 1; j <= terms; ++j) {
    fact *= j;
    sum += ldexp(HpFloat(1), static_cast<int>(-fact));
  }
  const double v = static_cast<double>(sum);
  const double radius = std::fabs(static_cast<double>(sum - HpFloat(v)));
  return RealAlgebraic(DoubleValue{v, radius}, "liouville:" + std::to_string(terms));
}

RealAlgebraic RealAlgebraic::squared() const {
  if (const auto* q = std::get_if<QuadraticIrrational>(&repr_)) {
    const i128 p2 = static_cast<i128>(q->p) * q->p + static_cast<i128>(q->q) * q->q * q->D;
    const i128 q2 = 2 * static_cast<i128>(q->p) * q->q;
    const i128 r2 = static_cast<i128>(q->r) * q->r;
    if (q2 == 0) throw InvalidArgument("square of " + name_ + " is rational");
    auto out = quadratic(narrow(p2, "square"), narrow(q2, "square"), q->D, narrow(r2, "square"));
    out.name_ = name_ + "^2";
    return out;
  }
  if (const auto* c = std::get_if<CubicEmbedding>(&repr_)) {
    // Roots sigma_j; polynomial x^3 - e1 x^2 + e2 x - e3.
    const i128 e1 = -c->coeffs[0], e2 = c->coeffs[1], e3 = -c->coeffs[2];
    const i128 f1 = e1 * e1 - 2 * e2;
    const i128 f2 = e2 * e2 - 2 * e1 * e3;
    const i128 f3 = e3 * e3;
    const std::array<std::int64_t, 3> sq{narrow(-f1, "square"), narrow(f2, "square"), narrow(-f3, "square")};
    const auto roots = cubic_real_roots(sq);
    const HpFloat target = c->value * c->value;
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (abs(roots[static_cast<std::size_t>(i)] - target) < abs(roots[static_cast<std::size_t>(best)] - target)) best = i;
    }
    auto out = cubic(sq, best + 1);
    out.name_ = name_ + "^2";
    return out;
  }
  throw InvalidArgument("squared() requires an exact algebraic input, got " + name_);
}

RealAlgebraic RealAlgebraic::parse(std::string_view text) {
  std::string_view base = text;
  bool square = false;
  if (text.ends_with("^2")) {
    base = text.substr(0, text.size() - 2);
    square = true;
  }
  auto finish = [&](RealAlgebraic v) { return square ? v.squared() : v; };

  if (base == "golden") return finish(golden());
  if (base.starts_with("sqrt:")) return finish(sqrt(parse_i64(base.substr(5))));
  if (base == "cubic:7") return finish(cubic7());
  if (base.starts_with("liouville:")) {
    if (square) throw InvalidArgument("liouville inputs cannot be squared exactly");
    return liouville(static_cast<int>(parse_i64(base.substr(10))));
  }
  if (base.starts_with("quad:")) {
    std::array<std::int64_t, 4> v{};
    auto rest = base.substr(5);
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) throw InvalidArgument("quad: expects p,q,D,r");
      v[static_cast<std::size_t>(i)] = parse_i64(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return finish(quadratic(v[0], v[1], v[2], v[3]));
  }
  if (base.starts_with("cubicpoly:")) {
    auto rest = base.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw InvalidArgument("cubicpoly: expects c2,c1,c0:index");
    const auto idx = static_cast<int>(parse_i64(rest.substr(colon + 1)));
    rest = rest.substr(0, colon);
    std::array<std::int64_t, 3> c{};
    for (int i = 0; i < 3; ++i) {
      const auto comma = rest.find(',');
      if ((i < 2) == (comma == std::string_view::npos)) throw InvalidArgument("cubicpoly: expects c2,c1,c0:index");
      c[static_cast<std::size_t>(i)] = parse_i64(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return finish(cubic(c, idx));
  }
  if (base.find('/') != std::string_view::npos) {
    throw InvalidArgument("rational input '" + std::string(text) + "' rejected: alpha must be irrational");
  }
  // Decimal literal: known to half a unit in its last digit.
  std::string s(base);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InvalidArgument("unrecognised number spec '" + std::string(text) + "'");
  }
  if (square) throw InvalidArgument("decimal literals cannot be squared exactly");
  int digits = 0;
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    const auto e = s.find_first_of("eE", dot);
    digits = static_cast<int>((e == std::string::npos ? s.size() : e) - dot - 1);
  }
  double exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string::npos) exponent = std::strtod(s.c_str() + e + 1, nullptr);
  auto out = from_double(v, 0.5 * std::pow(10.0, exponent - digits));
  out.name_ = s;
  return out;
}

double RealAlgebraic::value() const { return double_double()[0]; }

HpFloat RealAlgebraic::high_precision() const {
  return std::visit(
      [](const auto& r) -> HpFloat {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, QuadraticIrrational>) {
          return (HpFloat(r.p) + HpFloat(r.q) * boost::multiprecision::sqrt(HpFloat(r.D))) / HpFloat(r.r);
        } else if constexpr (std::is_same_v<T, CubicEmbedding>) {
          return r.value;
        } else {
          return HpFloat(r.value);
        }
      },
      repr_);
}

std::array<double, 2> RealAlgebraic::double_double() const {
  if (const auto* d = std::get_if<DoubleValue>(&repr_)) return {d->value, 0.0};
  const HpFloat v = high_precision();
  const double hi = static_cast<double>(v);
  const double lo = static_cast<double>(v - HpFloat(hi));
  return {hi, lo};
}

double RealAlgebraic::radius() const {
  if (const auto* d = std::get_if<DoubleValue>(&repr_)) return d->radius;
  // double-double truncation
  return std::ldexp(std::max(1.0, std::fabs(value())), -104);
}

// ---------------------------------------------------------------------------
// Continued fractions

ContinuedFraction continued_fraction(const RealAlgebraic& alpha, std::size_t count) {
  if (count == 0) throw InvalidArgument("count must be positive");
  if (const auto* q = std::get_if<QuadraticIrrational>(&alpha.repr())) return quadratic_cf(*q, count);
  if (const auto* c = std::get_if<CubicEmbedding>(&alpha.repr())) {
    const cpp_rational v = to_rational(c->value);
    // The stored root is accurate to far better than 2^-170 (bisection to
    // working precision of a 192-bit float).
    const HpFloat mag = std::max(HpFloat(1), abs(c->value));
    const cpp_rational rad = to_rational(ldexp(mag, -170));
    return certified_cf(v - rad, v + rad, count);
  }
  const auto& d = std::get<DoubleValue>(alpha.repr());
  const cpp_rational v = to_rational_double(d.value);
  const cpp_rational rad = to_rational_double(d.radius);
  return certified_cf(v - rad, v + rad, count);
}

// ---------------------------------------------------------------------------
// Multiplicative badness

double multiplicative_height(std::span<const std::int64_t> m) noexcept {
  double h = 1.0;
  for (auto v : m) h *= std::max<double>(1.0, std::fabs(static_cast<double>(v)));
  return h;
}

namespace {

struct AlphaDD {
  std::vector<std::array<double, 2>> dd;
  std::vector<double> radius;
  bool exact = true;
};

AlphaDD to_dd(std::span<const RealAlgebraic> alpha) {
  AlphaDD out;
  for (const auto& a : alpha) {
    out.dd.push_back(a.double_double());
    out.radius.push_back(a.radius());
    out.exact = out.exact && a.is_exact();
  }
  return out;
}

// ||m . alpha|| accurate to ~ sum |m_i| 2^-100.
double frac_dist(std::span<const std::int64_t> m, const AlphaDD& a) {
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double mi = static_cast<double>(m[i]);
    const auto [p, e] = eft::two_prod(mi, a.dd[i][0]);
    // Drop the integer part early to keep hi small.
    const double pn = p - std::nearbyint(p);
    const auto [s, t] = eft::two_sum(hi, pn);
    hi = s - std::nearbyint(s);
    lo += t + e + mi * a.dd[i][1];
  }
  return std::fabs(eft::signed_frac_distance(hi, lo));
}

bool better(const ApproxRecord& a, const ApproxRecord& b) {
  if (a.quality != b.quality) return a.quality < b.quality;
  if (a.height != b.height) return a.height < b.height;
  return a.m < b.m;
}

}  // namespace

BadnessScan mult_badness(std::span<const RealAlgebraic> alpha, std::int64_t max_height, double threshold,
                         const ScanBudget& budget) {
  const auto d = static_cast<int>(alpha.size());
  if (d < 1 || d > 3) throw InvalidArgument("mult_badness supports d in {1, 2, 3}");
  if (max_height < 1) throw InvalidArgument("height bound must be >= 1");
  const std::int64_t limit = d == 1 ? budget.max_height_d1 : d == 2 ? budget.max_height_d2 : budget.max_height_d3;
  if (max_height > limit) {
    throw BudgetExceeded("height bound " + std::to_string(max_height) + " exceeds the d=" + std::to_string(d) +
                         " scan envelope " + std::to_string(limit));
  }
  const AlphaDD a = to_dd(alpha);

  BadnessScan out;
  out.max_height = max_height;
  std::vector<ApproxRecord> best_at(static_cast<std::size_t>(max_height) + 1);
  std::vector<bool> have(static_cast<std::size_t>(max_height) + 1, false);
  bool have_worst = false;

  std::vector<std::int64_t> m(static_cast<std::size_t>(d), 0);
  auto visit = [&]() {
    const double err = frac_dist(m, a);
    if (!a.exact) {
      double unc = 0.0;
      for (int i = 0; i < d; ++i) unc += std::fabs(static_cast<double>(m[static_cast<std::size_t>(i)])) * a.radius[static_cast<std::size_t>(i)];
      if (err <= unc) {
        throw PrecisionError("||m.alpha|| is within the input error radius at m = (" + std::to_string(m[0]) +
                             (d > 1 ? ", ..." : "") + "); the input cannot be certified irrational here");
      }
    }
    ApproxRecord rec{m, multiplicative_height(m), err, 0.0};
    rec.quality = rec.height * rec.error;
    ++out.scanned;
    if (!have_worst || better(rec, out.worst)) {
      out.worst = rec;
      have_worst = true;
    }
    if (rec.quality < threshold) out.below_threshold.push_back(rec);
    const auto h = static_cast<std::size_t>(rec.height);
    if (!have[h] || better(rec, best_at[h])) {
      best_at[h] = std::move(rec);
      have[h] = true;
    }
  };

  // Depth-first over coordinates, canonical sign (first nonzero > 0).
  auto rec = [&](auto&& self, int i, std::int64_t remaining, bool leading_zero) -> void {
    if (i == d) {
      if (!leading_zero) visit();
      return;
    }
    const std::int64_t lo = leading_zero ? 0 : -remaining;
    for (std::int64_t v = lo; v <= remaining; ++v) {
      m[static_cast<std::size_t>(i)] = v;
      const std::int64_t next = remaining / std::max<std::int64_t>(1, v < 0 ? -v : v);
      self(self, i + 1, next, leading_zero && v == 0);
    }
    m[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0, max_height, true);

  double running = std::numeric_limits<double>::infinity();
  for (std::size_t h = 1; h < best_at.size(); ++h) {
    if (have[h] && best_at[h].quality < running) {
      running = best_at[h].quality;
      out.record_stream.push_back(best_at[h]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// phi and L

double PhiFunction::shape(double x) const noexcept {
  const double l1 = std::max(1.0, std::log(std::max(x, 1.0)));
  const double l2 = std::max(1.0, std::log(l1));
  double v = 1.0;
  if (a != 0.0) v *= std::pow(l1, a);
  if (b != 0.0) v *= std::pow(l2, b);
  return v;
}

double PhiFunction::operator()(double x) const noexcept { return std::max(1.0, C * shape(x)); }

std::string PhiFunction::to_string() const {
  if (is_constant()) return "const:" + format_double(C);
  return "logpow:C=" + format_double(C) + ",a=" + format_double(a) + ",b=" + format_double(b);
}

PhiFunction PhiFunction::parse(std::string_view text) {
  auto number = [](std::string_view s) {
    std::string t(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw InvalidArgument("bad number '" + t + "' in phi spec");
    return v;
  };
  PhiFunction out;
  if (text.starts_with("const:")) {
    out.C = number(text.substr(6));
  } else if (text.starts_with("logpow:")) {
    auto rest = text.substr(7);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw InvalidArgument("phi spec expects key=value");
      const auto key = item.substr(0, eq);
      const double v = number(item.substr(eq + 1));
      if (key == "C") out.C = v;
      else if (key == "a") out.a = v;
      else if (key == "b") out.b = v;
      else throw InvalidArgument("unknown phi key '" + std::string(key) + "'");
    }
  } else {
    throw InvalidArgument("phi spec must be const:C or logpow:C=..,a=..,b=..: '" + std::string(text) + "'");
  }
  if (!(out.C > 0.0) || out.a < 0.0 || out.b < 0.0) throw InvalidArgument("phi needs C > 0, a >= 0, b >= 0");
  return out;
}

PhiFit fit_phi(std::span<const ApproxRecord> records, const FitOptions& options) {
  if (records.empty()) throw InvalidArgument("fit_phi needs at least one record");
  double max_h = 1.0;
  for (const auto& r : records) max_h = std::max(max_h, r.height);
  const double head_limit = std::sqrt(max_h);

  std::vector<std::pair<double, double>> members{{0.0, 0.0}};
  members.insert(members.end(), options.log_power_grid.begin(), options.log_power_grid.end());

  auto fitted_scale = [&](const PhiFunction& shape_only, bool head_only) {
    double c = 0.0;
    for (const auto& r : records) {
      if (head_only && r.height > head_limit && r.height != records.front().height) continue;
      const double need = r.quality > 0.0 ? 1.0 / (r.quality * shape_only.shape(r.height))
                                          : std::numeric_limits<double>::infinity();
      c = std::max(c, need);
    }
    return c;
  };

  PhiFit last;
  for (std::size_t i = 0; i < members.size(); ++i) {
    PhiFunction phi{1.0, members[i].first, members[i].second};
    const double full = fitted_scale(phi, false);
    const double head = fitted_scale(phi, true);
    phi.C = phi.is_constant() ? std::max(1.0, full) : full;
    PhiFit fit{phi, i, max_h, full <= (1.0 + options.holdout_slack) * head};
    if (fit.holdout_consistent) return fit;
    last = fit;
  }
  return last;
}

double invert_L(double x, const PhiFunction& phi) {
  const double phi1 = phi(1.0);
  if (!(x >= phi1)) {
    throw DomainError("invert_L needs x >= phi(1) = " + format_double(phi1) + ", got " + format_double(x));
  }
  if (phi.is_constant()) return std::clamp(x / phi1, 1.0, x);
  double lo = 1.0;
  double hi = x;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * phi(mid) < x) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Littlewood

LittlewoodTrajectory littlewood_trajectory(const RealAlgebraic& alpha, const RealAlgebraic& beta,
                                           std::int64_t horizon) {
  if (horizon < 1 || horizon > 100'000'000) throw InvalidArgument("Littlewood horizon must be in [1, 1e8]");
  const auto a = alpha.double_double();
  const auto b = beta.double_double();
  const double ra = alpha.radius();
  const double rb = beta.radius();
  const bool check_a = !alpha.is_exact();
  const bool check_b = !beta.is_exact();

  LittlewoodTrajectory out;
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 1; n <= horizon; ++n) {
    const double dn = static_cast<double>(n);
    const double da = eft::frac_distance_mul(dn, a[0], a[1]);
    const double db = eft::frac_distance_mul(dn, b[0], b[1]);
    if (!out.precision_warning &&
        ((check_a && (da < 1e-12 || da <= dn * ra)) || (check_b && (db < 1e-12 || db <= dn * rb)))) {
      out.precision_warning = true;
      out.first_warning_n = n;
    }
    const double prod = dn * da * db;
    if (prod < best) {
      best = prod;
      out.records.push_back({n, prod, da, db});
    }
  }
  return out;
}

}  // namespace smoothdisc
