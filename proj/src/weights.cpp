#include "smoothdisc/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "smoothdisc/errors.hpp"

namespace smoothdisc {

namespace {

using boost::multiprecision::cpp_rational;
using Poly = std::vector<cpp_rational>;

std::int64_t parse_int(std::string_view text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

Poly antiderivative(const Poly& p) {
  Poly q(p.size() + 1, cpp_rational(0));
  for (std::size_t r = 0; r < p.size(); ++r) q[r + 1] = p[r] / static_cast<int>(r + 1);
  return q;
}

cpp_rational eval_at_one(const Poly& p) {
  cpp_rational s = 0;
  for (const auto& c : p) s += c;
  return s;
}

// Exact pieces of B_m via B_m(x) = int_{x-1/2}^{x+1/2} B_{m-1}(y) dy.
std::vector<Poly> exact_pieces(int order) {
  std::vector<Poly> pieces{Poly{cpp_rational(1)}};
  for (int m = 2; m <= order; ++m) {
    std::vector<Poly> anti;
    anti.reserve(pieces.size());
    for (const auto& p : pieces) anti.push_back(antiderivative(p));

    std::vector<Poly> next(static_cast<std::size_t>(m), Poly(static_cast<std::size_t>(m), cpp_rational(0)));
    for (int j = 0; j < m; ++j) {
      auto& out = next[static_cast<std::size_t>(j)];
      if (j - 1 >= 0) {
        const auto& q = anti[static_cast<std::size_t>(j - 1)];
        out[0] += eval_at_one(q);
        for (std::size_t r = 0; r < q.size(); ++r) out[r] -= q[r];
      }
      if (j < m - 1) {
        const auto& q = anti[static_cast<std::size_t>(j)];
        for (std::size_t r = 0; r < q.size(); ++r) out[r] += q[r];
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

double horner(const std::vector<double>& c, double t) noexcept {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double eval_pieces(const std::vector<std::vector<double>>& pieces, int order, double y) noexcept {
  const double u = y + 0.5 * order;
  if (!(u > 0.0) || !(u < order)) return 0.0;
  const auto j = std::min(static_cast<int>(std::floor(u)), order - 1);
  const double v = horner(pieces[static_cast<std::size_t>(j)], u - j);
  return v > 0.0 ? v : 0.0;
}

}  // namespace

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw InvalidArgument("empty rational");
  std::int64_t num = 0;
  std::int64_t den = 1;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    num = parse_int(text.substr(0, slash));
    den = parse_int(text.substr(slash + 1));
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw InvalidArgument("too many decimal digits: '" + std::string(text) + "'");
    std::string digits(text.substr(0, dot));
    digits += frac;
    if (digits.empty() || digits == "-") throw InvalidArgument("bad decimal: '" + std::string(text) + "'");
    num = parse_int(digits);
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  } else {
    num = parse_int(text);
  }
  if (den == 0) throw InvalidArgument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

double sinc(double t) noexcept {
  const double x = std::numbers::pi * t;
  if (std::fabs(t) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return std::sin(x) / x;
}

std::vector<std::vector<double>> bspline_piece_coefficients(int order) {
  if (order < 1 || order > BSplineWeight::kMaxOrder) {
    throw InvalidArgument("B-spline order out of range: " + std::to_string(order));
  }
  const auto exact = exact_pieces(order);
  std::vector<std::vector<double>> out;
  out.reserve(exact.size());
  for (const auto& p : exact) {
    std::vector<double> row;
    row.reserve(p.size());
    for (const auto& c : p) row.push_back(static_cast<double>(c));
    out.push_back(std::move(row));
  }
  return out;
}

double cardinal_bspline(int order, double x) {
  return eval_pieces(bspline_piece_coefficients(order), order, x);
}

BSplineWeight::BSplineWeight(int order, Rational scale) : order_(order), scale_(scale), s_(scale.value()) {
  if (order % 2 != 0) {
    throw InvalidArgument("B-spline order must be even (odd order gives a sign-changing transform): " +
                          std::to_string(order));
  }
  if (order < 4) {
    throw InvalidArgument("B-spline order must be at least 4 for C^2 smoothness: " + std::to_string(order));
  }
  if (order > kMaxOrder) throw InvalidArgument("B-spline order above " + std::to_string(kMaxOrder));
  if (scale.den <= 0 || scale.num <= 0) throw InvalidArgument("scale must be positive: " + scale.to_string());
  // order * num / (2 den) <= 2
  if (static_cast<__int128>(order) * scale.num > static_cast<__int128>(4) * scale.den) {
    throw InvalidArgument("support [-m s/2, m s/2] exceeds [-2, 2] for m=" + std::to_string(order) +
                          ", s=" + scale.to_string());
  }
  pieces_ = bspline_piece_coefficients(order);
}

double BSplineWeight::operator()(double x) const noexcept { return eval_pieces(pieces_, order_, x / s_); }

double BSplineWeight::fourier(double xi) const noexcept {
  const double v = sinc(s_ * xi);
  double p = 1.0;
  for (int i = 0; i < order_; ++i) p *= v;
  return s_ * p;
}

double BSplineWeight::fourier_envelope(double xi) const noexcept {
  const double t = std::numbers::pi * s_ * std::fabs(xi);
  if (t <= 1.0) return s_;
  return s_ * std::pow(t, -order_);
}

BSplineWeight make_weight(int order, Rational scale) { return BSplineWeight(order, scale); }

WeightSystem::WeightSystem(std::vector<BSplineWeight> components) : components_(std::move(components)) {
  if (components_.size() < 2) throw InvalidArgument("weight system needs k >= 2 components");
  smoothness_ = components_.front().smoothness();
  expect_constant_ = 1.0;
  for (const auto& w : components_) {
    smoothness_ = std::min(smoothness_, w.smoothness());
    expect_constant_ *= w.scale_value();
  }
}

WeightSystem WeightSystem::uniform(const BSplineWeight& w, int k) {
  if (k < 2) throw InvalidArgument("weight system needs k >= 2 components");
  return WeightSystem(std::vector<BSplineWeight>(static_cast<std::size_t>(k), w));
}

WeightSystem WeightSystem::parse(std::string_view spec, int k) {
  constexpr std::string_view prefix = "bspline:";
  if (!spec.starts_with(prefix)) {
    throw InvalidArgument("weight spec must start with 'bspline:': '" + std::string(spec) + "'");
  }
  auto rest = spec.substr(prefix.size());
  int order = -1;
  Rational scale{};
  bool have_scale = false;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("expected key=value in weight spec: '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "m") {
      order = static_cast<int>(parse_int(value));
    } else if (key == "s") {
      scale = Rational::parse(value);
      have_scale = true;
    } else {
      throw InvalidArgument("unknown weight spec key '" + std::string(key) + "'");
    }
  }
  if (order < 0 || !have_scale) throw InvalidArgument("weight spec needs both m and s: '" + std::string(spec) + "'");
  return uniform(BSplineWeight(order, scale), k);
}

std::string WeightSystem::spec() const {
  const auto& w = components_.front();
  return "bspline:m=" + std::to_string(w.order()) + ",s=" + w.scale().to_string();
}

}  // namespace smoothdisc
