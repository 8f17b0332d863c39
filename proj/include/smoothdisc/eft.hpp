#pragma once

// Error-free transforms and compensated accumulation.
//
// All helpers assume round-to-nearest IEEE binary64 and a working std::fma.

#include <cmath>
#include <cstddef>
#include <span>

namespace smoothdisc::eft {

struct TwoTerm {
  double hi;
  double lo;
};

/// hi + lo == a + b exactly.
inline TwoTerm two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

/// hi + lo == a * b exactly (barring underflow).
inline TwoTerm two_prod(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Neumaier-style compensated accumulator. The running error estimate is
/// a bound on the rounding of the compensated result, not of the inputs.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const auto [s, e] = two_sum(sum_, x);
    sum_ = s;
    comp_ += e;
    abs_ += std::fabs(x);
    ++count_;
  }

  void add(TwoTerm x) noexcept {
    add(x.hi);
    comp_ += x.lo;
  }

  void merge(const CompensatedSum& other) noexcept {
    const auto [s, e] = two_sum(sum_, other.sum_);
    sum_ = s;
    comp_ += e + other.comp_;
    abs_ += other.abs_;
    count_ += other.count_;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

  /// Conservative bound on |value() - exact sum of inputs|.
  [[nodiscard]] double rounding_bound() const noexcept {
    constexpr double u = 0x1p-53;
    return 2.0 * u * std::fabs(value()) +
           static_cast<double>(count_) * count_ * u * u * abs_ + u * u * abs_;
  }

  [[nodiscard]] std::size_t count() const noexcept { return count_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
  std::size_t count_ = 0;
};

/// Dot product evaluated as if in twice the working precision (Ogita, Rump,
/// Oishi "Dot2").
inline double dot2(std::span<const double> x, std::span<const double> y) noexcept {
  double p = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto [h, r] = two_prod(x[i], y[i]);
    const auto [q, t] = two_sum(p, h);
    p = q;
    s += t + r;
  }
  return p + s;
}

/// Signed distance from x to the nearest integer, with x = hi + lo given as
/// an unevaluated sum. Result lies in [-1/2, 1/2].
inline double signed_frac_distance(double hi, double lo) noexcept {
  const double n = std::nearbyint(hi);
  double r = (hi - n) + lo;  // hi - n is exact for |hi| < 2^52
  if (r > 0.5) r -= 1.0;
  if (r < -0.5) r += 1.0;
  return r;
}

/// ||m * a|| for an integer m and a = hi + lo, accurate to roughly
/// |m| * 2^-106 relative to a.
inline double frac_distance_mul(double m, double a_hi, double a_lo) noexcept {
  const auto [p, e] = two_prod(m, a_hi);
  const double n = std::nearbyint(p);
  const double r = (p - n) + (e + m * a_lo);
  const double f = r - std::nearbyint(r);
  return std::fabs(f);
}

}  // namespace smoothdisc::eft
