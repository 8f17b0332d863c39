#pragma once

// Smoothing weights built from scaled cardinal B-splines.
//
// omega(x) = B_m(x / s), with B_m the m-fold convolution of the indicator
// of [-1/2, 1/2]. Its Fourier transform (with e(z) = exp(2 pi i z)) is
// s * sinc(s xi)^m, nonnegative whenever m is even.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smoothdisc {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  [[nodiscard]] double value() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  [[nodiscard]] std::string to_string() const;

  /// Accepts "p/q", integers, and terminating decimals ("0.25").
  static Rational parse(std::string_view text);
};

/// sin(pi t) / (pi t), with a degree-8 Taylor branch for |t| < 1e-4.
double sinc(double t) noexcept;

/// Unscaled cardinal B-spline B_m(x) for any order m >= 1.
double cardinal_bspline(int order, double x);

/// Piecewise polynomial coefficients of B_m. Entry [j][r] is the coefficient
/// of t^r on the piece x = -m/2 + j + t, t in [0, 1). Generated exactly in
/// rational arithmetic by the convolution recursion and rounded once.
std::vector<std::vector<double>> bspline_piece_coefficients(int order);

class BSplineWeight {
 public:
  static constexpr int kMaxOrder = 20;

  /// Order must be even and at least 4; order * scale / 2 must not exceed 2.
  BSplineWeight(int order, Rational scale);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] Rational scale() const noexcept { return scale_; }
  [[nodiscard]] double scale_value() const noexcept { return s_; }
  [[nodiscard]] double support_radius() const noexcept { return 0.5 * order_ * s_; }
  [[nodiscard]] int smoothness() const noexcept { return order_ - 2; }

  /// omega(x) >= 0, zero outside the support.
  [[nodiscard]] double operator()(double x) const noexcept;

  /// s * sinc(s xi)^m.
  [[nodiscard]] double fourier(double xi) const noexcept;

  /// s * min(1, (pi s |xi|)^-m): a monotone majorant of fourier() on
  /// |xi| >= 0 used to certify truncation.
  [[nodiscard]] double fourier_envelope(double xi) const noexcept;

 private:
  int order_;
  Rational scale_;
  double s_;
  std::vector<std::vector<double>> pieces_;
};

BSplineWeight make_weight(int order, Rational scale);
inline double eval_weight(const BSplineWeight& w, double x) noexcept { return w(x); }
inline double eval_fourier(const BSplineWeight& w, double xi) noexcept { return w.fourier(xi); }

/// The k-tuple (omega_1, ..., omega_k). Immutable.
class WeightSystem {
 public:
  WeightSystem(std::vector<BSplineWeight> components);

  /// Same weight in every one of k coordinates.
  static WeightSystem uniform(const BSplineWeight& w, int k);

  /// Parses "bspline:m=6,s=2/3" and replicates it over k coordinates.
  static WeightSystem parse(std::string_view spec, int k);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(components_.size()); }
  [[nodiscard]] const BSplineWeight& operator[](int i) const { return components_.at(i); }
  [[nodiscard]] const std::vector<BSplineWeight>& components() const noexcept { return components_; }

  /// min_i (m_i - 2)
  [[nodiscard]] int smoothness() const noexcept { return smoothness_; }

  /// prod_i hat(omega_i)(0) = prod_i s_i
  [[nodiscard]] double expect_constant() const noexcept { return expect_constant_; }

  /// Canonical spec string; equals the parsed input for uniform systems.
  [[nodiscard]] std::string spec() const;

 private:
  std::vector<BSplineWeight> components_;
  int smoothness_;
  double expect_constant_;
};

/// Default weight used throughout: m = 6, s = 2/3 (smoothness 4).
inline BSplineWeight default_weight() { return BSplineWeight(6, Rational{2, 3}); }

}  // namespace smoothdisc
