#pragma once

// Diophantine utilities: exact irrationals, continued fractions,
// multiplicative heights and badness scans, the phi/L machinery, and
// Littlewood trajectories.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace smoothdisc {

/// ~192-bit binary float used for reference values of algebraic numbers.
using HpFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<192, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

/// (p + q sqrt(D)) / r with q != 0, D > 0 not a square, r > 0.
struct QuadraticIrrational {
  std::int64_t p = 0;
  std::int64_t q = 1;
  std::int64_t D = 2;
  std::int64_t r = 1;
};

/// A real root of x^3 + c2 x^2 + c1 x + c0 with three real roots. Roots are
/// indexed 1..3 in increasing order.
struct CubicEmbedding {
  std::array<std::int64_t, 3> coeffs{};  // {c2, c1, c0}
  int root_index = 1;
  HpFloat value;
};

/// A binary64 value known only up to +-radius.
struct DoubleValue {
  double value = 0.0;
  double radius = 0.0;
};

class RealAlgebraic {
 public:
  using Repr = std::variant<QuadraticIrrational, CubicEmbedding, DoubleValue>;

  static RealAlgebraic quadratic(std::int64_t p, std::int64_t q, std::int64_t D, std::int64_t r);
  static RealAlgebraic golden() { return quadratic(1, 1, 5, 2); }
  static RealAlgebraic sqrt(std::int64_t D) { return quadratic(0, 1, D, 1); }
  /// Root `root_index` (1-based, increasing) of x^3 + c2 x^2 + c1 x + c0.
  /// Rejects polynomials with a complex root.
  static RealAlgebraic cubic(std::array<std::int64_t, 3> coeffs, int root_index);
  /// theta = 2 cos(2 pi / 7), the largest root of x^3 + x^2 - 2x - 1.
  static RealAlgebraic cubic7() { return cubic({1, -2, -1}, 3); }
  static RealAlgebraic from_double(double value, double radius);
  /// Finite Liouville-type sum  sum_{j <= terms} 2^-(j!) held in binary64
  /// with the truncated tail as its radius.
  static RealAlgebraic liouville(int terms);

  /// Accepts "golden", "sqrt:D", "cubic:7", "quad:p,q,D,r", "liouville:J",
  /// and decimal literals. Rational literals ("1/3") are rejected.
  static RealAlgebraic parse(std::string_view text);

  /// The square, kept exact: a quadratic stays quadratic, a cubic root
  /// becomes a root of the characteristic polynomial of theta^2.
  [[nodiscard]] RealAlgebraic squared() const;

  [[nodiscard]] const Repr& repr() const noexcept { return repr_; }
  [[nodiscard]] double value() const;
  /// Unevaluated sum hi + lo approximating the value to ~2^-104 relative.
  [[nodiscard]] std::array<double, 2> double_double() const;
  [[nodiscard]] HpFloat high_precision() const;
  /// Absolute bound on |true value - (hi + lo)|.
  [[nodiscard]] double radius() const;
  [[nodiscard]] bool is_exact() const noexcept { return !std::holds_alternative<DoubleValue>(repr_); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

 private:
  RealAlgebraic(Repr repr, std::string name) : repr_(std::move(repr)), name_(std::move(name)) {}
  Repr repr_;
  std::string name_;
};

/// Discriminant of x^3 + c2 x^2 + c1 x + c0.
std::int64_t cubic_discriminant(std::array<std::int64_t, 3> coeffs);

/// All three real roots (ascending) at high precision; throws
/// InvalidArgument if the polynomial has a complex root.
std::array<HpFloat, 3> cubic_real_roots(std::array<std::int64_t, 3> coeffs);

struct ContinuedFraction {
  std::vector<std::int64_t> quotients;
  /// For quadratic irrationals: index where the periodic part starts and
  /// its length, once a repeated state has been seen.
  std::optional<std::size_t> period_start;
  std::optional<std::size_t> period_length;
};

/// First `count` partial quotients a0; a1, a2, ...
/// Exact for quadratic irrationals; for other inputs the quotients are
/// certified against the value's error interval and PrecisionError is
/// raised once they become ambiguous.
ContinuedFraction continued_fraction(const RealAlgebraic& alpha, std::size_t count);

/// H(m) = prod_i max(1, |m_i|)
double multiplicative_height(std::span<const std::int64_t> m) noexcept;

struct ApproxRecord {
  std::vector<std::int64_t> m;
  double height = 1.0;
  double error = 0.0;    // ||m . alpha||
  double quality = 0.0;  // height * error
};

struct ScanBudget {
  std::int64_t max_height_d1 = 1'000'000;
  std::int64_t max_height_d2 = 1'000;
  std::int64_t max_height_d3 = 200;
};

struct BadnessScan {
  ApproxRecord worst;
  std::vector<ApproxRecord> below_threshold;
  /// Running minima of quality in order of increasing height (ties by the
  /// canonical order). This is the stream consumed by fit_phi.
  std::vector<ApproxRecord> record_stream;
  std::size_t scanned = 0;
  std::int64_t max_height = 0;
};

/// Scans every nonzero m in Z^d with H(m) <= max_height, m and -m
/// identified (the first nonzero coordinate is taken positive).
/// Returns the minimiser of H(m) ||m . alpha|| with ties broken by smaller
/// height, then lexicographically smaller canonical m.
BadnessScan mult_badness(std::span<const RealAlgebraic> alpha, std::int64_t max_height,
                         double threshold = 0.0, const ScanBudget& budget = {});

/// phi(x) = max(1, C (log x)^a (log log x)^b), with each log clamped below
/// at 1. A Constant is the case a = b = 0.
struct PhiFunction {
  double C = 1.0;
  double a = 0.0;
  double b = 0.0;

  [[nodiscard]] bool is_constant() const noexcept { return a == 0.0 && b == 0.0; }
  [[nodiscard]] double shape(double x) const noexcept;
  [[nodiscard]] double operator()(double x) const noexcept;
  /// limsup phi(2x)/phi(x); 1 for every member of the family.
  [[nodiscard]] double doubling() const noexcept { return 1.0; }
  /// "const:C" or "logpow:C=..,a=..,b=.."
  [[nodiscard]] std::string to_string() const;
  static PhiFunction parse(std::string_view text);

  static PhiFunction constant(double c) { return {c, 0.0, 0.0}; }
  static PhiFunction log_power(double c, double a, double b) { return {c, a, b}; }
};

struct FitOptions {
  /// Shapes tried after Constant, in order of growth.
  std::vector<std::pair<double, double>> log_power_grid{{0.0, 1.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0},
                                                        {1.5, 0.0}, {2.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}};
  /// A shape is accepted when its scale fitted on heights <= sqrt(maxH)
  /// already covers the full scan within this relative slack.
  double holdout_slack = 0.25;
};

struct PhiFit {
  PhiFunction phi;
  std::size_t member_index = 0;  // 0 = Constant, i = log_power_grid[i-1]
  double verified_up_to = 0.0;   // largest scanned height
  bool holdout_consistent = true;
};

/// Smallest member of {Constant, LogPower grid} whose scale makes
/// height * phi(height) * error >= 1 hold for every record, chosen by the
/// hold-out rule in FitOptions. The result is verified only up to the
/// scanned height.
PhiFit fit_phi(std::span<const ApproxRecord> records, const FitOptions& options = {});

/// The H in [1, x] with H phi(H) = x. Throws DomainError for x < phi(1).
double invert_L(double x, const PhiFunction& phi);

struct LittlewoodRecord {
  std::int64_t n = 0;
  double product = 0.0;  // n ||n alpha|| ||n beta||
  double dist_alpha = 0.0;
  double dist_beta = 0.0;
};

struct LittlewoodTrajectory {
  std::vector<LittlewoodRecord> records;
  /// Set when some ||n alpha|| or ||n beta|| fell below 1e-12, or within
  /// the representation radius, for a binary64 input.
  bool precision_warning = false;
  std::int64_t first_warning_n = 0;
};

/// Running minima of n ||n alpha|| ||n beta|| over 1 <= n <= horizon. Ties
/// keep the smaller n.
LittlewoodTrajectory littlewood_trajectory(const RealAlgebraic& alpha, const RealAlgebraic& beta,
                                           std::int64_t horizon);

}  // namespace smoothdisc
