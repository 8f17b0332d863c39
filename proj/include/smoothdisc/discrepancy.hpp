#pragma once

// Smooth discrepancy of unimodular lattices (and Kronecker sequences through
// their Dani lattices), evaluated two ways:
//
//   direct  sum over lattice points of omega_k(l_k / N) prod omega_i((l_i - gamma_i) / rho_i),
//           minus the expected mass C(omega) vol;
//   dual    vol * sum over nonzero dual points of e(l . gamma) hat(omega_k)(N l_k) prod hat(omega_i)(rho_i l_i),
//           truncated to a hyperbolic cross of dyadic frequency cells with a
//           certified bound on the remainder.
//
// For gamma = 0 the two agree up to the dual tail bound.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothdisc/lattice.hpp"
#include "smoothdisc/numbers.hpp"
#include "smoothdisc/weights.hpp"

namespace smoothdisc {

/// Test box (gamma; rho) with 0 < rho_i < 1/2.
struct TestBox {
  std::vector<double> gamma;
  std::vector<double> rho;

  /// rho_1 ... rho_d N
  [[nodiscard]] double volume(double N) const noexcept;
  [[nodiscard]] bool centered() const noexcept;
  void validate(int d) const;

  static TestBox centered_at_origin(std::vector<double> rho);
};

enum class Method { Direct, Dual };
const char* to_string(Method m) noexcept;

struct DiscrepancyResult {
  double value = 0.0;
  Method method = Method::Direct;
  /// Dual only: certified bound on the mass outside the truncation cube.
  double tail_bound = 0.0;
  std::size_t terms = 0;
  double expected = 0.0;  // C(omega) vol(B; N)
  /// Bound on floating-point rounding in the accumulated sum.
  double rounding = 0.0;
  /// Dual only: envelope threshold below which dyadic frequency cells are
  /// dropped (and bounded in tail_bound).
  double cutoff = 0.0;
};

DiscrepancyResult direct_discrepancy(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                                     const EnumerateOptions& options = {});

struct DualOptions {
  /// Target for tail_bound (absolute, in discrepancy units).
  double tol = 1e-9;
  /// Cap on the estimated number of enumerated dual points.
  double budget = 2e7;
  /// Replace every phase e(l . gamma) by 1 (an upper bound for |D| when gamma != 0).
  bool drop_phases = false;
};

DiscrepancyResult dual_discrepancy(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                                   const DualOptions& options = {});

/// Estimated number of lattice points each engine would visit.
double direct_cost(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N);
double dual_cost(const Lattice& lattice, const WeightSystem& weights, const TestBox& box, double N,
                 const DualOptions& options = {});

struct ScanGrid {
  /// rho_i ranges over 0.499 * 2^-j for j = 0..depth, independently per axis.
  int depth = 8;
  /// Centers; the first is always the origin.
  std::vector<std::vector<double>> gammas;
  DualOptions dual;
  /// Evaluate centered boxes with whichever engine is cheaper; otherwise
  /// always with the dual engine.
  bool cheapest_engine = true;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Origin plus `samples` centers drawn uniformly from [0, 1)^d.
  static ScanGrid make(int d, int depth, int samples, std::uint64_t seed);
};

struct SupEstimate {
  double estimate = 0.0;  // max |D| over the grid, a lower estimate of the sup
  TestBox argmax;
  std::vector<int> argmax_level;
  Method method = Method::Direct;
  double tail_bound = 0.0;
  std::size_t boxes = 0;
  /// Full evaluation at the argmax box.
  DiscrepancyResult result;
};

SupEstimate sup_discrepancy(const Lattice& lattice, const WeightSystem& weights, double N, const ScanGrid& grid);

/// Largest c in (0, 1/2) with hat(omega_i)(x) >= c for |x| <= c and every i,
/// on a 1e-5 grid.
double witness_constant(const WeightSystem& weights);

/// A point (lambda, lambda_k) of the dual lattice with its multiplicative
/// height H(lambda) = prod_{i<k} max(1, |lambda_i|).
struct DualApprox {
  std::vector<double> lambda;
  double height = 1.0;
  double error = 0.0;  // |lambda_k|
};

/// (m, n - m . alpha) with n the nearest integer, for the Dani lattice's alpha.
DualApprox dani_dual_point(const Lattice& dani, std::span<const std::int64_t> m);

/// Running minima of H(lambda) |lambda_k| over dual points with
/// |lambda_i| <= max_height and |lambda_k| <= 1/2, by increasing height.
/// Records carry the dual coefficient vector in `m`.
std::vector<ApproxRecord> dual_record_stream(const Lattice& lattice, double max_height,
                                             const EnumerateOptions& options = {});
DualApprox dual_point_of(const Lattice& lattice, const ApproxRecord& record);

struct Witness {
  double N = 0.0;
  double height = 0.0;
  TestBox box;
  double c = 0.0;
  double lower_bound = 0.0;  // vol(B; N) c^k
  DiscrepancyResult measured;
  /// measured.value >= lower_bound - measured.tail_bound
  bool holds = false;
};

/// Box rho_i = c / (1 + |lambda_i|), gamma = 0, N = floor(c phi(H) H), with a
/// single dual term certifying D >= vol c^k. Rejects approximations with
/// H |lambda_k| >= 1 / phi(H) and witnesses with N < 1.
Witness lower_bound_witness(const Lattice& lattice, const WeightSystem& weights, const DualApprox& approx,
                            const PhiFunction& phi, const DualOptions& options = {});

/// Unnormalised star discrepancy N * sup_x |#{n <= N : {n alpha} < x}/N - x|.
double classical_star_discrepancy_1d(const RealAlgebraic& alpha, std::int64_t N);

}  // namespace smoothdisc
