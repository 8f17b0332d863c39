#pragma once

// Lattices A Z^k for k <= 4: Dani and Minkowski constructions, duals, exact
// enumeration of lattice points in symmetric boxes, Bohr sets, and
// successive minima with respect to box and cross-polytope norms.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smoothdisc/numbers.hpp"

namespace smoothdisc {

using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Provenance {
  enum class Kind { Explicit, Dani, DaniDual, Minkowski, MinkowskiDual };
  Kind kind = Kind::Explicit;
  std::string label = "explicit";
  /// Dani parameters when kind is Dani or DaniDual.
  std::vector<double> alpha;
};

class Lattice {
 public:
  static constexpr int kMaxDim = 4;

  /// Columns of `basis` are the basis vectors.
  explicit Lattice(Matrix basis, Provenance provenance = {});

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(basis_.rows()); }
  [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
  [[nodiscard]] double det_abs() const noexcept { return det_abs_; }
  /// 2-norm condition number of the basis.
  [[nodiscard]] double condition_number() const;
  [[nodiscard]] bool is_unimodular(double tol = 1e-9) const noexcept { return std::abs(det_abs_ - 1.0) <= tol; }
  [[nodiscard]] const Provenance& provenance() const noexcept { return provenance_; }

  /// A c, evaluated with compensated dot products.
  [[nodiscard]] std::vector<double> point(std::span<const std::int64_t> coeffs) const;

  /// "dani:<alpha>[;<alpha>...]", "minkowski:cubic:7", "minkowski-dual:cubic:7",
  /// "identity:k", or "explicit:a11,a12;a21,a22" (row-major).
  static Lattice parse(std::string_view spec);

 private:
  Matrix basis_;
  Provenance provenance_;
  double det_abs_;
};

Lattice dani_lattice(std::span<const double> alpha);
Lattice dani_lattice(std::span<const RealAlgebraic> alpha);
/// (A^-1)^T. The dual of a Dani lattice is built in closed form.
Lattice dual_lattice(const Lattice& lattice);

struct MinkowskiLattice {
  Lattice unscaled;  // columns M(1), M(theta), M(theta^2)
  Lattice scaled;    // unscaled / |det|^(1/k)
  double det_unscaled = 0.0;
  std::array<std::int64_t, 3> coeffs{};
};

/// "cubic:7" or "cubicpoly:c2,c1,c0" (monic, totally real, Z[theta] taken as
/// the ring of integers). Rejects polynomials with complex roots.
MinkowskiLattice minkowski_lattice(std::string_view field_spec);

/// Half-widths of P_s = [-s_1, s_1] x ... x [-s_k, s_k].
struct SymBox {
  std::vector<double> s;
};

struct LatticePoint {
  std::vector<std::int64_t> coeffs;  // c with x = A c - shift
  std::vector<double> x;
};

struct EnumerateOptions {
  /// Maximum number of coefficient cells visited.
  double budget = 1e8;
  /// LLL-reduce the box-scaled basis before deriving coefficient ranges.
  bool reduce = true;
  /// Points within this relative tolerance of the boundary are included.
  double rel_tol = 1e-12;
};

using PointVisitor = std::function<void(std::span<const std::int64_t> coeffs, std::span<const double> x)>;

/// Calls `visit` for every point of (lattice - shift) inside the box, in
/// unspecified order. Returns the number of coefficient cells scanned.
std::size_t for_each_in_box(const Lattice& lattice, const SymBox& box, std::span<const double> shift,
                            const PointVisitor& visit, const EnumerateOptions& options = {});

/// All points of (lattice - shift) inside the box, sorted lexicographically
/// by coefficient vector.
std::vector<LatticePoint> enumerate_box(const Lattice& lattice, const SymBox& box,
                                        std::span<const double> shift = {}, const EnumerateOptions& options = {});

/// LLL (delta = 0.99) on the columns of `basis`; returns the unimodular
/// integer transform U with basis * U reduced.
IntMatrix lll_reduce(const Matrix& basis);
/// LLL of diag(row_scale) * basis, with the scaled basis recomputed from
/// the unscaled one after every integer update (stable for very skewed
/// scalings).
IntMatrix lll_reduce(const Matrix& basis, std::span<const double> row_scale);
/// diag(row_scale) * (basis * u) with compensated dot products.
Matrix transformed_basis(const Matrix& basis, const IntMatrix& u, std::span<const double> row_scale);

struct BohrCount {
  std::size_t count = 0;
  double vol = 0.0;  // 2^k rho_1 ... rho_d N
  double ratio = 0.0;
};

/// #((lattice - gamma) cap P_(rho, N)). gamma has k entries.
BohrCount bohr_count(const Lattice& lattice, std::span<const double> gamma, double N, std::span<const double> rho,
                     const EnumerateOptions& options = {});

/// Gauge of a symmetric convex body: either the box max_i |x_i| / w_i or the
/// cross-polytope sum_i w_i |x_i| (the polar body of the box with widths w).
struct BodyNorm {
  enum class Kind { Box, Cross };
  Kind kind = Kind::Box;
  std::vector<double> w;

  [[nodiscard]] double operator()(std::span<const double> x) const noexcept;
  /// Half-widths of the axis box containing {x : norm(x) <= t}.
  [[nodiscard]] SymBox bounding_box(double t) const;

  static BodyNorm box(std::vector<double> s) { return {Kind::Box, std::move(s)}; }
  static BodyNorm cross(std::vector<double> s) { return {Kind::Cross, std::move(s)}; }
};

struct Minimum {
  double value = 0.0;
  LatticePoint witness;
};

/// lambda_1: the smallest t > 0 with a nonzero lattice point in t * body.
/// Witness ties go to the lexicographically smallest point with positive
/// leading coordinate.
Minimum shortest_in_box(const Lattice& lattice, const SymBox& box, const EnumerateOptions& options = {});

/// lambda_1, ..., lambda_k with linearly independent witnesses.
std::vector<Minimum> successive_minima(const Lattice& lattice, const BodyNorm& norm,
                                       const EnumerateOptions& options = {});

/// x in P_s^* decided by the support function over the 2^k corners of P_s.
bool in_polar_of_box(std::span<const double> x, std::span<const double> s);

/// A random k x k basis with |det| = 1 and condition number at most
/// `max_condition`.
Lattice random_unimodular(int k, std::mt19937_64& rng, double max_condition = 50.0);

}  // namespace smoothdisc
