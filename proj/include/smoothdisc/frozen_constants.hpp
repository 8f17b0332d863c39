#pragma once

// Regression constants. Each value was produced by the oracle named in its
// comment and is checked by the unit or acceptance tests.

#include <json.hpp>

namespace smoothdisc {

inline constexpr const char* kVersion = "0.1.0";

namespace frozen {

// B_6(0) = 11/20, from the exact piecewise-polynomial table; matches
// numerical convolution of six indicators.
inline constexpr double kB6AtZero = 0.55;

// min_{1 <= m <= 1e6} m ||m phi|| for the golden ratio phi: attained at m = 1,
// equal to (3 - sqrt 5) / 2 (exhaustive scan).
inline constexpr double kGoldenWorstQuality = 0.38196601125010515;

// Constant C with |m| ||m phi|| >= 1/C for |m| <= 1e6; 1 / kGoldenWorstQuality.
inline constexpr double kGoldenPhiConstant = 2.6180339887498949;

// Worst multiplicative quality of (theta, theta^2), theta = 2 cos(2 pi/7),
// over H(m) <= 200, attained at m = (18, 1) (256-bit exhaustive scan).
inline constexpr double kCubic7WorstQuality = 0.010637982032009226;

// Witness constant c for the default weight (m = 6, s = 2/3), grid 1e-5
// (256-bit evaluation of s sinc(s c)^6 >= c).
inline constexpr double kWitnessConstant = 0.36601;

// Upper bound for the grid sup of the smooth discrepancy of the golden
// Kronecker sequence over N = 1e2..1e6 (dyadic grid, depth ceil(log2 N)).
// Observed maximum 0.168 at N = 1e4.
inline constexpr double kGoldenSupBound = 0.2;

// Upper bound for the grid sup for the scaled cubic:7 Minkowski lattice over
// N = 1e2..1e5. Observed maximum 0.138.
inline constexpr double kCubic7SupBound = 0.2;

// Upper bound for #B / vol(B) over Bohr sets with vol(B; N) >= phi(L(N)).
// Observed maximum 1.17 over 800 sampled configurations.
inline constexpr double kBohrRatioBound = 1.5;

// C with D*_N <= C log N for the golden sequence, N = 10..1e4. Observed
// 0.3987 (sorted-points formula in 40-digit decimal arithmetic).
inline constexpr double kGoldenClassicalLogConstant = 0.4;

// Blichfeldt-type constants C_k: #(C cap Lambda) <= C_k vol(C) for
// unimodular Lambda with lambda_k(Lambda, C) <= 1, k = 2, 3, 4. Observed
// 1.65, 1.50, 1.25 over 200 random lattices and boxes per k.
inline constexpr double kBlichfeldt[3] = {2.0, 2.0, 2.0};

}  // namespace frozen

inline nlohmann::json frozen_constants_json() {
  using namespace frozen;
  return {{"b6_at_zero", kB6AtZero},
          {"golden_worst_quality", kGoldenWorstQuality},
          {"golden_phi_constant", kGoldenPhiConstant},
          {"cubic7_worst_quality", kCubic7WorstQuality},
          {"witness_constant", kWitnessConstant},
          {"golden_sup_bound", kGoldenSupBound},
          {"cubic7_sup_bound", kCubic7SupBound},
          {"bohr_ratio_bound", kBohrRatioBound},
          {"golden_classical_log_constant", kGoldenClassicalLogConstant},
          {"blichfeldt", {kBlichfeldt[0], kBlichfeldt[1], kBlichfeldt[2]}}};
}

}  // namespace smoothdisc
