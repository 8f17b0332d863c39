#pragma once

// Slow reference implementations used to cross-check the library. They share
// no code with the routines they check beyond the basic types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smoothdisc/lattice.hpp"
#include "smoothdisc/numbers.hpp"
#include "smoothdisc/weights.hpp"

namespace oracle {

// Closed form B_m(x) = 1/(m-1)! sum_j (-1)^j C(m, j) (x + m/2 - j)_+^(m-1),
// evaluated in long double.
inline long double bspline_closed_form(int m, long double x) {
  long double sum = 0.0L;
  long double binom = 1.0L;
  for (int j = 0; j <= m; ++j) {
    const long double t = x + m / 2.0L - j;
    if (t > 0) sum += ((j % 2) ? -1.0L : 1.0L) * binom * std::pow(t, m - 1);
    binom = binom * (m - j) / (j + 1);
  }
  long double fact = 1.0L;
  for (int i = 2; i < m; ++i) fact *= i;
  return sum / fact;
}

// Gauss-Legendre (20 nodes) on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b) {
  static const double x[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
                               0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
                               0.9639719272779138, 0.9931285991850949};
  static const double w[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
                               0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
                               0.0406014298003869, 0.0176140071391521};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return s * h;
}

// int omega(x) g(x) dx, integrating each polynomial piece of omega separately.
template <class G>
double integrate_against(const smoothdisc::BSplineWeight& w, G&& g, int sub = 16) {
  const int m = w.order();
  const double s = w.scale_value();
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const double a = s * (-m / 2.0 + j);
    const double b = a + s;
    for (int q = 0; q < sub; ++q) {
      const double lo = a + (b - a) * q / sub;
      const double hi = a + (b - a) * (q + 1) / sub;
      total += gauss_legendre([&](double x) { return w(x) * g(x); }, lo, hi);
    }
  }
  return total;
}

// Every c in a cube of coefficient vectors with A c - shift in the box (with
// the library's relative boundary tolerance). Coefficient range from the
// row sums of |A^-1|.
inline std::vector<std::vector<std::int64_t>> naive_enumerate(const smoothdisc::Lattice& lattice, const smoothdisc::SymBox& box,
                                                              std::vector<double> shift = {}, double rel_tol = 1e-12) {
  const int k = lattice.dim();
  if (shift.empty()) shift.assign(static_cast<std::size_t>(k), 0.0);
  const Eigen::MatrixXd inv = lattice.basis().inverse();
  std::vector<std::int64_t> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double c = 0.0, r = 0.0;
    for (int j = 0; j < k; ++j) {
      c += inv(i, j) * shift[static_cast<std::size_t>(j)];
      r += std::fabs(inv(i, j)) * box.s[static_cast<std::size_t>(j)];
    }
    lo[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(c - r - 1));
    hi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(c + r + 1));
  }
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> c(lo);
  while (true) {
    bool inside = true;
    for (int i = 0; i < k && inside; ++i) {
      long double x = 0.0L;
      for (int j = 0; j < k; ++j) x += static_cast<long double>(lattice.basis()(i, j)) * c[static_cast<std::size_t>(j)];
      x -= shift[static_cast<std::size_t>(i)];
      inside = std::fabs(static_cast<double>(x)) <= box.s[static_cast<std::size_t>(i)] * (1.0 + rel_tol);
    }
    if (inside) out.push_back(c);
    int i = k - 1;
    while (i >= 0 && ++c[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) {
      c[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// min over canonical nonzero m with H(m) <= M of H(m) ||m . alpha||, using
// 192-bit values of alpha. Returns (quality, m); ties by height then m.
struct NaiveBadness {
  double quality = 1e300;
  double height = 0.0;
  std::vector<std::int64_t> m;
  std::size_t below = 0;
};

inline NaiveBadness naive_badness(const std::vector<smoothdisc::RealAlgebraic>& alpha, std::int64_t M, double threshold = 0.0) {
  using smoothdisc::HpFloat;
  const int d = static_cast<int>(alpha.size());
  std::vector<HpFloat> a;
  for (const auto& x : alpha) a.push_back(x.high_precision());
  NaiveBadness best;
  std::vector<std::int64_t> m(static_cast<std::size_t>(d), -M);
  while (true) {
    const auto first = std::find_if(m.begin(), m.end(), [](std::int64_t v) { return v != 0; });
    double h = 1.0;
    for (auto v : m) h *= std::max<double>(1.0, static_cast<double>(std::llabs(v)));
    if (first != m.end() && *first > 0 && h <= static_cast<double>(M)) {
      HpFloat dot = 0;
      for (int i = 0; i < d; ++i) dot += HpFloat(m[static_cast<std::size_t>(i)]) * a[static_cast<std::size_t>(i)];
      HpFloat f = dot - floor(dot);
      if (f > HpFloat(0.5)) f = 1 - f;
      const double q = h * static_cast<double>(f);
      if (q < threshold) ++best.below;
      if (q < best.quality || (q == best.quality && (h < best.height || (h == best.height && m < best.m)))) {
        best.quality = q;
        best.height = h;
        best.m = m;
      }
    }
    int i = d - 1;
    while (i >= 0 && ++m[static_cast<std::size_t>(i)] > M) {
      m[static_cast<std::size_t>(i)] = -M;
      --i;
    }
    if (i < 0) break;
  }
  return best;
}

}  // namespace oracle
