#include "smoothdisc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "smoothdisc/eft.hpp"
#include "smoothdisc/errors.hpp"

namespace smoothdisc {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = text.find(sep);
    out.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return out;
}

double parse_real(std::string_view s) {
  std::string t(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw InvalidArgument("bad matrix entry '" + t + "'");
  return v;
}

}  // namespace

Lattice::Lattice(Matrix basis, Provenance provenance) : basis_(std::move(basis)), provenance_(std::move(provenance)) {
  if (basis_.rows() != basis_.cols()) throw InvalidArgument("lattice basis must be square");
  if (basis_.rows() < 1 || basis_.rows() > kMaxDim) {
    throw InvalidArgument("lattice dimension must be in 1.." + std::to_string(kMaxDim));
  }
  det_abs_ = std::abs(basis_.fullPivLu().determinant());
  if (!(det_abs_ > 0.0) || !std::isfinite(det_abs_)) throw SingularBasis("lattice basis is singular");
}

double Lattice::condition_number() const {
  Eigen::JacobiSVD<Matrix> svd(basis_);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

std::vector<double> Lattice::point(std::span<const std::int64_t> coeffs) const {
  const int k = dim();
  std::vector<double> c(coeffs.begin(), coeffs.end());
  std::vector<double> row(static_cast<std::size_t>(k));
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = basis_(i, j);
    out[static_cast<std::size_t>(i)] = eft::dot2(row, c);
  }
  return out;
}

Lattice Lattice::parse(std::string_view spec) {
  if (spec.starts_with("dani:")) {
    std::vector<RealAlgebraic> alpha;
    for (auto part : split(spec.substr(5), ';')) alpha.push_back(RealAlgebraic::parse(part));
    auto lat = dani_lattice(alpha);
    return lat;
  }
  if (spec.starts_with("minkowski-dual:")) return dual_lattice(minkowski_lattice(spec.substr(15)).scaled);
  if (spec.starts_with("minkowski:")) return minkowski_lattice(spec.substr(10)).scaled;
  if (spec.starts_with("identity:")) {
    const int k = static_cast<int>(parse_real(spec.substr(9)));
    return Lattice(Matrix::Identity(k, k), {Provenance::Kind::Dani, "identity:" + std::to_string(k),
                                            std::vector<double>(static_cast<std::size_t>(k - 1), 0.0)});
  }
  if (spec.starts_with("explicit:")) {
    const auto rows = split(spec.substr(9), ';');
    const auto k = static_cast<Eigen::Index>(rows.size());
    Matrix a(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto cols = split(rows[static_cast<std::size_t>(i)], ',');
      if (static_cast<Eigen::Index>(cols.size()) != k) throw InvalidArgument("explicit lattice rows must have k entries");
      for (Eigen::Index j = 0; j < k; ++j) a(i, j) = parse_real(cols[static_cast<std::size_t>(j)]);
    }
    return Lattice(a, {Provenance::Kind::Explicit, std::string(spec), {}});
  }
  throw InvalidArgument("unrecognised lattice spec '" + std::string(spec) + "'");
}

Lattice dani_lattice(std::span<const double> alpha) {
  const auto d = static_cast<Eigen::Index>(alpha.size());
  if (d < 1) throw InvalidArgument("Dani lattice needs d >= 1");
  Matrix a = Matrix::Identity(d + 1, d + 1);
  for (Eigen::Index i = 0; i < d; ++i) a(i, d) = alpha[static_cast<std::size_t>(i)];
  std::string label = "dani:";
  for (Eigen::Index i = 0; i < d; ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? ";" : "", alpha[static_cast<std::size_t>(i)]);
    label += buf;
  }
  return Lattice(a, {Provenance::Kind::Dani, label, {alpha.begin(), alpha.end()}});
}

Lattice dani_lattice(std::span<const RealAlgebraic> alpha) {
  std::vector<double> v;
  std::string label = "dani:";
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    v.push_back(alpha[i].value());
    label += (i ? ";" : "") + alpha[i].name();
  }
  auto lat = dani_lattice(v);
  Provenance p = lat.provenance();
  p.label = label;
  return Lattice(lat.basis(), p);
}

Lattice dual_lattice(const Lattice& lattice) {
  const auto& prov = lattice.provenance();
  const auto k = static_cast<Eigen::Index>(lattice.dim());
  if (prov.kind == Provenance::Kind::Dani) {
    // [[I, alpha], [0, 1]]^-T = [[I, 0], [-alpha^T, 1]]
    Matrix b = Matrix::Identity(k, k);
    for (Eigen::Index i = 0; i + 1 < k; ++i) b(k - 1, i) = -prov.alpha[static_cast<std::size_t>(i)];
    return Lattice(b, {Provenance::Kind::DaniDual, prov.label + "*", prov.alpha});
  }
  Eigen::FullPivLU<Matrix> lu(lattice.basis());
  if (!lu.isInvertible()) throw SingularBasis("cannot dualise a singular basis");
  Matrix b = lu.inverse().transpose();
  Provenance p;
  switch (prov.kind) {
    case Provenance::Kind::DaniDual:
      p = {Provenance::Kind::Dani, prov.label.ends_with("*") ? prov.label.substr(0, prov.label.size() - 1) : prov.label + "*",
           prov.alpha};
      break;
    case Provenance::Kind::Minkowski:
      p = {Provenance::Kind::MinkowskiDual, prov.label + "*", {}};
      break;
    case Provenance::Kind::MinkowskiDual:
      p = {Provenance::Kind::Minkowski, prov.label.ends_with("*") ? prov.label.substr(0, prov.label.size() - 1) : prov.label + "*",
           {}};
      break;
    default:
      p = {Provenance::Kind::Explicit, prov.label + "*", {}};
  }
  return Lattice(b, p);
}

MinkowskiLattice minkowski_lattice(std::string_view field_spec) {
  std::array<std::int64_t, 3> coeffs{};
  if (field_spec == "cubic:7") {
    coeffs = {1, -2, -1};
  } else if (field_spec.starts_with("cubicpoly:")) {
    const auto parts = split(field_spec.substr(10), ',');
    if (parts.size() != 3) throw InvalidArgument("cubicpoly: expects c2,c1,c0");
    for (std::size_t i = 0; i < 3; ++i) coeffs[i] = static_cast<std::int64_t>(parse_real(parts[i]));
  } else {
    throw InvalidArgument("unsupported field spec '" + std::string(field_spec) + "'");
  }
  const auto roots = cubic_real_roots(coeffs);  // throws on complex roots
  Matrix a(3, 3);
  HpFloat vandermonde = 1;
  for (int j = 0; j < 3; ++j) {
    HpFloat p = 1;
    for (int i = 0; i < 3; ++i) {
      a(j, i) = static_cast<double>(p);
      p *= roots[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < j; ++i) vandermonde *= roots[static_cast<std::size_t>(j)] - roots[static_cast<std::size_t>(i)];
  }
  const double det = static_cast<double>(abs(vandermonde));
  const std::string label = "minkowski:" + std::string(field_spec);
  Lattice unscaled(a, {Provenance::Kind::Minkowski, label + ":unscaled", {}});
  const double scale = static_cast<double>(pow(abs(vandermonde), HpFloat(-1) / 3));
  Lattice scaled(a * scale, {Provenance::Kind::Minkowski, label, {}});
  return {unscaled, scaled, det, coeffs};
}

BohrCount bohr_count(const Lattice& lattice, std::span<const double> gamma, double N, std::span<const double> rho,
                     const EnumerateOptions& options) {
  const int k = lattice.dim();
  if (static_cast<int>(rho.size()) != k - 1) throw InvalidArgument("rho must have d = k - 1 entries");
  if (!gamma.empty() && static_cast<int>(gamma.size()) != k) throw InvalidArgument("gamma must have k entries");
  SymBox box;
  double vol = std::ldexp(N, k);
  for (double r : rho) {
    if (!(r > 0.0 && r < 0.5)) throw InvalidArgument("Bohr radii must lie in (0, 1/2)");
    box.s.push_back(r);
    vol *= r;
  }
  box.s.push_back(N);
  BohrCount out;
  for_each_in_box(
      lattice, box, gamma, [&](std::span<const std::int64_t>, std::span<const double>) { ++out.count; }, options);
  out.vol = vol;
  out.ratio = static_cast<double>(out.count) / vol;
  return out;
}

double BodyNorm::operator()(std::span<const double> x) const noexcept {
  double v = 0.0;
  if (kind == Kind::Box) {
    for (std::size_t i = 0; i < x.size(); ++i) v = std::max(v, std::fabs(x[i]) / w[i]);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * std::fabs(x[i]);
  }
  return v;
}

SymBox BodyNorm::bounding_box(double t) const {
  SymBox b;
  for (double wi : w) b.s.push_back(kind == Kind::Box ? t * wi : t / wi);
  return b;
}

bool in_polar_of_box(std::span<const double> x, std::span<const double> s) {
  const auto k = x.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    double dot = 0.0;
    for (std::size_t i = 0; i < k; ++i) dot += x[i] * ((mask >> i) & 1U ? s[i] : -s[i]);
    if (dot > 1.0) return false;
  }
  return true;
}

Lattice random_unimodular(int k, std::mt19937_64& rng, double max_condition) {
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Matrix a(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = gauss(rng);
    const double det = a.determinant();
    if (std::abs(det) < 1e-3) continue;
    a /= std::pow(std::abs(det), 1.0 / k);
    Lattice lat(a);
    if (lat.condition_number() <= max_condition) return lat;
  }
  throw Error("could not draw a well-conditioned unimodular basis");
}

}  // namespace smoothdisc
