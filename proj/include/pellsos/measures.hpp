#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pellsos/moments.hpp"

namespace pellsos {

enum class MeasureKind { interval_arcsine, box_arcsine, ball2d, simplex2d, gaussian, quadrature };

/// Regions with a built-in quadrature rule. Each rule integrates against the
/// region's equilibrium (arcsine-type) measure.
enum class Region { interval, box, ball2d, simplex2d };

struct MeasureModel {
  MeasureKind kind = MeasureKind::interval_arcsine;
  int n = 1;
  Eigen::MatrixXd covariance;  // gaussian only
  Region region = Region::interval;  // quadrature only
  Poly<Rational> weight;  // quadrature only: density relative to the region measure
  int level = 0;  // quadrature only: nodes per axis

  static MeasureModel interval() { return {MeasureKind::interval_arcsine, 1, {}, Region::interval, Poly<Rational>(1), 0}; }
  static MeasureModel box(int n) { return {MeasureKind::box_arcsine, n, {}, Region::box, Poly<Rational>(n), 0}; }
  static MeasureModel ball2d() { return {MeasureKind::ball2d, 2, {}, Region::ball2d, Poly<Rational>(2), 0}; }
  static MeasureModel simplex2d() { return {MeasureKind::simplex2d, 2, {}, Region::simplex2d, Poly<Rational>(2), 0}; }

  static MeasureModel gaussian(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) throw InvalidArgument("covariance must be square");
    const int n = static_cast<int>(sigma.rows());
    return {MeasureKind::gaussian, n, sigma, Region::box, Poly<Rational>(n), 0};
  }

  static MeasureModel quadrature(Region region, int n, Poly<Rational> weight, int level) {
    if (weight.dim() != n) throw DimensionMismatch("quadrature weight dimension");
    return {MeasureKind::quadrature, n, {}, region, std::move(weight), level};
  }

  bool has_exact_moments() const {
    return kind == MeasureKind::interval_arcsine || kind == MeasureKind::box_arcsine ||
           kind == MeasureKind::ball2d || kind == MeasureKind::simplex2d;
  }

  std::string key() const {
    switch (kind) {
      case MeasureKind::interval_arcsine: return "interval";
      case MeasureKind::box_arcsine: return "box" + std::to_string(n) + "d";
      case MeasureKind::ball2d: return "ball2d";
      case MeasureKind::simplex2d: return "simplex2d";
      case MeasureKind::gaussian: return "gaussian" + std::to_string(n) + "d";
      case MeasureKind::quadrature: return "quadrature";
    }
    return "unknown";
  }
};

/// Keys: interval, box<n>d, ball2d, simplex2d, gaussian<n>d (identity covariance).
inline MeasureModel model_from_key(const std::string& key) {
  auto dim_suffix = [&](const std::string& prefix) -> std::optional<int> {
    if (key.rfind(prefix, 0) != 0 || key.size() < prefix.size() + 2 || key.back() != 'd') return std::nullopt;
    const std::string digits = key.substr(prefix.size(), key.size() - prefix.size() - 1);
    if (digits.empty() || digits.size() > 2) return std::nullopt;
    for (char c : digits)
      if (c < '0' || c > '9') return std::nullopt;
    const int n = std::stoi(digits);
    return n >= 1 ? std::optional<int>(n) : std::nullopt;
  };
  if (key == "interval") return MeasureModel::interval();
  if (key == "ball2d") return MeasureModel::ball2d();
  if (key == "simplex2d") return MeasureModel::simplex2d();
  if (auto n = dim_suffix("box")) return MeasureModel::box(*n);
  if (auto n = dim_suffix("gaussian")) return MeasureModel::gaussian(Eigen::MatrixXd::Identity(*n, *n));
  throw InvalidArgument("unknown measure model '" + key + "'");
}

namespace detail {

/// (2k-1)!! with (-1)!! = 1.
inline BigInt odd_double_factorial(int k) {
  BigInt r = 1;
  for (int j = 2 * k - 1; j > 1; j -= 2) r *= j;
  return r;
}

/// Arcsine law on [-1,1]: E[x^{2m}] = C(2m, m) / 4^m.
inline Rational arcsine_moment(int a) {
  if (a % 2) return Rational(0);
  const int m = a / 2;
  BigInt central = 1;
  for (int k = 1; k <= m; ++k) central = central * (m + k) / k;
  return Rational(central, BigInt(1) << (2 * m));
}

/// (2i-1)!! (2j-1)!! / (2(i+j)+1)!!, shared by the disc and simplex laws.
inline Rational dirichlet_half_moment(int i, int j) {
  return Rational(odd_double_factorial(i) * odd_double_factorial(j), odd_double_factorial(i + j + 1));
}

/// Gauss-Legendre nodes and weights on [0, 1].
inline void gauss_legendre_unit(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  if (count < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p0 = 0.0;
      for (int k = 1; k <= count; ++k) {
        const double pm = p0;
        p0 = p1;
        p1 = ((2.0 * k - 1.0) * z * p0 - (k - 1.0) * pm) / k;
      }
      dp = count * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(count - 1 - i);
    nodes[lo] = 0.5 * (1.0 - z);
    nodes[hi] = 0.5 * (1.0 + z);
    weights[lo] = weights[hi] = 0.5 * w;
  }
}

inline double gaussian_moment(const Eigen::MatrixXd& sigma, const MultiIndex& a,
                              std::map<MultiIndex, double, GradedLex>& memo) {
  if (a.degree() == 0) return 1.0;
  if (a.degree() % 2) return 0.0;
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  // Stein: E[x_i x^b] = sum_j sigma_ij b_j E[x^{b - e_j}] with b = a - e_i.
  int i = 0;
  while (a[i] == 0) ++i;
  const MultiIndex b = a - MultiIndex::unit(a.dim(), i);
  double v = 0.0;
  for (int j = 0; j < a.dim(); ++j)
    if (b[j] > 0) v += sigma(i, j) * b[j] * gaussian_moment(sigma, b - MultiIndex::unit(a.dim(), j), memo);
  memo.emplace(a, v);
  return v;
}

}  // namespace detail

/// Closed-form moment for the classical equilibrium measures; nullopt for
/// models that have no exact rational moments.
inline std::optional<Rational> exact_moment(const MeasureModel& model, const MultiIndex& a) {
  if (a.dim() != model.n) throw DimensionMismatch("multi-index dimension does not match the measure");
  switch (model.kind) {
    case MeasureKind::interval_arcsine: return detail::arcsine_moment(a[0]);
    case MeasureKind::box_arcsine: {
      Rational r(1);
      for (int i = 0; i < a.dim(); ++i) r *= detail::arcsine_moment(a[i]);
      return r;
    }
    case MeasureKind::ball2d:
      if (a[0] % 2 || a[1] % 2) return Rational(0);
      return detail::dirichlet_half_moment(a[0] / 2, a[1] / 2);
    case MeasureKind::simplex2d: return detail::dirichlet_half_moment(a[0], a[1]);
    default: return std::nullopt;
  }
}

/// Integral of x^alpha * weight against the equilibrium measure of a region by
/// tensorized Gauss rules: x = cos(theta) on the interval, polar coordinates
/// with u = sqrt(1 - r^2) on the disc, and (x, y) = (u^2, v^2) mapping the
/// simplex law onto the disc law.
inline double quadrature_moment(Region region, const MultiIndex& a, int level, const Poly<Rational>& weight) {
  const int n = a.dim();
  if (weight.dim() != n) throw DimensionMismatch("quadrature weight dimension");
  const int degree = a.degree() + std::max(weight.degree(), 0);
  if (level < degree + 2)
    throw InsufficientOrder("quadrature level " + std::to_string(level) + " insufficient for degree " +
                            std::to_string(degree) + " (need at least " + std::to_string(degree + 2) + ")");
  Poly<double> integrand = Poly<double>::monomial(a, 1.0) * weight.cast<double>();
  if (weight.is_zero()) return 0.0;

  switch (region) {
    case Region::interval:
    case Region::box: {
      if (region == Region::interval && n != 1) throw DimensionMismatch("interval region is one-dimensional");
      std::vector<double> nodes(static_cast<std::size_t>(level));
      for (int k = 0; k < level; ++k) nodes[static_cast<std::size_t>(k)] = std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * level));
      const double w = std::pow(1.0 / level, n);
      std::vector<int> counter(static_cast<std::size_t>(n), 0);
      std::vector<double> x(static_cast<std::size_t>(n));
      double sum = 0.0;
      while (true) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = nodes[static_cast<std::size_t>(counter[i])];
        sum += w * integrand.eval(x);
        std::size_t i = 0;
        while (i < counter.size() && ++counter[i] == level) counter[i++] = 0;
        if (i == counter.size()) break;
      }
      return sum;
    }
    case Region::ball2d:
    case Region::simplex2d: {
      if (n != 2) throw DimensionMismatch("disc and simplex regions are two-dimensional");
      std::vector<double> un, uw;
      detail::gauss_legendre_unit(level, un, uw);
      const int angles = 2 * level + 2;
      double sum = 0.0;
      std::vector<double> x(2);
      for (std::size_t r = 0; r < un.size(); ++r) {
        const double radius = std::sqrt(std::max(0.0, 1.0 - un[r] * un[r]));
        for (int k = 0; k < angles; ++k) {
          const double theta = 2.0 * std::numbers::pi * k / angles;
          x[0] = radius * std::cos(theta);
          x[1] = radius * std::sin(theta);
          if (region == Region::simplex2d) x[0] *= x[0], x[1] *= x[1];
          sum += uw[r] * integrand.eval(x) / angles;
        }
      }
      return sum;
    }
  }
  return 0.0;
}

inline double quadrature_moment(Region region, const MultiIndex& a, int level) {
  return quadrature_moment(region, a, level, Poly<Rational>::constant(a.dim(), Rational(1)));
}

inline double moment(const MeasureModel& model, const MultiIndex& a) {
  if (a.dim() != model.n) throw DimensionMismatch("multi-index dimension does not match the measure");
  if (auto exact = exact_moment(model, a)) return to_double(*exact);
  if (model.kind == MeasureKind::gaussian) {
    std::map<MultiIndex, double, GradedLex> memo;
    return detail::gaussian_moment(model.covariance, a, memo);
  }
  return quadrature_moment(model.region, a, model.level, model.weight);
}

/// Moments up to `order` as a sequence; the Rational backend requires a
/// model with closed-form moments.
template <class S>
MomentSequence<S> moment_sequence(const MeasureModel& model, int order) {
  if constexpr (std::is_same_v<S, Rational>) {
    if (!model.has_exact_moments()) throw InvalidArgument("model '" + model.key() + "' has no exact moments");
    return MomentSequence<Rational>(model.n, order, [&](const MultiIndex& a) { return *exact_moment(model, a); });
  } else {
    if (model.kind == MeasureKind::gaussian) {
      std::map<MultiIndex, double, GradedLex> memo;
      return MomentSequence<S>(model.n, order, [&](const MultiIndex& a) {
        return S(detail::gaussian_moment(model.covariance, a, memo));
      });
    }
    return MomentSequence<S>(model.n, order, [&](const MultiIndex& a) { return S(moment(model, a)); });
  }
}

struct UniformSampling {
  std::size_t samples = 200000;
  std::uint64_t seed = 20240917;
  double min_acceptance = 1e-3;
};

/// Moments of the empirical uniform measure on S from rejection sampling in
/// [-sqrt(R), sqrt(R)]^n. Every localizing block of the result is checked
/// positive definite so the output is a strictly feasible solver start.
inline MomentSequence<double> uniform_start_moments(const GeneratorSet& set, int t,
                                                    const UniformSampling& opts = {}) {
  if (t < 0) throw InvalidArgument("order must be non-negative");
  if (opts.samples == 0) throw InvalidArgument("sample budget must be positive");
  const int n = set.dim();
  const int order = 2 * t;
  MomentSequence<double> phi(n, order);
  std::vector<Poly<double>> gens;
  for (const auto& g : set.generators()) gens.push_back(g.cast<double>());

  std::mt19937_64 rng(opts.seed);
  const double half_width = std::sqrt(set.radius());
  std::uniform_real_distribution<double> coord(-half_width, half_width);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(order) + 1));
  std::vector<double> acc(phi.size(), 0.0);
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    for (auto& xi : x) xi = coord(rng);
    bool inside = true;
    for (std::size_t g = 1; g < gens.size() && inside; ++g) inside = gens[g].eval(x) > 0.0;
    if (!inside) continue;
    ++accepted;
    for (std::size_t i = 0; i < x.size(); ++i) {
      powers[i][0] = 1.0;
      for (int k = 1; k <= order; ++k) powers[i][static_cast<std::size_t>(k)] = powers[i][static_cast<std::size_t>(k - 1)] * x[i];
    }
    for (std::size_t p = 0; p < acc.size(); ++p) {
      const MultiIndex& a = phi.index()[p];
      double v = 1.0;
      for (int i = 0; i < n; ++i) v *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(a[i])];
      acc[p] += v;
    }
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(opts.samples);
  if (accepted == 0 || rate < opts.min_acceptance)
    throw SamplingError("rejection sampling acceptance rate " + std::to_string(rate) + " below " +
                        std::to_string(opts.min_acceptance) + " for set '" + set.name() +
                        "'; the set may have empty interior, or increase the sample budget");
  for (std::size_t p = 0; p < acc.size(); ++p) phi.values()[p] = acc[p] / static_cast<double>(accepted);

  for (std::size_t i : set.active(t)) {
    const auto m = localizing_matrix(phi, set.generators()[i], t - set.half_degree(i));
    try {
      ldl_factor(m.entries, set.labels()[i]);
    } catch (const NotPositiveDefinite& e) {
      throw SamplingError(std::string("sampled start is not strictly feasible (") + e.what() +
                          "); increase the sample budget");
    }
  }
  return phi;
}

}  // namespace pellsos
