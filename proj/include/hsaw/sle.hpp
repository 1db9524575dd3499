#pragma once

// Closed-form SLE(8/3) quantities in the half-plane and the unit strip:
// boundary partition functions, the strip exit density rho, the hull of
// the region right of a barrier and the law of the rightmost excursion.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsaw/constants.hpp"
#include "hsaw/quadrature.hpp"

namespace hsaw {

// ---------------------------------------------------------------------------
// Partition functions

/// H(H, 0, x) = |x|^(-2b), normalised so that H(H, 0, 1) = 1.
inline double h_halfplane(double x) {
  if (x == 0.0) throw std::domain_error("h_halfplane: boundary points coincide");
  return std::pow(std::abs(x), -2.0 * SleConstants::b);
}

/// log cosh(t) without overflow.
inline double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// H(S, 0, x + i) for the unit strip S, obtained from H(H, ., .) through
/// f(z) = e^(pi z) - 1:  [pi^2 / (4 cosh^2(pi x / 2))]^b.
inline double strip_weight(double x) {
  const double log_value =
      SleConstants::b * (2.0 * std::log(kPi / 2.0) - 2.0 * log_cosh(kPi * x / 2.0));
  return std::exp(log_value);
}

// ---------------------------------------------------------------------------
// Exit density

/// Unnormalised density cosh(pi x / 2)^(-5/4).
inline double rho_shape(double x) { return std::exp(-2.0 * SleConstants::b * log_cosh(kPi * x / 2.0)); }

/// Integral of rho_shape over R via sech^a(k x) = B(a/2, 1/2) / k.
inline double rho_shape_integral_closed_form() {
  const double a = 2.0 * SleConstants::b;
  return (2.0 / kPi) * std::sqrt(kPi) * std::tgamma(a / 2.0) / std::tgamma((a + 1.0) / 2.0);
}

/// Integral of rho_shape over (-inf, -cut] (and, by symmetry, [cut, inf))
/// using cosh(t) >= e^|t| / 2.
inline double rho_shape_tail_bound(double cut) {
  const double k = SleConstants::b * kPi;  // decay rate 5 pi / 8
  return std::pow(2.0, 2.0 * SleConstants::b) * std::exp(-k * cut) / k;
}

/// Quadrature of rho_shape over [-cut, cut] plus the analytic tails.
inline double rho_shape_integral_quadrature(double tol = 1e-13, double cut = 30.0) {
  QuadratureOptions opt;
  opt.abs_tol = tol / (2.0 * cut);
  double total = 0.0;
  for (double a = 0.0; a < cut; a += 1.0) total += adaptive_simpson(rho_shape, a, std::min(a + 1.0, cut), opt);
  return 2.0 * (total + rho_shape_tail_bound(cut));
}

/// Normalisation constant c of rho, computed once by quadrature.
inline double rho_normalization() {
  static const double c = 1.0 / rho_shape_integral_quadrature();
  return c;
}

/// Conjectured exit density c cosh(pi x / 2)^(-5/4) on the upper strip boundary.
inline double rho(double x) { return rho_normalization() * rho_shape(x); }

// ---------------------------------------------------------------------------
// Hull of {Re z >= xi} in the strip, mapped to the half-plane

struct HullParams {
  double a = 0.0;  // radius
  double c = 0.0;  // centre
};

inline void require_left_of_barrier(double x, double xi, const char* who) {
  if (!(x < xi)) {
    throw std::domain_error(std::string(who) + ": endpoint abscissa must lie left of the barrier");
  }
}

/// Direct evaluation of the centre and radius formulas.
inline HullParams hull_params_naive(double x, double xi) {
  require_left_of_barrier(x, xi, "hull_params");
  const double e = std::exp(kPi * xi);
  const double ex = std::exp(kPi * x);
  const double p = (e + 1.0) / (e - ex);
  const double q = (e - 1.0) / (e + ex);
  return {0.5 * (p - q), 0.5 * (p + q)};
}

/// Centre c(x, xi) and radius a(x, xi) of the half-disc image of the region
/// right of the barrier. Uses the simplified forms
///   a = e^(-pi xi) (1 + e^(pi x)) / (1 - e^(2 pi (x - xi))),
///   c = (1 + e^(pi x) e^(-2 pi xi)) / (1 - e^(2 pi (x - xi))),
/// which neither overflow nor cancel for large xi.
inline HullParams hull_params(double x, double xi) {
  require_left_of_barrier(x, xi, "hull_params");
  const double denom = -std::expm1(2.0 * kPi * (x - xi));
  const double a = std::exp(-kPi * xi) * (1.0 + std::exp(kPi * x)) / denom;
  const double c = (1.0 + std::exp(kPi * (x - 2.0 * xi))) / denom;
  return {a, c};
}

/// Chordal SLE(8/3) in the strip from 0 to x + i: P(max Re gamma < xi) =
/// [1 - (a/c)^2]^alpha. Evaluated as [4r / (1 + r)^2]^alpha with
/// r = tanh(pi xi / 2) tanh(pi (xi - x) / 2), which equals the hull form.
/// Zero for xi <= 0: the curve starts on the barrier.
inline double escape_probability(double x, double xi) {
  require_left_of_barrier(x, xi, "escape_probability");
  if (xi <= 0.0) return 0.0;
  const double r = std::tanh(kPi * xi / 2.0) * std::tanh(kPi * (xi - x) / 2.0);
  return std::pow(4.0 * r / ((1.0 + r) * (1.0 + r)), SleConstants::alpha);
}

/// The same probability evaluated through hull_params.
inline double escape_probability_from_hull(double x, double xi) {
  if (xi <= 0.0) {
    require_left_of_barrier(x, xi, "escape_probability");
    return 0.0;
  }
  const HullParams h = hull_params(x, xi);
  const double ratio = h.a / h.c;
  return std::pow(std::max(0.0, 1.0 - ratio * ratio), SleConstants::alpha);
}

/// Conjectured CDF of the rightmost excursion:
/// P(X < xi) = int_{-inf}^{xi} escape_probability(x, xi) rho(x) dx.
inline double rightmost_cdf(double xi, double tol = 1e-10) {
  if (!(tol > 0)) throw std::invalid_argument("rightmost_cdf: tolerance must be positive");
  if (xi <= 0.0) return 0.0;
  const double cut = 30.0;
  const double lo = -cut;
  const auto integrand = [xi](double x) { return x >= xi ? 0.0 : escape_probability(x, xi) * rho(x); };
  // Unit panels keep each Simpson start from resolving the bump.
  const int panels = static_cast<int>(std::ceil(xi - lo));
  QuadratureOptions opt;
  opt.abs_tol = tol / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = lo + k;
    const double b = std::min(xi, a + 1.0);
    total += adaptive_simpson(integrand, a, b, opt);
  }
  // The integrand below -cut is bounded by rho there.
  total += rho_normalization() * rho_shape_tail_bound(cut) * escape_probability(lo, xi);
  return std::min(1.0, total);
}

// ---------------------------------------------------------------------------
// Conformal covariance self-test

enum class CovarianceMap {
  identity,            // H -> H
  dilation,            // H -> H, z -> lambda z
  strip_to_halfplane,  // S -> H, z -> e^(pi z) - 1
};

/// H(H, z, w) for real boundary points.
inline double h_halfplane_pair(double z, double w) { return h_halfplane(w - z); }

/// |H(D, z, w) - |Phi'(z)|^b |Phi'(w)|^b H(D', Phi(z), Phi(w))| for the
/// implemented partition functions. For the strip map, z is a point on the
/// lower boundary and w the abscissa of a point w + i on the upper one;
/// `param` is the dilation factor and is ignored otherwise.
inline double conformal_covariance_check(CovarianceMap map, double param, double z, double w) {
  const double b = SleConstants::b;
  switch (map) {
    case CovarianceMap::identity: {
      const double h = h_halfplane_pair(z, w);
      return std::abs(h - 1.0 * 1.0 * h);
    }
    case CovarianceMap::dilation: {
      if (!(param > 0)) throw std::invalid_argument("dilation factor must be positive");
      const double lhs = h_halfplane_pair(z, w);
      const double rhs = std::pow(param, b) * std::pow(param, b) * h_halfplane_pair(param * z, param * w);
      return std::abs(lhs - rhs);
    }
    case CovarianceMap::strip_to_halfplane: {
      // f(z) = e^(pi z) - 1, |f'(z)| = pi e^(pi Re z); f(w + i) = -e^(pi w) - 1.
      const double lhs = strip_weight(w - z);
      const double dz = kPi * std::exp(kPi * z);
      const double dw = kPi * std::exp(kPi * w);
      const double rhs = std::pow(dz, b) * std::pow(dw, b) *
                         h_halfplane_pair(std::expm1(kPi * z), -std::exp(kPi * w) - 1.0);
      return std::abs(lhs - rhs);
    }
  }
  throw std::invalid_argument("unsupported map family");
}

// ---------------------------------------------------------------------------
// Tabulation

struct PredictionTable {
  enum class Kind { density, cdf };

  std::vector<double> grid;
  std::vector<double> values;
  Kind kind = Kind::density;

  /// Linear interpolation, clamped to the end values outside the grid.
  double operator()(double x) const {
    if (grid.empty()) throw std::logic_error("empty prediction table");
    if (x <= grid.front()) return values.front();
    if (x >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
  }
};

inline void require_increasing(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
  }
}

/// lo, lo + step, ..., up to hi (inclusive within half a step).
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(hi >= lo)) throw std::invalid_argument("invalid grid specification");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + static_cast<double>(i) * step;
  return g;
}

inline PredictionTable tabulate_rho(const std::vector<double>& grid) {
  require_increasing(grid);
  PredictionTable t{grid, {}, PredictionTable::Kind::density};
  t.values.reserve(grid.size());
  for (double x : grid) t.values.push_back(rho(x));
  return t;
}

inline PredictionTable tabulate_rightmost_cdf(const std::vector<double>& grid, double tol = 1e-10) {
  require_increasing(grid);
  PredictionTable t{grid, {}, PredictionTable::Kind::cdf};
  t.values.reserve(grid.size());
  for (double xi : grid) t.values.push_back(rightmost_cdf(xi, tol));
  return t;
}

}  // namespace hsaw
