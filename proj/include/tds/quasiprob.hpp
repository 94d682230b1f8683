#pragma once

// s-ordered quasiprobability distributions of thermal-difference states.
//
// W(alpha, s) = C [ W_th(alpha, s | q)/(1-q) - d W_th(alpha, s | qp)/(1-qp) ],
// W_th(alpha, s | x) = kappa(x, s)/pi exp(-kappa(x, s) |alpha|^2).
//
// Everything here uses these closed forms; the defining phase-space integral
// is never evaluated.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "tds/errors.hpp"
#include "tds/parallel.hpp"
#include "tds/params.hpp"

namespace tds {

struct PhasePoint {
  PhasePoint(std::complex<double> a, double ordering) : alpha(a), s(ordering) {
    detail::require(std::abs(s) <= 1.0, "s", s, "-1 <= s <= 1");
  }
  std::complex<double> alpha;
  double s;
};

/// Inverse variance of the s-ordered Gaussian of a thermal state.
inline double kappa(double xi, double s) {
  detail::require(xi >= 0.0 && xi < 1.0, "xi", xi, "0 <= xi < 1");
  detail::require(std::abs(s) <= 1.0, "s", s, "-1 <= s <= 1");
  const double denom = 2.0 * xi / (1.0 - xi) + 1.0 - s;
  if (denom <= 0.0) {
    throw singular_limit_error("kappa is singular (delta function) at xi = 0, s = 1");
  }
  return 2.0 / denom;
}

inline double w_thermal(double abs_alpha_sq, double s, double xi) {
  const double k = kappa(xi, s);
  return k / std::numbers::pi * std::exp(-k * abs_alpha_sq);
}

inline double w_tds(const PhasePoint& point, const CanonicalParams& cp) {
  const double c = normalization_C(cp);
  const double q = cp.q(), qp = cp.q() * cp.p(), d = cp.d();
  const double r2 = std::norm(point.alpha);
  double value = w_thermal(r2, point.s, q) / (1.0 - q);
  if (d != 0.0) value -= d * w_thermal(r2, point.s, qp) / (1.0 - qp);
  return c * value;
}

/// P-function near p = 0: a Gaussian of peak gaussian_height minus a point
/// mass of weight point_mass at the origin. It has no finite value there.
struct PointMassLimit {
  double gaussian_height;
  double point_mass;
};

using POrigin = std::variant<double, PointMassLimit>;

/// Minimum of the P-function, attained at alpha = 0.
inline POrigin p_at_origin(const CanonicalParams& cp) {
  if (cp.q() == 0.0) throw singular_limit_error("P-function at q = 0 is a delta function");
  const double c = normalization_C(cp);
  const double q = cp.q(), p = cp.p(), d = cp.d();
  const double height = c / (q * std::numbers::pi);
  if (d == 0.0) return height;
  if (p == 0.0) return PointMassLimit{height, c * d};
  return height * (1.0 - d / p);
}

inline double wigner_at_origin(const CanonicalParams& cp) {
  const double c = normalization_C(cp);
  const double q = cp.q(), p = cp.p(), d = cp.d();
  return 2.0 * c / std::numbers::pi * (1.0 / (1.0 + q) - d / (1.0 + q * p));
}

namespace detail {
// d(1+q) - (1+qp) without cancellation; positive iff the Wigner function is
// negative at the origin.
inline double wigner_excess(const CanonicalParams& cp) {
  const double q = cp.q(), p = cp.p(), d = cp.d();
  return (d - 1.0) + q * (d - p);
}

// Same quantity from physical coordinates, where its sign is that of 2 mu - 1
// exactly instead of up to the rounding of the parameter map.
inline double wigner_excess(const PhysicalParams& pp) {
  const double xi = pp.xi();
  return pp.eta() * xi * (2.0 * pp.mu() - 1.0) / (1.0 - xi * (1.0 - pp.eta()) * (1.0 - pp.mu()));
}
}  // namespace detail

inline bool is_nonclassical(const CanonicalParams& cp) {
  if (cp.q() == 0.0) return cp.d() == 1.0 && cp.p() < 1.0;  // single-photon edge vs vacuum face
  return cp.d() > cp.p();
}

inline bool is_wigner_negative(const CanonicalParams& cp) {
  if (cp.q() == 0.0) return cp.d() == 1.0 && cp.p() < 1.0;
  return detail::wigner_excess(cp) > 0.0;
}

/// Radius of the disk where the Wigner function is negative, if any.
inline std::optional<double> negative_radius(const CanonicalParams& cp) {
  const double q = cp.q(), p = cp.p();
  if (q == 0.0 && cp.d() == 1.0) {
    throw singular_limit_error("negative radius on the q = 0, d = 1 edge is a limit case");
  }
  const double excess = detail::wigner_excess(cp);
  if (excess <= 0.0) return std::nullopt;
  const double log_f = std::log1p(excess / (1.0 + q * p));
  // (1-qp)/(1+qp) - (1-q)/(1+q)
  const double gap = 2.0 * q * (1.0 - p) / ((1.0 + q) * (1.0 + q * p));
  return std::sqrt(0.5 * log_f / gap);
}

struct AxisSpec {
  double half_width;
  std::size_t samples;
};

/// Square grid of W(alpha, s) values, row-major: row index runs over
/// Im(alpha), column index over Re(alpha).
struct QuasiprobGrid {
  std::complex<double> center;
  AxisSpec axis;
  double s;
  std::vector<double> values;

  double coordinate(std::size_t i) const {
    // exact mirror symmetry: coordinate(n-1-i) == -coordinate(i)
    const double steps = double(axis.samples - 1);
    return axis.half_width * (2.0 * double(i) - steps) / steps;
  }
  std::complex<double> point(std::size_t row, std::size_t col) const {
    return center + std::complex<double>(coordinate(col), coordinate(row));
  }
  double at(std::size_t row, std::size_t col) const { return values[row * axis.samples + col]; }
  double spacing() const { return 2.0 * axis.half_width / double(axis.samples - 1); }
};

inline QuasiprobGrid render_grid(const CanonicalParams& cp, double s, AxisSpec axis,
                                 std::complex<double> center = {}) {
  detail::require(axis.half_width > 0.0, "half_width", axis.half_width, "half_width > 0");
  if (axis.samples < 2) throw domain_error("grid needs at least 2 samples per axis");
  // Fail early on singular inputs rather than inside a worker.
  (void)w_tds(PhasePoint(center, s), cp);

  QuasiprobGrid grid{center, axis, s, std::vector<double>(axis.samples * axis.samples)};
  detail::parallel_for(axis.samples, [&](std::size_t row) {
    for (std::size_t col = 0; col < axis.samples; ++col) {
      grid.values[row * axis.samples + col] = w_tds(PhasePoint(grid.point(row, col), s), cp);
    }
  });
  return grid;
}

}  // namespace tds
