#pragma once

// Nonclassicality witnesses of thermal-difference states:
//   ordering sensitivity (OS), threshold 1;
//   sum of quadrature QFI over two orthogonal quadratures, threshold 1;
//   Wigner negative volume (WNV), threshold 0.
// Each has a closed form and at least one independent route.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>

#include "tds/errors.hpp"
#include "tds/fock.hpp"
#include "tds/params.hpp"
#include "tds/quasiprob.hpp"

namespace tds {

// ---------------------------------------------------------------------------
// Ordering sensitivity
// ---------------------------------------------------------------------------

/// OS of a Fock-diagonal state: sum_n (p_n - p_{n+1})^2 (n+1) / sum_n p_n^2.
inline double os_diag(std::span<const double> w) {
  double num = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double next = n + 1 < w.size() ? w[n + 1] : 0.0;
    const double diff = w[n] - next;
    num += diff * diff * double(n + 1);
  }
  return num / purity(w);
}

inline double os_analytic(const CanonicalParams& cp) {
  const double c = normalization_C(cp);
  const double q = cp.q(), p = cp.p(), d = cp.d();
  const double bracket = 1.0 / ((1.0 + q) * (1.0 + q)) + d * d / ((1.0 + q * p) * (1.0 + q * p)) -
                         2.0 * d * (1.0 - q) * (1.0 - q * p) / ((1.0 - q * q * p) * (1.0 - q * q * p));
  return c * c * bracket / purity_closed(cp);
}

/// pi * integral of W(alpha, s)^2 over the plane, from the Gaussian-overlap
/// integral of the two-Gaussian form. Equals the purity at s = 0.
inline double wigner_overlap(const CanonicalParams& cp, double s) {
  const double c = normalization_C(cp);
  const double q = cp.q(), qp = cp.q() * cp.p(), d = cp.d();
  const double k1 = kappa(q, s);
  const double a1 = 1.0 / (1.0 - q);
  double sum = a1 * a1 * k1 / 2.0;
  if (d != 0.0) {
    const double k2 = kappa(qp, s);
    const double a2 = d / (1.0 - qp);
    sum += a2 * a2 * k2 / 2.0 - 2.0 * a1 * a2 * k1 * k2 / (k1 + k2);
  }
  return c * c * sum;
}

/// OS as the s-derivative of ln(pi int W^2) at s = 0, by central differences
/// with a Richardson step at h/2.
inline double os_finite_difference(const CanonicalParams& cp, double h = 1e-4) {
  detail::require(h > 0.0 && h <= 0.5, "h", h, "0 < h <= 0.5");
  auto derivative = [&](double step) {
    return (std::log(wigner_overlap(cp, step)) - std::log(wigner_overlap(cp, -step))) / (2.0 * step);
  };
  const double coarse = derivative(h);
  const double fine = derivative(h / 2.0);
  if (std::abs(coarse - fine) > 1e-6 * std::max(1.0, std::abs(fine))) {
    throw non_convergence_error("os_finite_difference: step too large, h and h/2 disagree");
  }
  return (4.0 * fine - coarse) / 3.0;
}

struct OsCommutatorResult {
  double value;
  // weight in the top retained Fock level exceeds 1e-12
  bool truncation_warning;
};

/// OS = -(1/2P) Tr([Q,rho]^2 + [P,rho]^2) with ladder-operator quadratures on
/// the truncated space plus one empty buffer level.
inline OsCommutatorResult os_commutator(std::span<const double> w) {
  using Eigen::MatrixXcd;
  using Eigen::VectorXd;
  const auto dim = Eigen::Index(w.size() + 1);
  VectorXd rho = VectorXd::Zero(dim);
  for (std::size_t n = 0; n < w.size(); ++n) rho(Eigen::Index(n)) = w[n];

  MatrixXcd annihilate = MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) annihilate(n - 1, n) = std::sqrt(double(n));
  const MatrixXcd create = annihilate.adjoint();
  const std::complex<double> i{0.0, 1.0};
  const MatrixXcd quad_q = (create + annihilate) / std::sqrt(2.0);
  const MatrixXcd quad_p = i * (create - annihilate) / std::sqrt(2.0);

  const auto r = rho.cast<std::complex<double>>().asDiagonal();
  const MatrixXcd comm_q = quad_q * r - r * quad_q;
  const MatrixXcd comm_p = quad_p * r - r * quad_p;
  // Tr(X X) = sum_ij X_ij X_ji
  const std::complex<double> trace =
      comm_q.cwiseProduct(comm_q.transpose()).sum() + comm_p.cwiseProduct(comm_p.transpose()).sum();

  const double value = -trace.real() / (2.0 * purity(w));
  return {value, !w.empty() && w.back() > 1e-12};
}

// ---------------------------------------------------------------------------
// Quantum Fisher information
// ---------------------------------------------------------------------------

/// QFI of a Fock-diagonal state with respect to any quadrature.
inline double qfi_quadrature_diag(std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double next = n + 1 < w.size() ? w[n + 1] : 0.0;
    const double denom = w[n] + next;
    if (denom <= 0.0) continue;
    const double diff = w[n] - next;
    sum += diff * diff / denom * double(n + 1);
  }
  return 0.5 * sum;
}

struct MajorantConfig {
  std::size_t cutoff = 512;
  double target_gap = 1e-9;
  std::size_t max_cutoff = std::size_t{1} << 16;
};

/// Bracket on the QFI sum over two orthogonal quadratures.
struct QfiBracket {
  double lower;
  double upper;
  std::size_t cutoff;
  double gap() const { return upper - lower; }
};

namespace detail {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Relative rounding allowance applied outward to both ends of the bracket,
// so that the computed interval still encloses the exact one.
inline constexpr double kBracketRounding = 64.0 * std::numeric_limits<double>::epsilon();

// Upper bound from the first M series terms plus a majorized remainder, and
// the exact partial sum of the diagonal formula over n < M. Every shorter
// cutoff also gives a valid bound, so the reported ends are the tightest
// seen up to M; this keeps them monotone in M despite rounding.
inline QfiBracket qfi_bracket_at(const CanonicalParams& cp, double c, std::size_t cutoff) {
  const double q = cp.q(), p = cp.p(), d = cp.d();
  const double qp = q * p;
  // A_- - A_+ and A_+ - p^n written without cancellation
  const double a_diff = -2.0 * q * (1.0 - p) / (d * (1.0 - qp * qp));
  const double a_diff_sq = a_diff * a_diff;
  auto a_plus_minus_pn = [&](double pn) {
    return ((1.0 - d * pn) + q * (1.0 - d * pn * p)) / (d * (1.0 + qp));
  };
  // constant part of the remainder, split into its two signed pieces
  const double one_minus_q_sq = (1.0 - q) * (1.0 - q);
  const double tail_denom = d * one_minus_q_sq * (1.0 - qp) * (1.0 - qp) * (1.0 + qp);
  const double tail_pos = (1.0 - d) * one_minus_q_sq * (1.0 + qp) / tail_denom;
  const double tail_neg = q * (1.0 - p) * (p * one_minus_q_sq + (1.0 - p) * (1.0 + q)) / tail_denom;
  const double tail = tail_pos - tail_neg;
  const double tail_magnitude = tail_pos + tail_neg;
  const double prefactor = c * d * (1.0 - qp) * (1.0 - qp) / (1.0 + qp);

  CompensatedSum series, partial;
  double qn = 1.0, pn = 1.0;
  double w_n = c * (1.0 - d);
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < cutoff; ++n) {
    const double nd = double(n);
    series.add(qn * (nd + 1.0) / a_plus_minus_pn(pn));
    const double w_next = c * qn * q * (1.0 - d * pn * p);
    const double denom = w_n + w_next;
    if (denom > 0.0) partial.add((w_n - w_next) * (w_n - w_next) / denom * (nd + 1.0));
    w_n = w_next;
    qn *= q;
    pn *= p;
    // qn = q^m, pn = p^m for the cutoff m = n + 1
    const double m = nd + 1.0;
    const double remainder = qn * (m * (1.0 - q) + 1.0) / one_minus_q_sq / a_plus_minus_pn(pn);
    const double head = a_diff_sq * (series.value() + remainder);
    const double bound = prefactor * (head + tail) + kBracketRounding * prefactor * (head + tail_magnitude);
    upper = std::min(upper, bound);
    // partial is twice the single-quadrature QFI partial sum, i.e. 2 * 0.5 * sum
    lower = std::max(lower, partial.value());
  }
  return {lower - kBracketRounding * lower, upper, cutoff};
}

}  // namespace detail

/// Majorant bracket on the QFI sum. Starts at cfg.cutoff and doubles the
/// cutoff until the gap is below cfg.target_gap or cfg.max_cutoff is passed.
inline QfiBracket qfi_sum_majorant(const CanonicalParams& cp, const MajorantConfig& cfg = {}) {
  if (cfg.cutoff < 1) throw domain_error("majorant cutoff must be >= 1");
  const double c = normalization_C(cp);
  if (cp.d() == 0.0) {
    const double thermal = (1.0 - cp.q()) / (1.0 + cp.q());
    return {thermal, thermal, cfg.cutoff};
  }
  std::size_t cutoff = cfg.cutoff;
  for (;;) {
    const auto bracket = detail::qfi_bracket_at(cp, c, cutoff);
    if (bracket.gap() <= cfg.target_gap) return bracket;
    if (cutoff >= cfg.max_cutoff) {
      throw non_convergence_error("QFI majorant gap above target at the maximum cutoff");
    }
    cutoff = std::min(2 * cutoff, cfg.max_cutoff);
  }
}

/// Bracket at one fixed cutoff, without the convergence loop.
inline QfiBracket qfi_sum_majorant_at(const CanonicalParams& cp, std::size_t cutoff) {
  if (cutoff < 1) throw domain_error("majorant cutoff must be >= 1");
  const double c = normalization_C(cp);
  if (cp.d() == 0.0) {
    const double thermal = (1.0 - cp.q()) / (1.0 + cp.q());
    return {thermal, thermal, cutoff};
  }
  return detail::qfi_bracket_at(cp, c, cutoff);
}

// ---------------------------------------------------------------------------
// Wigner negative volume
// ---------------------------------------------------------------------------

/// WNV of (1 - mu)|0><0| + mu|1><1|.
inline double wnv_vacuum_single_photon(double mu) {
  detail::require(mu >= 0.0 && mu <= 1.0, "mu", mu, "0 <= mu <= 1");
  if (mu <= 0.5) return 0.0;
  return 2.0 * mu * std::exp(-(2.0 * mu - 1.0) / (2.0 * mu)) - 1.0;
}

inline constexpr double kSmallTemperature = 1e-6;

namespace detail {
// log1p(t) - t without the cancellation for small t
inline double log1p_remainder(double t) {
  if (std::abs(t) > 1e-3) return std::log1p(t) - t;
  double term = t, sum = 0.0;
  for (int n = 2; n <= 8; ++n) {
    term *= -t;
    sum += term / n;
  }
  return sum;
}
}  // namespace detail

namespace detail {
inline double wnv_with_excess(const CanonicalParams& cp, double excess) {
  const double q = cp.q(), p = cp.p(), d = cp.d();
  if (excess <= 0.0) return 0.0;
  if (q < kSmallTemperature) {
    // first-order limit: vacuum/single-photon mixture with the effective
    // signal transmittance of the point
    const double mu = q * (d - p) / ((1.0 - q) * (1.0 - d) + q * (1.0 - p));
    return wnv_vacuum_single_photon(mu);
  }
  // WNV = a0 F^-k - 1 with a0 = 1 + u and F = 1 + v. The first-order parts of
  // log a0 and k log F cancel, so u - k v is formed analytically (it is
  // quadratic in the excess) and only the log1p remainders are summed.
  const double denom = (1.0 - d) + q * (d - p);
  const double u = (1.0 - q) * excess / ((1.0 + q) * denom);
  const double v = excess / (1.0 + q * p);
  const double k = (1.0 - q) * (1.0 + q * p) / (2.0 * q * (1.0 - p));
  const double leading = (1.0 - q) * (1.0 - q) * excess * excess / ((1.0 + q) * denom * 2.0 * q * (1.0 - p));
  const double s = leading + detail::log1p_remainder(u) - k * detail::log1p_remainder(v);
  return std::max(0.0, std::expm1(s));
}
}  // namespace detail

/// Absolute integral of the Wigner function over the disk where it is negative.
inline double wnv_closed(const CanonicalParams& cp) {
  if (cp.on_singular_edge()) {
    if (cp.q() == 0.0) return wnv_vacuum_single_photon(1.0);
    throw singular_limit_error("WNV on the p = d = 1 edge depends on the approach; use wnv_limit");
  }
  return detail::wnv_with_excess(cp, detail::wigner_excess(cp));
}

/// WNV of a named limiting state.
inline double wnv_limit(const LimitKind& kind) {
  detail::validate(kind);
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::SinglePhoton>) {
          return wnv_vacuum_single_photon(1.0);
        } else if constexpr (std::is_same_v<K, limit::VacuumSinglePhotonMixture>) {
          return wnv_vacuum_single_photon(k.mu);
        } else if constexpr (std::is_same_v<K, limit::TruncatedThermal>) {
          if (k.q == 0.0) return wnv_vacuum_single_photon(1.0);
          return wnv_closed(CanonicalParams(k.q, 0.0, 1.0));
        } else if constexpr (std::is_same_v<K, limit::PhotonAddedThermal> ||
                             std::is_same_v<K, limit::EdgeMixture>) {
          double t = 0.0;
          if constexpr (std::is_same_v<K, limit::EdgeMixture>) t = std::tan(k.theta);
          const double q = k.q;
          if (q == 0.0) return t == 0.0 ? wnv_vacuum_single_photon(1.0) : 0.0;
          if (t >= q / (1.0 + q)) return 0.0;
          return 2.0 * q / ((1.0 + q) * (q + (1.0 - q) * t)) *
                     std::exp(-(1.0 - q) * (q - t * (1.0 + q)) / (2.0 * q)) -
                 1.0;
        } else {
          // vacuum, thermal, photon-removed thermal: nonnegative Wigner function
          return 0.0;
        }
      },
      kind);
}

/// (nonclassical, wigner_negative) for a named limiting state.
inline std::pair<bool, bool> limit_negativity(const LimitKind& kind) {
  return std::visit(
      [](const auto& k) -> std::pair<bool, bool> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::SinglePhoton> ||
                      std::is_same_v<K, limit::TruncatedThermal> ||
                      std::is_same_v<K, limit::PhotonAddedThermal>) {
          return {true, true};
        } else if constexpr (std::is_same_v<K, limit::VacuumSinglePhotonMixture>) {
          return {k.mu > 0.0, k.mu > 0.5};
        } else if constexpr (std::is_same_v<K, limit::EdgeMixture>) {
          const double t = std::tan(k.theta);
          if (k.q == 0.0) return {k.theta == 0.0, k.theta == 0.0};
          return {t < 1.0, t < k.q / (1.0 + k.q)};
        } else {
          return {false, false};
        }
      },
      kind);
}

// ---------------------------------------------------------------------------
// Per-point report
// ---------------------------------------------------------------------------

/// All witnesses for one parameter point. Physical coordinates and brightness
/// are absent for canonical points without a heralding preimage; g2 is
/// absent for the vacuum. limit_tag names the limiting state used on a
/// singular edge and is empty otherwise.
struct WitnessReport {
  std::optional<double> xi, eta, mu;
  double q = 0.0, p = 0.0, d = 0.0;
  std::optional<double> brightness;
  std::optional<double> g2;
  double os = 0.0;
  double qfi_lower = 0.0;
  double qfi_upper = 0.0;
  double wnv = 0.0;
  bool nonclassical = false;
  bool wigner_negative = false;
  std::string limit_tag;
};

struct ReportOptions {
  double epsilon = kDefaultEpsilon;
  MajorantConfig majorant{};
};

namespace detail {

inline std::optional<double> g2_if_defined(std::span<const double> w) {
  if (mean_photon_number(w) <= 0.0) return std::nullopt;
  return g2_zero(w);
}

inline void fill_from_limit(WitnessReport& r, const LimitKind& kind) {
  const auto w = limit_state(kind, 1e-16);
  r.g2 = g2_if_defined(w.span());
  r.os = os_diag(w.span());
  r.qfi_lower = r.qfi_upper = 2.0 * qfi_quadrature_diag(w.span());
  r.wnv = wnv_limit(kind);
  std::tie(r.nonclassical, r.wigner_negative) = limit_negativity(kind);
  r.limit_tag = limit_tag(kind);
}

inline void fill_regular(WitnessReport& r, const CanonicalParams& cp, double excess, const ReportOptions& opt) {
  const auto w = tds_weights(cp, opt.epsilon);
  r.g2 = g2_if_defined(w.span());
  r.os = os_diag(w.span());
  const auto bracket = qfi_sum_majorant(cp, opt.majorant);
  r.qfi_lower = bracket.lower;
  r.qfi_upper = bracket.upper;
  r.wnv = wnv_with_excess(cp, excess);
  r.nonclassical = is_nonclassical(cp);
  r.wigner_negative = excess > 0.0;
}

}  // namespace detail

inline WitnessReport witness_report(const PhysicalParams& pp, const ReportOptions& opt = {}) {
  const auto cp = canonical_from_physical(pp);
  WitnessReport r;
  r.xi = pp.xi();
  r.eta = pp.eta();
  r.mu = pp.mu();
  r.q = cp.q();
  r.p = cp.p();
  r.d = cp.d();
  r.brightness = brightness(pp);
  if (pp.xi() == 0.0) {
    // no pairs: the xi -> 0 limit at fixed transmittances
    detail::fill_from_limit(r, limit::VacuumSinglePhotonMixture{pp.mu()});
  } else {
    detail::fill_regular(r, cp, detail::wigner_excess(pp), opt);
  }
  return r;
}

inline WitnessReport witness_report(const CanonicalParams& cp, const ReportOptions& opt = {}) {
  WitnessReport r;
  r.q = cp.q();
  r.p = cp.p();
  r.d = cp.d();
  try {
    const auto pp = physical_from_canonical(cp);
    r.xi = pp.xi();
    r.eta = pp.eta();
    r.mu = pp.mu();
    r.brightness = brightness(pp);
  } catch (const no_preimage_error&) {
  }
  if (cp.on_singular_edge()) {
    if (cp.q() == 0.0) {
      detail::fill_from_limit(r, limit::SinglePhoton{});
    } else {
      detail::fill_from_limit(r, limit::PhotonAddedThermal{cp.q()});
    }
  } else {
    detail::fill_regular(r, cp, detail::wigner_excess(cp), opt);
  }
  return r;
}

}  // namespace tds
