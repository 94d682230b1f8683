#pragma once

// Physical (xi, eta, mu) and canonical (q, p, d) coordinates of
// thermal-difference states, and the maps between them.

#include <cmath>
#include <sstream>
#include <string>

#include "tds/errors.hpp"

namespace tds {

namespace detail {

inline std::string describe(const char* name, double value, const char* bound) {
  std::ostringstream os;
  os.precision(17);
  os << name << " = " << value << " violates " << bound;
  return os.str();
}

inline void require(bool ok, const char* name, double value, const char* bound) {
  if (!ok || std::isnan(value)) throw domain_error(describe(name, value, bound));
}

}  // namespace detail

/// Parameters of a heralding experiment: initial brightness (pair rate) xi,
/// idler transmittance eta (detector efficiency included), signal
/// transmittance mu. Validated on construction.
class PhysicalParams {
 public:
  PhysicalParams(double xi, double eta, double mu) : xi_(xi), eta_(eta), mu_(mu) {
    detail::require(xi >= 0.0 && xi < 1.0, "xi", xi, "0 <= xi < 1");
    detail::require(eta > 0.0 && eta <= 1.0, "eta", eta, "0 < eta <= 1");
    if (mu == 0.0) {
      throw domain_error(
          "mu = 0 is degenerate: the signal is pure vacuum and has no canonical inverse "
          "(requires 0 < mu <= 1)");
    }
    detail::require(mu > 0.0 && mu <= 1.0, "mu", mu, "0 < mu <= 1");
  }

  double xi() const { return xi_; }
  double eta() const { return eta_; }
  double mu() const { return mu_; }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;

 private:
  double xi_;
  double eta_;
  double mu_;
};

/// Canonical TDS parameters: rho = C sum_n (q^n - d (qp)^n) |n><n|.
class CanonicalParams {
 public:
  CanonicalParams(double q, double p, double d) : q_(q), p_(p), d_(d) {
    detail::require(q >= 0.0 && q < 1.0, "q", q, "0 <= q < 1");
    detail::require(p >= 0.0 && p <= 1.0, "p", p, "0 <= p <= 1");
    detail::require(d >= 0.0 && d <= 1.0, "d", d, "0 <= d <= 1");
  }

  double q() const { return q_; }
  double p() const { return p_; }
  double d() const { return d_; }

  /// True on the multi-valued edges d = 1 with q = 0 or p = 1.
  bool on_singular_edge() const { return d_ == 1.0 && (q_ == 0.0 || p_ == 1.0); }

  friend bool operator==(const CanonicalParams&, const CanonicalParams&) = default;

 private:
  double q_;
  double p_;
  double d_;
};

inline CanonicalParams canonical_from_physical(const PhysicalParams& pp) {
  const double xi = pp.xi();
  const double eta_bar = 1.0 - pp.eta();
  const double mu_bar = 1.0 - pp.mu();
  const double q = pp.mu() * xi / (1.0 - xi * mu_bar);
  const double d = (1.0 - xi * mu_bar) / (1.0 - xi * eta_bar * mu_bar);
  const double p = eta_bar * d;
  return {q, p, d};
}

/// Inverse map, defined on the heralding half-cube 0 <= p < d <= 1, q > 0.
inline PhysicalParams physical_from_canonical(const CanonicalParams& cp) {
  const double q = cp.q(), p = cp.p(), d = cp.d();
  if (d == 0.0) throw no_preimage_error("d = 0: thermal state has no heralding preimage");
  if (p >= d) {
    throw no_preimage_error(
        detail::describe("p - d", p - d, "p < d (classical point, no heralding preimage)"));
  }
  if (q == 0.0) {
    throw no_preimage_error("q = 0 maps to mu = 0 (vacuum), which has no heralding preimage");
  }
  const double xi = q + (1.0 - q) * (1.0 - d) / (1.0 - p);
  const double eta = 1.0 - p / d;
  const double mu = q * (d - p) / ((1.0 - q) * (1.0 - d) + q * (1.0 - p));
  return {xi, eta, mu};
}

/// Normalization factor C = (1-q)(1-qp) / (1-qp-d(1-q)).
inline double normalization_C(const CanonicalParams& cp) {
  if (cp.on_singular_edge()) {
    throw singular_limit_error(
        "normalization is singular on the edges d = 1 with q = 0 or p = 1; use limit_state");
  }
  const double q = cp.q(), p = cp.p(), d = cp.d();
  // 1 - qp - d(1-q) rewritten without cancellation
  const double denom = (1.0 - d) + q * (d - p);
  return (1.0 - q) * (1.0 - q * p) / denom;
}

/// Coincidence probability per pump pulse.
inline double brightness(const PhysicalParams& pp) {
  const double xi = pp.xi(), eta = pp.eta(), mu = pp.mu();
  const double eb = 1.0 - eta, mb = 1.0 - mu;
  return xi * eta * mu * (1.0 - xi * xi * eb * mb) /
         ((1.0 - xi * mb) * (1.0 - xi * eb) * (1.0 - xi * eb * mb));
}

}  // namespace tds
