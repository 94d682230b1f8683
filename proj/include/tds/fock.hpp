#pragma once

// Photon-number distributions: TDS weights, the limiting states on the edges
// of the parameter cube, and moments of Fock-diagonal states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tds/errors.hpp"
#include "tds/params.hpp"

namespace tds {

inline constexpr double kDefaultEpsilon = 1e-14;
inline constexpr std::size_t kMinTruncation = 32;

/// Truncated photon-number distribution, n = 0..N. The probability mass
/// beyond N is at most tail_bound.
struct FockWeights {
  std::vector<double> weights;
  double tail_bound = 0.0;

  std::size_t truncation() const { return weights.empty() ? 0 : weights.size() - 1; }
  std::span<const double> span() const { return weights; }
  double operator[](std::size_t n) const { return n < weights.size() ? weights[n] : 0.0; }
};

inline double total(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

inline double tv_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = k < a.size() ? a[k] : 0.0;
    const double y = k < b.size() ? b[k] : 0.0;
    s += std::abs(x - y);
  }
  return 0.5 * s;
}

/// TDS photon-number distribution C (q^n - d (qp)^n), truncated where the
/// geometric tail C q^{N+1}/(1-q) drops below epsilon (N >= 32).
inline FockWeights tds_weights(const CanonicalParams& cp, double epsilon = kDefaultEpsilon) {
  detail::require(epsilon > 0.0, "epsilon", epsilon, "epsilon > 0");
  const double c = normalization_C(cp);
  const double q = cp.q(), p = cp.p(), d = cp.d();

  auto tail = [&](std::size_t n) { return c * std::pow(q, double(n + 1)) / (1.0 - q); };
  std::size_t n_max = kMinTruncation;
  while (tail(n_max) > epsilon) ++n_max;

  FockWeights w;
  w.weights.resize(n_max + 1);
  double qn = 1.0, pn = 1.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    w.weights[n] = c * qn * (1.0 - d * pn);
    qn *= q;
    pn *= p;
  }
  w.tail_bound = tail(n_max);
  return w;
}

// Limiting states on the edges of the parameter cube.
namespace limit {
struct Vacuum {};
struct SinglePhoton {};
struct TruncatedThermal { double q; };
struct Thermal { double q; };
struct PhotonAddedThermal { double q; };
struct PhotonRemovedThermal { double q; };
/// (1 - mu)|0><0| + mu|1><1|
struct VacuumSinglePhotonMixture { double mu; };
/// Approach to the p = d = 1 edge along d = 1 - (1 - p) tan(theta).
struct EdgeMixture { double q; double theta; };
}  // namespace limit

using LimitKind =
    std::variant<limit::Vacuum, limit::SinglePhoton, limit::TruncatedThermal, limit::Thermal,
                 limit::PhotonAddedThermal, limit::PhotonRemovedThermal,
                 limit::VacuumSinglePhotonMixture, limit::EdgeMixture>;

inline std::string limit_tag(const LimitKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::Vacuum>) return "vacuum";
        else if constexpr (std::is_same_v<K, limit::SinglePhoton>) return "single_photon";
        else if constexpr (std::is_same_v<K, limit::TruncatedThermal>) return "truncated_thermal";
        else if constexpr (std::is_same_v<K, limit::Thermal>) return "thermal";
        else if constexpr (std::is_same_v<K, limit::PhotonAddedThermal>) return "photon_added_thermal";
        else if constexpr (std::is_same_v<K, limit::PhotonRemovedThermal>) return "photon_removed_thermal";
        else if constexpr (std::is_same_v<K, limit::VacuumSinglePhotonMixture>) return "vacuum_single_photon_mixture";
        else return "edge_mixture";
      },
      kind);
}

namespace detail {

inline void require_temperature(double q) { require(q >= 0.0 && q < 1.0, "q", q, "0 <= q < 1"); }

// sum_{m >= k} m q^{m-1} (1-q)^2
inline double shifted_geometric_tail(double q, std::size_t k) {
  if (k == 0) return 1.0;
  return std::pow(q, double(k - 1)) * (double(k) * (1.0 - q) + q);
}

// Weight generator and tail bound for each limit kind.
struct LimitDistribution {
  // weight of |n>
  double weight(std::size_t n) const;
  // probability beyond n
  double tail(std::size_t n) const;
  LimitKind kind;
};

inline double LimitDistribution::weight(std::size_t n) const {
  const double nd = double(n);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::Vacuum>) {
          return n == 0 ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<K, limit::SinglePhoton>) {
          return n == 1 ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<K, limit::TruncatedThermal>) {
          return n == 0 ? 0.0 : (1.0 - k.q) * std::pow(k.q, nd - 1.0);
        } else if constexpr (std::is_same_v<K, limit::Thermal>) {
          return (1.0 - k.q) * std::pow(k.q, nd);
        } else if constexpr (std::is_same_v<K, limit::PhotonAddedThermal>) {
          return n == 0 ? 0.0 : (1.0 - k.q) * (1.0 - k.q) * nd * std::pow(k.q, nd - 1.0);
        } else if constexpr (std::is_same_v<K, limit::PhotonRemovedThermal>) {
          return (1.0 - k.q) * (1.0 - k.q) * (nd + 1.0) * std::pow(k.q, nd);
        } else if constexpr (std::is_same_v<K, limit::VacuumSinglePhotonMixture>) {
          return n == 0 ? 1.0 - k.mu : (n == 1 ? k.mu : 0.0);
        } else {
          // (1-q)/(q+(1-q)t) (q a^dag rho_th a + t rho_th), t = tan(theta)
          const double t = std::tan(k.theta);
          const double q = k.q;
          if (q == 0.0) return k.theta == 0.0 ? (n == 1 ? 1.0 : 0.0) : (n == 0 ? 1.0 : 0.0);
          return (1.0 - q) * (1.0 - q) * std::pow(q, nd) * (nd + t) / (q + (1.0 - q) * t);
        }
      },
      kind);
}

inline double LimitDistribution::tail(std::size_t n) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::Vacuum> || std::is_same_v<K, limit::SinglePhoton> ||
                      std::is_same_v<K, limit::VacuumSinglePhotonMixture>) {
          return n >= 1 ? 0.0 : 1.0;
        } else if constexpr (std::is_same_v<K, limit::TruncatedThermal>) {
          return std::pow(k.q, double(n));
        } else if constexpr (std::is_same_v<K, limit::Thermal>) {
          return std::pow(k.q, double(n + 1));
        } else if constexpr (std::is_same_v<K, limit::PhotonAddedThermal>) {
          return shifted_geometric_tail(k.q, n + 1);
        } else if constexpr (std::is_same_v<K, limit::PhotonRemovedThermal>) {
          return shifted_geometric_tail(k.q, n + 2);
        } else {
          const double t = std::tan(k.theta);
          const double q = k.q;
          if (q == 0.0) return n >= 1 ? 0.0 : 1.0;
          // (1-q)^2/(q+(1-q)t) [ q sum_{m>n} m q^{m-1} + t q^{n+1}/(1-q) ]
          return (q * shifted_geometric_tail(q, n + 1) + t * (1.0 - q) * std::pow(q, double(n + 1))) /
                 (q + (1.0 - q) * t);
        }
      },
      kind);
}

inline void validate(const LimitKind& kind) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::VacuumSinglePhotonMixture>) {
          require(k.mu >= 0.0 && k.mu <= 1.0, "mu", k.mu, "0 <= mu <= 1");
        } else if constexpr (std::is_same_v<K, limit::EdgeMixture>) {
          require_temperature(k.q);
          // tan() of the double nearest pi/2 is finite, so the thermal end evaluates
          require(k.theta >= 0.0 && k.theta <= std::numbers::pi / 2, "theta", k.theta,
                  "0 <= theta <= pi/2");
        } else if constexpr (!std::is_same_v<K, limit::Vacuum> &&
                             !std::is_same_v<K, limit::SinglePhoton>) {
          require_temperature(k.q);
        }
      },
      kind);
}

}  // namespace detail

/// Exact distribution of a named limiting state, truncated like tds_weights.
inline FockWeights limit_state(const LimitKind& kind, double epsilon = kDefaultEpsilon) {
  detail::require(epsilon > 0.0, "epsilon", epsilon, "epsilon > 0");
  detail::validate(kind);
  const detail::LimitDistribution dist{kind};
  std::size_t n_max = kMinTruncation;
  while (dist.tail(n_max) > epsilon) ++n_max;
  FockWeights w;
  w.weights.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) w.weights[n] = dist.weight(n);
  w.tail_bound = dist.tail(n_max);
  return w;
}

inline double mean_photon_number(std::span<const double> w) {
  double s = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) s += double(n) * w[n];
  return s;
}

/// Normalized second-order correlation at zero delay from the photon-number
/// distribution.
inline double g2_zero(std::span<const double> w) {
  double first = 0.0, second = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double nd = double(n);
    first += nd * w[n];
    second += nd * (nd - 1.0) * w[n];
  }
  if (first <= 0.0) throw domain_error("g2(0) undefined: mean photon number is zero");
  return second / (first * first);
}

inline double purity(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

/// Tr rho^2 for a TDS in closed form.
inline double purity_closed(const CanonicalParams& cp) {
  const double c = normalization_C(cp);
  const double q = cp.q(), p = cp.p(), d = cp.d();
  // 1/(1-q^2) + d^2/(1-q^2p^2) - 2d/(1-q^2p), regrouped so that the
  // (1-d)^2 cancellation near the vacuum corner is exact
  const double q2 = q * q;
  const double b = 1.0 / (1.0 - q2 * p);
  const double spread = q2 * (1.0 - p) * b * (1.0 / (1.0 - q2) - d * d * p / (1.0 - q2 * p * p));
  return c * c * ((1.0 - d) * (1.0 - d) * b + spread);
}

}  // namespace tds
