#pragma once

// Brute-force heralding pipeline in a truncated two-mode Fock space:
// two-mode squeezed vacuum -> idler loss -> click POVM -> signal loss.
//
// Every stage preserves Fock-diagonality, so states are stored as joint
// photon-number distributions P(n, m) over |n>_A |m>_B.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tds/errors.hpp"
#include "tds/fock.hpp"
#include "tds/params.hpp"

namespace tds::oracle {

enum class Mode { A, B };

class TwoModeState {
 public:
  TwoModeState(std::size_t truncation, double trace_deficit)
      : dim_(truncation + 1), trace_deficit_(trace_deficit), joint_(dim_ * dim_, 0.0) {}

  std::size_t truncation() const { return dim_ - 1; }
  double trace_deficit() const { return trace_deficit_; }

  double& at(std::size_t n, std::size_t m) { return joint_[n * dim_ + m]; }
  double at(std::size_t n, std::size_t m) const { return joint_[n * dim_ + m]; }

  double trace() const { return total(joint_); }

  std::vector<double> marginal(Mode mode) const {
    std::vector<double> out(dim_, 0.0);
    for (std::size_t n = 0; n < dim_; ++n)
      for (std::size_t m = 0; m < dim_; ++m) out[mode == Mode::A ? n : m] += at(n, m);
    return out;
  }

 private:
  std::size_t dim_;
  double trace_deficit_;
  std::vector<double> joint_;
};

/// Diagonal single-mode state; unnormalized when produced by herald().
struct SingleModeDensity {
  std::vector<double> weights;

  std::size_t truncation() const { return weights.empty() ? 0 : weights.size() - 1; }
  double trace() const { return total(weights); }
  bool normalized(double tol = 1e-12) const { return std::abs(trace() - 1.0) <= tol; }
};

/// Binomial photon survival probabilities C(m,k) t^k (1-t)^(m-k), k = 0..m.
inline std::vector<double> binomial_damping(std::size_t m, double t) {
  std::vector<double> out(m + 1, 0.0);
  if (t == 1.0) {
    out[m] = 1.0;
    return out;
  }
  if (t == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double log_t = std::log(t), log_r = std::log1p(-t);
  const double lg_m = std::lgamma(double(m) + 1.0);
  for (std::size_t k = 0; k <= m; ++k) {
    const double log_c = lg_m - std::lgamma(double(k) + 1.0) - std::lgamma(double(m - k) + 1.0);
    out[k] = std::exp(log_c + double(k) * log_t + double(m - k) * log_r);
  }
  return out;
}

/// |psi> = sqrt(1-xi) sum_n xi^{n/2} |n>|n>, truncated at N.
inline TwoModeState tmsv(double xi, std::size_t truncation) {
  detail::require(xi >= 0.0 && xi < 1.0, "xi", xi, "0 <= xi < 1");
  if (truncation < 1) throw domain_error("tmsv truncation must be >= 1");
  TwoModeState s(truncation, std::pow(xi, double(truncation + 1)));
  double xn = 1.0;
  for (std::size_t n = 0; n <= truncation; ++n) {
    s.at(n, n) = (1.0 - xi) * xn;
    xn *= xi;
  }
  return s;
}

/// Pure-loss channel of transmittance t on one mode of a joint distribution.
inline TwoModeState apply_loss(const TwoModeState& in, double t, Mode mode) {
  detail::require(t >= 0.0 && t <= 1.0, "t", t, "0 <= t <= 1");
  const std::size_t n_max = in.truncation();
  TwoModeState out(n_max, in.trace_deficit());
  std::vector<std::vector<double>> kernel(n_max + 1);
  for (std::size_t m = 0; m <= n_max; ++m) kernel[m] = binomial_damping(m, t);
  for (std::size_t a = 0; a <= n_max; ++a) {
    for (std::size_t b = 0; b <= n_max; ++b) {
      const double w = in.at(a, b);
      if (w == 0.0) continue;
      if (mode == Mode::A) {
        for (std::size_t k = 0; k <= a; ++k) out.at(k, b) += w * kernel[a][k];
      } else {
        for (std::size_t k = 0; k <= b; ++k) out.at(a, k) += w * kernel[b][k];
      }
    }
  }
  return out;
}

inline SingleModeDensity apply_loss(const SingleModeDensity& in, double t) {
  detail::require(t >= 0.0 && t <= 1.0, "t", t, "0 <= t <= 1");
  SingleModeDensity out{std::vector<double>(in.weights.size(), 0.0)};
  for (std::size_t m = 0; m < in.weights.size(); ++m) {
    if (in.weights[m] == 0.0) continue;
    const auto k = binomial_damping(m, t);
    for (std::size_t j = 0; j <= m; ++j) out.weights[j] += in.weights[m] * k[j];
  }
  return out;
}

/// Click probability of an on/off detector of efficiency eta given m photons.
inline double click_probability(std::size_t m, double eta) {
  if (m == 0) return 0.0;
  if (eta == 1.0) return 1.0;
  return -std::expm1(double(m) * std::log1p(-eta));
}

/// Tr_B{Pi_on rho_AB}, with Pi_off = sum_m (1-eta)^m |m><m|.
inline SingleModeDensity herald(const TwoModeState& state, double eta) {
  detail::require(eta > 0.0 && eta <= 1.0, "eta", eta, "0 < eta <= 1");
  const std::size_t n_max = state.truncation();
  SingleModeDensity out{std::vector<double>(n_max + 1, 0.0)};
  for (std::size_t m = 0; m <= n_max; ++m) {
    const double click = click_probability(m, eta);
    if (click == 0.0) continue;
    for (std::size_t n = 0; n <= n_max; ++n) out.weights[n] += state.at(n, m) * click;
  }
  return out;
}

/// Truncation large enough that both the TMSV tail and the target TDS tail
/// stay below epsilon relative to the click probability.
inline std::size_t oracle_truncation(const PhysicalParams& pp, double epsilon = kDefaultEpsilon) {
  const double xi = pp.xi();
  if (xi == 0.0) throw domain_error("xi = 0: click probability is zero, nothing to herald");
  std::size_t n = 2 * tds_weights(canonical_from_physical(pp), epsilon).truncation();
  if (xi > 0.0) {
    const double click = xi * pp.eta() / (1.0 - xi * (1.0 - pp.eta()));
    const double target = epsilon * click;
    const auto needed = std::size_t(std::ceil(std::log(target) / std::log(xi)));
    n = std::max(n, needed);
  }
  return n;
}

/// Runs the full pipeline and normalizes the heralded signal distribution.
inline FockWeights oracle_conditional(const PhysicalParams& pp, std::size_t truncation) {
  if (pp.xi() == 0.0) throw domain_error("xi = 0: click probability is zero, nothing to herald");
  auto joint = tmsv(pp.xi(), truncation);
  // Idler transmittance as a loss channel in front of a unit-efficiency
  // detector. Signal loss acts on A, commutes with both, and is applied to the
  // heralded marginal.
  joint = apply_loss(joint, pp.eta(), Mode::B);
  auto heralded = herald(joint, 1.0);
  heralded = apply_loss(heralded, pp.mu());
  const double norm = heralded.trace();
  FockWeights w;
  w.weights = std::move(heralded.weights);
  for (double& x : w.weights) x /= norm;
  w.tail_bound = std::pow(pp.xi(), double(truncation + 1)) / norm;
  return w;
}

inline FockWeights oracle_conditional(const PhysicalParams& pp) {
  return oracle_conditional(pp, oracle_truncation(pp));
}

}  // namespace tds::oracle
