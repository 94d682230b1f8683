#pragma once

// Test-only generators and numerical routes that the library itself never
// uses: quadrature, Laguerre-series Wigner functions, spectral QFI.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tds/tds.hpp"

namespace tds::testing {

/// Fixed-seed generator of valid parameter points.
class PointGenerator {
 public:
  explicit PointGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  PhysicalParams physical(double xi_max = 0.95) {
    return {uniform(0.0, xi_max), uniform(0.02, 1.0), uniform(0.02, 1.0)};
  }

  /// 0 < q, 0 <= p < d <= 1, off the singular edges.
  CanonicalParams heralded_canonical() {
    const double q = uniform(0.01, 0.95);
    const double d = uniform(0.05, 0.999);
    const double p = uniform(0.0, 0.98) * d;
    return {q, p, d};
  }

  /// Anywhere in the cube except the singular edges.
  CanonicalParams any_canonical() {
    for (;;) {
      CanonicalParams cp(uniform(0.0, 0.95), uniform(0.0, 1.0), uniform(0.0, 1.0));
      if (!cp.on_singular_edge()) return cp;
    }
  }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return out;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / double(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += f(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Tensor-product trapezoid rule of w_tds(., s) over a square, 512 x 512
/// points. The half-width is at least six standard deviations of the wider
/// Gaussian, and large enough that its weighted mass outside the inscribed
/// disk, C/(1-q) exp(-kappa L^2), is below 1e-11.
inline double plane_integral(const CanonicalParams& cp, double s, std::size_t samples = 512) {
  const double k = kappa(cp.q(), s);
  const double sigma = std::sqrt(1.0 / (2.0 * k));
  const double weight = normalization_C(cp) / (1.0 - cp.q());
  const double half = std::max(6.0 * sigma, std::sqrt(std::log(weight * 1e11) / k));
  const double h = 2.0 * half / double(samples - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double wi = (i == 0 || i + 1 == samples) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < samples; ++j) {
      const double wj = (j == 0 || j + 1 == samples) ? 0.5 : 1.0;
      const std::complex<double> a(-half + h * double(i), -half + h * double(j));
      sum += wi * wj * w_tds(PhasePoint(a, s), cp);
    }
  }
  return sum * h * h;
}

/// Wigner function of a Fock-diagonal state from the Laguerre series
/// W_n(r) = (2/pi) (-1)^n L_n(4 r^2) exp(-2 r^2).
inline double wigner_laguerre(std::span<const double> w, double r) {
  const double x = 4.0 * r * r;
  double s = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (w[n] == 0.0) continue;
    const double sign = n % 2 ? -1.0 : 1.0;
    s += w[n] * sign * std::laguerre(unsigned(n), x);
  }
  return 2.0 / std::numbers::pi * s * std::exp(-0.5 * x);
}

/// 2 pi int_0^rmax r max(-W(r), 0) dr by Simpson's rule on a fine grid.
inline double negative_volume(const std::function<double(double)>& wigner, double r_max, std::size_t panels = 20000) {
  return simpson([&](double r) { return 2.0 * std::numbers::pi * r * std::max(-wigner(r), 0.0); }, 0.0, r_max,
                 panels);
}

/// Spectral QFI (1/2) sum_ab (l_a - l_b)^2/(l_a + l_b) |<a|Q_theta|b>|^2 of a
/// density matrix given in the Fock basis, via eigendecomposition.
inline double spectral_qfi(const Eigen::MatrixXcd& rho, double theta) {
  const auto dim = rho.rows();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  const std::complex<double> phase = std::polar(1.0, theta);
  // Q_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt 2
  const Eigen::MatrixXcd quad = (a * std::conj(phase) + a.adjoint() * phase) / std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  const auto& lambda = es.eigenvalues();
  const Eigen::MatrixXcd qab = es.eigenvectors().adjoint() * quad * es.eigenvectors();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double s = lambda(i) + lambda(j);
      if (s <= 1e-300) continue;
      const double diff = lambda(i) - lambda(j);
      sum += diff * diff / s * std::norm(qab(i, j));
    }
  return 0.5 * sum;
}

/// Fock-diagonal density matrix with one empty buffer level.
inline Eigen::MatrixXcd diagonal_density(std::span<const double> w) {
  const auto dim = Eigen::Index(w.size() + 1);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t n = 0; n < w.size(); ++n) rho(Eigen::Index(n), Eigen::Index(n)) = w[n];
  return rho;
}

/// First crossing of `level` by the series y(x),
/// linearly interpolated; NaN if it never crosses.
inline double crossing(std::span<const double> x, std::span<const double> y, double level) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if ((y[i - 1] - level) * (y[i] - level) <= 0.0 && y[i - 1] != y[i]) {
      return x[i - 1] + (level - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
    }
  }
  return std::nan("");
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// CSV dataset as strings; '#' comment lines are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][column(name)]); }
};

inline Table read_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  Table t;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

}  // namespace tds::testing
