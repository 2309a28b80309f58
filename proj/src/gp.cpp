#include "vtt/gp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace vtt::gp {

void KernelParams::validate() const {
  if (!(length_scale > 0.0) || !(signal_variance > 0.0) || !(noise_variance > 0.0)) {
    throw std::invalid_argument(
        "kernel parameters must be strictly positive (length_scale, "
        "signal_variance, noise_variance)");
  }
}

double kernel_eval(double a_m, double a_n, const KernelParams& params,
                   bool same_index) {
  params.validate();
  const double d = a_m - a_n;
  const double l = params.length_scale;
  double k = params.signal_variance * std::exp(-(d * d) / (2.0 * l * l));
  if (same_index) k += params.noise_variance;
  return k;
}

std::vector<double> unit_grid(std::size_t bins) {
  std::vector<double> grid(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  return grid;
}

namespace {

// Raw kernel without the per-call parameter validation; hot path.
inline double sq_exp(double a, double b, double signal_variance, double inv_2l2) {
  const double d = a - b;
  return signal_variance * std::exp(-d * d * inv_2l2);
}

}  // namespace

PosteriorCurve posterior(std::span<const Observation> obs,
                         std::span<const double> grid,
                         const KernelParams& params) {
  params.validate();
  const std::size_t m = grid.size();
  PosteriorCurve out;
  out.grid.assign(grid.begin(), grid.end());
  out.mean.assign(m, 0.0);
  out.variance.assign(m, params.signal_variance);

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(obs.size());
  if (n == 0) return out;

  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      if (obs[i].location == obs[j].location) {
        throw std::invalid_argument("observation locations must be pairwise distinct");
      }
    }
  }

  const double sv = params.signal_variance;
  const double inv_2l2 = 1.0 / (2.0 * params.length_scale * params.length_scale);

  Eigen::MatrixXd K(n, n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = 0; j <= i; ++j) {
      const double k = sq_exp(obs[i].location, obs[j].location, sv, inv_2l2);
      K(i, j) = k;
      K(j, i) = k;
    }
    K(i, i) += params.noise_variance;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("kernel matrix is not positive definite");
  }

  Eigen::VectorXd y(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) y(i) = obs[i].value;
  const Eigen::VectorXd alpha = llt.solve(y);

  const auto L = llt.matrixL();
  const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t g = 0; g < mm; ++g) {
    Eigen::VectorXd ks(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ks(i) = sq_exp(grid[static_cast<std::size_t>(g)], obs[i].location, sv, inv_2l2);
    }
    out.mean[static_cast<std::size_t>(g)] = ks.dot(alpha);
    // var(a*) = k(a*,a*) - ks^T K^-1 ks, via one triangular solve; the test
    // diagonal carries no noise term.
    const Eigen::VectorXd w = L.solve(ks);
    const double var = sv - w.squaredNorm();
    out.variance[static_cast<std::size_t>(g)] = var > 0.0 ? var : 0.0;
  }
  return out;
}

namespace {

struct BandAccumulator {
  double neg = 0.0;
  double pos = 0.0;
};

double band_value(double variance, BandMode mode) {
  return mode == BandMode::two_std ? std::sqrt(variance) : variance;
}

void validate_curve(const PosteriorCurve& curve) {
  const std::size_t m = curve.grid.size();
  if (m < 3 || curve.mean.size() != m || curve.variance.size() != m) {
    throw std::invalid_argument("posterior curve is malformed");
  }
  if (std::abs(curve.grid.front()) > 1e-12 || std::abs(curve.grid.back() - 1.0) > 1e-12) {
    throw std::invalid_argument("curve grid must span [0, 1]");
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!(curve.grid[i + 1] > curve.grid[i])) {
      throw std::invalid_argument("curve grid must be strictly increasing");
    }
  }
  for (double v : curve.variance) {
    if (v < 0.0) throw std::invalid_argument("negative variance in curve");
  }
}

}  // namespace

UncertaintySplit band_integrals(const PosteriorCurve& curve, BandMode mode) {
  validate_curve(curve);
  const std::size_t m = curve.grid.size();

  // Uniform odd-size grid: 0.5 sits exactly at the middle index. Summing
  // the weighted integrand first and multiplying by the spacing once keeps
  // the constant-variance case exact (prior -> 2.0 per half, no drift).
  const std::size_t mid = (m - 1) / 2;
  bool uniform = (m % 2 == 1);
  const double h = (curve.grid.back() - curve.grid.front()) / static_cast<double>(m - 1);
  if (uniform) {
    for (std::size_t i = 0; i + 1 < m && uniform; ++i) {
      uniform = std::abs((curve.grid[i + 1] - curve.grid[i]) - h) <= 1e-9 * h;
    }
    uniform = uniform && std::abs(curve.grid[mid] - 0.5) <= 1e-12;
  }

  UncertaintySplit split;
  if (uniform) {
    double s_neg = 0.5 * (band_value(curve.variance[0], mode) +
                          band_value(curve.variance[mid], mode));
    for (std::size_t i = 1; i < mid; ++i) s_neg += band_value(curve.variance[i], mode);
    double s_pos = 0.5 * (band_value(curve.variance[mid], mode) +
                          band_value(curve.variance[m - 1], mode));
    for (std::size_t i = mid + 1; i + 1 < m; ++i) s_pos += band_value(curve.variance[i], mode);
    const double h_neg = (curve.grid[mid] - curve.grid[0]) / static_cast<double>(mid);
    const double h_pos = (curve.grid[m - 1] - curve.grid[mid]) / static_cast<double>(m - 1 - mid);
    split.neg = 4.0 * (h_neg * s_neg);
    split.pos = 4.0 * (h_pos * s_pos);
    return split;
  }

  // General grid: accumulate trapezoid cells, splitting the one that
  // straddles 0.5 by linear interpolation of the integrand.
  BandAccumulator acc;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double x0 = curve.grid[i];
    const double x1 = curve.grid[i + 1];
    const double s0 = band_value(curve.variance[i], mode);
    const double s1 = band_value(curve.variance[i + 1], mode);
    if (x1 <= 0.5) {
      acc.neg += (x1 - x0) * 0.5 * (s0 + s1);
    } else if (x0 >= 0.5) {
      acc.pos += (x1 - x0) * 0.5 * (s0 + s1);
    } else {
      const double t = (0.5 - x0) / (x1 - x0);
      const double s_mid = s0 + t * (s1 - s0);
      acc.neg += (0.5 - x0) * 0.5 * (s0 + s_mid);
      acc.pos += (x1 - 0.5) * 0.5 * (s_mid + s1);
    }
  }
  split.neg = 4.0 * acc.neg;
  split.pos = 4.0 * acc.pos;
  return split;
}

}  // namespace vtt::gp
