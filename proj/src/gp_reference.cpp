#include "vtt/gp_reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vtt::gp::reference {

namespace {

// Gauss-Jordan inverse with partial pivoting on a dense row-major matrix.
std::vector<double> invert(std::vector<double> a, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) {
      throw std::runtime_error("kernel matrix is numerically singular");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a[pivot * n + c], a[col * n + c]);
        std::swap(inv[pivot * n + c], inv[col * n + c]);
      }
    }
    const double d = a[col * n + col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col * n + c] /= d;
      inv[col * n + c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r * n + c] -= f * a[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  return inv;
}

}  // namespace

PosteriorCurve posterior(std::span<const Observation> obs,
                         std::span<const double> grid,
                         const KernelParams& params) {
  params.validate();
  const std::size_t n = obs.size();
  const std::size_t m = grid.size();

  PosteriorCurve out;
  out.grid.assign(grid.begin(), grid.end());
  out.mean.assign(m, 0.0);
  out.variance.assign(m, params.signal_variance);
  if (n == 0) return out;

  const double l = params.length_scale;
  const double sv = params.signal_variance;
  auto kern = [&](double x, double y) {
    return sv * std::exp(-(x - y) * (x - y) / (2.0 * l * l));
  };

  std::vector<double> K(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      K[i * n + j] = kern(obs[i].location, obs[j].location);
    }
    K[i * n + i] += params.noise_variance;
  }
  const std::vector<double> Kinv = invert(std::move(K), n);

  // w = K^-1 y
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      w[i] += Kinv[i * n + j] * obs[j].value;
    }
  }

  std::vector<double> ks(n), v(n);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t i = 0; i < n; ++i) ks[i] = kern(grid[g], obs[i].location);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ks[i] * w[i];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += Kinv[i * n + j] * ks[j];
      v[i] = s;
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) quad += ks[i] * v[i];
    out.mean[g] = mean;
    const double var = sv - quad;
    out.variance[g] = var > 0.0 ? var : 0.0;
  }
  return out;
}

}  // namespace vtt::gp::reference
