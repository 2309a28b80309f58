#ifndef VTT_GP_HPP
#define VTT_GP_HPP

#include <span>
#include <vector>

namespace vtt::gp {

// Squared-exponential kernel hyperparameters. The noise term is an additive
// variance on the training diagonal, exactly as the kernel is written.
struct KernelParams {
  double length_scale = 0.1;
  double signal_variance = 1.0;
  double noise_variance = 0.025;

  void validate() const;  // throws std::invalid_argument unless all positive
};

// k(a_m, a_n) = signal_variance * exp(-(a_m - a_n)^2 / (2 l^2)),
// plus noise_variance iff same_index.
double kernel_eval(double a_m, double a_n, const KernelParams& params,
                   bool same_index = false);

// One occupied bin: the bin center and the count (or frequency) seen there.
struct Observation {
  double location = 0.0;
  double value = 0.0;
};

// Posterior mean and latent-function variance on a fixed grid. With zero
// observations this is the prior: mean 0, variance = signal_variance.
struct PosteriorCurve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> variance;
};

// Exact GP regression with zero prior mean. Training covariance carries the
// noise term on its diagonal; test-point variance excludes it (the curve
// reports confidence in the latent function, not answer noise).
//
// Observation locations must be pairwise distinct. Grid loops run under
// OpenMP when available; see reference::posterior for the serial path.
PosteriorCurve posterior(std::span<const Observation> obs,
                         std::span<const double> grid,
                         const KernelParams& params);

// Band area over the two halves of the answer axis: `neg` integrates over
// a in [0, 0.5] (behaviour on negative samples), `pos` over [0.5, 1].
struct UncertaintySplit {
  double neg = 0.0;
  double pos = 0.0;
  double total() const { return neg + pos; }
};

// two_std: 4 * integral of sqrt(variance), the area of the +/-2 std band.
// raw_variance: 4 * integral of the variance itself, kept for comparison.
enum class BandMode { two_std, raw_variance };

// Trapezoidal rule on the curve's grid, split at a = 0.5. On a uniform grid
// holding 0.5 as a point the quadrature is an exact weighted sum; otherwise
// the straddling cell is split by linear interpolation.
UncertaintySplit band_integrals(const PosteriorCurve& curve,
                                BandMode mode = BandMode::two_std);

// bins+1 evenly spaced points covering [0, 1].
std::vector<double> unit_grid(std::size_t bins);

}  // namespace vtt::gp

#endif  // VTT_GP_HPP
