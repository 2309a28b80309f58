#ifndef VTT_GP_REFERENCE_HPP
#define VTT_GP_REFERENCE_HPP

#include "vtt/gp.hpp"

namespace vtt::gp::reference {

// Serial brute-force path: assembles the dense kernel matrix, forms its
// explicit inverse by Gauss-Jordan elimination with partial pivoting, and
// applies it point by point. No Eigen, no OpenMP, no shared code with the
// production solve. The tests use this as the oracle for gp::posterior and
// the benchmark uses it as the baseline.
PosteriorCurve posterior(std::span<const Observation> obs,
                         std::span<const double> grid,
                         const KernelParams& params);

}  // namespace vtt::gp::reference

#endif  // VTT_GP_REFERENCE_HPP
