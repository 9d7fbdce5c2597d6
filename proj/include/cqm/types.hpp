#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cqm {

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class Representation { position, momentum };

inline const char* to_string(Representation r) {
    return r == Representation::position ? "position" : "momentum";
}

/// Raised when a numerical run has to be abandoned (NaN/Inf, density at the box edge).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

/// Normalization tolerance: 1e-9 for double, relaxed to a few ulps-times-n for narrower types.
template <typename Real>
constexpr Real norm_tolerance() {
    return std::max<Real>(Real(1e-9), Real(64) * std::numeric_limits<Real>::epsilon());
}

/// Grid points whose density is below this fraction of the peak are treated as nodes.
inline constexpr double kNodeFloorRelative = 1e-12;

template <typename Real>
constexpr Real pi_v = std::numbers::pi_v<Real>;

}  // namespace cqm
