#pragma once

#include <map>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "mdiqkd/qmath.hpp"
#include "mdiqkd/rng.hpp"

namespace mdiqkd {

/// Axis-angle rotation U = cos(α/2)𝕀 − i·sin(α/2)(n·σ), with α ∈ [0, π].
struct RotationSpec {
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double angle = 0.0;
};

/// Throws std::invalid_argument if ‖axis‖ differs from 1 by more than 1e-12, or the angle is
/// negative or non-finite.
void validate(const RotationSpec& spec);

/// Folds an arbitrary (axis, angle) pair into the canonical α ∈ [0, π] representative of the same
/// channel, using (α, n) ~ (−α, −n) and U(2π − α, −n) = −U(α, n). The axis is normalized.
RotationSpec canonical_rotation(const Eigen::Vector3d& axis, double angle);

/// Rotation whose axis is v/‖v‖ and angle ‖v‖ (axis ẑ when ‖v‖ < 1e-12).
RotationSpec rotation_from_vector(const Eigen::Vector3d& rotation_vector);

Mat2d su2_from_axis_angle(const RotationSpec& spec);

/// u_a† · u_b
Mat2d relative_rotation(const Mat2d& u_a, const Mat2d& u_b);

enum class BiasAxis { Y, Z };

/// Bias about a fixed axis plus isotropic Gaussian jitter on the rotation vector.
struct FixedAxisBias {
    BiasAxis axis = BiasAxis::Y;
    double bias = 0.0;
    double jitter_sigma = 0.02;
};

/// Deterministic rotation.
struct FixedAxisSweep {
    Eigen::Vector3d axis = Eigen::Vector3d::UnitY();
    double angle = 0.0;
};

/// Fixed angle about a Haar-random (uniform on the sphere) axis.
struct HaarAxis {
    double angle = 0.0;
};

/// Each arm drifts about ŷ with std sigma; the relative angle is the difference.
struct TwoArmGaussian {
    double sigma = 0.0;
};

using NoiseModel = std::variant<FixedAxisBias, FixedAxisSweep, HaarAxis, TwoArmGaussian>;

void validate(const NoiseModel& model);

Eigen::Vector3d haar_axis(RngStream& rng);

RotationSpec sample_rotation(const NoiseModel& model, RngStream& rng);

// Key-value form used by config files and CSV metadata:
//   model = fixed-axis-bias | fixed-axis-sweep | haar-axis | two-arm-gaussian
//   axis  = y | z (bias), x | y | z | "nx,ny,nz" (sweep)
//   bias, jitter, angle, sigma = radians
using KeyValues = std::map<std::string, std::string>;

KeyValues to_key_values(const NoiseModel& model);
NoiseModel noise_model_from_key_values(const KeyValues& kv);

std::string describe(const NoiseModel& model);

}  // namespace mdiqkd
