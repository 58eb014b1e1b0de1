#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mdiqkd {

/// Weak-coherent-pulse fiber link.
struct LinkParams {
    double beta = 0.2;        ///< attenuation, dB/km
    double mu = 0.5;          ///< mean photon number per pulse
    double y0 = 1e-6;         ///< dark-count probability per gate
    double threshold = 0.11;  ///< QBER security limit
};

/// Throws std::invalid_argument unless all fields are strictly positive and threshold < 0.5.
void validate(const LinkParams& params);

/// μ·10^(−β·l/10)
double signal_prob(const LinkParams& params, double length_km);

/// (e_int·P_sig + ½·Y0) / (P_sig + Y0): signal errors come from the intrinsic rate, dark counts
/// are random clicks and therefore wrong half the time.
double total_qber(const LinkParams& params, double length_km, double e_int);

inline constexpr double kDistanceBracketKm = 1000.0;
inline constexpr double kDistanceResolutionKm = 0.01;

/// Largest length in [0, 1000] km with total_qber ≤ threshold, bisected to 0.01 km. Returns 0
/// when the intrinsic error already meets the threshold.
double max_secure_distance(const LinkParams& params, double e_int);

struct IntrinsicError {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t samples = 0;
};

/// Monte Carlo mean of the exact QBER (twirl-averaged when protected) for relative rotations drawn
/// from TwoArmGaussian(sigma). Sample i uses stream (seed, i) regardless of sigma, so curves over
/// sigma share their random numbers.
IntrinsicError intrinsic_error(double sigma, bool protected_mode, std::uint64_t samples,
                               std::uint64_t seed);

struct DistanceCurvePoint {
    double sigma = 0.0;
    double e_int_unprotected = 0.0;
    double se_unprotected = 0.0;
    double e_int_protected = 0.0;
    double se_protected = 0.0;
    double l_max_unprotected = 0.0;
    double l_max_protected = 0.0;
};

std::vector<DistanceCurvePoint> distance_curve(const LinkParams& params, std::span<const double> sigmas,
                                               std::uint64_t samples, std::uint64_t seed);

}  // namespace mdiqkd
