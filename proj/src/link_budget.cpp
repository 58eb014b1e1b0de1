#include "mdiqkd/link_budget.hpp"

#include <cmath>
#include <stdexcept>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/mdi_core.hpp"
#include "mdiqkd/parallel.hpp"
#include "mdiqkd/rng.hpp"
#include "mdiqkd/stats.hpp"

namespace mdiqkd {

namespace {
constexpr std::uint64_t kMinIntrinsicSamples = 1000;
}

void validate(const LinkParams& p) {
    const bool ok = p.beta > 0.0 && p.mu > 0.0 && p.y0 > 0.0 && p.threshold > 0.0 && p.threshold < 0.5 &&
                    std::isfinite(p.beta) && std::isfinite(p.mu) && std::isfinite(p.y0);
    if (!ok) throw std::invalid_argument("LinkParams: beta, mu, y0 must be > 0 and 0 < threshold < 0.5");
}

double signal_prob(const LinkParams& params, double length_km) {
    if (!(length_km >= 0.0)) throw std::invalid_argument("signal_prob: length must be >= 0");
    return params.mu * std::pow(10.0, -params.beta * length_km / 10.0);
}

double total_qber(const LinkParams& params, double length_km, double e_int) {
    if (!(e_int >= 0.0 && e_int <= 1.0)) throw std::invalid_argument("total_qber: e_int must be in [0, 1]");
    const double p_sig = signal_prob(params, length_km);
    return (e_int * p_sig + 0.5 * params.y0) / (p_sig + params.y0);
}

double max_secure_distance(const LinkParams& params, double e_int) {
    validate(params);
    if (e_int >= params.threshold || total_qber(params, 0.0, e_int) > params.threshold) return 0.0;
    if (total_qber(params, kDistanceBracketKm, e_int) <= params.threshold) return kDistanceBracketKm;
    double lo = 0.0;
    double hi = kDistanceBracketKm;
    while (hi - lo > kDistanceResolutionKm) {
        const double mid = 0.5 * (lo + hi);
        if (total_qber(params, mid, e_int) <= params.threshold) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

IntrinsicError intrinsic_error(double sigma, bool protected_mode, std::uint64_t samples, std::uint64_t seed) {
    if (samples < kMinIntrinsicSamples) throw std::invalid_argument("intrinsic_error: samples must be >= 1000");
    const NoiseModel model = TwoArmGaussian{sigma};
    validate(model);
    RunningMean acc;
    for (std::uint64_t i = 0; i < samples; ++i) {
        RngStream rng(seed, i);
        const Mat2d u = su2_from_axis_angle(sample_rotation(model, rng));
        const double q = protected_mode ? qber_protected_exact(u) : qber_exact(u);
        acc.add(q);
    }
    return {acc.mean(), acc.standard_error(), samples};
}

std::vector<DistanceCurvePoint> distance_curve(const LinkParams& params, std::span<const double> sigmas,
                                               std::uint64_t samples, std::uint64_t seed) {
    validate(params);
    std::vector<DistanceCurvePoint> points(sigmas.size());
    parallel_for(sigmas.size(), [&](std::size_t i) {
        DistanceCurvePoint& pt = points[i];
        pt.sigma = sigmas[i];
        const IntrinsicError unprotected = intrinsic_error(pt.sigma, false, samples, seed);
        const IntrinsicError protected_ = intrinsic_error(pt.sigma, true, samples, seed);
        pt.e_int_unprotected = unprotected.mean;
        pt.se_unprotected = unprotected.standard_error;
        pt.e_int_protected = protected_.mean;
        pt.se_protected = protected_.standard_error;
        pt.l_max_unprotected = max_secure_distance(params, pt.e_int_unprotected);
        pt.l_max_protected = max_secure_distance(params, pt.e_int_protected);
    });
    return points;
}

}  // namespace mdiqkd
