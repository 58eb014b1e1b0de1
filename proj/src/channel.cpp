#include "mdiqkd/channel.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mdiqkd {

namespace {

constexpr double kAxisNormTol = 1e-12;
constexpr double kZeroRotation = 1e-12;

double parse_double(const KeyValues& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("noise model: '" + key + "' is not a number: " + it->second);
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

Eigen::Vector3d parse_axis(const std::string& text) {
    if (text == "x" || text == "X") return Eigen::Vector3d::UnitX();
    if (text == "y" || text == "Y") return Eigen::Vector3d::UnitY();
    if (text == "z" || text == "Z") return Eigen::Vector3d::UnitZ();
    Eigen::Vector3d axis;
    std::stringstream in(text);
    std::string part;
    int n = 0;
    while (std::getline(in, part, ',')) {
        if (n == 3) {
            n = 4;
            break;
        }
        try {
            axis[n++] = std::stod(part);
        } catch (const std::exception&) {
            n = 4;
            break;
        }
    }
    if (n != 3) throw std::invalid_argument("noise model: axis must be x, y, z or 'nx,ny,nz': " + text);
    const double norm = axis.norm();
    if (norm < kZeroRotation) throw std::invalid_argument("noise model: zero axis");
    // Leave already-unit axes untouched so printed values read back bit-for-bit.
    return std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? axis : axis / norm;
}

std::string format_axis(const Eigen::Vector3d& axis) {
    return format_double(axis.x()) + "," + format_double(axis.y()) + "," + format_double(axis.z());
}

void require_non_negative(double value, const char* what) {
    if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument(std::string("noise model: ") + what + " must be finite and >= 0");
    }
}

}  // namespace

void validate(const RotationSpec& spec) {
    if (!spec.axis.allFinite() || std::abs(spec.axis.norm() - 1.0) > kAxisNormTol) {
        throw std::invalid_argument("rotation axis must be a unit vector");
    }
    if (!std::isfinite(spec.angle) || spec.angle < 0.0) {
        throw std::invalid_argument("rotation angle must be finite and non-negative");
    }
}

RotationSpec canonical_rotation(const Eigen::Vector3d& axis, double angle) {
    if (!axis.allFinite() || axis.norm() < kZeroRotation || !std::isfinite(angle)) {
        throw std::invalid_argument("canonical_rotation: invalid axis or angle");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Eigen::Vector3d n = axis.normalized();
    double a = angle;
    if (a < 0.0) {
        a = -a;
        n = -n;
    }
    a = std::fmod(a, two_pi);
    if (a > std::numbers::pi) {
        a = two_pi - a;
        n = -n;
    }
    return {n, a};
}

RotationSpec rotation_from_vector(const Eigen::Vector3d& rotation_vector) {
    const double angle = rotation_vector.norm();
    if (angle < kZeroRotation) return {Eigen::Vector3d::UnitZ(), 0.0};
    return canonical_rotation(rotation_vector / angle, angle);
}

Mat2d su2_from_axis_angle(const RotationSpec& spec) {
    validate(spec);
    const double c = std::cos(spec.angle / 2.0);
    const double s = std::sin(spec.angle / 2.0);
    const Complexd a(c, -spec.axis.z() * s);
    const Complexd b(-spec.axis.y() * s, -spec.axis.x() * s);
    Mat2d u;
    u << a, b, -std::conj(b), std::conj(a);
    return u;
}

Mat2d relative_rotation(const Mat2d& u_a, const Mat2d& u_b) { return u_a.adjoint() * u_b; }

void validate(const NoiseModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FixedAxisBias>) {
                require_non_negative(m.bias, "bias");
                require_non_negative(m.jitter_sigma, "jitter");
            } else if constexpr (std::is_same_v<T, FixedAxisSweep>) {
                validate(RotationSpec{m.axis, m.angle});
            } else if constexpr (std::is_same_v<T, HaarAxis>) {
                require_non_negative(m.angle, "angle");
            } else {
                require_non_negative(m.sigma, "sigma");
            }
        },
        model);
}

Eigen::Vector3d haar_axis(RngStream& rng) {
    for (;;) {
        Eigen::Vector3d g(rng.normal(), rng.normal(), rng.normal());
        const double norm = g.norm();
        if (norm > kZeroRotation) return g / norm;
    }
}

RotationSpec sample_rotation(const NoiseModel& model, RngStream& rng) {
    return std::visit(
        [&rng](const auto& m) -> RotationSpec {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FixedAxisBias>) {
                const Eigen::Vector3d direction =
                    m.axis == BiasAxis::Y ? Eigen::Vector3d::UnitY() : Eigen::Vector3d::UnitZ();
                Eigen::Vector3d v = m.bias * direction;
                if (m.jitter_sigma > 0.0) {
                    v += m.jitter_sigma * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
                }
                return rotation_from_vector(v);
            } else if constexpr (std::is_same_v<T, FixedAxisSweep>) {
                return canonical_rotation(m.axis, m.angle);
            } else if constexpr (std::is_same_v<T, HaarAxis>) {
                return canonical_rotation(haar_axis(rng), m.angle);
            } else {
                const double arm_a = m.sigma * rng.normal();
                const double arm_b = m.sigma * rng.normal();
                return canonical_rotation(Eigen::Vector3d::UnitY(), std::abs(arm_b - arm_a));
            }
        },
        model);
}

KeyValues to_key_values(const NoiseModel& model) {
    return std::visit(
        [](const auto& m) -> KeyValues {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FixedAxisBias>) {
                return {{"model", "fixed-axis-bias"},
                        {"axis", m.axis == BiasAxis::Y ? "y" : "z"},
                        {"bias", format_double(m.bias)},
                        {"jitter", format_double(m.jitter_sigma)}};
            } else if constexpr (std::is_same_v<T, FixedAxisSweep>) {
                return {{"model", "fixed-axis-sweep"},
                        {"axis", format_axis(m.axis)},
                        {"angle", format_double(m.angle)}};
            } else if constexpr (std::is_same_v<T, HaarAxis>) {
                return {{"model", "haar-axis"}, {"angle", format_double(m.angle)}};
            } else {
                return {{"model", "two-arm-gaussian"}, {"sigma", format_double(m.sigma)}};
            }
        },
        model);
}

NoiseModel noise_model_from_key_values(const KeyValues& kv) {
    const auto it = kv.find("model");
    const std::string name = it == kv.end() ? "fixed-axis-sweep" : it->second;
    const auto axis_it = kv.find("axis");
    NoiseModel model;
    if (name == "fixed-axis-bias") {
        FixedAxisBias m;
        if (axis_it != kv.end()) {
            const std::string& a = axis_it->second;
            if (a == "y" || a == "Y") {
                m.axis = BiasAxis::Y;
            } else if (a == "z" || a == "Z") {
                m.axis = BiasAxis::Z;
            } else {
                throw std::invalid_argument("noise model: bias axis must be y or z: " + a);
            }
        }
        m.bias = parse_double(kv, "bias", m.bias);
        m.jitter_sigma = parse_double(kv, "jitter", m.jitter_sigma);
        model = m;
    } else if (name == "fixed-axis-sweep") {
        FixedAxisSweep m;
        if (axis_it != kv.end()) m.axis = parse_axis(axis_it->second);
        m.angle = parse_double(kv, "angle", m.angle);
        model = m;
    } else if (name == "haar-axis") {
        model = HaarAxis{parse_double(kv, "angle", 0.0)};
    } else if (name == "two-arm-gaussian") {
        model = TwoArmGaussian{parse_double(kv, "sigma", 0.0)};
    } else {
        throw std::invalid_argument("noise model: unknown model '" + name + "'");
    }
    validate(model);
    return model;
}

std::string describe(const NoiseModel& model) {
    std::string out;
    for (const auto& [key, value] : to_key_values(model)) {
        if (!out.empty()) out += ' ';
        out += key + '=' + value;
    }
    return out;
}

}  // namespace mdiqkd
