#include "mdiqkd/channel.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <numbers>

#include "test_support.hpp"

using namespace mdiqkd;
using namespace mdiqkd::testing;

namespace {

constexpr double kPi = std::numbers::pi;

// cos(α/2)𝕀 − i·sin(α/2)(n·σ) assembled from Pauli matrices.
Mat2d pauli_expansion(const Eigen::Vector3d& n, double alpha) {
    const Complexd i(0, 1);
    return std::cos(alpha / 2) * pauli::identity() -
           i * std::sin(alpha / 2) * (n.x() * pauli::x() + n.y() * pauli::y() + n.z() * pauli::z());
}

double equal_up_to_sign(const Mat2d& a, const Mat2d& b) {
    return std::min(max_abs_diff(a, b), max_abs_diff(a, (-b).eval()));
}

}  // namespace

TEST(channel, su2_examples) {
    const Complexd i(0, 1);
    EXPECT_LT(max_abs_diff(su2_from_axis_angle({Eigen::Vector3d::UnitZ(), 0.0}), Mat2d::Identity()), 1e-15);
    EXPECT_LT(max_abs_diff(su2_from_axis_angle({Eigen::Vector3d::UnitZ(), kPi}), (-i * pauli::z()).eval()), 1e-15);
    EXPECT_LT(max_abs_diff(su2_from_axis_angle({Eigen::Vector3d::UnitX(), kPi}), (-i * pauli::x()).eval()), 1e-15);

    Mat2d ry;
    const double r = std::sqrt(0.5);
    ry << r, -r, r, r;
    EXPECT_LT(max_abs_diff(su2_from_axis_angle({Eigen::Vector3d::UnitY(), kPi / 2}), ry), 1e-15);
}

TEST(channel, su2_matches_pauli_expansion) {
    for (std::uint64_t t = 0; t < 500; ++t) {
        RngStream rng(31, t);
        const RotationSpec spec = random_rotation(rng);
        const Mat2d u = su2_from_axis_angle(spec);
        EXPECT_LT(max_abs_diff(u, pauli_expansion(spec.axis, spec.angle)), 1e-14);
        EXPECT_NEAR(std::abs(u.trace()), 2.0 * std::abs(std::cos(spec.angle / 2)), 1e-14);
        EXPECT_NEAR(std::abs(u.determinant() - 1.0), 0.0, 1e-14);
    }
}

TEST(channel, validate_rejects_bad_specs) {
    EXPECT_THROW(validate(RotationSpec{Eigen::Vector3d(1, 1, 0), 0.1}), std::invalid_argument);
    EXPECT_THROW(validate(RotationSpec{Eigen::Vector3d::UnitX(), -0.1}), std::invalid_argument);
    EXPECT_THROW(validate(RotationSpec{Eigen::Vector3d::UnitX(), std::nan("")}), std::invalid_argument);
    EXPECT_NO_THROW(validate(RotationSpec{Eigen::Vector3d::UnitX(), 0.1}));
}

TEST(channel, canonical_rotation_folds_into_zero_to_pi) {
    for (std::uint64_t t = 0; t < 300; ++t) {
        RngStream rng(32, t);
        const Eigen::Vector3d n = haar_axis(rng);
        const double angle = 20.0 * rng.uniform() - 10.0;
        const RotationSpec c = canonical_rotation(3.0 * n, angle);
        EXPECT_GE(c.angle, 0.0);
        EXPECT_LE(c.angle, kPi + 1e-12);
        EXPECT_NEAR(c.axis.norm(), 1.0, 1e-14);
        EXPECT_LT(equal_up_to_sign(su2_from_axis_angle(c), pauli_expansion(n, angle)), 1e-12);
    }
    const RotationSpec c = canonical_rotation(Eigen::Vector3d::UnitY(), 1.5 * kPi);
    EXPECT_NEAR(c.angle, kPi / 2, 1e-14);
    EXPECT_NEAR(c.axis.y(), -1.0, 1e-14);
}

TEST(channel, rotation_from_vector) {
    const RotationSpec r = rotation_from_vector(Eigen::Vector3d(0, 0.3, 0.4));
    EXPECT_NEAR(r.angle, 0.5, 1e-15);
    EXPECT_NEAR(r.axis.y(), 0.6, 1e-15);
    const RotationSpec zero = rotation_from_vector(Eigen::Vector3d::Zero());
    EXPECT_EQ(zero.angle, 0.0);
    EXPECT_EQ(zero.axis, Eigen::Vector3d::UnitZ());
}

TEST(channel, relative_rotation_of_coaxial_arms) {
    const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
    for (const auto& [a, b] : {std::pair{0.1, 0.4}, {0.7, -0.2}, {1.0, 1.0}}) {
        const Mat2d rel = relative_rotation(su2_from_axis_angle(canonical_rotation(y, a)),
                                            su2_from_axis_angle(canonical_rotation(y, b)));
        EXPECT_LT(equal_up_to_sign(rel, pauli_expansion(y, b - a)), 1e-14);
    }
}

TEST(channel, relative_rotation_factorization) {
    // (u_a ⊗ u_b) = (u_a ⊗ u_a)(𝕀 ⊗ u_a† u_b)
    for (std::uint64_t t = 0; t < 100; ++t) {
        RngStream rng(33, t);
        const Mat2d ua = random_unitary(rng), ub = random_unitary(rng);
        const Mat2d rel = relative_rotation(ua, ub);
        EXPECT_LT(max_abs_diff(rel, (ua.adjoint() * ub).eval()), 1e-15);
        EXPECT_LT(max_abs_diff(tensor(ua, ub), tensor(ua, ua) * tensor(Mat2d::Identity(), rel)), 1e-14);
    }
}

TEST(channel, haar_axis_second_moment) {
    RngStream rng(34, 0);
    constexpr int n = 100000;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    double zz = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d a = haar_axis(rng);
        ASSERT_NEAR(a.norm(), 1.0, 1e-14);
        mean += a;
        zz += a.z() * a.z();
    }
    EXPECT_NEAR(zz / n, 1.0 / 3.0, 0.01);
    EXPECT_LT((mean / n).cwiseAbs().maxCoeff(), 0.01);
}

TEST(channel, zero_noise_models_are_identity) {
    RngStream rng(35, 0);
    EXPECT_EQ(sample_rotation(TwoArmGaussian{0.0}, rng).angle, 0.0);
    EXPECT_EQ(sample_rotation(HaarAxis{0.0}, rng).angle, 0.0);
    const RotationSpec b = sample_rotation(FixedAxisBias{BiasAxis::Z, 0.4, 0.0}, rng);
    EXPECT_NEAR(b.angle, 0.4, 1e-15);
    EXPECT_EQ(b.axis, Eigen::Vector3d::UnitZ());
    const RotationSpec s = sample_rotation(FixedAxisSweep{Eigen::Vector3d::UnitX(), 0.9}, rng);
    EXPECT_NEAR(s.angle, 0.9, 1e-15);
}

TEST(channel, bias_with_jitter_is_centred_on_bias) {
    constexpr int n = 20000;
    const FixedAxisBias model{BiasAxis::Y, 0.5, 0.02};
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        RngStream rng(36, i);
        const RotationSpec r = sample_rotation(model, rng);
        mean += r.angle * r.axis;
    }
    mean /= n;
    EXPECT_NEAR(mean.y(), 0.5, 1e-3);
    EXPECT_NEAR(mean.x(), 0.0, 1e-3);
    EXPECT_NEAR(mean.z(), 0.0, 1e-3);
}

TEST(channel, two_arm_gaussian_relative_angle_is_half_normal) {
    // |σ(g_B − g_A)| has mean 2σ/√π.
    constexpr int n = 100000;
    const double sigma = 0.3;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(37, i);
        const RotationSpec r = sample_rotation(TwoArmGaussian{sigma}, rng);
        EXPECT_EQ(r.axis, Eigen::Vector3d::UnitY());
        sum += r.angle;
        sum2 += r.angle * r.angle;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 2.0 * sigma / std::sqrt(kPi), 4.0 * se);
    EXPECT_NEAR(sum2 / n, 2.0 * sigma * sigma, 0.01);
}

TEST(channel, sampling_is_deterministic_per_stream) {
    const NoiseModel model = FixedAxisBias{BiasAxis::Y, 0.3, 0.05};
    for (std::uint64_t t = 0; t < 20; ++t) {
        RngStream a(38, t), b(38, t);
        const RotationSpec ra = sample_rotation(model, a);
        const RotationSpec rb = sample_rotation(model, b);
        EXPECT_EQ(ra.angle, rb.angle);
        EXPECT_EQ(ra.axis, rb.axis);
    }
}

TEST(channel, key_value_round_trip) {
    const std::vector<NoiseModel> models = {
        FixedAxisBias{BiasAxis::Z, 0.25, 0.01},
        FixedAxisSweep{Eigen::Vector3d(1, 0, 1).normalized(), 0.8},
        HaarAxis{1.1},
        TwoArmGaussian{0.2},
    };
    for (const NoiseModel& m : models) {
        const KeyValues kv = to_key_values(m);
        const NoiseModel back = noise_model_from_key_values(kv);
        EXPECT_EQ(back.index(), m.index());
        EXPECT_EQ(to_key_values(back), kv);
        EXPECT_FALSE(describe(m).empty());
    }
    EXPECT_THROW(noise_model_from_key_values({{"model", "bogus"}}), std::invalid_argument);
    EXPECT_THROW(noise_model_from_key_values({{"model", "two-arm-gaussian"}, {"sigma", "abc"}}),
                 std::invalid_argument);
    EXPECT_THROW(noise_model_from_key_values({{"model", "fixed-axis-bias"}, {"axis", "x"}}),
                 std::invalid_argument);
    EXPECT_THROW(validate(NoiseModel{TwoArmGaussian{-1.0}}), std::invalid_argument);
}

TEST(channel, axis_parsing) {
    const auto axis_of = [](const std::string& text) {
        return std::get<FixedAxisSweep>(noise_model_from_key_values({{"model", "fixed-axis-sweep"}, {"axis", text}})).axis;
    };
    EXPECT_EQ(axis_of("x"), Eigen::Vector3d::UnitX());
    EXPECT_LT((axis_of("3,0,4") - Eigen::Vector3d(0.6, 0, 0.8)).norm(), 1e-15);
    EXPECT_THROW(axis_of("1,2"), std::invalid_argument);
    EXPECT_THROW(axis_of("1,2,3,4"), std::invalid_argument);
    EXPECT_THROW(axis_of("0,0,0"), std::invalid_argument);
    EXPECT_THROW(axis_of("a,b,c"), std::invalid_argument);
}
