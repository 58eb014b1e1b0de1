#include "mdiqkd/design12.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "mdiqkd/mdi_core.hpp"
#include "test_support.hpp"

using namespace mdiqkd;
using namespace mdiqkd::testing;

namespace {

const Complexd I(0, 1);

Mat2d m2(Complexd a, Complexd b, Complexd c, Complexd d) {
    Mat2d m;
    m << a, b, c, d;
    return m;
}

// Direct 12-term sum written out without twirl_channel().
Mat2d reference_twirl(const Mat2d& u, const Mat2d& rho) {
    Mat2d acc = Mat2d::Zero();
    const TwirlSetd& set = standard_twirl_set();
    for (std::size_t k = 0; k < set.size(); ++k) {
        const Mat2d w = set[k].adjoint() * u * set[k];
        acc += w * rho * w.adjoint();
    }
    return acc / 12.0;
}

}  // namespace

TEST(design12, elements_match_reference_entries) {
    const TwirlSetd& set = standard_twirl_set();
    ASSERT_EQ(set.size(), 12u);
    EXPECT_EQ(set[0], Mat2d::Identity());
    EXPECT_EQ(set[1], m2(0, I, I, 0));
    EXPECT_EQ(set[2], m2(0, -1, 1, 0));
    EXPECT_EQ(set[3], m2(I, 0, 0, -I));
    EXPECT_EQ(set[4], 0.5 * m2(1.0 - I, -1.0 - I, 1.0 - I, 1.0 + I));
    EXPECT_EQ(set[11], 0.5 * m2(1.0 + I, -1.0 - I, 1.0 - I, 1.0 - I));
    EXPECT_EQ(set.group(0), TwirlGroup::Pauli);
    EXPECT_EQ(set.group(4), TwirlGroup::CliffordXYZ);
    EXPECT_EQ(set.group(8), TwirlGroup::CliffordConj);
    for (const auto& v : set) EXPECT_LT(max_abs_diff(v * v.adjoint(), Mat2d::Identity()), 1e-15);
}

TEST(design12, clifford_elements_have_order_three_up_to_phase) {
    const TwirlSetd& set = standard_twirl_set();
    for (std::size_t k = 4; k < 12; ++k) {
        const Mat2d cube = set[k] * set[k] * set[k];
        EXPECT_NEAR(std::abs(cube(0, 0)), 1.0, 1e-15) << k + 1;
        EXPECT_LT(max_abs_diff(cube, (cube(0, 0) * Mat2d::Identity()).eval()), 1e-15) << k + 1;
    }
}

TEST(design12, set_rejects_bad_input) {
    EXPECT_THROW(TwirlSetd({Mat2d::Identity()}, {}), std::invalid_argument);
    EXPECT_THROW(TwirlSetd({Mat2d::Identity() * 2.0}, {TwirlGroup::Pauli}), std::invalid_argument);
}

TEST(design12, twirl_of_identity_is_identity_map) {
    RngStream rng(21, 0);
    for (int t = 0; t < 50; ++t) {
        const Mat2d rho = random_density(rng);
        EXPECT_LT(max_abs_diff(twirl_channel(Mat2d::Identity(), rho), rho), 1e-15);
    }
}

TEST(design12, twirl_of_sigma_y_on_ground_state) {
    // η(σ_y) = 4/3: (1 − 4/3)|0><0| + (2/3)𝕀.
    Mat2d expected = Mat2d::Zero();
    expected(0, 0) = 1.0 / 3.0;
    expected(1, 1) = 2.0 / 3.0;
    EXPECT_LT(max_abs_diff(twirl_channel(pauli::y(), prepare_state(Basis::Z, 0)), expected), 1e-15);
}

TEST(design12, twirl_of_quarter_turn_about_y) {
    const Mat2d u = su2_from_axis_angle({Eigen::Vector3d::UnitY(), std::numbers::pi / 2});
    EXPECT_NEAR(depolarization_eta(u).eta, 2.0 / 3.0, 1e-15);
    const Mat2d rho = prepare_state(Basis::Z, 0);
    const Mat2d expected = (1.0 / 3.0) * rho + (2.0 / 3.0) * Mat2d::Identity() / 2.0;
    EXPECT_LT(max_abs_diff(twirl_channel(u, rho), expected), 1e-15);
    EXPECT_LT(max_abs_diff(reference_twirl(u, rho), expected), 1e-15);
}

TEST(design12, eta_examples) {
    EXPECT_NEAR(depolarization_eta(Mat2d::Identity()).eta, 0.0, 1e-15);
    EXPECT_NEAR(depolarization_eta(pauli::x()).eta, 4.0 / 3.0, 1e-15);
    EXPECT_NEAR(depolarization_eta(pauli::z()).eta, 4.0 / 3.0, 1e-15);
    for (const double alpha : {0.1, 0.7, 1.3, 2.9}) {
        const Mat2d u = su2_from_axis_angle({Eigen::Vector3d(1, 1, 1).normalized(), alpha});
        EXPECT_NEAR(depolarization_eta(u).eta, 4.0 / 3.0 * std::pow(std::sin(alpha / 2), 2), 1e-14);
    }
    EXPECT_THROW(depolarization_eta((2.0 * Mat2d::Identity()).eval()), std::invalid_argument);
}

TEST(design12, eta_is_invariant_under_global_phase) {
    for (std::uint64_t t = 0; t < 100; ++t) {
        RngStream rng(22, t);
        const Mat2d u = random_axis_angle_unitary(rng);
        const Complexd phase = std::polar(1.0, 6.0 * rng.uniform());
        EXPECT_NEAR(depolarization_eta((phase * u).eval()).eta, depolarization_eta(u).eta, 1e-13);
    }
}

TEST(design12, twirl_equals_depolarizing_channel_on_random_inputs) {
    for (std::uint64_t t = 0; t < 500; ++t) {
        RngStream rng(23, t);
        const Mat2d u = random_unitary(rng);
        const Mat2d rho = random_density(rng);
        const double eta = depolarization_eta(u).eta;
        const Mat2d out = twirl_channel(u, rho);
        EXPECT_LT(max_abs_diff(out, depolarize(rho, eta)), 1e-14);
        EXPECT_LT(max_abs_diff(out, reference_twirl(u, rho)), 1e-14);
        EXPECT_TRUE(is_density(out));
    }
}

TEST(design12, twirl_commutes_with_set_conjugation) {
    // T(V_j ρ V_j†) = V_j T(ρ) V_j† because the depolarizing output is covariant.
    const TwirlSetd& set = standard_twirl_set();
    for (std::uint64_t t = 0; t < 50; ++t) {
        RngStream rng(24, t);
        const Mat2d u = random_unitary(rng);
        const Mat2d rho = random_density(rng);
        const Mat2d& v = set[rng.uniform_index(12)];
        EXPECT_LT(max_abs_diff(twirl_channel(u, (v * rho * v.adjoint()).eval()),
                               v * twirl_channel(u, rho) * v.adjoint()),
                  1e-14);
    }
}

TEST(design12, pauli_group_sum_identity) {
    // Σ_{P∈{𝕀,X,Y,Z}} PρP = 2·Tr(ρ)·𝕀, so the three non-identity terms give 2𝕀 − ρ.
    for (std::uint64_t t = 0; t < 50; ++t) {
        RngStream rng(25, t);
        const Mat2d rho = random_density(rng);
        const Mat2d sum = pauli::x() * rho * pauli::x() + pauli::y() * rho * pauli::y() +
                          pauli::z() * rho * pauli::z();
        EXPECT_LT(max_abs_diff(sum, (2.0 * Mat2d::Identity() - rho).eval()), 1e-15);
    }
}

TEST(design12, certification_passes_for_standard_set) {
    const CertificationReport report = certify_two_design(standard_twirl_set(), 100, 1e-10);
    EXPECT_TRUE(report.passed) << report.to_string();
    EXPECT_EQ(report.trials, 100u);
    EXPECT_LT(report.worst_deviation, 1e-14);
    EXPECT_LT(report.linear_term_residual, 1e-15);
    EXPECT_NEAR(report.frame_potential, 2.0, 1e-12);
    EXPECT_TRUE(report.mismatched_elements.empty());
    EXPECT_TRUE(report.failures.empty());
}

TEST(design12, certification_flags_corrupted_element) {
    auto elements = std::vector<Mat2d>(standard_twirl_set().begin(), standard_twirl_set().end());
    std::vector<TwirlGroup> groups;
    for (std::size_t k = 0; k < 12; ++k) groups.push_back(standard_twirl_set().group(k));
    elements[4] = Mat2d::Identity();
    const CertificationReport report = certify_two_design(TwirlSetd(elements, groups), 100, 1e-10);
    EXPECT_FALSE(report.passed);
    ASSERT_EQ(report.mismatched_elements.size(), 1u);
    EXPECT_EQ(report.mismatched_elements[0], 5u);
    EXPECT_GT(report.worst_deviation, 1e-3);
    EXPECT_GT(report.frame_potential, 2.0 + 1e-6);
}

TEST(design12, pauli_subset_is_not_a_two_design) {
    auto first = standard_twirl_set().begin();
    const TwirlSetd paulis(std::vector<Mat2d>(first, first + 4), std::vector<TwirlGroup>(4, TwirlGroup::Pauli));
    const CertificationReport report = certify_two_design(paulis, 100, 1e-10);
    EXPECT_FALSE(report.passed);
    EXPECT_NEAR(report.frame_potential, 4.0, 1e-12);
    EXPECT_GT(report.worst_deviation, 1e-3);
}

TEST(design12, certification_below_rounding_floor_fails) {
    EXPECT_GT(certification_tolerance_floor(), 1e-15);
    const CertificationReport report = certify_two_design(standard_twirl_set(), 100, 1e-15);
    EXPECT_FALSE(report.passed);
    EXPECT_FALSE(report.failures.empty());
}

TEST(design12, certification_is_deterministic) {
    const auto a = certify_two_design(standard_twirl_set(), 20, 1e-10, 99);
    const auto b = certify_two_design(standard_twirl_set(), 20, 1e-10, 99);
    EXPECT_EQ(a.worst_deviation, b.worst_deviation);
    EXPECT_EQ(a.worst_trial, b.worst_trial);
    EXPECT_EQ(a.to_string(), b.to_string());
}
