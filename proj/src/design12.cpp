#include "mdiqkd/design12.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/rng.hpp"

namespace mdiqkd {

const char* to_string(TwirlGroup group) {
    switch (group) {
        case TwirlGroup::Pauli:
            return "Pauli";
        case TwirlGroup::CliffordXYZ:
            return "CliffordXYZ";
        case TwirlGroup::CliffordConj:
            return "CliffordConj";
    }
    return "?";
}

const TwirlSetd& standard_twirl_set() {
    static const TwirlSetd set = build_twirl_set<double>();
    return set;
}

double certification_tolerance_floor() { return 12.0 * std::numeric_limits<double>::epsilon(); }

Mat2d random_density(RngStream& rng) {
    const Eigen::Vector3d direction = haar_axis(rng);
    const double radius = std::cbrt(rng.uniform());
    const Eigen::Vector3d r = radius * direction;
    return (Mat2d::Identity() + r.x() * pauli::x() + r.y() * pauli::y() + r.z() * pauli::z()) / 2.0;
}

Mat2d random_axis_angle_unitary(RngStream& rng) {
    const Eigen::Vector3d axis = haar_axis(rng);
    const double angle = std::numbers::pi * rng.uniform();
    return su2_from_axis_angle({axis, angle});
}

CertificationReport certify_two_design(const TwirlSetd& set, std::size_t trials, double tol,
                                       std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("certify_two_design: trials must be >= 1");
    CertificationReport report;
    report.set_size = set.size();
    report.trials = trials;
    report.tolerance = tol;

    if (!(tol >= certification_tolerance_floor())) {
        std::ostringstream msg;
        msg << "tolerance " << tol << " is below the double-precision floor "
            << certification_tolerance_floor();
        report.failures.push_back(msg.str());
    }

    if (set.size() == 12) {
        const TwirlSetd& reference = standard_twirl_set();
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (set[k] != reference[k]) report.mismatched_elements.push_back(k + 1);
        }
        for (const auto k : report.mismatched_elements) {
            report.failures.push_back("element " + std::to_string(k) +
                                      " differs from the reference construction");
        }
    }

    const double n = static_cast<double>(set.size());
    for (const Mat2d& sigma : {pauli::x(), pauli::y(), pauli::z()}) {
        Mat2d mean = Mat2d::Zero();
        for (const auto& v : set) mean += v.adjoint() * sigma * v;
        mean /= n;
        report.linear_term_residual = std::max(report.linear_term_residual, mean.cwiseAbs().maxCoeff());
    }
    if (report.linear_term_residual > tol) {
        std::ostringstream msg;
        msg << "linear cross terms do not vanish: residual " << report.linear_term_residual;
        report.failures.push_back(msg.str());
    }

    double potential = 0.0;
    for (const auto& vj : set) {
        for (const auto& vk : set) {
            const double overlap = std::norm((vj.adjoint() * vk).trace());
            potential += overlap * overlap;
        }
    }
    report.frame_potential = potential / (n * n);

    for (std::size_t t = 0; t < trials; ++t) {
        RngStream rng(seed, t);
        const Mat2d u = random_axis_angle_unitary(rng);
        const Mat2d rho = random_density(rng);
        const double eta = depolarization_eta(u).eta;
        const double deviation = (twirl_channel(set, u, rho) - depolarize(rho, eta)).cwiseAbs().maxCoeff();
        if (t == 0 || deviation > report.worst_deviation) {
            report.worst_deviation = deviation;
            report.worst_trial = t;
            report.worst_u = u;
            report.worst_rho = rho;
        }
    }
    if (report.worst_deviation > tol) {
        std::ostringstream msg;
        msg << "twirl deviates from the depolarizing channel by " << report.worst_deviation
            << " at trial " << report.worst_trial;
        report.failures.push_back(msg.str());
    }

    report.passed = report.failures.empty();
    return report;
}

std::string CertificationReport::to_string() const {
    std::ostringstream out;
    out.precision(3);
    out << "2-design certification: " << (passed ? "PASS" : "FAIL") << '\n'
        << "  elements:               " << set_size << '\n'
        << "  trials:                 " << trials << '\n'
        << "  tolerance:              " << tolerance << '\n'
        << "  worst twirl deviation:  " << worst_deviation << " (trial " << worst_trial << ")\n"
        << "  linear term residual:   " << linear_term_residual << '\n'
        << "  frame potential:        " << frame_potential << " (2-design minimum 2)\n";
    if (!mismatched_elements.empty()) {
        out << "  offending elements:    ";
        for (const auto k : mismatched_elements) out << " V" << k;
        out << '\n';
    }
    if (!passed) {
        const Eigen::IOFormat fmt(6, Eigen::DontAlignCols, ", ", "; ", "", "", "[", "]");
        out << "  worst u:   " << worst_u.format(fmt) << '\n'
            << "  worst rho: " << worst_rho.format(fmt) << '\n';
    }
    for (const auto& failure : failures) out << "  failure: " << failure << '\n';
    return out.str();
}

}  // namespace mdiqkd
