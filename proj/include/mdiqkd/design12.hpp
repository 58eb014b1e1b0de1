#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdiqkd/qmath.hpp"
#include "mdiqkd/rng.hpp"

namespace mdiqkd {

enum class TwirlGroup { Pauli, CliffordXYZ, CliffordConj };

const char* to_string(TwirlGroup group);

/// Ordered set of single-qubit unitaries used for correlated twirling. Immutable once built.
template <class Scalar>
class TwirlSet {
public:
    TwirlSet(std::vector<Mat2<Scalar>> elements, std::vector<TwirlGroup> groups)
        : elements_(std::move(elements)), groups_(std::move(groups)) {
        if (elements_.empty() || elements_.size() != groups_.size()) {
            throw std::invalid_argument("TwirlSet: need one group label per element");
        }
        for (std::size_t k = 0; k < elements_.size(); ++k) {
            if (!is_unitary(elements_[k], 1e-12)) {
                throw std::invalid_argument("TwirlSet: element " + std::to_string(k + 1) +
                                            " is not unitary");
            }
        }
    }

    std::size_t size() const noexcept { return elements_.size(); }
    /// Zero-based; beacon value k selects element k − 1.
    const Mat2<Scalar>& operator[](std::size_t index) const { return elements_.at(index); }
    TwirlGroup group(std::size_t index) const { return groups_.at(index); }
    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }

private:
    std::vector<Mat2<Scalar>> elements_;
    std::vector<TwirlGroup> groups_;
};

using TwirlSetd = TwirlSet<double>;

/// The 12-element unitary 2-design: the four Paulis (as 𝕀, iσ_x, −iσ_y, iσ_z) followed by two
/// groups of four order-3 Cliffords whose entries are (±1 ± i)/2.
template <class Scalar = double>
TwirlSet<Scalar> build_twirl_set() {
    using C = Complex<Scalar>;
    const C i(0, 1);
    const C one(1);
    const Scalar h(0.5);
    auto m = [](C a, C b, C c, C d) {
        Mat2<Scalar> out;
        out << a, b, c, d;
        return out;
    };
    std::vector<Mat2<Scalar>> v = {
        m(one, 0, 0, one),
        m(0, i, i, 0),
        m(0, -one, one, 0),
        m(i, 0, 0, -i),
        h * m(one - i, -one - i, one - i, one + i),
        h * m(one + i, one - i, -one - i, one - i),
        h * m(one + i, -one + i, one + i, one - i),
        h * m(one - i, one + i, -one + i, one + i),
        h * m(one + i, one + i, -one + i, one - i),
        h * m(one - i, -one + i, one + i, one + i),
        h * m(one - i, one - i, -one - i, one + i),
        h * m(one + i, -one - i, one - i, one - i),
    };
    std::vector<TwirlGroup> groups(12, TwirlGroup::Pauli);
    for (int k = 4; k < 8; ++k) groups[k] = TwirlGroup::CliffordXYZ;
    for (int k = 8; k < 12; ++k) groups[k] = TwirlGroup::CliffordConj;
    return TwirlSet<Scalar>(std::move(v), std::move(groups));
}

/// Shared immutable instance of build_twirl_set<double>().
const TwirlSetd& standard_twirl_set();

/// (1/N)·Σ_k (V_k† u V_k) rho (V_k† u V_k)†
template <class Scalar, class DerivedU, class DerivedRho>
Mat2<Scalar> twirl_channel(const TwirlSet<Scalar>& set, const Eigen::MatrixBase<DerivedU>& u,
                           const Eigen::MatrixBase<DerivedRho>& rho) {
    if (!is_unitary(u)) throw std::invalid_argument("twirl_channel: u is not unitary");
    Mat2<Scalar> acc = Mat2<Scalar>::Zero();
    for (const auto& v : set) {
        const Mat2<Scalar> conjugated = v.adjoint() * u * v;
        acc.noalias() += conjugated * rho * conjugated.adjoint();
    }
    return acc / Scalar(set.size());
}

template <class DerivedU, class DerivedRho>
Mat2d twirl_channel(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedRho>& rho) {
    return twirl_channel(standard_twirl_set(), u, rho);
}

template <class Scalar>
struct DepolarizingParams {
    Scalar eta;
};

/// η = 1 − (|Tr u|² − 1)/3. Not clamped: a value outside [0, 4/3] (beyond 1e-12) means the input
/// was not unitary and raises std::logic_error.
template <class Derived>
auto depolarization_eta(const Eigen::MatrixBase<Derived>& u) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    if (!is_unitary(u)) throw std::invalid_argument("depolarization_eta: u is not unitary");
    const Real eta = Real(1) - (std::norm(u.trace()) - Real(1)) / Real(3);
    if (eta < Real(-1e-12) || eta > Real(4) / Real(3) + Real(1e-12)) {
        throw std::logic_error("depolarization_eta: eta out of [0, 4/3]: " +
                               std::to_string(static_cast<double>(eta)));
    }
    return DepolarizingParams<Real>{eta};
}

/// (1 − η)ρ + η𝕀/2
template <class Scalar, class Derived>
Mat2<Scalar> depolarize(const Eigen::MatrixBase<Derived>& rho, Scalar eta) {
    return (Scalar(1) - eta) * rho + eta * Mat2<Scalar>::Identity() / Scalar(2);
}

struct CertificationReport {
    bool passed = false;
    std::size_t set_size = 0;
    std::size_t trials = 0;
    double tolerance = 0.0;
    /// max over trials of ‖twirl(u, ρ) − depolarize(ρ, η(u))‖_max
    double worst_deviation = 0.0;
    std::size_t worst_trial = 0;
    Mat2d worst_u = Mat2d::Identity();
    Mat2d worst_rho = Mat2d::Identity() / 2.0;
    /// max_j ‖(1/N)Σ_k V_k† σ_j V_k‖_max (first-moment cross terms)
    double linear_term_residual = 0.0;
    /// (1/N²)Σ_{j,k}|Tr(V_j† V_k)|⁴; equals 2 for a single-qubit 2-design.
    double frame_potential = 0.0;
    /// 1-based indices of elements that differ from the reference construction (12-element sets).
    std::vector<std::size_t> mismatched_elements;
    std::vector<std::string> failures;

    std::string to_string() const;
};

/// Smallest meaningful certification tolerance: the rounding floor of a 12-term sum.
double certification_tolerance_floor();

/// Operational 2-design check: for `trials` random (u, ρ) pairs (u from a Haar axis and α uniform
/// on [0, π], ρ uniform in the Bloch ball), the twirl must reproduce the depolarizing channel
/// within `tol` in max-norm, and the first-moment cross terms must vanish within `tol`.
CertificationReport certify_two_design(const TwirlSetd& set, std::size_t trials, double tol,
                                       std::uint64_t seed = 0x2de519);

/// Random density matrix with Bloch vector uniform in the unit ball.
Mat2d random_density(RngStream& rng);
/// Random unitary from a Haar axis and α uniform on [0, π].
Mat2d random_axis_angle_unitary(RngStream& rng);

}  // namespace mdiqkd
