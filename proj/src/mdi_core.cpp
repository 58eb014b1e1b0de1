#include "mdiqkd/mdi_core.hpp"

#include <cmath>
#include <stdexcept>

namespace mdiqkd {

std::string_view to_string(Basis basis) { return basis == Basis::Z ? "Z" : "X"; }

std::string_view to_string(BellState state) {
    switch (state) {
        case BellState::PhiPlus:
            return "PhiPlus";
        case BellState::PhiMinus:
            return "PhiMinus";
        case BellState::PsiPlus:
            return "PsiPlus";
        case BellState::PsiMinus:
            return "PsiMinus";
    }
    return "?";
}

Ket4d bell_ket(BellState state) {
    const double r = 1.0 / std::sqrt(2.0);
    Ket4d ket = Ket4d::Zero();
    switch (state) {
        case BellState::PhiPlus:
            ket << r, 0, 0, r;
            break;
        case BellState::PhiMinus:
            ket << r, 0, 0, -r;
            break;
        case BellState::PsiPlus:
            ket << 0, r, r, 0;
            break;
        case BellState::PsiMinus:
            ket << 0, r, -r, 0;
            break;
    }
    return ket;
}

const BellProjectors& bell_projectors() {
    static const BellProjectors instance = [] {
        BellProjectors p;
        for (const auto state : kBellStates) {
            p.projectors[static_cast<int>(state)] = projector(bell_ket(state));
        }
        return p;
    }();
    return instance;
}

Mat2d prepare_state(Basis basis, int bit) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("prepare_state: bit must be 0 or 1");
    Mat2d rho;
    if (basis == Basis::Z) {
        rho << (bit == 0 ? 1 : 0), 0, 0, (bit == 0 ? 0 : 1);
    } else {
        const double off = bit == 0 ? 0.5 : -0.5;
        rho << 0.5, off, off, 0.5;
    }
    return rho;
}

double bell_probability(const Mat4d& rho_joint, BellState state) {
    return checked_real((rho_joint * bell_projectors()[state]).trace(), "bell_probability");
}

double qber_exact(const Mat2d& u_rel) {
    if (!is_unitary(u_rel)) throw std::invalid_argument("qber_exact: u_rel is not unitary");
    const Mat2d rho_init = prepare_state(Basis::Z, 0);
    const Mat4d rho_joint = tensor(rho_init, (u_rel * rho_init * u_rel.adjoint()).eval());
    return bell_probability(rho_joint, BellState::PsiPlus) +
           bell_probability(rho_joint, BellState::PsiMinus);
}

double qber_protected_exact(const Mat2d& u_rel, const TwirlSetd& set) {
    if (!is_unitary(u_rel)) throw std::invalid_argument("qber_protected_exact: u_rel is not unitary");
    double sum = 0.0;
    for (const auto& v : set) sum += qber_exact(v.adjoint() * u_rel * v);
    return sum / static_cast<double>(set.size());
}

GuessReport make_guess_report(double t_bit, double t_phase) {
    GuessReport r;
    r.t_bit = t_bit;
    r.t_phase = t_phase;
    r.p_guess_bit = 0.5 * (1.0 + t_bit);
    r.p_guess_phase = 0.5 * (1.0 + t_phase);
    r.p_guess_total = r.p_guess_bit * r.p_guess_phase;
    return r;
}

Mat4d dephase_second(const Mat4d& rho_joint, Basis basis) {
    Mat4d out = Mat4d::Zero();
    for (int bit = 0; bit < 2; ++bit) {
        const Mat4d pi = tensor(Mat2d::Identity(), prepare_state(basis, bit));
        out += pi * rho_joint * pi;
    }
    return out;
}

namespace {

double readout_distance(const Mat2d& u, bool protected_mode, const TwirlSetd& set, Basis basis) {
    const Mat2d alice = prepare_state(Basis::Z, 0);
    auto evolve = [&](const Mat2d& rho) -> Mat2d {
        return protected_mode ? twirl_channel(set, u, rho) : Mat2d(u * rho * u.adjoint());
    };
    const Mat4d right = tensor(alice, evolve(prepare_state(basis, 1)));
    const Mat4d wrong = tensor(alice, evolve(prepare_state(basis, 0)));
    return trace_distance(dephase_second(right, basis), dephase_second(wrong, basis));
}

}  // namespace

GuessReport guess_report_numeric(const RotationSpec& spec, bool protected_mode, const TwirlSetd& set) {
    const Mat2d u = su2_from_axis_angle(spec);
    return make_guess_report(readout_distance(u, protected_mode, set, Basis::Z),
                             readout_distance(u, protected_mode, set, Basis::X));
}

GuessReport guess_report_analytic(const RotationSpec& spec, bool protected_mode) {
    validate(spec);
    const double half = std::sin(spec.angle / 2.0);
    const double s = half * half;
    if (protected_mode) {
        const double eta = 4.0 / 3.0 * s;
        const double t = std::abs(1.0 - eta);
        GuessReport r = make_guess_report(t, t);
        r.outside_validity = 1.0 - eta < 0.0;
        return r;
    }
    const double nx = spec.axis.x();
    const double nz = spec.axis.z();
    const double bit_loss = (1.0 - nz * nz) * s;
    const double phase_loss = (1.0 - nx * nx) * s;
    GuessReport r = make_guess_report(std::abs(1.0 - 2.0 * bit_loss), std::abs(1.0 - 2.0 * phase_loss));
    r.outside_validity = bit_loss > 0.5 || phase_loss > 0.5;
    return r;
}

Eigen::Vector3d good_axis() { return Eigen::Vector3d(1.0, 0.0, 1.0).normalized(); }

Eigen::Vector3d bad_axis() { return Eigen::Vector3d::UnitY(); }

double protected_guess_envelope(double angle) {
    const double half = std::sin(angle / 2.0);
    const double p = 1.0 - 2.0 / 3.0 * half * half;
    return p * p;
}

}  // namespace mdiqkd
