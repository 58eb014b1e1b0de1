#pragma once

#include <array>
#include <string_view>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/design12.hpp"
#include "mdiqkd/qmath.hpp"

namespace mdiqkd {

enum class Basis { Z, X };

enum class BellState { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellState, 4> kBellStates = {BellState::PhiPlus, BellState::PhiMinus,
                                                         BellState::PsiPlus, BellState::PsiMinus};

std::string_view to_string(Basis basis);
std::string_view to_string(BellState state);

Ket4d bell_ket(BellState state);

/// The four Bell-basis projectors, indexed by BellState.
struct BellProjectors {
    std::array<Mat4d, 4> projectors;

    const Mat4d& operator[](BellState state) const { return projectors[static_cast<int>(state)]; }
};

/// Shared immutable instance.
const BellProjectors& bell_projectors();

/// BB84 states: Z0 → |0><0|, Z1 → |1><1|, X0 → |+><+|, X1 → |−><−|.
Mat2d prepare_state(Basis basis, int bit);

/// Born probability Tr(ρ·P) for one Bell outcome.
double bell_probability(const Mat4d& rho_joint, BellState state);

/// Tr(ρ_joint P_Ψ+) + Tr(ρ_joint P_Ψ−) with ρ_joint = |0><0| ⊗ u|0><0|u†.
double qber_exact(const Mat2d& u_rel);

/// Average of qber_exact(V_k† u V_k) over the twirl set; analytically η(u)/2.
double qber_protected_exact(const Mat2d& u_rel, const TwirlSetd& set = standard_twirl_set());

struct GuessReport {
    double t_bit = 1.0;
    double t_phase = 1.0;
    double p_guess_bit = 1.0;
    double p_guess_phase = 1.0;
    double p_guess_total = 1.0;
    /// Set by the analytic form when the rotation is outside the small-angle region where the
    /// closed forms hold without absolute values.
    bool outside_validity = false;
};

GuessReport make_guess_report(double t_bit, double t_phase);

/// Dephases Bob's (second) qubit of a joint state in the given measurement basis.
Mat4d dephase_second(const Mat4d& rho_joint, Basis basis);

/// Trace distances between Bob sending |1> vs |0> (bit) and |+> vs |−> (phase), each state
/// prepared next to Alice's |0><0|, propagated through u (or the twirl of u when protected), and
/// read out in the corresponding measurement basis.
GuessReport guess_report_numeric(const RotationSpec& spec, bool protected_mode,
                                 const TwirlSetd& set = standard_twirl_set());

/// Closed forms: unprotected T_bit = |1 − 2(1−n_z²)s|, T_phase = |1 − 2(1−n_x²)s|;
/// protected T = |1 − η| with η = 4/3·s, where s = sin²(α/2).
GuessReport guess_report_analytic(const RotationSpec& spec, bool protected_mode);

/// Axis maximising the unprotected P_guess,total: (1/√2, 0, 1/√2).
Eigen::Vector3d good_axis();
/// Axis minimising it: ŷ.
Eigen::Vector3d bad_axis();

/// (1 − (2/3)·sin²(α/2))²
double protected_guess_envelope(double angle);

}  // namespace mdiqkd
