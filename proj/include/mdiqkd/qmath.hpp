#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mdiqkd {

// Numerical tolerances used across the library.
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kEigTol = 1e-12;
inline constexpr double kJacobiOffDiagTol = 1e-14;
inline constexpr double kImagResidueTol = 1e-10;
inline constexpr int kMaxJacobiSweeps = 64;

template <class Scalar>
using Complex = std::complex<Scalar>;

template <class Scalar, int N>
using CMat = Eigen::Matrix<Complex<Scalar>, N, N>;

template <class Scalar, int N>
using CVec = Eigen::Matrix<Complex<Scalar>, N, 1>;

template <class Scalar>
using Mat2 = CMat<Scalar, 2>;
template <class Scalar>
using Mat4 = CMat<Scalar, 4>;
template <class Scalar>
using Ket2 = CVec<Scalar, 2>;
template <class Scalar>
using Ket4 = CVec<Scalar, 4>;

using Complexd = Complex<double>;
using Mat2d = Mat2<double>;
using Mat4d = Mat4<double>;
using Ket2d = Ket2<double>;
using Ket4d = Ket4<double>;

/// Raised by the eigensolver when its input is not Hermitian. Carries ‖m − m†‖_F.
class NotHermitianError : public std::invalid_argument {
public:
    explicit NotHermitianError(double defect)
        : std::invalid_argument("matrix is not Hermitian: ||m - m^dag|| = " + std::to_string(defect)),
          defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

template <class Scalar>
Complex<Scalar> make_complex(Scalar re, Scalar im) {
    if (!std::isfinite(re) || !std::isfinite(im)) {
        throw std::invalid_argument("complex components must be finite");
    }
    return {re, im};
}

namespace pauli {

template <class Scalar = double>
Mat2<Scalar> identity() {
    return Mat2<Scalar>::Identity();
}

template <class Scalar = double>
Mat2<Scalar> x() {
    Mat2<Scalar> m;
    m << 0, 1, 1, 0;
    return m;
}

template <class Scalar = double>
Mat2<Scalar> y() {
    const Complex<Scalar> i(0, 1);
    Mat2<Scalar> m;
    m << Scalar(0), -i, i, Scalar(0);
    return m;
}

template <class Scalar = double>
Mat2<Scalar> z() {
    Mat2<Scalar> m;
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace pauli

/// Kronecker product a ⊗ b in the basis |00>,|01>,|10>,|11>.
template <class DerivedA, class DerivedB>
auto tensor(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Cplx = typename DerivedA::Scalar;
    constexpr int RA = DerivedA::RowsAtCompileTime;
    constexpr int CA = DerivedA::ColsAtCompileTime;
    constexpr int RB = DerivedB::RowsAtCompileTime;
    constexpr int CB = DerivedB::ColsAtCompileTime;
    static_assert(RA != Eigen::Dynamic && RB != Eigen::Dynamic && CA != Eigen::Dynamic &&
                      CB != Eigen::Dynamic,
                  "tensor() is defined for fixed-size operands");
    Eigen::Matrix<Cplx, RA * RB, CA * CB> out;
    for (int i = 0; i < RA; ++i) {
        for (int j = 0; j < CA; ++j) {
            out.template block<RB, CB>(i * RB, j * CB) = a(i, j) * b;
        }
    }
    return out;
}

/// ‖m − m†‖_F.
template <class Derived>
auto hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.adjoint()).norm();
}

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTol) {
    return hermitian_defect(m) <= tol;
}

/// Entrywise max |U·U† − 𝕀| ≤ tol.
template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = kUnitarityTol) {
    const auto product = (m * m.adjoint()).eval();
    using Plain = typename Derived::PlainObject;
    return (product - Plain::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Cyclic complex Jacobi. Returns the eigenvalues of a Hermitian matrix in ascending order.
///
/// Each rotation first removes the phase of the pivot a(p,q) with diag(1, e^{-iφ}) and then
/// applies the real symmetric Jacobi rotation, so a(p,q) is zeroed exactly in one step.
/// Sweeps stop once the off-diagonal Frobenius norm drops below kJacobiOffDiagTol (scaled by
/// max(1, ‖m‖_F)).
template <class Derived>
auto hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
    using Cplx = typename Derived::Scalar;
    using Real = typename Eigen::NumTraits<Cplx>::Real;
    constexpr int N = Derived::RowsAtCompileTime;
    static_assert(N != Eigen::Dynamic && N == Derived::ColsAtCompileTime,
                  "hermitian_eigenvalues() expects a fixed-size square matrix");

    const Real defect = hermitian_defect(m);
    if (!(defect <= Real(kHermitianTol))) {
        throw NotHermitianError(static_cast<double>(defect));
    }

    Eigen::Matrix<Cplx, N, N> a = (m + m.adjoint()) / Real(2);
    const Real scale = std::max(Real(1), a.norm());
    auto off_diagonal = [&a] {
        Real sum = 0;
        for (int p = 0; p < N; ++p) {
            for (int q = 0; q < N; ++q) {
                if (p != q) sum += std::norm(a(p, q));
            }
        }
        return std::sqrt(sum);
    };

    bool converged = false;
    for (int sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
        if (off_diagonal() < Real(kJacobiOffDiagTol) * scale) {
            converged = true;
            break;
        }
        for (int p = 0; p < N - 1; ++p) {
            for (int q = p + 1; q < N; ++q) {
                const Cplx apq = a(p, q);
                const Real mag = std::abs(apq);
                if (mag == Real(0)) continue;
                const Real app = std::real(a(p, p));
                const Real aqq = std::real(a(q, q));
                const Real theta = (aqq - app) / (Real(2) * mag);
                const Real t = (theta >= 0 ? Real(1) : Real(-1)) /
                               (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
                const Real c = Real(1) / std::sqrt(t * t + Real(1));
                const Real s = t * c;
                const Cplx phase = std::conj(apq) / mag;

                // a <- a·U with U = [[c, s], [-s·phase, c·phase]] on (p, q).
                for (int k = 0; k < N; ++k) {
                    const Cplx akp = a(k, p);
                    const Cplx akq = a(k, q);
                    a(k, p) = c * akp - s * phase * akq;
                    a(k, q) = s * akp + c * phase * akq;
                }
                // a <- U†·a.
                const Cplx phase_conj = std::conj(phase);
                for (int k = 0; k < N; ++k) {
                    const Cplx apk = a(p, k);
                    const Cplx aqk = a(q, k);
                    a(p, k) = c * apk - s * phase_conj * aqk;
                    a(q, k) = s * apk + c * phase_conj * aqk;
                }
                a(p, q) = Cplx(0);
                a(q, p) = Cplx(0);
                a(p, p) = Cplx(std::real(a(p, p)));
                a(q, q) = Cplx(std::real(a(q, q)));
            }
        }
    }
    if (!converged) {
        throw std::runtime_error("Jacobi eigensolver did not converge");
    }

    Eigen::Matrix<Real, N, 1> eigenvalues = a.diagonal().real();
    std::sort(eigenvalues.data(), eigenvalues.data() + N);
    return eigenvalues;
}

/// Hermitian, unit trace, and no eigenvalue below −tol.
template <class Derived>
bool is_density(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTol) {
    if (!m.allFinite() || !is_hermitian(m, tol)) return false;
    if (std::abs(m.trace() - typename Derived::Scalar(1)) > tol) return false;
    return hermitian_eigenvalues(m).minCoeff() >= -tol;
}

/// ½·Σ|λ_i(r1 − r2)|.
template <class DerivedA, class DerivedB>
auto trace_distance(const Eigen::MatrixBase<DerivedA>& r1, const Eigen::MatrixBase<DerivedB>& r2) {
    const auto eigenvalues = hermitian_eigenvalues((r1 - r2).eval());
    return eigenvalues.cwiseAbs().sum() / 2;
}

/// Real part of a trace overlap; the imaginary residue must stay below kImagResidueTol.
template <class Scalar>
Scalar checked_real(const Complex<Scalar>& value, const char* what) {
    if (std::abs(value.imag()) >= Scalar(kImagResidueTol)) {
        throw std::logic_error(std::string(what) + ": imaginary residue " +
                               std::to_string(static_cast<double>(value.imag())));
    }
    return value.real();
}

/// |ψ><ψ|
template <class Derived>
auto projector(const Eigen::MatrixBase<Derived>& ket) {
    return (ket * ket.adjoint()).eval();
}

}  // namespace mdiqkd
