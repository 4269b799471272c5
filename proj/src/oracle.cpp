#include "qanneal/oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"

namespace qanneal {
namespace {

constexpr double kPi = std::numbers::pi;

void check_point(double s, double tau) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorCode::Domain, "s = " + format_double(s) + " outside [0, 1]");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw Error(ErrorCode::Domain, "annealing time " + format_double(tau) + " must be finite and > 0");
    }
}

void check_s(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorCode::Domain, "s = " + format_double(s) + " outside [0, 1]");
    }
}

}  // namespace

ComplexMatrix rho_h1(double s, double tau) {
    check_point(s, tau);
    const double r = 2.0 * tau;
    const double w0 = kPi / 2.0;
    const double w1 = std::sqrt(4.0 * tau * tau + kPi * kPi / 4.0);
    const double w1sq = w1 * w1;
    const double mix = r * r + w0 * w0 * std::cos(w1 * s);

    const double x = (-mix * std::cos(w0 * s) - w0 * w1 * std::sin(w0 * s) * std::sin(w1 * s)) / w1sq;
    const double y = -r * w0 * (1.0 - std::cos(w1 * s)) / w1sq;
    // sign of the second term checked against direct integration for 0 < s < 1
    const double z = -(mix * std::sin(w0 * s) - w0 * w1 * std::cos(w0 * s) * std::sin(w1 * s)) / w1sq;

    ComplexMatrix rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + z);
    rho(1, 1) = 0.5 * (1.0 - z);
    rho(0, 1) = Complex(0.5 * x, -0.5 * y);
    rho(1, 0) = Complex(0.5 * x, 0.5 * y);
    return rho;
}

ComplexVector psi_h2(double s, double tau) {
    check_point(s, tau);
    const double q = std::sqrt(1.0 + 64.0 * tau * tau / (kPi * kPi));
    const double theta = kPi / 4.0 * s * q;
    const double sn = std::sin(kPi / 2.0 * s);
    const double cs = std::cos(kPi / 2.0 * s);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const Complex i{0.0, 1.0};

    const Complex c0 = ct * std::sqrt(1.0 - sn) / 2.0 +
                       (8.0 * i * tau * std::sqrt(1.0 - sn) / kPi + std::sqrt(1.0 + sn)) * (st / (2.0 * q));
    const Complex c1 = -(ct * (1.0 + sn) + (-cs + 8.0 * i * tau * (1.0 + sn) / kPi) * st / q) /
                       (2.0 * std::sqrt(1.0 + sn));

    ComplexVector psi(4);
    psi << c0, c1, c1, c0;
    return psi;
}

ComplexMatrix rho_h2(double s, double tau) {
    const ComplexVector psi = psi_h2(s, tau);
    return psi * psi.adjoint();
}

ComplexMatrix hamiltonian_h1(double s) {
    check_s(s);
    const double c = std::cos(kPi / 2.0 * s);
    const double z = std::sin(kPi / 2.0 * s);
    ComplexMatrix h(2, 2);
    h << z, c, c, -z;
    return h;
}

ComplexMatrix hamiltonian_h2(double s) {
    check_s(s);
    const double c = std::cos(kPi / 2.0 * s);
    const double z = std::sin(kPi / 2.0 * s);
    const Eigen::Matrix2cd x{{0.0, 1.0}, {1.0, 0.0}};
    const Eigen::Matrix2cd zz{{1.0, 0.0}, {0.0, -1.0}};
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    // Kronecker products written out; qubit 1 is the low index bit.
    auto kron = [](const Eigen::Matrix2cd& hi, const Eigen::Matrix2cd& lo) {
        ComplexMatrix out(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out.block(2 * a, 2 * b, 2, 2) = hi(a, b) * lo;
        return out;
    };
    return c * (kron(id, x) + kron(x, id)) + (2.0 * z) * kron(zz, zz);
}

IsingModel h1_model() {
    IsingModel m(1);
    m.add_field(1, 1.0);
    return m;
}

IsingModel h2_model() {
    IsingModel m(2);
    m.add_coupling(1, 2, 2.0);
    return m;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw Error(ErrorCode::Shape, "trace distance needs square matrices of equal size, got " +
                                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    if (a.size() == 0) return 0.0;
    const ComplexMatrix diff = a - b;
    // Symmetrize so roundoff in the inputs cannot leave a non-Hermitian residue.
    const ComplexMatrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qanneal
