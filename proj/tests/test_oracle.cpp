#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"
#include "qanneal/oracle.hpp"
#include "qanneal/simulate.hpp"

using namespace qanneal;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

const Eigen::Matrix2cd kX{{0.0, 1.0}, {1.0, 0.0}};
const Eigen::Matrix2cd kY{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}};
const Eigen::Matrix2cd kZ{{1.0, 0.0}, {0.0, -1.0}};

void check_pure_density(const ComplexMatrix& rho) {
    CHECK(max_abs(rho - rho.adjoint()) <= 1e-12);
    CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
    CHECK(std::abs((rho * rho).trace() - 1.0) <= 1e-10);
}

}  // namespace

TEST_CASE("single-qubit state at s = 0 is all-minus") {
    for (double tau : {0.1, 1.0, 100.0}) {
        const ComplexMatrix rho = rho_h1(0.0, tau);
        CHECK(max_abs(rho - 0.5 * (Eigen::Matrix2cd::Identity() - kX)) <= 1e-15);
    }
}

TEST_CASE("oracle states are pure densities") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> s_dist(0.0, 1.0);
    std::uniform_real_distribution<double> tau_dist(1e-6, 100.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double s = s_dist(rng);
        const double tau = tau_dist(rng);
        const ComplexMatrix r1 = rho_h1(s, tau);
        check_pure_density(r1);
        const double x = (r1 * kX).trace().real();
        const double y = (r1 * kY).trace().real();
        const double z = (r1 * kZ).trace().real();
        REQUIRE(std::abs(x * x + y * y + z * z - 1.0) <= 1e-12);

        REQUIRE(std::abs(psi_h2(s, tau).norm() - 1.0) <= 1e-12);
        const ComplexMatrix r2 = rho_h2(s, tau);
        check_pure_density(r2);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r2, Eigen::EigenvaluesOnly);
        REQUIRE(es.eigenvalues()[2] <= 1e-12);
    }
}

TEST_CASE("analytic states at intermediate s match direct integration") {
    // classical RK4 on d rho / ds = -i tau [H(s), rho], independent of the Magnus code
    auto integrate = [](auto hamiltonian, ComplexMatrix rho, double tau, double s_end) {
        const int n = 20000;
        const double h = s_end / n;
        auto f = [&](double s, const ComplexMatrix& r) -> ComplexMatrix {
            const ComplexMatrix H = hamiltonian(s);
            return Complex(0.0, -tau) * (H * r - r * H);
        };
        for (int k = 0; k < n; ++k) {
            const double s = k * h;
            const ComplexMatrix k1 = f(s, rho);
            const ComplexMatrix k2 = f(s + h / 2, rho + h / 2 * k1);
            const ComplexMatrix k3 = f(s + h / 2, rho + h / 2 * k2);
            const ComplexMatrix k4 = f(s + h, rho + h * k3);
            rho += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return rho;
    };
    for (double s : {0.13, 0.43, 0.77}) {
        for (double tau : {0.5, 3.0}) {
            CAPTURE(s);
            CAPTURE(tau);
            const ComplexMatrix r1 = integrate(hamiltonian_h1, rho_h1(0.0, tau), tau, s);
            CHECK(max_abs(r1 - rho_h1(s, tau)) <= 1e-10);
            const ComplexMatrix r2 = integrate(hamiltonian_h2, rho_h2(0.0, tau), tau, s);
            CHECK(max_abs(r2 - rho_h2(s, tau)) <= 1e-10);
        }
    }
}

TEST_CASE("two-qubit state at s = 0 is all-minus") {
    const ComplexVector psi = psi_h2(0.0, 7.0);
    ComplexVector expected(4);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK((psi - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(max_abs(rho_h2(0.0, 7.0) - initial_density(2, InitialState::AllMinus)) <= 1e-15);
}

TEST_CASE("oracle hamiltonians") {
    CHECK(max_abs(hamiltonian_h1(0.0) - ComplexMatrix(kX)) <= 1e-16);
    CHECK(max_abs(hamiltonian_h1(1.0) - ComplexMatrix(kZ)) <= 1e-16);

    const double r = std::sqrt(2.0) / 2.0;
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    // r (X1 + X2) + r 2 Z1 Z2 with qubit 1 on the low bit
    expected(0, 1) = expected(1, 0) = expected(0, 2) = expected(2, 0) = r;
    expected(1, 3) = expected(3, 1) = expected(2, 3) = expected(3, 2) = r;
    expected(0, 0) = expected(3, 3) = 2.0 * r;
    expected(1, 1) = expected(2, 2) = -2.0 * r;
    CHECK(max_abs(hamiltonian_h2(0.5) - expected) <= 1e-15);

    const auto circ = builtin_schedule("circular");
    for (double s : {0.0, 0.17, 0.5, 0.93, 1.0}) {
        CHECK(max_abs(hamiltonian_at(h1_model(), circ, s) - hamiltonian_h1(s)) <= 1e-14);
        CHECK(max_abs(hamiltonian_at(h2_model(), circ, s) - hamiltonian_h2(s)) <= 1e-14);
    }
}

TEST_CASE("trace distance") {
    const ComplexMatrix zero = ComplexMatrix(Eigen::Matrix2cd{{1.0, 0.0}, {0.0, 0.0}});
    const ComplexMatrix one = ComplexMatrix(Eigen::Matrix2cd{{0.0, 0.0}, {0.0, 1.0}});
    CHECK(trace_distance(zero, zero) == 0.0);
    CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
    ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 0.6;
    a(1, 1) = 0.4;
    b(0, 0) = b(1, 1) = 0.5;
    CHECK(trace_distance(a, b) == doctest::Approx(0.1));
    try {
        trace_distance(a, ComplexMatrix::Zero(4, 4));
        FAIL("expected shape error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Shape);
    }

    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix p = rho_h2(u(rng), 1 + 50 * u(rng));
        const ComplexMatrix q = rho_h2(u(rng), 1 + 50 * u(rng));
        const ComplexMatrix r = rho_h2(u(rng), 1 + 50 * u(rng));
        const double pq = trace_distance(p, q);
        REQUIRE(pq >= 0.0);
        REQUIRE(std::abs(pq - trace_distance(q, p)) <= 1e-14);
        REQUIRE(trace_distance(p, p) <= 1e-12);
        REQUIRE(pq <= trace_distance(p, r) + trace_distance(r, q) + 1e-10);
    }
}

TEST_CASE("solver converges to the analytic states") {
    const auto circ = builtin_schedule("circular");
    const auto r1 = simulate_fixed(h1_model(), 100.0, circ, 4, 100000);
    CHECK(trace_distance(r1.rho, rho_h1(1.0, 100.0)) <= 5e-12);
    const auto r2 = simulate_fixed(h2_model(), 50.0, circ, 4, 100000);
    CHECK(trace_distance(r2.rho, rho_h2(1.0, 50.0)) <= 1e-11);
}

TEST_CASE("trace distance to the analytic state shrinks as steps double") {
    const auto circ = builtin_schedule("circular");
    const double tau = 5.0;
    double previous = INFINITY;
    for (long n = 4; n <= 4096; n *= 2) {
        const double d = trace_distance(simulate_fixed(h1_model(), tau, circ, 4, n).rho, rho_h1(1.0, tau));
        CAPTURE(n);
        CHECK(d <= std::max(previous, 1e-12) + 1e-13);
        previous = d;
    }
}
