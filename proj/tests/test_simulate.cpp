#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"
#include "qanneal/oracle.hpp"
#include "qanneal/simulate.hpp"

using namespace qanneal;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidInput;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

AnnealingSchedule constant_target() {
    return schedule_from_functions([](double) { return 0.0; }, [](double) { return 1.0; });
}

void check_density(const SimulationResult& r) {
    const ComplexMatrix& rho = r.rho;
    CHECK(max_abs(rho - rho.adjoint()) <= 1e-12);
    CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
    CHECK(std::abs((rho * rho).trace() - 1.0) <= 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    double sum = 0.0;
    for (double p : r.probabilities) {
        CHECK(p >= -1e-10);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
}

IsingModel small_model() {
    IsingModel m;
    m.add_coupling(1, 2, -1.0);
    m.add_coupling(2, 3, 0.5);
    m.add_field(1, 0.3);
    return m;
}

}  // namespace

TEST_CASE("initial states") {
    const ComplexMatrix minus = initial_density(2, InitialState::AllMinus);
    CHECK(minus(0, 0) == Complex(0.25));
    CHECK(minus(0, 1) == Complex(-0.25));
    CHECK(minus(0, 3) == Complex(0.25));
    const ComplexMatrix plus = initial_density(2, InitialState::AllPlus);
    CHECK(max_abs(plus - ComplexMatrix::Constant(4, 4, 0.25)) <= 1e-16);
}

TEST_CASE("step boundaries insert breakpoints") {
    const std::vector<double> none;
    CHECK(step_boundaries(4, none) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const std::vector<double> kink{0.69};
    const auto grid = step_boundaries(2, kink);
    CHECK(grid == std::vector<double>{0.0, 0.5, 0.69, 1.0});
    // a node already on the breakpoint is not duplicated
    CHECK(step_boundaries(100, kink).size() == 101);
    CHECK(code_of([&] { step_boundaries(0, none); }) == ErrorCode::Config);
}

TEST_CASE("step polynomial construction") {
    const IsingModel m = small_model();
    const double tau = 3.0;
    {
        const auto p = build_step_polynomial(m, constant_target(), {}, tau, 0.2, 0.3);
        ComplexMatrix hz = ComplexMatrix::Zero(8, 8);
        hz.diagonal() = ising_diagonal(m).cast<Complex>();
        CHECK(max_abs(p.coefficient(0) - Complex(0.0, -tau * 0.1) * hz) <= 1e-15);
        CHECK(max_abs(p.coefficient(1)) <= 1e-15);
        CHECK(max_abs(p.coefficient(2)) <= 1e-15);
    }
    {
        const auto p = build_step_polynomial(m, builtin_schedule("linear"), {}, tau, 0.2, 0.6);
        CHECK(max_abs(p.coefficient(1)) > 0.1);
        CHECK(max_abs(p.coefficient(2)) <= 1e-14);
    }
    {
        const auto circ = builtin_schedule("circular");
        const double s0 = 0.41, s1 = 0.42;
        const auto p = build_step_polynomial(m, circ, {}, tau, s0, s1);
        const Complex lambda{0.0, -tau * (s1 - s0)};
        const ComplexMatrix h_norm_ref = hamiltonian_at(m, circ, s0);
        for (double u : {0.13, 0.37, 0.81}) {
            const ComplexMatrix exact = lambda * hamiltonian_at(m, circ, s0 + u * (s1 - s0));
            CHECK(max_abs(p.evaluate(u) - exact) <= 1e-7 * std::abs(lambda) * max_abs(h_norm_ref));
        }
    }
    CHECK(code_of([&] { build_step_polynomial(m, constant_target(), {}, tau, 0.5, 0.4); }) == ErrorCode::Domain);
}

TEST_CASE("time-independent evolution is exact at first order") {
    const IsingModel m = small_model();
    const double tau = 2.5;
    const RealVector d = ising_diagonal(m);
    ComplexVector phase(8);
    for (int v = 0; v < 8; ++v) phase[v] = std::exp(Complex(0.0, -tau * d[v]));
    const ComplexMatrix rho0 = initial_density(3, InitialState::AllMinus);
    const ComplexMatrix expected = phase.asDiagonal() * rho0 * phase.conjugate().asDiagonal();
    for (long n : {1L, 3L, 17L}) {
        const auto r = simulate_fixed(m, tau, constant_target(), 1, n);
        CHECK(max_abs(r.rho - expected) <= 1e-13);
    }
}

TEST_CASE("single-qubit analytic state at long annealing time") {
    const auto circ = builtin_schedule("circular");
    const auto r = simulate_fixed(h1_model(), 100.0, circ, 4, 10000);
    CHECK(trace_distance(r.rho, rho_h1(1.0, 100.0)) <= 1e-10);
    check_density(r);
}

TEST_CASE("density invariants hold at any step count") {
    const auto circ = builtin_schedule("circular");
    for (long n : {1L, 2L, 7L}) {
        for (int order : {1, 2, 3, 4, 5, 8}) {
            CAPTURE(n);
            CAPTURE(order);
            check_density(simulate_fixed(h5_model(), 100.0, circ, order, n));
        }
    }
}

TEST_CASE("assembly paths agree on a full simulation") {
    const IsingModel m = small_model();
    const FieldOffsets off{{0.1, -0.2, 0.05}, {0.0, 0.3, -0.1}};
    const auto sch = builtin_schedule("quadratic");
    for (int order = 1; order <= 4; ++order) {
        const auto a = simulate_fixed(m, 5.0, sch, order, 13, off, MagnusPath::Structured);
        const auto b = simulate_fixed(m, 5.0, sch, order, 13, off, MagnusPath::Explicit);
        const auto c = simulate_fixed(m, 5.0, sch, order, 13, off, MagnusPath::Recursive);
        CAPTURE(order);
        CHECK(max_abs(a.rho - b.rho) <= 1e-12);
        CHECK(max_abs(a.rho - c.rho) <= 1e-12);
    }
    CHECK(code_of([&] { simulate_fixed(m, 5.0, sch, 6, 4, off, MagnusPath::Structured); }) == ErrorCode::Config);
}

TEST_CASE("per-step propagators stay unitary") {
    const auto r = simulate_fixed(h5_model(), 100.0, builtin_schedule("dw_quadratic"), 4, 50, {}, MagnusPath::Auto,
                                  true);
    REQUIRE(r.unitarity_defect.has_value());
    CHECK(*r.unitarity_defect <= 1e-12);
    // the kink at 0.69 splits one uniform step
    CHECK(r.propagators == 51);
}

TEST_CASE("negative driver sign starts in the all-plus state") {
    const auto lin = builtin_schedule("linear").with_driver_sign(DriverSign::Negative);
    const auto r = simulate_fixed(small_model(), 0.0, lin, 4, 2);
    CHECK(max_abs(r.rho - ComplexMatrix::Constant(8, 8, 0.125)) <= 1e-14);
}

TEST_CASE("zero annealing time leaves the uniform distribution") {
    const auto r = simulate(h5_model(), 0.0, builtin_schedule("circular"));
    for (double p : r.probabilities) CHECK(std::abs(p - 1.0 / 32.0) <= 1e-12);
}

TEST_CASE("adaptive step doubling") {
    const auto r = simulate(small_model(), 4.0, constant_target());
    REQUIRE(r.convergence_trace.size() == 1);
    CHECK(r.convergence_trace[0].e_max <= 1e-13);
    CHECK(r.steps_used == 4);

    const auto circ = builtin_schedule("circular");
    const auto a = simulate(h5_model(), 10.0, circ);
    CHECK(a.convergence_trace.back().e_max <= 1e-4);
    CHECK(a.convergence_trace.back().e_mean <= 1e-6);
    for (std::size_t k = 0; k < a.convergence_trace.size(); ++k) {
        CHECK(a.convergence_trace[k].n_steps == (4L << k));
    }

    SolverConfig strict;
    strict.adaptive.mean_tol = 1e-30;
    strict.adaptive.max_tol = 1e-30;
    strict.adaptive.max_doublings = 3;
    try {
        simulate(h5_model(), 10.0, circ, strict);
        FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
        CHECK(e.code() == ErrorCode::NonConvergence);
        CHECK(e.trace().size() == 3);
    }
}

TEST_CASE("adaptive defaults on H5 match a fine fixed-step baseline") {
    const auto circ = builtin_schedule("circular");
    const auto baseline = simulate_fixed(h5_model(), 100.0, circ, 4, 20000);
    const auto r = simulate(h5_model(), 100.0, circ);
    double worst = 0.0;
    for (std::size_t v = 0; v < 32; ++v) worst = std::max(worst, std::abs(r.probabilities[v] - baseline.probabilities[v]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("configuration validation") {
    SolverConfig c;
    c.order = 9;
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::Config);
    c = {};
    c.adaptive.mean_tol = 0.0;
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::Config);
    c = {};
    c.fixed_steps = 0;
    CHECK(code_of([&] { validate_config(c); }) == ErrorCode::Config);
    CHECK(code_of([] { simulate_fixed(h5_model(), -1.0, builtin_schedule("linear"), 4, 2); }) == ErrorCode::Domain);
    CHECK(code_of([] { simulate_fixed(IsingModel{}, 1.0, builtin_schedule("linear"), 4, 2); }) == ErrorCode::Size);
}

TEST_CASE("non-finite schedule values fail with the step index") {
    const auto broken = schedule_from_functions([](double s) { return s > 0.62 && s < 0.68 ? std::nan("") : 1.0 - s; },
                                                [](double s) { return s; });
    try {
        simulate_fixed(small_model(), 1.0, broken, 4, 10);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalFailure);
        CHECK(std::string(e.what()).find("step 7") != std::string::npos);
    }
}

TEST_CASE("sweeps") {
    const auto circ = builtin_schedule("circular");
    const std::vector<double> one{3.0};
    const auto single = simulate_sweep(h5_model(), one, circ);
    REQUIRE(single.size() == 1);
    REQUIRE(single[0].result);
    CHECK(single[0].result->rho == simulate(h5_model(), 3.0, circ).rho);

    const std::vector<double> taus{0.5, -1.0, 2.0, 1.0};
    const auto serial = simulate_sweep(small_model(), taus, circ, {}, {}, 1);
    const auto parallel = simulate_sweep(small_model(), taus, circ, {}, {}, 3);
    REQUIRE(serial.size() == 4);
    CHECK_FALSE(serial[1].result);
    CHECK(serial[1].error_code == ErrorCode::Domain);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        CHECK(serial[k].tau == taus[k]);
        CHECK(parallel[k].tau == taus[k]);
        if (serial[k].result) CHECK(serial[k].result->rho == parallel[k].result->rho);
    }
    CHECK(code_of([&] { simulate_sweep(small_model(), std::vector<double>{}, circ); }) == ErrorCode::Domain);
}

TEST_CASE("reference integrator") {
    const IsingModel m = small_model();
    const auto exact = simulate_fixed(m, 2.0, constant_target(), 1, 1);
    const auto rk = simulate_reference_rk(m, 2.0, constant_target(), 2000);
    CHECK(max_abs(rk.rho - exact.rho) <= 1e-8);

    const auto circ = builtin_schedule("circular");
    const auto mag = simulate_fixed(m, 5.0, circ, 4, 400);
    const auto ref = simulate_reference_rk(m, 5.0, circ, 4000);
    CHECK(trace_distance(mag.rho, ref.rho) <= 1e-9);

    const auto coarse = simulate_reference_rk(h5_model(), 100.0, circ, 1);
    REQUIRE(coarse.trace_drift.has_value());
    REQUIRE(coarse.purity_drift.has_value());
    CHECK(*coarse.purity_drift > 1.0);
    CHECK(std::abs(coarse.rho.trace() - 1.0) <= 1e-12);
}

TEST_CASE("element-wise error metrics") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    ComplexMatrix b = a;
    CHECK(error_max(a, b) == 0.0);
    CHECK(error_mean(a, b) == 0.0);
    b(0, 1) = 0.1;
    CHECK(error_max(a, b) == doctest::Approx(0.1));
    CHECK(error_mean(a, b) == doctest::Approx(0.025));
    CHECK(error_mean(a, b) <= error_max(a, b));
    CHECK(code_of([&] { error_max(a, ComplexMatrix::Zero(4, 4)); }) == ErrorCode::Shape);
}

TEST_CASE("logspace") {
    const auto v = logspace(-1.0, 2.0, 4);
    CHECK(v == std::vector<double>{0.1, 1.0, 10.0, 100.0});
    CHECK(logspace(0.0, 3.0, 1) == std::vector<double>{1.0});
    CHECK(code_of([] { logspace(0, 1, 0); }) == ErrorCode::Range);
}
