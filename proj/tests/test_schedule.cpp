#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "qanneal/error.hpp"
#include "qanneal/schedule.hpp"

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

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("built-in schedule values") {
    const auto lin = builtin_schedule(BuiltinSchedule::Linear);
    CHECK(lin.a(0.0) == 1.0);
    CHECK(lin.b(0.0) == 0.0);
    CHECK(lin.a(0.25) == 0.75);

    const auto quad = builtin_schedule("quadratic");
    CHECK(quad.a(0.25) == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(quad.b(0.25) == doctest::Approx(0.0625).epsilon(1e-15));

    const auto circ = builtin_schedule("AS_CIRCULAR");
    for (int k = 0; k <= 1000; ++k) {
        const double s = k / 1000.0;
        REQUIRE(std::abs(circ.a(s) * circ.a(s) + circ.b(s) * circ.b(s) - 1.0) <= 1e-14);
    }

    const auto dw = builtin_schedule("dw_quadratic");
    CHECK(std::abs(dw.a(std::nextafter(0.69, 0.0))) <= 1e-3);
    CHECK(dw.a(0.69) == 0.0);
    CHECK(dw.a(0.9) == 0.0);
    CHECK(dw.a(0.0) == doctest::Approx(6.366401 * kPi));
    CHECK(dw.b(1.0) == doctest::Approx(14.55571 * kPi));
    REQUIRE(dw.breakpoints().size() == 1);
    CHECK(dw.breakpoints()[0] == 0.69);
}

TEST_CASE("built-in schedules start in the driver and end in the target") {
    for (const auto& name : builtin_schedule_names()) {
        CAPTURE(name);
        const auto sch = builtin_schedule(name);
        CHECK(sch.b(0.0) == 0.0);
        CHECK(sch.a(1.0) >= 0.0);
        CHECK(sch.a(1.0) <= 1e-3);
        CHECK(sch.a(0.0) > 1e-3);
    }
}

TEST_CASE("unknown schedule names fail lookup") {
    CHECK(code_of([] { builtin_schedule("cubic"); }) == ErrorCode::Lookup);
}

TEST_CASE("driver sign selects the initial state") {
    const auto pos = builtin_schedule("linear");
    CHECK(pos.initial_state() == InitialState::AllMinus);
    const auto neg = pos.with_driver_sign(DriverSign::Negative);
    CHECK(neg.initial_state() == InitialState::AllPlus);
    CHECK(neg.a(0.3) == pos.a(0.3));
}

TEST_CASE("user functions are wrapped and probed") {
    const auto cubic = schedule_from_functions([](double s) { return s * s * s; },
                                               [](double s) { return (1 - s) * (1 - s) * (1 - s); });
    CHECK(cubic.a(0.5) == 0.125);
    CHECK(code_of([] {
              schedule_from_functions([](double s) { return s == 0.5 ? std::nan("") : s; }, [](double s) { return s; });
          }) == ErrorCode::Validation);
}

TEST_CASE("csv schedules interpolate linearly") {
    const auto two = schedule_from_table(parse_schedule_csv("s,a,b\n0,1,0\n1,0,1\n"));
    const auto lin = builtin_schedule("linear");
    for (double s : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
        CHECK(two.a(s) == doctest::Approx(lin.a(s)).epsilon(1e-15));
        CHECK(two.b(s) == doctest::Approx(lin.b(s)).epsilon(1e-15));
    }
    const auto three = schedule_from_table(parse_schedule_csv("s,a,b\n0,1,0\n0.5,0.2,0.4\n1,0,1\n"));
    CHECK(three.a(0.25) == doctest::Approx(0.6));
    CHECK(three.b(0.75) == doctest::Approx(0.7));
}

TEST_CASE("dense tabulation of the circular schedule interpolates within the linear bound") {
    const auto circ = builtin_schedule("circular");
    std::vector<double> grid(1001);
    for (int k = 0; k <= 1000; ++k) grid[k] = k / 1000.0;
    const auto table = schedule_from_table(tabulate_schedule(circ, grid));
    double worst = 0.0;
    for (int k = 0; k <= 10000; ++k) {
        const double s = k / 10000.0 + 0.37e-5;
        if (s > 1.0) break;
        worst = std::max(worst, std::abs(table.a(s) - circ.a(s)));
    }
    CHECK(worst <= 2e-6);
}

TEST_CASE("csv validation errors") {
    CHECK(code_of([] { parse_schedule_csv("t,a,b\n0,1,0\n1,0,1\n"); }) == ErrorCode::Parse);
    try {
        parse_schedule_csv("s,a,b\n0,1,0\n0.5,x,0\n1,0,1\n");
        FAIL("expected an Error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([] { schedule_from_table(parse_schedule_csv("s,a,b\n0,1,0\n0.5,1,0\n0.4,0,1\n1,0,1\n")); }) ==
          ErrorCode::Order);
    CHECK(code_of([] { schedule_from_table(parse_schedule_csv("s,a,b\n0,1,0\n0.9,0,1\n")); }) == ErrorCode::Domain);
    CHECK(code_of([] { schedule_from_table(parse_schedule_csv("s,a,b\n0,1,0\n")); }) != ErrorCode::InvalidInput);
}

TEST_CASE("csv round trip reproduces nodes exactly") {
    const auto dw = builtin_schedule("dw_quadratic");
    std::vector<double> grid;
    for (int k = 0; k <= 137; ++k) grid.push_back(k / 137.0);
    const ScheduleTable table = tabulate_schedule(dw, grid);
    const ScheduleTable again = parse_schedule_csv(format_schedule_csv(table));
    CHECK(again.s == table.s);
    CHECK(again.a == table.a);
    CHECK(again.b == table.b);

    const auto path = std::filesystem::temp_directory_path() / "qanneal_schedule_roundtrip.csv";
    write_schedule_csv(table, path);
    const auto loaded = load_schedule_csv(path);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        REQUIRE(loaded.a(table.s[k]) == table.a[k]);
        REQUIRE(loaded.b(table.s[k]) == table.b[k]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("local quadratic fit") {
    const auto lin = builtin_schedule("linear");
    const auto q = local_quadratic_fit(lin.a_function(), 0.0, 0.5);
    CHECK(q.c0 == doctest::Approx(1.0));
    CHECK(q.c1 == doctest::Approx(-1.0));
    CHECK(std::abs(q.c2) <= 1e-12);

    const auto sq = local_quadratic_fit([](double s) { return s * s; }, 0.3, 0.8);
    CHECK(std::abs(sq.c0) <= 1e-12);
    CHECK(std::abs(sq.c1) <= 1e-12);
    CHECK(sq.c2 == doctest::Approx(1.0).epsilon(1e-12));

    const auto poly = [](double s) { return 2.5 - 1.25 * s + 0.75 * s * s; };
    const auto p = local_quadratic_fit(poly, -0.2, 0.9);
    CHECK(p.c0 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p.c1 == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(p.c2 == doctest::Approx(0.75).epsilon(1e-12));

    const auto sine = [](double s) { return std::sin(kPi * s / 2); };
    const auto f = local_quadratic_fit(sine, 0.0, 0.1);
    for (double s : {0.0, 0.05, 0.1}) CHECK(std::abs(f(s) - sine(s)) <= 1e-15);

    const auto u = local_quadratic_fit_unit(sine, 0.2, 0.6);
    for (double t : {0.0, 0.5, 1.0}) CHECK(std::abs(u(t) - sine(0.2 + 0.4 * t)) <= 1e-15);
}

TEST_CASE("fit ending on a breakpoint uses the left branch") {
    const auto dw = builtin_schedule("dw_quadratic");
    const auto u = local_quadratic_fit_unit(dw.a_function(), 0.6, 0.69, true);
    CHECK(std::abs(u(1.0) - dw.a(std::nextafter(0.69, 0.0))) <= 1e-12);
    CHECK(u(1.0) != 0.0);
}
