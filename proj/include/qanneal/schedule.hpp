#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qanneal {

/// Sign in front of A(s) * H_transverse. Positive pairs with the all-minus initial
/// state (ground state of +sum X); Negative is the D-Wave convention, paired with all-plus.
enum class DriverSign { Positive = 1, Negative = -1 };

enum class InitialState { AllMinus, AllPlus };

inline int sign_value(DriverSign sign) { return static_cast<int>(sign); }

class AnnealingSchedule {
public:
    using Function = std::function<double(double)>;

    /// `breakpoints` are interior points of (0, 1) where A or B is not smooth. Solver steps
    /// never straddle one. Piecewise functions should select the left piece with `s < point`.
    AnnealingSchedule(std::string name, Function a, Function b, DriverSign sign = DriverSign::Positive,
                      std::vector<double> breakpoints = {});

    double a(double s) const { return a_(s); }
    double b(double s) const { return b_(s); }
    const Function& a_function() const { return a_; }
    const Function& b_function() const { return b_; }

    const std::string& name() const { return name_; }
    DriverSign driver_sign() const { return sign_; }
    InitialState initial_state() const {
        return sign_ == DriverSign::Positive ? InitialState::AllMinus : InitialState::AllPlus;
    }
    std::span<const double> breakpoints() const { return breakpoints_; }

    AnnealingSchedule with_driver_sign(DriverSign sign) const;

private:
    std::string name_;
    Function a_;
    Function b_;
    DriverSign sign_;
    std::vector<double> breakpoints_;
};

enum class BuiltinSchedule { Linear, Quadratic, Circular, DwQuadratic };

/// Breakpoint of DW_QUADRATIC: A(s) is identically zero from here on.
inline constexpr double kDwQuadraticCutoff = 0.69;

AnnealingSchedule builtin_schedule(BuiltinSchedule which);

/// Case-insensitive; accepts "linear", "AS_LINEAR", "dw_quadratic", ... Throws Error(Lookup).
AnnealingSchedule builtin_schedule(std::string_view name);

std::vector<std::string> builtin_schedule_names();

/// Wraps user functions; rejects non-finite values at s = 0, 0.5, 1 with Error(Validation).
AnnealingSchedule schedule_from_functions(AnnealingSchedule::Function a, AnnealingSchedule::Function b,
                                          DriverSign sign = DriverSign::Positive, std::string name = "custom");

/// Tabulated schedule values, as stored in `s,a,b` CSV files.
struct ScheduleTable {
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> b;
};

ScheduleTable parse_schedule_csv(std::string_view text);
ScheduleTable read_schedule_csv(const std::filesystem::path& path);
std::string format_schedule_csv(const ScheduleTable& table);
void write_schedule_csv(const ScheduleTable& table, const std::filesystem::path& path);

/// Samples a schedule on a grid (used for CSV export and plotting data).
ScheduleTable tabulate_schedule(const AnnealingSchedule& schedule, std::span<const double> s_grid);

/// Piecewise-linear interpolation of a validated table.
AnnealingSchedule schedule_from_table(ScheduleTable table, DriverSign sign = DriverSign::Positive,
                                      std::string name = "table");

AnnealingSchedule load_schedule_csv(const std::filesystem::path& path, DriverSign sign = DriverSign::Positive);

struct ScalarQuadratic {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    double operator()(double x) const { return c0 + x * (c1 + x * c2); }
};

/// Quadratic through f at s0, (s0+s1)/2 and s1, with coefficients in the global variable s.
ScalarQuadratic local_quadratic_fit(const std::function<double(double)>& f, double s0, double s1);

/// Same interpolant expressed in the step-local variable u = (s - s0) / (s1 - s0) in [0, 1].
/// With `left_limit_at_end` the right node is sampled one ulp below s1, so a piece that ends
/// on a breakpoint is fitted to its own branch.
ScalarQuadratic local_quadratic_fit_unit(const std::function<double(double)>& f, double s0, double s1,
                                         bool left_limit_at_end = false);

}  // namespace qanneal
