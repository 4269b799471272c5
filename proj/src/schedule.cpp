#include "qanneal/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"

namespace qanneal {

AnnealingSchedule::AnnealingSchedule(std::string name, Function a, Function b, DriverSign sign,
                                     std::vector<double> breakpoints)
    : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)), sign_(sign), breakpoints_(std::move(breakpoints)) {
    if (!a_ || !b_) {
        throw Error(ErrorCode::Validation, "schedule '" + name_ + "' needs both A(s) and B(s)");
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    for (double p : breakpoints_) {
        if (!(p > 0.0 && p < 1.0)) {
            throw Error(ErrorCode::Domain, "schedule breakpoint " + format_double(p) + " outside (0, 1)");
        }
    }
}

AnnealingSchedule AnnealingSchedule::with_driver_sign(DriverSign sign) const {
    AnnealingSchedule copy = *this;
    copy.sign_ = sign;
    return copy;
}

AnnealingSchedule builtin_schedule(BuiltinSchedule which) {
    using std::numbers::pi;
    switch (which) {
        case BuiltinSchedule::Linear:
            return {"linear", [](double s) { return 1.0 - s; }, [](double s) { return s; }};
        case BuiltinSchedule::Quadratic:
            return {"quadratic", [](double s) { return (1.0 - s) * (1.0 - s); }, [](double s) { return s * s; }};
        case BuiltinSchedule::Circular:
            return {"circular", [](double s) { return std::cos(pi / 2.0 * s); },
                    [](double s) { return std::sin(pi / 2.0 * s); }};
        case BuiltinSchedule::DwQuadratic:
            // Piecewise quadratic fit to the DW_2000Q_LANL device schedule.
            return {"dw_quadratic",
                    [](double s) {
                        if (s < kDwQuadraticCutoff) {
                            return (13.371976 * s * s - 18.453338 * s + 6.366401) * pi;
                        }
                        return 0.0;
                    },
                    [](double s) { return 14.55571 * (0.85 * s * s + 0.15 * s) * pi; },
                    DriverSign::Positive,
                    {kDwQuadraticCutoff}};
    }
    throw Error(ErrorCode::Lookup, "unknown built-in schedule");
}

std::vector<std::string> builtin_schedule_names() { return {"linear", "quadratic", "circular", "dw_quadratic"}; }

AnnealingSchedule builtin_schedule(std::string_view name) {
    std::string key;
    for (char c : name) {
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key.starts_with("as_")) {
        key.erase(0, 3);
    }
    if (key == "linear") return builtin_schedule(BuiltinSchedule::Linear);
    if (key == "quadratic") return builtin_schedule(BuiltinSchedule::Quadratic);
    if (key == "circular") return builtin_schedule(BuiltinSchedule::Circular);
    if (key == "dw_quadratic") return builtin_schedule(BuiltinSchedule::DwQuadratic);
    throw Error(ErrorCode::Lookup, "unknown schedule '" + std::string(name) + "'");
}

AnnealingSchedule schedule_from_functions(AnnealingSchedule::Function a, AnnealingSchedule::Function b,
                                          DriverSign sign, std::string name) {
    if (!a || !b) {
        throw Error(ErrorCode::Validation, "schedule functions must be callable");
    }
    for (double probe : {0.0, 0.5, 1.0}) {
        const double av = a(probe);
        const double bv = b(probe);
        if (!std::isfinite(av) || !std::isfinite(bv)) {
            throw Error(ErrorCode::Validation, "schedule '" + name + "' is not finite at s = " + format_double(probe));
        }
    }
    return {std::move(name), std::move(a), std::move(b), sign};
}

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

double parse_field(std::string_view field, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::Parse,
                    "line " + std::to_string(line) + ": '" + std::string(field) + "' is not a finite number");
    }
    return value;
}

void validate_table(const ScheduleTable& table) {
    if (table.s.size() != table.a.size() || table.s.size() != table.b.size()) {
        throw Error(ErrorCode::Shape, "schedule table columns differ in length");
    }
    if (table.s.empty()) {
        throw Error(ErrorCode::Parse, "schedule table has no data rows");
    }
    for (std::size_t k = 1; k < table.s.size(); ++k) {
        if (!(table.s[k] > table.s[k - 1])) {
            throw Error(ErrorCode::Order, "schedule s column is not strictly increasing at row " + std::to_string(k + 1));
        }
    }
    if (table.s.front() > 0.0 || table.s.back() < 1.0) {
        throw Error(ErrorCode::Domain, "schedule s column spans [" + format_double(table.s.front()) + ", " +
                                           format_double(table.s.back()) + "], which does not cover [0, 1]");
    }
}

}  // namespace

ScheduleTable parse_schedule_csv(std::string_view text) {
    ScheduleTable table;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (!seen_header) {
            std::string header;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) header += static_cast<char>(std::tolower(c));
            }
            if (header != "s,a,b") {
                throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected header 's,a,b'");
            }
            seen_header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 3) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 3 fields, found " +
                                              std::to_string(fields.size()));
        }
        table.s.push_back(parse_field(fields[0], line_no));
        table.a.push_back(parse_field(fields[1], line_no));
        table.b.push_back(parse_field(fields[2], line_no));
    }
    if (!seen_header) {
        throw Error(ErrorCode::Parse, "schedule CSV is empty");
    }
    return table;
}

ScheduleTable read_schedule_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open schedule file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_schedule_csv(buffer.str());
}

std::string format_schedule_csv(const ScheduleTable& table) {
    validate_table(table);
    std::string out = "s,a,b\n";
    for (std::size_t k = 0; k < table.s.size(); ++k) {
        out += format_double(table.s[k]) + ',' + format_double(table.a[k]) + ',' + format_double(table.b[k]) + '\n';
    }
    return out;
}

void write_schedule_csv(const ScheduleTable& table, const std::filesystem::path& path) {
    const std::string text = format_schedule_csv(table);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Error(ErrorCode::Io, "cannot write schedule file '" + path.string() + "'");
    }
}

ScheduleTable tabulate_schedule(const AnnealingSchedule& schedule, std::span<const double> s_grid) {
    ScheduleTable table;
    for (double s : s_grid) {
        table.s.push_back(s);
        table.a.push_back(schedule.a(s));
        table.b.push_back(schedule.b(s));
    }
    return table;
}

namespace {

struct LinearInterpolant {
    std::shared_ptr<const std::vector<double>> x;
    std::vector<double> y;

    double operator()(double s) const {
        const auto& xs = *x;
        if (s <= xs.front()) return y.front();
        if (s >= xs.back()) return y.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), s) - xs.begin());
        const std::size_t lo = hi - 1;
        const double t = (s - xs[lo]) / (xs[hi] - xs[lo]);
        return y[lo] + t * (y[hi] - y[lo]);
    }
};

}  // namespace

AnnealingSchedule schedule_from_table(ScheduleTable table, DriverSign sign, std::string name) {
    validate_table(table);
    if (table.s.size() < 2) {
        throw Error(ErrorCode::Domain, "schedule table needs at least two rows");
    }
    auto grid = std::make_shared<const std::vector<double>>(std::move(table.s));
    return {std::move(name), LinearInterpolant{grid, std::move(table.a)}, LinearInterpolant{grid, std::move(table.b)},
            sign};
}

AnnealingSchedule load_schedule_csv(const std::filesystem::path& path, DriverSign sign) {
    return schedule_from_table(read_schedule_csv(path), sign, path.filename().string());
}

ScalarQuadratic local_quadratic_fit(const std::function<double(double)>& f, double s0, double s1) {
    if (!(s0 < s1)) {
        throw Error(ErrorCode::Domain, "quadratic fit needs s0 < s1");
    }
    const double h = s1 - s0;
    const ScalarQuadratic u = local_quadratic_fit_unit(f, s0, s1);
    // Substitute u = (s - s0) / h.
    const double p = u.c1 / h;
    const double q = u.c2 / (h * h);
    return {u.c0 - p * s0 + q * s0 * s0, p - 2.0 * q * s0, q};
}

ScalarQuadratic local_quadratic_fit_unit(const std::function<double(double)>& f, double s0, double s1,
                                         bool left_limit_at_end) {
    if (!(s0 < s1)) {
        throw Error(ErrorCode::Domain, "quadratic fit needs s0 < s1");
    }
    const double f0 = f(s0);
    const double fm = f(0.5 * (s0 + s1));
    const double f1 = f(left_limit_at_end ? std::nextafter(s1, s0) : s1);
    return {f0, 4.0 * fm - 3.0 * f0 - f1, 2.0 * (f0 + f1) - 4.0 * fm};
}

}  // namespace qanneal
