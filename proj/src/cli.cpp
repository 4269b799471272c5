#include "qanneal/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qanneal/encoding.hpp"
#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/io.hpp"
#include "qanneal/schedule.hpp"
#include "qanneal/simulate.hpp"

namespace qanneal {
namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::InvalidInput, "invalid " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidInput, "invalid " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_number(part, what));
    return out;
}

std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
    std::vector<int> out;
    for (auto part : split(text, ',')) {
        const long long v = parse_integer(part, what);
        if (v < -1000 || v > 1000) {
            throw Error(ErrorCode::InvalidInput, "invalid " + std::string(what) + " '" + std::string(part) + "'");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

bool is_numeric_failure(ErrorCode code) {
    return code == ErrorCode::NumericalFailure || code == ErrorCode::NumericalConsistency ||
           code == ErrorCode::NonConvergence || code == ErrorCode::Io;
}

void report(std::ostream& err, ErrorCode code, std::string_view message) {
    std::string line(message);
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "error[" << error_code_name(code) << "]: " << line << '\n';
}

struct SolverFlags {
    std::string model;
    std::string schedule = "circular";
    std::string driver_sign = "positive";
    int order = 4;
    std::string steps = "adaptive";
    double mean_tol = AdaptiveOptions{}.mean_tol;
    double max_tol = AdaptiveOptions{}.max_tol;
    int max_doublings = AdaptiveOptions{}.max_doublings;
    std::string path = "auto";
    std::string x_offsets;
    std::string z_offsets;
    std::string out;
    std::string format;
    bool no_timestamp = false;
    bool ascii = false;
    bool density = false;
};

void add_model_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--model", f.model, "BQPJSON file or inline spec such as '1,2=-1;1=0.5'")->required();
    cmd->add_option("--schedule", f.schedule, "built-in schedule name or s,a,b CSV file")->capture_default_str();
    cmd->add_option("--driver-sign", f.driver_sign, "sign of the transverse term")
        ->check(CLI::IsMember({"positive", "negative"}))
        ->capture_default_str();
    cmd->add_option("--x-offsets", f.x_offsets, "comma list of per-qubit X offsets");
    cmd->add_option("--z-offsets", f.z_offsets, "comma list of per-qubit Z offsets");
    cmd->add_option("--out", f.out, "output file");
    cmd->add_option("--format", f.format, "json or csv (default: from --out extension, else json)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--no-timestamp", f.no_timestamp, "omit generated_at from JSON output");
    cmd->add_flag("--ascii", f.ascii, "ASCII u/d glyphs in bra-ket labels");
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    add_model_flags(cmd, f);
    cmd->add_option("--order", f.order, "Magnus order 1-8")->capture_default_str();
    cmd->add_option("--steps", f.steps, "uniform step count or 'adaptive'")->capture_default_str();
    cmd->add_option("--mean-tol", f.mean_tol, "adaptive E_mean tolerance")->capture_default_str();
    cmd->add_option("--max-tol", f.max_tol, "adaptive E_max tolerance")->capture_default_str();
    cmd->add_option("--max-doublings", f.max_doublings, "adaptive doubling limit")->capture_default_str();
    cmd->add_option("--path", f.path, "Magnus assembly path")
        ->check(CLI::IsMember({"auto", "structured", "explicit", "recursive"}))
        ->capture_default_str();
    cmd->add_flag("--density", f.density, "include the density matrix in JSON output");
}

IsingModel load_model(const std::string& spec) {
    const std::filesystem::path p(spec);
    if (p.extension() == ".json" || std::filesystem::is_regular_file(p)) {
        return read_bqpjson(p).model;
    }
    return parse_inline_model(spec);
}

DriverSign driver_sign(const SolverFlags& f) {
    return f.driver_sign == "negative" ? DriverSign::Negative : DriverSign::Positive;
}

AnnealingSchedule load_schedule(const SolverFlags& f) {
    const std::filesystem::path p(f.schedule);
    if (p.extension() == ".csv" || std::filesystem::is_regular_file(p)) {
        return load_schedule_csv(p, driver_sign(f));
    }
    return builtin_schedule(f.schedule).with_driver_sign(driver_sign(f));
}

FieldOffsets load_offsets(const SolverFlags& f) {
    FieldOffsets offsets;
    if (!f.x_offsets.empty()) offsets.x = parse_number_list(f.x_offsets, "x offset");
    if (!f.z_offsets.empty()) offsets.z = parse_number_list(f.z_offsets, "z offset");
    return offsets;
}

SolverConfig load_config(const SolverFlags& f) {
    SolverConfig config;
    config.order = f.order;
    if (f.steps != "adaptive") {
        config.fixed_steps = parse_integer(f.steps, "step count");
    }
    config.adaptive.mean_tol = f.mean_tol;
    config.adaptive.max_tol = f.max_tol;
    config.adaptive.max_doublings = f.max_doublings;
    if (f.path == "structured") config.path = MagnusPath::Structured;
    if (f.path == "explicit") config.path = MagnusPath::Explicit;
    if (f.path == "recursive") config.path = MagnusPath::Recursive;
    validate_config(config);
    return config;
}

ExportFormat output_format(const SolverFlags& f) {
    if (!f.format.empty()) return parse_export_format(f.format);
    return std::filesystem::path(f.out).extension() == ".csv" ? ExportFormat::Csv : ExportFormat::Json;
}

ExportContext export_context(const SolverFlags& f, IsingModel model, const AnnealingSchedule& schedule) {
    ExportContext ctx;
    ctx.model = std::move(model);
    ctx.schedule_name = schedule.name();
    ctx.glyphs = f.ascii ? GlyphStyle::Ascii : GlyphStyle::Unicode;
    ctx.timestamp = !f.no_timestamp;
    ctx.include_density = f.density;
    return ctx;
}

std::string top_states(const SimulationResult& r, std::size_t count, GlyphStyle glyphs) {
    std::vector<std::size_t> idx(r.probabilities.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return r.probabilities[a] > r.probabilities[b]; });
    idx.resize(std::min(count, idx.size()));
    std::string out;
    for (std::size_t v : idx) {
        if (!out.empty()) out += ' ';
        out += int_to_braket(v, r.n_qubits, glyphs) + "=" + format_double(r.probabilities[v]);
    }
    return out;
}

void print_trace(std::ostream& err, const std::vector<ConvergenceRecord>& trace) {
    for (const auto& r : trace) {
        err << "  n_steps=" << r.n_steps << " e_max=" << format_double(r.e_max) << " e_mean=" << format_double(r.e_mean)
            << '\n';
    }
}

int cmd_simulate(const SolverFlags& f, double tau, std::ostream& out, std::ostream& err) {
    const IsingModel model = load_model(f.model);
    const AnnealingSchedule schedule = load_schedule(f);
    const FieldOffsets offsets = load_offsets(f);
    const SolverConfig config = load_config(f);
    const ExportContext ctx = export_context(f, model, schedule);
    const ExportFormat format = output_format(f);

    SimulationResult result;
    try {
        result = simulate(model, tau, schedule, config, offsets);
    } catch (const NonConvergenceError& e) {
        report(err, e.code(), e.what());
        print_trace(err, e.trace());
        return kExitFailure;
    }
    if (!f.out.empty()) export_result(result, format, f.out, ctx);
    out << "tau=" << format_double(tau) << " order=" << result.order << " steps_used=" << result.steps_used
        << " top5: " << top_states(result, 5, ctx.glyphs) << '\n';
    return kExitOk;
}

int cmd_sweep(const SolverFlags& f, const std::string& times, int jobs, std::ostream& out, std::ostream& err) {
    const IsingModel model = load_model(f.model);
    const AnnealingSchedule schedule = load_schedule(f);
    const FieldOffsets offsets = load_offsets(f);
    const SolverConfig config = load_config(f);
    const ExportContext ctx = export_context(f, model, schedule);
    const ExportFormat format = output_format(f);
    std::vector<double> taus = parse_time_list(times);
    std::sort(taus.begin(), taus.end());

    const auto sweep = simulate_sweep(model, taus, schedule, config, offsets, jobs);
    if (!f.out.empty()) export_result(std::span<const SweepEntry>(sweep), format, f.out, ctx);
    std::size_t failures = 0;
    for (const auto& entry : sweep) {
        if (entry.result) {
            out << "tau=" << format_double(entry.tau) << " steps_used=" << entry.result->steps_used
                << " top: " << top_states(*entry.result, 1, ctx.glyphs) << '\n';
        } else {
            ++failures;
            const ErrorCode code = entry.error_code.value_or(ErrorCode::NumericalFailure);
            out << "tau=" << format_double(entry.tau) << " status=" << error_code_name(code) << '\n';
            err << "warning[" << error_code_name(code) << "]: tau=" << format_double(entry.tau) << ": " << entry.error
                << '\n';
        }
    }
    if (failures == sweep.size()) {
        report(err, sweep.front().error_code.value_or(ErrorCode::NumericalFailure), "every sweep point failed");
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_spectrum(const SolverFlags& f, std::size_t grid, const std::string& schedule_out, std::ostream& out) {
    const IsingModel model = load_model(f.model);
    const AnnealingSchedule schedule = load_schedule(f);
    const FieldOffsets offsets = load_offsets(f);
    const ExportContext ctx = export_context(f, model, schedule);
    const ExportFormat format = output_format(f);

    const std::vector<double> s_grid = uniform_grid(grid);
    const SpectrumResult spectrum = eigenspectrum(model, schedule, s_grid, offsets);
    std::filesystem::path table_path = schedule_out;
    if (!f.out.empty()) {
        export_result(spectrum, format, f.out, ctx);
        if (table_path.empty()) {
            const std::filesystem::path p(f.out);
            table_path = p.parent_path() / (p.stem().string() + "_schedule.csv");
        }
    }
    if (!table_path.empty()) write_schedule_csv(tabulate_schedule(schedule, s_grid), table_path);

    // Gap above the (possibly degenerate) final ground space.
    const std::size_t dim = spectrum.levels.front().size();
    const std::size_t degeneracy = brute_force_ground_states(model).states.size();
    const std::size_t upper = std::min(degeneracy, dim - 1);
    if (upper == 0) {
        out << "levels=1\n";
        return kExitOk;
    }
    const GapMinimum gap = minimum_gap(spectrum, 0, upper);
    out << "min_gap=" << format_double(gap.gap) << " s=" << format_double(gap.s) << " levels=0," << upper << '\n';
    return kExitOk;
}

int cmd_convert(const std::string& from, const std::string& to, const std::string& value, int n, bool ascii,
                std::ostream& out) {
    const GlyphStyle glyphs = ascii ? GlyphStyle::Ascii : GlyphStyle::Unicode;
    BinaryVector bits;
    if (from == "int") {
        const long long v = parse_integer(value, "integer label");
        if (v < 0) throw Error(ErrorCode::InvalidInput, "integer label must be >= 0");
        if (to == "int") {
            out << v << '\n';
            return kExitOk;
        }
        if (n < 1) throw Error(ErrorCode::InvalidInput, "--n is required when converting from int");
        bits = int_to_binary(static_cast<StateIndex>(v), n);
    } else if (from == "binary") {
        bits = parse_int_list(value, "binary digit");
        binary_to_int(bits);  // validates digits
    } else {
        bits = spin_to_binary(parse_int_list(value, "spin"));
    }

    auto join = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
        return s;
    };
    if (to == "int") {
        out << binary_to_int(bits) << '\n';
    } else if (to == "binary") {
        out << join(bits) << '\n';
    } else if (to == "spin") {
        out << join(binary_to_spin(bits)) << '\n';
    } else {
        out << spin_to_braket(binary_to_spin(bits), glyphs) << '\n';
    }
    return kExitOk;
}

int cmd_schedules(const std::string& tabulate, std::size_t grid, const std::string& path, std::ostream& out) {
    if (tabulate.empty()) {
        for (const auto& name : builtin_schedule_names()) out << name << '\n';
        return kExitOk;
    }
    const ScheduleTable table = tabulate_schedule(builtin_schedule(tabulate), uniform_grid(grid));
    if (path.empty()) {
        out << format_schedule_csv(table);
    } else {
        write_schedule_csv(table, path);
    }
    return kExitOk;
}

}  // namespace

IsingModel parse_inline_model(std::string_view spec) {
    IsingModel model;
    if (trim(spec).empty()) {
        throw Error(ErrorCode::InvalidInput, "empty inline model");
    }
    for (auto item : split(spec, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidInput, "model term '" + std::string(item) + "' lacks '=coeff'");
        }
        std::vector<int> indices;
        for (auto part : split(item.substr(0, eq), ',')) {
            const long long q = parse_integer(part, "qubit index");
            if (q < 1 || q > kMaxQubits) {
                throw Error(q < 1 ? ErrorCode::Model : ErrorCode::Size,
                            "qubit index " + std::to_string(q) + " outside [1, " + std::to_string(kMaxQubits) + "]");
            }
            indices.push_back(static_cast<int>(q));
        }
        model.add_term(indices, parse_number(item.substr(eq + 1), "coefficient"));
    }
    if (model.empty()) {
        throw Error(ErrorCode::InvalidInput, "inline model has no terms");
    }
    return model;
}

std::vector<double> parse_time_list(std::string_view spec) {
    spec = trim(spec);
    if (spec.starts_with("logspace:")) {
        const auto parts = split(spec.substr(9), ':');
        if (parts.size() != 3) {
            throw Error(ErrorCode::InvalidInput, "expected logspace:lo:hi:count, got '" + std::string(spec) + "'");
        }
        const long long count = parse_integer(parts[2], "logspace count");
        if (count < 1) throw Error(ErrorCode::InvalidInput, "logspace count must be >= 1");
        return logspace(parse_number(parts[0], "logspace bound"), parse_number(parts[1], "logspace bound"),
                        static_cast<std::size_t>(count));
    }
    std::vector<double> taus = parse_number_list(spec, "annealing time");
    for (double t : taus) {
        if (!(t > 0.0)) throw Error(ErrorCode::InvalidInput, "sweep times must be > 0, got " + format_double(t));
    }
    return taus;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed-system transverse-field Ising annealing simulator", "qanneal"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    SolverFlags sim;
    double sim_time = 0.0;
    auto* simulate_cmd = app.add_subcommand("simulate", "evolve one annealing time");
    add_solver_flags(simulate_cmd, sim);
    simulate_cmd->add_option("--time", sim_time, "annealing time tau")->required();

    SolverFlags sw;
    std::string times;
    int jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "evolve a list of annealing times");
    add_solver_flags(sweep_cmd, sw);
    sweep_cmd->add_option("--times", times, "comma list or logspace:lo:hi:count")->required();
    sweep_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber)->capture_default_str();

    SolverFlags sp;
    std::size_t grid = 101;
    std::string schedule_out;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "instantaneous eigenvalues over s");
    add_model_flags(spectrum_cmd, sp);
    spectrum_cmd->add_option("--grid", grid, "number of s points, >= 2")->capture_default_str();
    spectrum_cmd->add_option("--schedule-out", schedule_out, "s,a,b CSV of the schedule on the same grid");

    std::string from, to, value;
    int n = 0;
    bool conv_ascii = false;
    auto* convert_cmd = app.add_subcommand("convert", "convert between state labels");
    convert_cmd->add_option("--from", from)->required()->check(CLI::IsMember({"int", "binary", "spin"}));
    convert_cmd->add_option("--to", to)->required()->check(CLI::IsMember({"int", "binary", "spin", "braket"}));
    convert_cmd->add_option("--value", value, "integer, or comma list of bits/spins")->required();
    convert_cmd->add_option("--n", n, "qubit count, needed from int");
    convert_cmd->add_flag("--ascii", conv_ascii, "ASCII u/d glyphs");

    std::string tabulate, tab_out;
    std::size_t tab_grid = 101;
    auto* schedules_cmd = app.add_subcommand("schedules", "list built-in schedules or tabulate one");
    schedules_cmd->add_option("--tabulate", tabulate, "schedule to write as s,a,b CSV");
    schedules_cmd->add_option("--grid", tab_grid, "number of s points")->capture_default_str();
    schedules_cmd->add_option("--out", tab_out, "CSV path (default: standard output)");

    std::vector<std::string> argv_storage{"qanneal"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        const auto sub = app.get_subcommands();
        err << (sub.empty() ? app.help() : sub.front()->help());
        return kExitUsage;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(sim, sim_time, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(sw, times, jobs, out, err);
        if (spectrum_cmd->parsed()) return cmd_spectrum(sp, grid, schedule_out, out);
        if (convert_cmd->parsed()) return cmd_convert(from, to, value, n, conv_ascii, out);
        return cmd_schedules(tabulate, tab_grid, tab_out, out);
    } catch (const Error& e) {
        report(err, e.code(), e.what());
        return is_numeric_failure(e.code()) ? kExitFailure : kExitUsage;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace qanneal
