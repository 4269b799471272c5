#include "qanneal/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"

namespace qanneal {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::Validation, message); }

double number_field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        invalid(where + ": '" + key + "' must be a number");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) invalid(where + ": '" + key + "' is not finite");
    return v;
}

long long id_field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        invalid(where + ": '" + key + "' must be an integer variable id");
    }
    return it->get<long long>();
}

void check_version(const json& doc) {
    const auto it = doc.find("version");
    if (it == doc.end() || !it->is_string()) {
        throw Error(ErrorCode::Version, "BQPJSON 'version' is missing or not a string");
    }
    const std::string v = it->get<std::string>();
    const std::string major = v.substr(0, v.find('.'));
    if (major != "1") {
        throw Error(ErrorCode::Version, "unsupported BQPJSON version '" + v + "' (expected 1.x)");
    }
}

std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json model_json(const IsingModel& model) {
    json terms = json::array();
    for (const auto& [key, coeff] : model.terms()) {
        terms.push_back({{"indices", key}, {"coeff", coeff}});
    }
    return {{"n_qubits", model.n_qubits()}, {"terms", std::move(terms)}};
}

json header(const ExportContext& ctx, std::string_view kind) {
    json doc;
    doc["schema_version"] = kExportSchemaVersion;
    doc["kind"] = kind;
    if (ctx.timestamp) doc["generated_at"] = timestamp_now();
    doc["model"] = model_json(ctx.model);
    doc["schedule"] = ctx.schedule_name;
    return doc;
}

// Energies are only meaningful when the export context matches the result's register.
RealVector energies_for(const ExportContext& ctx, int n_qubits) {
    if (ctx.model.n_qubits() != n_qubits) {
        throw Error(ErrorCode::Shape, "export model has " + std::to_string(ctx.model.n_qubits()) +
                                          " qubits but the result has " + std::to_string(n_qubits));
    }
    return ising_diagonal(ctx.model);
}

json probabilities_json(const SimulationResult& result, const RealVector& energy, GlyphStyle glyphs) {
    json out = json::array();
    for (std::size_t v = 0; v < result.probabilities.size(); ++v) {
        out.push_back({{"state_index", v},
                       {"braket", int_to_braket(v, result.n_qubits, glyphs)},
                       {"energy", energy[static_cast<Eigen::Index>(v)]},
                       {"probability", result.probabilities[v]}});
    }
    return out;
}

json result_body(const SimulationResult& result, const ExportContext& ctx) {
    const RealVector energy = energies_for(ctx, result.n_qubits);
    json body;
    body["tau"] = result.tau;
    body["order"] = result.order;
    body["steps_used"] = result.steps_used;
    body["propagators"] = result.propagators;
    body["method"] = result.method;
    json trace = json::array();
    for (const auto& r : result.convergence_trace) {
        trace.push_back({{"n_steps", r.n_steps}, {"e_max", r.e_max}, {"e_mean", r.e_mean}});
    }
    body["convergence_trace"] = std::move(trace);
    if (result.unitarity_defect) body["unitarity_defect"] = *result.unitarity_defect;
    if (result.trace_drift) body["trace_drift"] = *result.trace_drift;
    if (result.purity_drift) body["purity_drift"] = *result.purity_drift;
    body["probabilities"] = probabilities_json(result, energy, ctx.glyphs);
    return body;
}

void csv_rows(std::ostringstream& out, const SimulationResult& result, const RealVector& energy, GlyphStyle glyphs,
              bool with_status) {
    const std::string tau = format_double(result.tau);
    for (std::size_t v = 0; v < result.probabilities.size(); ++v) {
        out << tau << ',' << v << ',' << int_to_braket(v, result.n_qubits, glyphs) << ','
            << format_double(energy[static_cast<Eigen::Index>(v)]) << ',' << format_double(result.probabilities[v]);
        if (with_status) out << ",ok";
        out << '\n';
    }
}

}  // namespace

BqpjsonProblem parse_bqpjson(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("malformed BQPJSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::Parse, "BQPJSON document must be a JSON object");
    }
    check_version(doc);

    BqpjsonProblem problem;
    const auto domain_it = doc.find("variable_domain");
    if (domain_it == doc.end() || !domain_it->is_string()) invalid("'variable_domain' must be a string");
    problem.source_domain = domain_it->get<std::string>();
    if (problem.source_domain != "spin" && problem.source_domain != "boolean") {
        invalid("unrecognized variable_domain '" + problem.source_domain + "'");
    }

    const auto ids_it = doc.find("variable_ids");
    if (ids_it == doc.end() || !ids_it->is_array()) invalid("'variable_ids' must be an array");
    std::set<long long> ids;
    for (const auto& id : *ids_it) {
        if (!id.is_number_integer()) invalid("variable ids must be integers");
        if (!ids.insert(id.get<long long>()).second) {
            invalid("variable id " + std::to_string(id.get<long long>()) + " declared twice");
        }
    }
    if (ids.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw Error(ErrorCode::Size, std::to_string(ids.size()) + " variables exceed the " +
                                         std::to_string(kMaxQubits) + "-qubit limit");
    }
    int next = 1;
    for (long long id : ids) problem.id_mapping[id] = next++;

    auto qubit_of = [&](long long id, const std::string& where) {
        const auto it = problem.id_mapping.find(id);
        if (it == problem.id_mapping.end()) invalid(where + " references undeclared variable id " + std::to_string(id));
        return it->second;
    };

    double scale = 1.0;
    if (doc.contains("scale")) scale = number_field(doc, "scale", "document");
    double offset = 0.0;
    if (doc.contains("offset")) offset = number_field(doc, "offset", "document");

    std::map<int, double> linear;
    std::map<std::pair<int, int>, double> quadratic;
    if (const auto it = doc.find("linear_terms"); it != doc.end()) {
        if (!it->is_array()) invalid("'linear_terms' must be an array");
        for (const auto& term : *it) {
            if (!term.is_object()) invalid("linear term must be an object");
            const int q = qubit_of(id_field(term, "id", "linear term"), "linear term");
            if (!linear.emplace(q, number_field(term, "coeff", "linear term")).second) {
                invalid("duplicate linear term for variable id " + std::to_string(term["id"].get<long long>()));
            }
        }
    }
    if (const auto it = doc.find("quadratic_terms"); it != doc.end()) {
        if (!it->is_array()) invalid("'quadratic_terms' must be an array");
        for (const auto& term : *it) {
            if (!term.is_object()) invalid("quadratic term must be an object");
            const long long tail = id_field(term, "id_tail", "quadratic term");
            const long long head = id_field(term, "id_head", "quadratic term");
            int qi = qubit_of(tail, "quadratic term");
            int qj = qubit_of(head, "quadratic term");
            if (qi == qj) invalid("quadratic term (" + std::to_string(tail) + "," + std::to_string(head) + ") is diagonal");
            if (qi > qj) std::swap(qi, qj);
            if (!quadratic.emplace(std::pair{qi, qj}, number_field(term, "coeff", "quadratic term")).second) {
                invalid("duplicate quadratic pair (" + std::to_string(tail) + "," + std::to_string(head) + ")");
            }
        }
    }
    if (doc.contains("solutions")) {
        problem.warnings.emplace_back("ignoring 'solutions' section");
    }
    if (const auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
        problem.metadata = *it;
    }

    if (!ids.empty()) problem.model.set_n_qubits(static_cast<int>(ids.size()));
    if (problem.source_domain == "spin") {
        for (const auto& [q, c] : linear) problem.model.add_field(q, scale * c);
        for (const auto& [pair, c] : quadratic) problem.model.add_coupling(pair.first, pair.second, scale * c);
        problem.constant = scale * offset;
        return problem;
    }

    // x = (1 - s)/2:  c x_i = c/2 - (c/2) s_i ;  c x_i x_j = (c/4)(1 - s_i - s_j + s_i s_j)
    std::map<int, double> fields;
    double constant = 0.0;
    for (const auto& [q, c] : linear) {
        fields[q] -= scale * c / 2.0;
        constant += scale * c / 2.0;
    }
    for (const auto& [pair, c] : quadratic) {
        const double quarter = scale * c / 4.0;
        fields[pair.first] -= quarter;
        fields[pair.second] -= quarter;
        constant += quarter;
    }
    for (const auto& [q, h] : fields) problem.model.add_field(q, h);
    for (const auto& [pair, c] : quadratic) problem.model.add_coupling(pair.first, pair.second, scale * c / 4.0);
    problem.metadata["spin_conversion_offset"] = constant;
    problem.constant = scale * offset + constant;
    return problem;
}

BqpjsonProblem read_bqpjson(const std::filesystem::path& path) { return parse_bqpjson(read_text_file(path)); }

std::string format_bqpjson(const IsingModel& model) {
    json doc;
    doc["version"] = "1.0.0";
    doc["id"] = 0;
    json ids = json::array();
    for (int q = 1; q <= model.n_qubits(); ++q) ids.push_back(q);
    doc["variable_ids"] = std::move(ids);
    doc["variable_domain"] = "spin";
    doc["scale"] = 1.0;
    doc["offset"] = 0.0;
    json linear = json::array();
    json quadratic = json::array();
    for (const auto& [key, coeff] : model.terms()) {
        if (key.size() == 1) {
            linear.push_back({{"id", key[0]}, {"coeff", coeff}});
        } else {
            quadratic.push_back({{"id_tail", key[0]}, {"id_head", key[1]}, {"coeff", coeff}});
        }
    }
    doc["linear_terms"] = std::move(linear);
    doc["quadratic_terms"] = std::move(quadratic);
    doc["metadata"] = json::object();
    return doc.dump(2) + "\n";
}

void write_bqpjson(const IsingModel& model, const std::filesystem::path& path) {
    write_text_file(path, format_bqpjson(model));
}

ExportFormat parse_export_format(std::string_view name) {
    if (name == "json") return ExportFormat::Json;
    if (name == "csv") return ExportFormat::Csv;
    throw Error(ErrorCode::InvalidInput, "unknown output format '" + std::string(name) + "' (expected json or csv)");
}

std::string format_result_json(const SimulationResult& result, const ExportContext& ctx) {
    json doc = header(ctx, "simulation");
    doc.update(result_body(result, ctx));
    if (ctx.include_density) {
        json re = json::array();
        json im = json::array();
        for (Eigen::Index r = 0; r < result.rho.rows(); ++r) {
            json row_re = json::array();
            json row_im = json::array();
            for (Eigen::Index c = 0; c < result.rho.cols(); ++c) {
                row_re.push_back(result.rho(r, c).real());
                row_im.push_back(result.rho(r, c).imag());
            }
            re.push_back(std::move(row_re));
            im.push_back(std::move(row_im));
        }
        doc["density"] = {{"real", std::move(re)}, {"imag", std::move(im)}};
    }
    return doc.dump(2) + "\n";
}

std::string format_result_csv(const SimulationResult& result, const ExportContext& ctx) {
    const RealVector energy = energies_for(ctx, result.n_qubits);
    std::ostringstream out;
    out << "tau,state_index,braket,energy,probability\n";
    csv_rows(out, result, energy, ctx.glyphs, false);
    return out.str();
}

std::string format_sweep_json(std::span<const SweepEntry> sweep, const ExportContext& ctx) {
    json doc = header(ctx, "sweep");
    json records = json::array();
    for (const auto& entry : sweep) {
        json record;
        if (entry.result) {
            record = result_body(*entry.result, ctx);
            record["status"] = "ok";
        } else {
            record["tau"] = entry.tau;
            record["status"] = entry.error_code ? std::string(error_code_name(*entry.error_code)) : "error";
            record["error"] = entry.error;
        }
        records.push_back(std::move(record));
    }
    doc["records"] = std::move(records);
    return doc.dump(2) + "\n";
}

std::string format_sweep_csv(std::span<const SweepEntry> sweep, const ExportContext& ctx) {
    std::ostringstream out;
    out << "tau,state_index,braket,energy,probability,status\n";
    std::optional<RealVector> energy;
    for (const auto& entry : sweep) {
        if (entry.result) {
            if (!energy) energy = energies_for(ctx, entry.result->n_qubits);
            csv_rows(out, *entry.result, *energy, ctx.glyphs, true);
        } else {
            out << format_double(entry.tau) << ",,,,,"
                << (entry.error_code ? std::string(error_code_name(*entry.error_code)) : "error") << '\n';
        }
    }
    return out.str();
}

std::string format_spectrum_json(const SpectrumResult& spectrum, const ExportContext& ctx) {
    json doc = header(ctx, "spectrum");
    doc["s"] = spectrum.s_grid;
    doc["levels"] = spectrum.levels;
    return doc.dump(2) + "\n";
}

std::string format_spectrum_csv(const SpectrumResult& spectrum) {
    std::ostringstream out;
    out << "s,level_index,eigenvalue\n";
    for (std::size_t k = 0; k < spectrum.s_grid.size(); ++k) {
        const std::string s = format_double(spectrum.s_grid[k]);
        for (std::size_t l = 0; l < spectrum.levels[k].size(); ++l) {
            out << s << ',' << l << ',' << format_double(spectrum.levels[k][l]) << '\n';
        }
    }
    return out.str();
}

void export_result(const SimulationResult& result, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx) {
    write_text_file(path, format == ExportFormat::Json ? format_result_json(result, ctx) : format_result_csv(result, ctx));
}

void export_result(std::span<const SweepEntry> sweep, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx) {
    write_text_file(path, format == ExportFormat::Json ? format_sweep_json(sweep, ctx) : format_sweep_csv(sweep, ctx));
}

void export_result(const SpectrumResult& spectrum, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx) {
    write_text_file(path, format == ExportFormat::Json ? format_spectrum_json(spectrum, ctx)
                                                       : format_spectrum_csv(spectrum));
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace qanneal
