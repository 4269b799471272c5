#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qanneal/encoding.hpp"
#include "qanneal/hamiltonian.hpp"
#include "qanneal/simulate.hpp"

namespace qanneal {

// ---- BQPJSON ----------------------------------------------------------------

struct BqpjsonProblem {
    IsingModel model;
    /// Original variable id -> 1-based qubit index.
    std::map<long long, int> id_mapping;
    /// "spin" or "boolean"; boolean problems have been converted to spin form.
    std::string source_domain = "spin";
    /// Input metadata plus, for boolean inputs, "spin_conversion_offset".
    nlohmann::json metadata = nlohmann::json::object();
    /// Constant energy term: the file's offset plus any conversion constant.
    double constant = 0.0;
    /// Non-fatal findings, e.g. ignored solution sections.
    std::vector<std::string> warnings;
};

/// Throws Error(Parse) for malformed JSON, Error(Version) for a missing or non-1.x version,
/// Error(Validation) for structural problems.
BqpjsonProblem parse_bqpjson(std::string_view text);
BqpjsonProblem read_bqpjson(const std::filesystem::path& path);

/// Spin-domain document with identity ids 1..n, scale 1 and shortest round-trip coefficients.
std::string format_bqpjson(const IsingModel& model);
void write_bqpjson(const IsingModel& model, const std::filesystem::path& path);

// ---- result export ------------------------------------------------------------

inline constexpr int kExportSchemaVersion = 1;

enum class ExportFormat { Json, Csv };

/// Throws Error(InvalidInput) for anything but "json" or "csv".
ExportFormat parse_export_format(std::string_view name);

struct ExportContext {
    IsingModel model;
    std::string schedule_name;
    GlyphStyle glyphs = GlyphStyle::Unicode;
    /// Adds "generated_at" to JSON documents. CSV output never carries one.
    bool timestamp = true;
    /// Adds the full density matrix to single-result JSON.
    bool include_density = false;
};

std::string format_result_json(const SimulationResult& result, const ExportContext& ctx);
/// Columns tau,state_index,braket,energy,probability; states ordered by index.
std::string format_result_csv(const SimulationResult& result, const ExportContext& ctx);

std::string format_sweep_json(std::span<const SweepEntry> sweep, const ExportContext& ctx);
/// As the single-result CSV plus a status column ("ok" or the error code). A failed τ
/// contributes one row with empty state fields.
std::string format_sweep_csv(std::span<const SweepEntry> sweep, const ExportContext& ctx);

std::string format_spectrum_json(const SpectrumResult& spectrum, const ExportContext& ctx);
/// Columns s,level_index,eigenvalue.
std::string format_spectrum_csv(const SpectrumResult& spectrum);

void export_result(const SimulationResult& result, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx);
void export_result(std::span<const SweepEntry> sweep, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx);
void export_result(const SpectrumResult& spectrum, ExportFormat format, const std::filesystem::path& path,
                   const ExportContext& ctx);

/// Throws Error(Io) when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);
/// Throws Error(Io) when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qanneal
