#pragma once

#include "svmif/benchmark.hpp"
#include "svmif/extraction.hpp"
#include "svmif/refine.hpp"
#include "svmif/svr.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace svmif {

inline constexpr int model_format_version = 1;

/// JSON documents. Every model file carries "format" and "version"; readers
/// throw FormatError on malformed text (with line and column), on an unknown
/// format and on a version other than model_format_version.
std::string serialize(const SvrModel& model);
std::string serialize(const FuzzyRuleBase& rb);
std::string serialize(const InterpretableModel& model);
std::string serialize(const ExtractionReport& report);
std::string serialize(const ExperimentReport& report);

struct ModelFile {
    std::variant<SvrModel, FuzzyRuleBase> model;
    std::optional<ExtractionReport> report; ///< present for extracted models
};

ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::string& path);

/// Evaluates whichever model the file holds.
double predict(const ModelFile& file, std::span<const double> x);

/// One file, one section per sub-configuration:
///   {"seed": 1, "mackey_glass": {...}, "svr": {...}, "extraction": {...}, "refine": {...}}
/// "mackey_glass" must give tau, a, b and c; everything else falls back to
/// the library defaults. Unknown keys and wrongly typed values throw
/// InputError naming the field. The seed is copied into every consumer.
struct RunConfig {
    std::uint64_t seed = 1;
    MackeyGlassConfig mackey_glass;
    SvrTrainConfig svr;
    ExtractionConfig extraction;
    RefineConfig refine;
};

/// `overrides` are "section.key=value" (or "seed=value") assignments applied
/// on top of the file; the value is read as JSON, falling back to a string.
RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides = {});
RunConfig load_run_config(const std::string& path, std::span<const std::string> overrides = {});

/// Delimited traces with a '#' header line.
void write_extraction_trace(std::ostream& out, const ExtractionReport& report); // epsilon,support_vectors,rules,merges,mse
void write_loss_trace(std::ostream& out, std::span<const double> mse);           // epoch,mse
void write_prediction_trace(std::ostream& out, std::span<const double> targets,
                            std::span<const double> predictions);                // t,target,prediction

std::string read_text_file(const std::string& path);
/// Writes through a temporary so a failed run never leaves a torn file.
void write_text_file(const std::string& path, std::string_view text);

} // namespace svmif
