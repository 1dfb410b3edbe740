#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "ratmax/classify.hpp"
#include "ratmax/core.hpp"

namespace ratmax {

enum class Delimiter { Auto, Tab, Comma, Whitespace };

Delimiter parse_delimiter(std::string_view name);

struct UcrLoadOptions {
  Delimiter delimiter = Delimiter::Auto;
  bool z_normalise = false; // per-row z-normalisation, off by default
};

/// Reads label-first delimited rows (UCR style). Integral numeric labels are
/// canonicalised ("1.0000000e+00" -> "1"). The label map is inferred from
/// the file; a file holding a single class maps it to class A.
///
/// Throws ParseError (with row/column) on malformed fields and DataError on
/// ragged rows or more than two classes.
LabeledDataset load_ucr(const std::filesystem::path& path, const UcrLoadOptions& opts = {});

inline constexpr int kModelSchemaVersion = 1;

struct TrainerInfo {
  std::string method;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<std::uint64_t> seed;
};

struct ModelMeta {
  std::optional<LabelMap> label_map;
  TrainerInfo trainer;
  double deviation = 0.0;
  nlohmann::json info = nlohmann::json::object(); // free-form provenance, timings
};

struct ModelFile {
  RationalActivation activation;
  AffineModel model;
  ModelMeta meta;
};

nlohmann::json model_to_json(const ModelFile& m);
/// Throws SchemaError on a version mismatch or a missing/mistyped field.
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const ModelFile& m);
ModelFile load_model(const std::filesystem::path& path);

nlohmann::json eval_report_to_json(const EvalReport& r, const LabelMap& map, bool with_timing = true);

/// Writes `j` with a trailing newline; throws Error if the file cannot be written.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace ratmax
