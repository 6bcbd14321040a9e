#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "civicpb/qol_model.hpp"
#include "civicpb/serialize.hpp"

namespace civicpb {

enum class Command { Ingest, Legitimacy, OptimalK, Relocation, Train, Significance, ReportAll };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

enum class Format { Json, Csv };

// Everything a run depends on. Serialized into the audit header of every
// artifact, so any output can be regenerated from its own header.
struct RunConfig {
  Command command = Command::ReportAll;
  std::filesystem::path data;
  std::filesystem::path schema;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  Format format = Format::Json;

  // legitimacy / optimal-k
  Axis axis = Axis::SectorsWithinNeighborhood;
  std::optional<std::string> scope;
  std::optional<std::size_t> k;
  // Scopes whose optimal k exceeds this are flagged for participatory intervention.
  std::optional<std::size_t> max_affordable_k;

  // relocation
  std::optional<std::string> from;
  std::optional<std::string> to;

  // train / significance
  FeatureSet features = FeatureSet::SP;
  Sampling sampling = Sampling::Smote;
  std::optional<std::filesystem::path> model_config;
  double test_fraction = 0.2;
  std::size_t smote_neighbors = 5;
  // Resolved from model_config (file keys override these defaults).
  MlpConfig mlp;

  Json to_json() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCompute = 4;

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;
  std::string error;
};

// Audit header: tool, version, config hash (FNV-1a 64 of the serialized
// config), seed and the config itself.
Json audit_header(const RunConfig& config);

// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Executes the requested pipeline. Never throws: failures produce a nonzero
// exit code and, when the output directory is writable, an error.json record.
RunOutcome run(const RunConfig& config);

}  // namespace civicpb
