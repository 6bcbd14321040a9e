#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "civicpb/survey.hpp"

namespace civicpb {

struct Flow {
  std::string from;
  std::string to;
  std::size_t count = 0;
  double normalized = 0.0;  // max-min over observed flows
};

// Observed relocations only; (x, x) pairs are excluded. Sorted by count
// descending, then (from, to).
struct MigrationMatrix {
  std::vector<Flow> flows;

  const Flow* find(std::string_view from, std::string_view to) const;
};

MigrationMatrix migration_matrix(const SurveyDataset& dataset);

// (to - from) / from for neighbourhood means of one sector.
double relative_quality_improvement(double mean_from, double mean_to);

// 1 - (mean_to - individual) / (mean_to - mean_from). The caller guarantees
// |mean_to - mean_from| >= kPqiEpsilon.
double perceived_quality_improvement(double mean_from, double mean_to, double individual);

inline constexpr double kPqiEpsilon = 1e-9;

struct RqiResult {
  std::string from;
  std::string to;
  std::array<std::optional<double>, kSatisfactionCount> per_sector{};
  std::optional<double> overall;  // mean over included sectors
  std::vector<std::size_t> included;
  std::vector<std::size_t> excluded;  // no support in x or y
};

// Sectors are indices into kSatisfactionSectors.
RqiResult rqi(const SatisfactionMatrix& sat, std::string_view from, std::string_view to,
              const std::vector<std::size_t>& sectors);
RqiResult rqi(const SatisfactionMatrix& sat, std::string_view from, std::string_view to);

enum class PqiStatus { Defined, NoRelocation, MissingCode, MissingMean, Singular };

std::string_view to_string(PqiStatus status);

struct PqiValue {
  PqiStatus status = PqiStatus::Defined;
  double value = 0.0;

  bool defined() const { return status == PqiStatus::Defined; }
};

PqiValue pqi(const SatisfactionMatrix& sat, const SurveyResponse& response, std::size_t sector);

struct PqiSummary {
  std::optional<double> mean;
  std::size_t count = 0;      // defined values
  std::size_t undefined = 0;  // singular, missing code or missing mean
};

struct PairAssessment {
  Flow flow;
  RqiResult rqi;
  std::array<PqiSummary, kSatisfactionCount> pqi{};
};

// RQI of the pair plus PQI summaries over respondents who moved from -> to.
// Unobserved pairs get a zero-count flow.
PairAssessment assess_pair(const SurveyDataset& dataset, const SatisfactionMatrix& sat, const Flow& flow);

struct RelocationReport {
  MigrationMatrix matrix;
  std::vector<PairAssessment> pairs;  // ranked by flow
  // Mean per-sector RQI over relocation events.
  std::array<std::optional<double>, kSatisfactionCount> global_sector_rqi{};
  std::size_t undefined_pqi = 0;
};

RelocationReport relocation_report(const SurveyDataset& dataset);

}  // namespace civicpb
