#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace civicpb {

// Questionnaire items with a fixed code range. `question` is the canonical
// column name (q02 ... q18).
struct CodedItem {
  std::string_view id;
  std::string_view question;
  std::string_view display;
  int max_code;
};

inline constexpr std::size_t kSatisfactionCount = 11;
inline constexpr std::size_t kParticipationCount = 6;

// Q2-Q12, codes 0..5 (0 = "I don't know").
inline constexpr std::array<CodedItem, kSatisfactionCount> kSatisfactionSectors{{
    {"social_meetings", "q02", "Social Meetings", 5},
    {"neighbourly_life", "q03", "Neighbourly Life", 5},
    {"shopping", "q04", "Shopping Facilities", 5},
    {"social_infrastructure", "q05", "Social Infrastructure", 5},
    {"housing_environment", "q06", "Housing Environment", 5},
    {"footpath_network", "q07", "Footpath Network", 5},
    {"bike_path_network", "q08", "Bike Path Network", 5},
    {"public_transport", "q09", "Public Transport", 5},
    {"recreational_areas", "q10", "Recreational Areas", 5},
    {"playing_facilities", "q11", "Playing Facilities", 5},
    {"security", "q12", "Security", 5},
}};

// Q13-Q18.
inline constexpr std::array<CodedItem, kParticipationCount> kParticipationItems{{
    {"involvement", "q13", "Involvement last month", 4},
    {"neighbour_contact", "q14", "Contact with neighbours", 4},
    {"wants_involvement", "q15", "Wants more involvement", 2},
    {"wants_contact", "q16", "Wants more neighbourly contact", 2},
    {"wants_sharing", "q17", "Wants sharing offers", 2},
    {"acquaintances", "q18", "People known in neighbourhood", 2},
}};

// Index into kSatisfactionSectors by id or display name; nullopt when unknown.
std::optional<std::size_t> satisfaction_sector_index(std::string_view name);

enum class QolAnswer { VeryGood, Good, Enough, Insufficient, Bad, DontKnow };

QolAnswer parse_qol_answer(std::string_view text);
std::string_view to_string(QolAnswer answer);

// Collapses the six raw answers into the four modelled classes:
// {Bad, I don't know, Insufficient} -> 1, Enough -> 2, Good -> 3, Very Good -> 4.
int merge_qol_classes(QolAnswer answer);
int merge_qol_classes(std::string_view raw);

struct SurveyResponse {
  std::string respondent_id;
  std::string neighborhood;
  std::optional<std::string> previous_neighborhood;
  QolAnswer qol_raw = QolAnswer::DontKnow;
  std::array<std::optional<int>, kSatisfactionCount> satisfaction{};
  std::array<std::optional<int>, kParticipationCount> participation{};
  std::optional<int> household;   // Q23, 1..4
  std::optional<int> education;   // Q24, 1..4
  std::optional<int> employment;  // Q25, 0..3
  std::vector<std::string> proposals;
  // previous_neighborhood == neighborhood
  bool self_relocation = false;

  bool relocated() const { return previous_neighborhood.has_value(); }
  bool operator==(const SurveyResponse&) const = default;
};

struct SchemaConfig {
  std::vector<std::string> neighborhoods;
  std::vector<std::string> sectors;
  // source header -> canonical column name
  std::map<std::string, std::string> column_map;
  char delimiter = ',';
  char proposal_separator = ';';
  // proposal sector -> satisfaction sector id, used by the combined sector table
  std::map<std::string, std::string> sector_feature_map;

  static SchemaConfig from_json_file(const std::filesystem::path& path);
  static SchemaConfig from_json_text(std::string_view text);
  bool operator==(const SchemaConfig&) const = default;
};

struct SurveyDataset {
  std::vector<SurveyResponse> responses;
  std::vector<std::string> neighborhood_labels;
  std::vector<std::string> sector_labels;

  bool operator==(const SurveyDataset&) const = default;
};

struct RejectedRow {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;
};

struct FlaggedRow {
  std::size_t row = 0;
  std::string respondent_id;
  std::string reason;
};

struct LoadReport {
  std::size_t accepted = 0;
  std::vector<RejectedRow> rejected;
  std::vector<FlaggedRow> flagged;
  std::vector<std::string> notes;
};

struct LoadResult {
  SurveyDataset dataset;
  LoadReport report;
};

// Canonical column order used by write_survey.
const std::vector<std::string>& canonical_columns();

// Throws DataError for a missing file, missing columns or an input without
// data rows. Individual invalid rows are rejected and listed in the report.
LoadResult load_survey(const std::filesystem::path& path, const SchemaConfig& schema);
LoadResult parse_survey(std::string_view text, const SchemaConfig& schema);

// Canonical serialization: header of canonical_columns(), comma separated,
// proposals joined with the schema's separator.
void write_survey(std::ostream& out, const SurveyDataset& dataset, char proposal_separator = ';');
std::string survey_to_csv(const SurveyDataset& dataset, char proposal_separator = ';');

enum class Axis { SectorsWithinNeighborhood, NeighborhoodsWithinSector };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

struct CountEntry {
  std::string label;
  std::uint64_t count = 0;
  bool operator==(const CountEntry&) const = default;
};

// Demand counts along one axis. Entries cover every configured label on the
// axis (zero counts included), sorted by count descending then label.
struct CountTable {
  Axis axis = Axis::SectorsWithinNeighborhood;
  std::string scope;
  std::vector<CountEntry> entries;

  std::uint64_t total() const;
  std::vector<double> counts() const;
  bool operator==(const CountTable&) const = default;
};

CountTable proposal_counts(const SurveyDataset& dataset, Axis axis, std::string_view scope);

// Counts across the whole dataset, one per proposal sector.
CountTable total_proposal_counts(const SurveyDataset& dataset);

// Mean satisfaction per sector and neighbourhood; code 0 is excluded from
// both the mean and the support, and empty cells stay absent.
struct SatisfactionMatrix {
  std::vector<std::string> neighborhoods;
  // [sector][neighbourhood]
  std::vector<std::vector<std::optional<double>>> mean;
  std::vector<std::vector<std::size_t>> support;

  std::size_t neighborhood_index(std::string_view label) const;
  std::optional<double> at(std::size_t sector, std::string_view neighborhood) const;
};

SatisfactionMatrix mean_satisfaction(const SurveyDataset& dataset);

}  // namespace civicpb
