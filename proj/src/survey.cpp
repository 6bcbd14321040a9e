#include "civicpb/survey.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "civicpb/csv.hpp"
#include "civicpb/errors.hpp"

namespace civicpb {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

char single_char(const nlohmann::json& j, const char* key, char fallback) {
  if (!j.contains(key)) return fallback;
  auto s = j.at(key).get<std::string>();
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw ConfigError(std::string("schema_config: '") + key + "' must be a single character");
  return s.front();
}

void require_unique(const std::vector<std::string>& labels, const char* what) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigError(std::string("schema_config: empty label in '") + what + "'");
    if (!seen.insert(l).second) throw ConfigError(std::string("schema_config: duplicate label '") + l + "' in '" + what + "'");
  }
}

struct RowError {
  std::string reason;
};

std::optional<int> parse_code(std::string_view column, std::string_view text, int min_code, int max_code) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw RowError{std::string(column) + ": not an integer code '" + std::string(text) + "'"};
  }
  if (value < min_code || value > max_code) {
    throw RowError{std::string(column) + ": code out of range {" + std::to_string(min_code) + ".." +
                   std::to_string(max_code) + "}"};
  }
  return value;
}

std::optional<bool> parse_flag(std::string_view text) {
  auto t = lower(trim(text));
  if (t.empty()) return std::nullopt;
  if (t == "1" || t == "yes" || t == "true" || t == "y") return true;
  if (t == "0" || t == "no" || t == "false" || t == "n") return false;
  throw RowError{"q20: expected yes/no, got '" + std::string(trim(text)) + "'"};
}

}  // namespace

std::optional<std::size_t> satisfaction_sector_index(std::string_view name) {
  for (std::size_t i = 0; i < kSatisfactionSectors.size(); ++i) {
    const auto& s = kSatisfactionSectors[i];
    if (name == s.id || name == s.display || name == s.question) return i;
  }
  return std::nullopt;
}

QolAnswer parse_qol_answer(std::string_view text) {
  std::string t = lower(trim(text));
  // normalise typographic apostrophes
  for (std::string_view curly : {"\xE2\x80\x99", "\xE2\x80\x98"}) {
    for (auto pos = t.find(curly); pos != std::string::npos; pos = t.find(curly)) t.replace(pos, curly.size(), "'");
  }
  if (t == "very good") return QolAnswer::VeryGood;
  if (t == "good") return QolAnswer::Good;
  if (t == "enough") return QolAnswer::Enough;
  if (t == "insufficient") return QolAnswer::Insufficient;
  if (t == "bad") return QolAnswer::Bad;
  if (t == "i don't know" || t == "i dont know" || t == "don't know") return QolAnswer::DontKnow;
  throw DataError("unknown quality-of-life answer '" + std::string(trim(text)) + "'");
}

std::string_view to_string(QolAnswer answer) {
  switch (answer) {
    case QolAnswer::VeryGood: return "Very Good";
    case QolAnswer::Good: return "Good";
    case QolAnswer::Enough: return "Enough";
    case QolAnswer::Insufficient: return "Insufficient";
    case QolAnswer::Bad: return "Bad";
    case QolAnswer::DontKnow: return "I don't know";
  }
  return "";
}

int merge_qol_classes(QolAnswer answer) {
  switch (answer) {
    case QolAnswer::Bad:
    case QolAnswer::DontKnow:
    case QolAnswer::Insufficient: return 1;
    case QolAnswer::Enough: return 2;
    case QolAnswer::Good: return 3;
    case QolAnswer::VeryGood: return 4;
  }
  return 1;
}

int merge_qol_classes(std::string_view raw) { return merge_qol_classes(parse_qol_answer(raw)); }

SchemaConfig SchemaConfig::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("schema_config: invalid JSON: ") + e.what());
  }
  SchemaConfig cfg;
  try {
    cfg.neighborhoods = j.at("neighborhoods").get<std::vector<std::string>>();
    cfg.sectors = j.at("sectors").get<std::vector<std::string>>();
    if (j.contains("column_map")) cfg.column_map = j.at("column_map").get<std::map<std::string, std::string>>();
    if (j.contains("sector_feature_map")) {
      cfg.sector_feature_map = j.at("sector_feature_map").get<std::map<std::string, std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema_config: ") + e.what());
  }
  cfg.delimiter = single_char(j, "delimiter", ',');
  cfg.proposal_separator = single_char(j, "proposal_separator", ';');
  require_unique(cfg.neighborhoods, "neighborhoods");
  require_unique(cfg.sectors, "sectors");
  if (cfg.proposal_separator == cfg.delimiter) {
    throw ConfigError("schema_config: proposal_separator must differ from delimiter");
  }
  for (const auto& [sector, feature] : cfg.sector_feature_map) {
    if (std::find(cfg.sectors.begin(), cfg.sectors.end(), sector) == cfg.sectors.end()) {
      throw ConfigError("schema_config: sector_feature_map names unknown sector '" + sector + "'");
    }
    if (!satisfaction_sector_index(feature)) {
      throw ConfigError("schema_config: sector_feature_map names unknown satisfaction sector '" + feature + "'");
    }
  }
  return cfg;
}

SchemaConfig SchemaConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("schema_config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

const std::vector<std::string>& canonical_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c{"respondent_id", "q01"};
    for (const auto& s : kSatisfactionSectors) c.emplace_back(s.question);
    for (const auto& p : kParticipationItems) c.emplace_back(p.question);
    for (const char* q : {"q19", "q20", "q21", "q23", "q24", "q25", "q26"}) c.emplace_back(q);
    return c;
  }();
  return columns;
}

LoadResult parse_survey(std::string_view text, const SchemaConfig& schema) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  auto rows = csv::parse(text, schema.delimiter);
  if (rows.size() < 2) throw DataError("no data rows");

  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    std::string name(trim(rows[0][i]));
    if (auto it = schema.column_map.find(name); it != schema.column_map.end()) name = it->second;
    col.emplace(name, i);
  }

  std::vector<std::string> required{"q01"};
  for (const auto& s : kSatisfactionSectors) required.emplace_back(s.question);
  for (const auto& p : kParticipationItems) required.emplace_back(p.question);
  required.emplace_back("q19");
  required.emplace_back("q26");
  for (const auto& r : required) {
    if (!col.count(r)) throw DataError("missing column " + r);
  }

  LoadResult result;
  auto& report = result.report;
  auto& ds = result.dataset;
  ds.neighborhood_labels = schema.neighborhoods;
  ds.sector_labels = schema.sectors;
  std::set<std::string> neighborhoods(schema.neighborhoods.begin(), schema.neighborhoods.end());
  std::set<std::string> sectors(schema.sectors.begin(), schema.sectors.end());

  const bool has_id = col.count("respondent_id") > 0;
  const bool has_q20 = col.count("q20") > 0;
  const bool has_q21 = col.count("q21") > 0;
  if (!has_q21) report.notes.emplace_back("no q21 column: relocation analysis has no input");
  for (const char* q : {"q23", "q24", "q25"}) {
    if (!col.count(q)) report.notes.emplace_back(std::string("no ") + q + " column: demographic item left empty");
  }
  report.notes.emplace_back("satisfaction code 0 (I don't know) is treated as missing in mean satisfaction");

  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto field = [&](const std::string& name) -> std::string_view {
      auto it = col.find(name);
      if (it == col.end() || it->second >= row.size()) return {};
      return row[it->second];
    };
    try {
      if (row.size() != rows[0].size()) {
        throw RowError{"expected " + std::to_string(rows[0].size()) + " fields, got " + std::to_string(row.size())};
      }
      SurveyResponse resp;
      resp.respondent_id = has_id ? std::string(trim(field("respondent_id"))) : "row-" + std::to_string(r);
      if (resp.respondent_id.empty()) throw RowError{"empty respondent_id"};
      if (ids.count(resp.respondent_id)) throw RowError{"duplicate respondent_id '" + resp.respondent_id + "'"};

      try {
        resp.qol_raw = parse_qol_answer(field("q01"));
      } catch (const DataError& e) {
        throw RowError{std::string("q01: ") + e.what()};
      }
      for (std::size_t i = 0; i < kSatisfactionCount; ++i) {
        const auto& item = kSatisfactionSectors[i];
        resp.satisfaction[i] = parse_code(item.question, field(std::string(item.question)), 0, item.max_code);
      }
      for (std::size_t i = 0; i < kParticipationCount; ++i) {
        const auto& item = kParticipationItems[i];
        resp.participation[i] = parse_code(item.question, field(std::string(item.question)), 0, item.max_code);
      }

      resp.neighborhood = std::string(trim(field("q19")));
      if (resp.neighborhood.empty()) throw RowError{"q19: missing neighborhood"};
      if (!neighborhoods.count(resp.neighborhood)) {
        throw RowError{"q19: unknown neighborhood label '" + resp.neighborhood + "'"};
      }

      std::optional<bool> moved = has_q20 ? parse_flag(field("q20")) : std::nullopt;
      std::string previous(has_q21 ? trim(field("q21")) : std::string_view{});
      if (!previous.empty()) {
        if (moved == false) throw RowError{"q20 says no relocation but q21 names a neighborhood"};
        if (!neighborhoods.count(previous)) throw RowError{"q21: unknown neighborhood label '" + previous + "'"};
        resp.previous_neighborhood = previous;
        if (previous == resp.neighborhood) {
          resp.self_relocation = true;
          report.flagged.push_back({r, resp.respondent_id, "self-relocation: q21 equals q19"});
        }
      } else if (moved == true) {
        throw RowError{"q20 says relocated but q21 is empty"};
      }

      resp.household = parse_code("q23", field("q23"), 1, 4);
      resp.education = parse_code("q24", field("q24"), 1, 4);
      resp.employment = parse_code("q25", field("q25"), 0, 3);

      std::string_view tags = field("q26");
      std::size_t start = 0;
      while (start <= tags.size()) {
        auto end = tags.find(schema.proposal_separator, start);
        if (end == std::string_view::npos) end = tags.size();
        auto tag = trim(tags.substr(start, end - start));
        if (!tag.empty()) {
          if (!sectors.count(std::string(tag))) throw RowError{"q26: unknown sector label '" + std::string(tag) + "'"};
          resp.proposals.emplace_back(tag);
        }
        start = end + 1;
      }

      ids.insert(resp.respondent_id);
      ds.responses.push_back(std::move(resp));
    } catch (const RowError& e) {
      report.rejected.push_back({r, e.reason});
    }
  }
  report.accepted = ds.responses.size();
  return result;
}

LoadResult load_survey(const std::filesystem::path& path, const SchemaConfig& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_survey(ss.str(), schema);
}

void write_survey(std::ostream& out, const SurveyDataset& dataset, char proposal_separator) {
  csv::write_row(out, canonical_columns());
  auto code = [](const std::optional<int>& c) { return c ? std::to_string(*c) : std::string{}; };
  for (const auto& r : dataset.responses) {
    csv::Row row{r.respondent_id, std::string(to_string(r.qol_raw))};
    for (const auto& c : r.satisfaction) row.push_back(code(c));
    for (const auto& c : r.participation) row.push_back(code(c));
    row.push_back(r.neighborhood);
    row.push_back(r.relocated() ? "1" : "0");
    row.push_back(r.previous_neighborhood.value_or(""));
    row.push_back(code(r.household));
    row.push_back(code(r.education));
    row.push_back(code(r.employment));
    std::string tags;
    for (std::size_t i = 0; i < r.proposals.size(); ++i) {
      if (i) tags.push_back(proposal_separator);
      tags += r.proposals[i];
    }
    row.push_back(tags);
    csv::write_row(out, row);
  }
}

std::string survey_to_csv(const SurveyDataset& dataset, char proposal_separator) {
  std::ostringstream out;
  write_survey(out, dataset, proposal_separator);
  return out.str();
}

std::string_view to_string(Axis axis) {
  return axis == Axis::SectorsWithinNeighborhood ? "sectors" : "neighborhoods";
}

Axis parse_axis(std::string_view text) {
  if (text == "sectors") return Axis::SectorsWithinNeighborhood;
  if (text == "neighborhoods" || text == "neighbourhoods") return Axis::NeighborhoodsWithinSector;
  throw ConfigError("unknown axis '" + std::string(text) + "' (expected sectors|neighborhoods)");
}

std::uint64_t CountTable::total() const {
  std::uint64_t t = 0;
  for (const auto& e : entries) t += e.count;
  return t;
}

std::vector<double> CountTable::counts() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(static_cast<double>(e.count));
  return out;
}

namespace {

void sort_entries(std::vector<CountEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const CountEntry& a, const CountEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.label < b.label;
  });
}

}  // namespace

CountTable proposal_counts(const SurveyDataset& dataset, Axis axis, std::string_view scope) {
  const bool by_sector = axis == Axis::SectorsWithinNeighborhood;
  const auto& scopes = by_sector ? dataset.neighborhood_labels : dataset.sector_labels;
  if (std::find(scopes.begin(), scopes.end(), scope) == scopes.end()) {
    throw DataError(std::string("unknown ") + (by_sector ? "neighborhood" : "sector") + " scope '" +
                    std::string(scope) + "'");
  }
  const auto& labels = by_sector ? dataset.sector_labels : dataset.neighborhood_labels;
  std::map<std::string, std::uint64_t, std::less<>> tally;
  for (const auto& l : labels) tally[l] = 0;
  for (const auto& r : dataset.responses) {
    if (by_sector) {
      if (r.neighborhood != scope) continue;
      for (const auto& tag : r.proposals) ++tally[tag];
    } else {
      for (const auto& tag : r.proposals) {
        if (tag == scope) ++tally[r.neighborhood];
      }
    }
  }
  CountTable table{axis, std::string(scope), {}};
  for (auto& [label, count] : tally) table.entries.push_back({label, count});
  sort_entries(table.entries);
  return table;
}

CountTable total_proposal_counts(const SurveyDataset& dataset) {
  std::map<std::string, std::uint64_t, std::less<>> tally;
  for (const auto& l : dataset.sector_labels) tally[l] = 0;
  for (const auto& r : dataset.responses) {
    for (const auto& tag : r.proposals) ++tally[tag];
  }
  CountTable table{Axis::NeighborhoodsWithinSector, "all", {}};
  for (auto& [label, count] : tally) table.entries.push_back({label, count});
  sort_entries(table.entries);
  return table;
}

std::size_t SatisfactionMatrix::neighborhood_index(std::string_view label) const {
  auto it = std::find(neighborhoods.begin(), neighborhoods.end(), label);
  if (it == neighborhoods.end()) throw DataError("unknown neighborhood '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - neighborhoods.begin());
}

std::optional<double> SatisfactionMatrix::at(std::size_t sector, std::string_view neighborhood) const {
  return mean.at(sector)[neighborhood_index(neighborhood)];
}

SatisfactionMatrix mean_satisfaction(const SurveyDataset& dataset) {
  SatisfactionMatrix m;
  m.neighborhoods = dataset.neighborhood_labels;
  const auto n = m.neighborhoods.size();
  std::vector<std::vector<std::int64_t>> sums(kSatisfactionCount, std::vector<std::int64_t>(n, 0));
  m.support.assign(kSatisfactionCount, std::vector<std::size_t>(n, 0));
  m.mean.assign(kSatisfactionCount, std::vector<std::optional<double>>(n));
  for (const auto& r : dataset.responses) {
    auto j = m.neighborhood_index(r.neighborhood);
    for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
      const auto& code = r.satisfaction[s];
      if (!code || *code == 0) continue;
      sums[s][j] += *code;
      ++m.support[s][j];
    }
  }
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m.support[s][j] > 0) {
        m.mean[s][j] = static_cast<double>(sums[s][j]) / static_cast<double>(m.support[s][j]);
      }
    }
  }
  return m;
}

}  // namespace civicpb
