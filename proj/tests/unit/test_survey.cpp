#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "civicpb/errors.hpp"
#include "civicpb/survey.hpp"
#include "synthetic.hpp"

using namespace civicpb;

namespace {

SchemaConfig small_schema() {
  return SchemaConfig::from_json_text(R"({
    "neighborhoods": ["North", "South"],
    "sectors": ["parks", "parking", "greening"],
    "column_map": {"Quartier": "q19"}
  })");
}

std::string header() {
  std::string h;
  for (const auto& c : canonical_columns()) h += (h.empty() ? "" : ",") + c;
  return h + "\n";
}

// respondent, qol, eleven satisfaction codes, six participation codes, q19, q20, q21, q23-q25, q26
std::string row(const std::string& id, const std::string& sat_codes, const std::string& nb, const std::string& tags,
                const std::string& prev = "", const std::string& qol = "Good") {
  return id + "," + qol + "," + sat_codes + ",1,1,1,1,1,1," + nb + "," + (prev.empty() ? "0" : "1") + "," + prev +
         ",1,2,0," + tags + "\n";
}

const std::string kSat = "3,3,3,3,3,3,3,3,3,3,3";

}  // namespace

TEST_CASE("merge_qol_classes") {
  CHECK(merge_qol_classes("Bad") == 1);
  CHECK(merge_qol_classes("Insufficient") == 1);
  CHECK(merge_qol_classes("I don't know") == 1);
  CHECK(merge_qol_classes("Enough") == 2);
  CHECK(merge_qol_classes("Good") == 3);
  CHECK(merge_qol_classes("Very Good") == 4);
  CHECK_THROWS_AS(merge_qol_classes("Excellent"), DataError);
}

TEST_CASE("schema config validation") {
  CHECK_THROWS_AS(SchemaConfig::from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(SchemaConfig::from_json_text(R"({"sectors": []})"), ConfigError);
  CHECK_THROWS_AS(SchemaConfig::from_json_text(R"({"neighborhoods": ["a", "a"], "sectors": []})"), ConfigError);
  CHECK_THROWS_AS(SchemaConfig::from_json_text(
                      R"({"neighborhoods": ["a"], "sectors": ["x"], "sector_feature_map": {"x": "nonsense"}})"),
                  ConfigError);
  CHECK_THROWS_AS(SchemaConfig::from_json_file("/nonexistent/schema.json"), ConfigError);
}

TEST_CASE("load errors") {
  auto schema = small_schema();
  CHECK_THROWS_WITH_AS(parse_survey("", schema), "no data rows", DataError);
  CHECK_THROWS_WITH_AS(parse_survey(header(), schema), "no data rows", DataError);
  CHECK_THROWS_AS(parse_survey("respondent_id,q01\nR1,Good\n", schema), DataError);
  CHECK_THROWS_AS(load_survey("/nonexistent/survey.csv", schema), DataError);
}

TEST_CASE("row validation") {
  auto schema = small_schema();
  std::string text = header();
  text += row("R1", kSat, "North", "parks");
  text += row("R2", "3,3,3,3,3,7,3,3,3,3,3", "North", "parks");
  text += row("R3", kSat, "Atlantis", "parks");
  text += row("R4", kSat, "North", "moonbase");
  text += row("R1", kSat, "South", "parks");
  text += row("R6", kSat, "South", "parks", "South");
  auto res = parse_survey(text, schema);
  CHECK(res.report.accepted == 2);
  REQUIRE(res.report.rejected.size() == 4);
  CHECK(res.report.rejected[0].row == 2);
  CHECK(res.report.rejected[0].reason.find("code out of range {0..5}") != std::string::npos);
  CHECK(res.report.rejected[1].reason.find("unknown neighborhood label") != std::string::npos);
  CHECK(res.report.rejected[2].reason.find("unknown sector label") != std::string::npos);
  CHECK(res.report.rejected[3].reason.find("duplicate") != std::string::npos);
  REQUIRE(res.report.flagged.size() == 1);
  CHECK(res.report.flagged[0].respondent_id == "R6");
  CHECK(res.dataset.responses[1].self_relocation);
}

TEST_CASE("column_map renames source headers") {
  auto schema = small_schema();
  std::string text = header();
  text.replace(text.find("q19"), 3, "Quartier");
  text += row("R1", kSat, "South", "parks;greening");
  auto res = parse_survey(text, schema);
  REQUIRE(res.report.accepted == 1);
  CHECK(res.dataset.responses[0].neighborhood == "South");
  CHECK(res.dataset.responses[0].proposals == std::vector<std::string>{"parks", "greening"});
}

TEST_CASE("proposal counts") {
  auto schema = small_schema();
  std::string text = header();
  text += row("R1", kSat, "North", "parks;parks");
  text += row("R2", kSat, "North", "parks;parking");
  text += row("R3", kSat, "South", "greening;parking");
  text += row("R4", kSat, "South", "parking;greening");
  auto ds = parse_survey(text, schema).dataset;

  auto north = proposal_counts(ds, Axis::SectorsWithinNeighborhood, "North");
  REQUIRE(north.entries.size() == 3);
  CHECK(north.entries[0] == CountEntry{"parks", 3});
  CHECK(north.entries[1] == CountEntry{"parking", 1});
  CHECK(north.entries[2] == CountEntry{"greening", 0});

  // tie at 2: lexicographic
  auto south = proposal_counts(ds, Axis::SectorsWithinNeighborhood, "South");
  CHECK(south.entries[0] == CountEntry{"greening", 2});
  CHECK(south.entries[1] == CountEntry{"parking", 2});

  auto parking = proposal_counts(ds, Axis::NeighborhoodsWithinSector, "parking");
  CHECK(parking.entries[0] == CountEntry{"South", 2});
  CHECK(parking.entries[1] == CountEntry{"North", 1});

  CHECK_THROWS_AS(proposal_counts(ds, Axis::SectorsWithinNeighborhood, "Nowhere"), DataError);
}

TEST_CASE("proposal counts are additive over disjoint unions") {
  auto a = testing::synthetic_survey({.respondents = 200, .seed = 1});
  auto b = testing::synthetic_survey({.respondents = 150, .seed = 2});
  for (auto& r : b.responses) r.respondent_id = "B" + r.respondent_id;
  SurveyDataset u = a;
  u.responses.insert(u.responses.end(), b.responses.begin(), b.responses.end());
  for (auto axis : {Axis::SectorsWithinNeighborhood, Axis::NeighborhoodsWithinSector}) {
    const auto& scopes = axis == Axis::SectorsWithinNeighborhood ? u.neighborhood_labels : u.sector_labels;
    for (const auto& scope : scopes) {
      std::map<std::string, std::uint64_t> sum;
      for (const auto& e : proposal_counts(a, axis, scope).entries) sum[e.label] += e.count;
      for (const auto& e : proposal_counts(b, axis, scope).entries) sum[e.label] += e.count;
      for (const auto& e : proposal_counts(u, axis, scope).entries) CHECK(sum[e.label] == e.count);
    }
  }
}

TEST_CASE("mean satisfaction") {
  auto schema = small_schema();
  std::string text = header();
  text += row("R1", "4,0,0,3,3,3,3,3,3,3,3", "North", "");
  text += row("R2", "4,0,0,3,3,3,3,3,3,3,3", "North", "");
  text += row("R3", "0,0,0,3,3,3,3,3,3,3,3", "North", "");
  text += row("R4", "2,0,0,3,3,3,3,3,3,3,3", "North", "");
  text += row("R5", "5,0,5,3,3,3,3,3,3,3,3", "South", "");
  auto ds = parse_survey(text, schema).dataset;
  auto m = mean_satisfaction(ds);
  CHECK(*m.at(0, "North") == doctest::Approx(10.0 / 3.0));
  CHECK(m.support[0][m.neighborhood_index("North")] == 3);
  CHECK_FALSE(m.at(1, "North").has_value());
  CHECK(*m.at(2, "South") == 5.0);
  CHECK(m.support[2][m.neighborhood_index("South")] == 1);
}

TEST_CASE("mean satisfaction stays within the contributing codes") {
  auto ds = testing::synthetic_survey({.respondents = 400});
  auto m = mean_satisfaction(ds);
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    for (std::size_t j = 0; j < m.neighborhoods.size(); ++j) {
      int lo = 99, hi = -1;
      for (const auto& r : ds.responses) {
        if (r.neighborhood != m.neighborhoods[j] || !r.satisfaction[s] || *r.satisfaction[s] == 0) continue;
        lo = std::min(lo, *r.satisfaction[s]);
        hi = std::max(hi, *r.satisfaction[s]);
      }
      if (!m.mean[s][j]) {
        CHECK(hi == -1);
        continue;
      }
      CHECK(*m.mean[s][j] >= lo);
      CHECK(*m.mean[s][j] <= hi);
    }
  }
}

TEST_CASE("canonical round trip") {
  auto ds = testing::synthetic_survey({.respondents = 250});
  auto schema = testing::synthetic_schema();
  const auto text = survey_to_csv(ds);
  auto loaded = parse_survey(text, schema);
  CHECK(loaded.report.rejected.empty());
  CHECK(loaded.dataset == ds);
  CHECK(survey_to_csv(loaded.dataset) == text);

  const auto path = std::filesystem::temp_directory_path() / "civicpb_roundtrip.csv";
  {
    std::ofstream out(path, std::ios::binary);
    write_survey(out, ds);
  }
  CHECK(load_survey(path, schema).dataset == ds);
  std::filesystem::remove(path);
}
