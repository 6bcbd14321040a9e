#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "civicpb/report.hpp"
#include "synthetic.hpp"

using namespace civicpb;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path root;
  fs::path data;
  fs::path schema;

  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("civicpb_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
    data = root / "survey.csv";
    schema = root / "schema.json";
    std::ofstream(data, std::ios::binary) << survey_to_csv(testing::synthetic_survey({.respondents = 400}));
    std::ofstream(schema, std::ios::binary) << testing::synthetic_schema_json();
  }
  ~Workspace() { fs::remove_all(root); }

  RunConfig config(Command command, const std::string& out) const {
    RunConfig c;
    c.command = command;
    c.data = data;
    c.schema = schema;
    c.out = root / out;
    c.seed = 5;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("commands and exit codes") {
  Workspace ws("report_exit");

  auto ok = run(ws.config(Command::Ingest, "ingest"));
  CHECK(ok.exit_code == kExitOk);
  REQUIRE(ok.artifacts.size() == 1);
  auto j = read_json(ok.artifacts[0]);
  CHECK(j["audit"]["tool"] == "civicpb");
  CHECK(j["audit"]["seed"] == 5);
  CHECK(j["load_report"]["accepted"] == 400);

  auto missing = ws.config(Command::Ingest, "missing");
  missing.data = ws.root / "nope.csv";
  auto m = run(missing);
  CHECK(m.exit_code == kExitData);
  CHECK(m.error.find("dataset not found") != std::string::npos);
  auto err = read_json(missing.out / "error.json");
  CHECK(err["error"]["exit_code"] == kExitData);

  auto bad_schema = ws.config(Command::Ingest, "bad_schema");
  bad_schema.schema = ws.root / "nope.json";
  CHECK(run(bad_schema).exit_code == kExitConfig);

  auto bad_k = ws.config(Command::Legitimacy, "bad_k");
  bad_k.scope = "Altheim";
  bad_k.k = 99;
  CHECK(run(bad_k).exit_code == kExitConfig);

  auto bad_scope = ws.config(Command::Legitimacy, "bad_scope");
  bad_scope.scope = "Nowhere";
  CHECK(run(bad_scope).exit_code == kExitConfig);

  auto bad_model = ws.config(Command::Train, "bad_model");
  std::ofstream(ws.root / "model.json") << R"({"hidden_units": 8, "colour": "blue"})";
  bad_model.model_config = ws.root / "model.json";
  CHECK(run(bad_model).exit_code == kExitConfig);
}

TEST_CASE("legitimacy and relocation artifacts") {
  Workspace ws("report_artifacts");
  auto cfg = ws.config(Command::Legitimacy, "legit");
  cfg.format = Format::Csv;
  cfg.k = 2;
  auto out = run(cfg);
  REQUIRE(out.exit_code == kExitOk);
  auto j = read_json(cfg.out / "legitimacy_sectors.json");
  CHECK(j["scopes"].size() == 17);
  const auto csv = slurp(cfg.out / "legitimacy_sectors.csv");
  CHECK(csv.rfind("# civicpb ", 0) == 0);
  CHECK(csv.find("config_hash=" + j["audit"]["config_hash"].get<std::string>()) != std::string::npos);

  auto single = ws.config(Command::Legitimacy, "single");
  single.scope = "Altheim";
  REQUIRE(run(single).exit_code == kExitOk);
  auto s = read_json(single.out / "legitimacy_sectors.json");
  CHECK(s["scope"] == "Altheim");
  CHECK(s.contains("knee"));

  auto ok = ws.config(Command::OptimalK, "optk");
  ok.max_affordable_k = 2;
  REQUIRE(run(ok).exit_code == kExitOk);
  auto o = read_json(ok.out / "optimal_k_sectors.json");
  double prev = 1e300;
  for (const auto& e : o["scopes"]) {
    CHECK(e["decay_rate"].get<double>() <= prev);
    prev = e["decay_rate"].get<double>();
    CHECK(e["participatory_candidate"].get<bool>() == (e["optimal_k"].get<int>() > 2));
  }

  auto rel = ws.config(Command::Relocation, "reloc");
  REQUIRE(run(rel).exit_code == kExitOk);
  auto r = read_json(rel.out / "relocation.json");
  CHECK(r["relocation"]["pairs"].size() > 0);

  auto pair = ws.config(Command::Relocation, "pair");
  pair.from = "Altheim";
  pair.to = "Bachfeld";
  REQUIRE(run(pair).exit_code == kExitOk);
  pair.to = "Atlantis";
  CHECK(run(pair).exit_code == kExitConfig);
}

TEST_CASE("seeded runs are byte-identical") {
  Workspace ws("report_determinism");
  std::ofstream(ws.root / "model.json") << R"({"epochs": 5, "hidden_units": 8})";
  for (auto command : {Command::Legitimacy, Command::Relocation, Command::Train, Command::Significance}) {
    auto cfg = ws.config(command, "out");
    cfg.model_config = ws.root / "model.json";
    cfg.format = Format::Csv;
    auto first = run(cfg);
    REQUIRE(first.exit_code == kExitOk);
    std::vector<std::string> before;
    for (const auto& p : first.artifacts) before.push_back(slurp(p));
    auto second = run(cfg);
    REQUIRE(second.artifacts == first.artifacts);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(slurp(second.artifacts[i]) == before[i]);
  }
}

TEST_CASE("model file round trip") {
  Workspace ws("report_model");
  std::ofstream(ws.root / "model.json") << R"({"epochs": 3, "hidden_units": 6})";
  auto cfg = ws.config(Command::Train, "train");
  cfg.model_config = ws.root / "model.json";
  REQUIRE(run(cfg).exit_code == kExitOk);
  auto j = read_json(cfg.out / "model_SP_smote.json");
  auto model = model_from_json(j);
  CHECK(model.config.hidden_units == 6);
  CHECK(model.config.seed == 5);
  CHECK(model_to_json(model)["hidden_weights"] == j["hidden_weights"]);
  auto eval = read_json(cfg.out / "eval_SP_smote.json");
  CHECK(eval["eval"].contains("macro_auc"));
}
