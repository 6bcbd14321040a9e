#include "civicpb/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "civicpb/csv.hpp"
#include "civicpb/errors.hpp"
#include "civicpb/legitimacy.hpp"
#include "civicpb/relocation.hpp"

#ifndef CIVICPB_VERSION
#define CIVICPB_VERSION "0.0.0"
#endif

namespace civicpb {

namespace fs = std::filesystem;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Ingest: return "ingest";
    case Command::Legitimacy: return "legitimacy";
    case Command::OptimalK: return "optimal-k";
    case Command::Relocation: return "relocation";
    case Command::Train: return "train";
    case Command::Significance: return "significance";
    case Command::ReportAll: return "report-all";
  }
  return "";
}

Command parse_command(std::string_view text) {
  for (auto c : {Command::Ingest, Command::Legitimacy, Command::OptimalK, Command::Relocation, Command::Train,
                 Command::Significance, Command::ReportAll}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown command '" + std::string(text) + "'");
}

Json RunConfig::to_json() const {
  Json j{{"command", to_string(command)},
         {"data", data.generic_string()},
         {"schema", schema.generic_string()},
         {"out", out.generic_string()},
         {"seed", seed},
         {"format", format == Format::Json ? "json" : "csv"}};
  switch (command) {
    case Command::Legitimacy:
    case Command::OptimalK:
      j["axis"] = to_string(axis);
      j["scope"] = scope ? Json(*scope) : Json(nullptr);
      j["k"] = k ? Json(*k) : Json(nullptr);
      j["max_affordable_k"] = max_affordable_k ? Json(*max_affordable_k) : Json(nullptr);
      break;
    case Command::Relocation:
      j["from"] = from ? Json(*from) : Json(nullptr);
      j["to"] = to ? Json(*to) : Json(nullptr);
      break;
    case Command::Train:
    case Command::Significance:
    case Command::ReportAll:
      j["features"] = civicpb::to_string(features);
      j["sampling"] = civicpb::to_string(sampling);
      j["model_config"] = model_config ? Json(model_config->generic_string()) : Json(nullptr);
      j["test_fraction"] = test_fraction;
      j["smote_neighbors"] = smote_neighbors;
      j["split"] = "stratified, oversampling on the training split only";
      j["mlp"] = civicpb::to_json(mlp);
      if (command == Command::ReportAll) {
        j["max_affordable_k"] = max_affordable_k ? Json(*max_affordable_k) : Json(nullptr);
      }
      break;
    case Command::Ingest: break;
  }
  return j;
}

namespace {

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

Json audit_header(const RunConfig& config) {
  const auto cfg = config.to_json();
  return {{"tool", "civicpb"},
          {"version", CIVICPB_VERSION},
          {"config_hash", fnv1a_hex(cfg.dump())},
          {"seed", config.seed},
          {"config", cfg}};
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

class Emitter {
 public:
  explicit Emitter(const RunConfig& config) : config_(config), audit_(audit_header(config)) {}

  void json(const std::string& name, Json body) {
    Json doc{{"audit", audit_}};
    for (auto& [k, v] : body.items()) doc[k] = std::move(v);
    write(name, doc.dump(2) + "\n");
  }

  void csv(const std::string& name, const std::string& body) {
    std::string header = "# civicpb " + audit_["version"].get<std::string>() + " command=" +
                         std::string(to_string(config_.command)) + " config_hash=" +
                         audit_["config_hash"].get<std::string>() + " seed=" + std::to_string(config_.seed) + "\n";
    header += "# config=" + audit_["config"].dump() + "\n";
    write(name, header + body);
  }

  std::vector<fs::path> artifacts;

 private:
  void write(const std::string& name, const std::string& content) {
    auto path = config_.out / name;
    write_atomic(path, content);
    artifacts.push_back(path);
  }

  const RunConfig& config_;
  Json audit_;
};

LoadResult load(const RunConfig& config) {
  if (config.data.empty() || !fs::exists(config.data)) {
    throw DataError("dataset not found" + (config.data.empty() ? std::string{} : ": " + config.data.generic_string()));
  }
  if (config.schema.empty()) throw ConfigError("schema_config path missing (--schema)");
  const auto schema = SchemaConfig::from_json_file(config.schema);
  return load_survey(config.data, schema);
}

SchemaConfig schema_of(const RunConfig& config) { return SchemaConfig::from_json_file(config.schema); }

Json respondents_per_neighborhood(const SurveyDataset& ds) {
  Json out = Json::array();
  for (const auto& n : ds.neighborhood_labels) {
    auto count = std::count_if(ds.responses.begin(), ds.responses.end(), [&](const auto& r) { return r.neighborhood == n; });
    out.push_back({{"neighborhood", n}, {"respondents", count}});
  }
  return out;
}

Json qol_distribution(const SurveyDataset& ds) {
  Json out = Json::object();
  for (auto a : {QolAnswer::VeryGood, QolAnswer::Good, QolAnswer::Enough, QolAnswer::Insufficient, QolAnswer::Bad,
                 QolAnswer::DontKnow}) {
    auto count = std::count_if(ds.responses.begin(), ds.responses.end(), [&](const auto& r) { return r.qol_raw == a; });
    out[std::string(to_string(a))] = count;
  }
  return out;
}

Json optimal_k_summary(const std::vector<LegitimacyMap>& maps, std::optional<std::size_t> max_affordable) {
  std::vector<const LegitimacyMap*> ranked;
  Json no_demand = Json::array();
  for (const auto& m : maps) {
    if (m.has_demand) {
      ranked.push_back(&m);
    } else {
      no_demand.push_back(m.scope);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const LegitimacyMap* a, const LegitimacyMap* b) {
    return a->knee.decay_rate > b->knee.decay_rate;
  });
  Json scopes = Json::array();
  for (const auto* m : ranked) {
    Json e{{"scope", m->scope},
           {"optimal_k", m->knee.optimal_k},
           {"n", m->counts.entries.size()},
           {"decay_rate", m->knee.decay_rate},
           {"method", m->knee.method}};
    e["participatory_candidate"] = max_affordable ? Json(m->knee.optimal_k > *max_affordable) : Json(nullptr);
    scopes.push_back(std::move(e));
  }
  return {{"order", "decay_rate descending"}, {"scopes", scopes}, {"no_demand", no_demand}};
}

std::vector<LegitimacyMap> scoped_maps(const SurveyDataset& ds, const RunConfig& config) {
  if (!config.scope) return legitimacy_maps(ds, config.axis);
  const auto& scopes = config.axis == Axis::SectorsWithinNeighborhood ? ds.neighborhood_labels : ds.sector_labels;
  if (std::find(scopes.begin(), scopes.end(), *config.scope) == scopes.end()) {
    throw ConfigError("unknown scope '" + *config.scope + "' for axis " + std::string(to_string(config.axis)));
  }
  return {legitimacy_map(proposal_counts(ds, config.axis, *config.scope))};
}

std::string axis_tag(Axis axis) { return std::string(to_string(axis)); }

void cmd_ingest(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  emit.json("ingest.json", {{"load_report", to_json(loaded.report)},
                            {"respondents_per_neighborhood", respondents_per_neighborhood(loaded.dataset)},
                            {"qol_distribution", qol_distribution(loaded.dataset)}});
  if (config.format == Format::Csv) {
    emit.csv("survey_canonical.csv", survey_to_csv(loaded.dataset, schema_of(config).proposal_separator));
  }
}

void cmd_legitimacy(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto& ds = loaded.dataset;
  const auto maps = scoped_maps(ds, config);
  auto at_k = [&](const LegitimacyMap& m) -> Json {
    if (!config.k) return nullptr;
    const auto n = m.counts.entries.size();
    if (*config.k < 1 || *config.k > n) {
      if (config.scope) throw ConfigError("--k " + std::to_string(*config.k) + " out of range [1, " + std::to_string(n) + "]");
      return nullptr;
    }
    if (!m.has_demand) return nullptr;
    return legitimacy(m.counts, *config.k);
  };

  Json body{{"axis", to_string(config.axis)}};
  if (config.scope) {
    auto j = to_json(maps.front());
    if (config.k) j["legitimacy_at_k"] = {{"k", *config.k}, {"L", at_k(maps.front())}};
    for (auto& [key, v] : j.items()) body[key] = v;
  } else {
    Json scopes = Json::array();
    for (const auto& m : maps) {
      auto j = to_json(m);
      if (config.k) j["legitimacy_at_k"] = {{"k", *config.k}, {"L", at_k(m)}};
      scopes.push_back(std::move(j));
    }
    body["scopes"] = std::move(scopes);
  }
  const auto tag = axis_tag(config.axis);
  emit.json("legitimacy_" + tag + ".json", body);
  if (config.format == Format::Csv) emit.csv("legitimacy_" + tag + ".csv", legitimacy_csv(maps));
}

void cmd_optimal_k(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto maps = scoped_maps(loaded.dataset, config);
  auto summary = optimal_k_summary(maps, config.max_affordable_k);
  summary["axis"] = to_string(config.axis);
  const auto tag = axis_tag(config.axis);
  emit.json("optimal_k_" + tag + ".json", summary);
  if (config.format == Format::Csv) {
    std::string body = "scope,optimal_k,n,decay_rate\n";
    std::ostringstream os;
    os.precision(17);
    for (const auto& s : summary["scopes"]) {
      os << csv::escape(s["scope"].get<std::string>()) << ',' << s["optimal_k"].get<std::size_t>() << ','
         << s["n"].get<std::size_t>() << ',' << s["decay_rate"].get<double>() << '\n';
    }
    emit.csv("optimal_k_" + tag + ".csv", body + os.str());
  }
}

void cmd_relocation(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto& ds = loaded.dataset;
  if (config.from.has_value() != config.to.has_value()) throw ConfigError("--from and --to must be given together");
  if (config.from) {
    for (const auto* label : {&*config.from, &*config.to}) {
      if (std::find(ds.neighborhood_labels.begin(), ds.neighborhood_labels.end(), *label) == ds.neighborhood_labels.end()) {
        throw ConfigError("unknown neighborhood '" + *label + "'");
      }
    }
  }
  const auto report = relocation_report(ds);
  const auto sat = mean_satisfaction(ds);
  if (config.from) {
    Flow flow{*config.from, *config.to, 0, 0.0};
    if (const auto* f = report.matrix.find(flow.from, flow.to)) flow = *f;
    const auto pa = assess_pair(ds, sat, flow);
    auto body = to_json(pa);
    if (pa.flow.count == 0) body["normalized"] = nullptr;
    emit.json("relocation_" + *config.from + "_" + *config.to + ".json", body);
    return;
  }
  emit.json("relocation.json", {{"relocation", to_json(report)}, {"mean_satisfaction", to_json(sat)}});
  if (config.format == Format::Csv) {
    emit.csv("migration.csv", migration_csv(report.matrix));
    emit.csv("mean_satisfaction.csv", satisfaction_csv(sat));
    emit.csv("rqi_pqi.csv", rqi_pqi_csv(report));
  }
}

ExperimentConfig experiment_config(const RunConfig& config, FeatureSet features, Sampling sampling) {
  ExperimentConfig ec;
  ec.features = features;
  ec.sampling = sampling;
  ec.mlp = config.mlp;
  ec.test_fraction = config.test_fraction;
  ec.smote_neighbors = config.smote_neighbors;
  ec.seed = config.seed;
  return ec;
}

Json experiment_json(const ExperimentResult& r, const ExperimentConfig& ec) {
  auto counts = [](const auto& c) { return Json(std::vector<std::size_t>(c.begin(), c.end())); };
  return {{"feature_set", to_string(ec.features)},
          {"sampling", to_string(ec.sampling)},
          {"dropped_rows", r.dropped_rows},
          {"test_rows", r.test_rows},
          {"train_class_counts", counts(r.train_counts)},
          {"train_class_counts_sampled", counts(r.train_counts_sampled)},
          {"final_loss", r.model.final_loss},
          {"eval", to_json(r.eval)}};
}

void cmd_train(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto ec = experiment_config(config, config.features, config.sampling);
  const auto result = run_experiment(loaded.dataset, ec);
  const std::string tag = std::string(to_string(config.features)) + "_" + std::string(to_string(config.sampling));
  emit.json("model_" + tag + ".json", model_to_json(result.model));
  emit.json("eval_" + tag + ".json", experiment_json(result, ec));
  if (config.format == Format::Csv) {
    emit.csv("table3_" + tag + ".csv", table3_csv({{std::string(to_string(config.sampling)), config.features, result.eval}}));
    emit.csv("roc_" + tag + ".csv", roc_csv(result.eval));
  }
}

void cmd_significance(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto report = feature_significance(build_features(loaded.dataset, config.features));
  emit.json("significance_" + std::string(to_string(config.features)) + ".json",
            {{"feature_set", to_string(config.features)}, {"significance", to_json(report)}});
}

void cmd_report_all(const RunConfig& config, Emitter& emit) {
  auto loaded = load(config);
  const auto& ds = loaded.dataset;
  const auto schema = schema_of(config);

  const auto sector_maps = legitimacy_maps(ds, Axis::SectorsWithinNeighborhood);
  const auto neighborhood_maps = legitimacy_maps(ds, Axis::NeighborhoodsWithinSector);
  auto maps_json = [](const std::vector<LegitimacyMap>& maps) {
    Json out = Json::array();
    for (const auto& m : maps) out.push_back(to_json(m));
    return out;
  };

  const auto relocation = relocation_report(ds);
  const auto sat = mean_satisfaction(ds);

  std::vector<Table3Row> table3;
  Json experiments = Json::array();
  Json roc = nullptr;
  for (auto sampling : {Sampling::None, Sampling::Smote}) {
    for (auto features : {FeatureSet::S, FeatureSet::P, FeatureSet::SP}) {
      const auto ec = experiment_config(config, features, sampling);
      const auto result = run_experiment(ds, ec);
      experiments.push_back(experiment_json(result, ec));
      table3.push_back({std::string(to_string(sampling)), features, result.eval});
      if (sampling == config.sampling && features == config.features) roc = to_json(result.eval);
    }
  }

  const auto significance = feature_significance(build_features(ds, config.features));
  const auto table2 = optimal_gain_crosscheck(ds, sector_maps, significance, schema.sector_feature_map);

  Json body;
  body["ingest"] = {{"load_report", to_json(loaded.report)},
                    {"respondents_per_neighborhood", respondents_per_neighborhood(ds)},
                    {"qol_distribution", qol_distribution(ds)}};
  body["legitimacy"] = {{"sectors", maps_json(sector_maps)}, {"neighborhoods", maps_json(neighborhood_maps)}};
  body["optimal_k"] = {{"sectors", optimal_k_summary(sector_maps, config.max_affordable_k)},
                       {"neighborhoods", optimal_k_summary(neighborhood_maps, config.max_affordable_k)}};
  body["relocation"] = to_json(relocation);
  body["mean_satisfaction"] = to_json(sat);
  body["classifier"] = {{"experiments", experiments}, {"roc", roc}};
  body["significance"] = to_json(significance);
  body["table2"] = to_json(table2);
  emit.json("report_all.json", body);

  if (config.format == Format::Csv) {
    emit.csv("legitimacy_sectors.csv", legitimacy_csv(sector_maps));
    emit.csv("legitimacy_neighborhoods.csv", legitimacy_csv(neighborhood_maps));
    emit.csv("migration.csv", migration_csv(relocation.matrix));
    emit.csv("mean_satisfaction.csv", satisfaction_csv(sat));
    emit.csv("rqi_pqi.csv", rqi_pqi_csv(relocation));
    emit.csv("table3.csv", table3_csv(table3));
    emit.csv("table2.csv", table2_csv(table2));
  }
}

MlpConfig resolve_model_config(RunConfig& config) {
  if (!config.model_config) return config.mlp;
  std::ifstream in(*config.model_config, std::ios::binary);
  if (!in) throw ConfigError("model config not found: " + config.model_config->string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("model config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  if (j.contains("test_fraction")) {
    config.test_fraction = j["test_fraction"].get<double>();
    j.erase("test_fraction");
  }
  if (j.contains("smote_neighbors")) {
    config.smote_neighbors = j["smote_neighbors"].get<std::size_t>();
    j.erase("smote_neighbors");
  }
  return mlp_config_from_json(j, config.mlp);
}

}  // namespace

RunOutcome run(const RunConfig& input) {
  RunOutcome outcome;
  RunConfig config = input;
  try {
    config.mlp = resolve_model_config(config);
    config.mlp.seed = config.seed;
    Emitter emit(config);
    switch (config.command) {
      case Command::Ingest: cmd_ingest(config, emit); break;
      case Command::Legitimacy: cmd_legitimacy(config, emit); break;
      case Command::OptimalK: cmd_optimal_k(config, emit); break;
      case Command::Relocation: cmd_relocation(config, emit); break;
      case Command::Train: cmd_train(config, emit); break;
      case Command::Significance: cmd_significance(config, emit); break;
      case Command::ReportAll: cmd_report_all(config, emit); break;
    }
    outcome.artifacts = std::move(emit.artifacts);
    return outcome;
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfig;
    outcome.error = e.what();
  } catch (const DataError& e) {
    outcome.exit_code = kExitData;
    outcome.error = e.what();
  } catch (const Json::exception& e) {
    outcome.exit_code = kExitConfig;
    outcome.error = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitCompute;
    outcome.error = e.what();
  }

  const char* kind = outcome.exit_code == kExitConfig ? "config" : outcome.exit_code == kExitData ? "data" : "computation";
  Json record{{"audit", audit_header(config)},
              {"error", {{"exit_code", outcome.exit_code}, {"kind", kind}, {"message", outcome.error}}}};
  try {
    auto path = config.out / "error.json";
    write_atomic(path, record.dump(2) + "\n");
    outcome.artifacts.push_back(path);
  } catch (const std::exception&) {
    // output directory unusable; the caller still has the record in `error`
  }
  return outcome;
}

}  // namespace civicpb
