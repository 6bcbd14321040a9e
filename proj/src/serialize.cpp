#include "civicpb/serialize.hpp"

#include <cmath>
#include <sstream>

#include "civicpb/csv.hpp"
#include "civicpb/errors.hpp"

namespace civicpb {

namespace {

Json opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

Json matrix_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw DataError("model file: matrix data size mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data.at(static_cast<std::size_t>(i * cols + k)).get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string csv_text(const std::vector<csv::Row>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

}  // namespace

Json to_json(const LoadReport& report) {
  Json rejected = Json::array();
  for (const auto& r : report.rejected) rejected.push_back({{"row", r.row}, {"reason", r.reason}});
  Json flagged = Json::array();
  for (const auto& f : report.flagged) {
    flagged.push_back({{"row", f.row}, {"respondent_id", f.respondent_id}, {"reason", f.reason}});
  }
  return {{"accepted", report.accepted}, {"rejected", rejected}, {"flagged", flagged}, {"notes", report.notes}};
}

Json to_json(const CountTable& table) {
  Json entries = Json::array();
  for (const auto& e : table.entries) entries.push_back({{"label", e.label}, {"count", e.count}});
  return {{"axis", to_string(table.axis)}, {"scope", table.scope}, {"total", table.total()}, {"entries", entries}};
}

Json to_json(const LegitimacyCurve& curve) {
  Json points = Json::array();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    Json p{{"k", i + 1}};
    if (i < curve.labels.size()) p["label"] = curve.labels[i];
    p["L"] = num(curve.legitimacy[i]);
    p["share_pct"] = num(100.0 * curve.share[i]);
    p["gain"] = num(curve.gain[i]);
    points.push_back(std::move(p));
  }
  return {{"legend", {{"L", "sum of top-k counts / mean count"}, {"share_pct", "100 * top-k counts / total counts"}}},
          {"points", points}};
}

Json to_json(const KneeResult& knee) {
  return {{"optimal_k", knee.optimal_k}, {"method", knee.method}, {"decay_rate", num(knee.decay_rate)}};
}

Json to_json(const LegitimacyMap& map) {
  Json j{{"scope", map.scope}, {"axis", to_string(map.axis)}, {"status", map.has_demand ? "ok" : "no demand"}};
  j["counts"] = to_json(map.counts);
  j["curve"] = map.curve ? to_json(*map.curve) : Json(nullptr);
  j["knee"] = map.has_demand ? to_json(map.knee) : Json(nullptr);
  Json items = Json::array();
  for (const auto& it : map.items) {
    items.push_back({{"label", it.label},
                     {"count", it.count},
                     {"gain", num(it.gain)},
                     {"share_gain_pct", num(100.0 * it.share_gain)}});
  }
  j["map"] = items;
  return j;
}

Json to_json(const SatisfactionMatrix& sat) {
  Json sectors = Json::array();
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    Json cells = Json::array();
    for (std::size_t n = 0; n < sat.neighborhoods.size(); ++n) {
      if (!sat.mean[s][n]) continue;
      cells.push_back({{"neighborhood", sat.neighborhoods[n]}, {"mean", num(*sat.mean[s][n])}, {"support", sat.support[s][n]}});
    }
    sectors.push_back({{"sector", kSatisfactionSectors[s].id}, {"cells", cells}});
  }
  return {{"neighborhoods", sat.neighborhoods}, {"sectors", sectors}};
}

Json to_json(const MigrationMatrix& matrix) {
  Json flows = Json::array();
  for (const auto& f : matrix.flows) {
    flows.push_back({{"from", f.from}, {"to", f.to}, {"count", f.count}, {"normalized", num(f.normalized)}});
  }
  return {{"normalization", "max-min over observed flows"}, {"flows", flows}};
}

Json to_json(const RqiResult& rqi) {
  Json per = Json::object();
  for (auto s : rqi.included) per[std::string(kSatisfactionSectors[s].id)] = num(*rqi.per_sector[s]);
  Json excluded = Json::array();
  for (auto s : rqi.excluded) excluded.push_back(kSatisfactionSectors[s].id);
  return {{"from", rqi.from},      {"to", rqi.to},          {"overall", opt(rqi.overall)},
          {"k", rqi.included.size()}, {"per_sector", per}, {"excluded_sectors", excluded}};
}

Json to_json(const PairAssessment& pair) {
  Json pqi = Json::object();
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    const auto& p = pair.pqi[s];
    pqi[std::string(kSatisfactionSectors[s].id)] = {{"mean", opt(p.mean)}, {"count", p.count}, {"undefined", p.undefined}};
  }
  auto rqi = to_json(pair.rqi);
  Json excluded = rqi["excluded_sectors"];
  rqi.erase("excluded_sectors");
  return {{"from", pair.flow.from},
          {"to", pair.flow.to},
          {"flow", pair.flow.count},
          {"normalized", num(pair.flow.normalized)},
          {"rqi", rqi},
          {"pqi_summary", pqi},
          {"excluded_sectors", excluded}};
}

Json to_json(const RelocationReport& report) {
  Json pairs = Json::array();
  for (const auto& p : report.pairs) pairs.push_back(to_json(p));
  Json global = Json::object();
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    global[std::string(kSatisfactionSectors[s].id)] = opt(report.global_sector_rqi[s]);
  }
  return {{"migration", to_json(report.matrix)},
          {"pairs", pairs},
          {"global_sector_rqi", global},
          {"global_weighting", "relocation events"},
          {"undefined_pqi", report.undefined_pqi}};
}

Json to_json(const MlpConfig& c) {
  return {{"hidden_units", c.hidden_units}, {"classes", c.classes},     {"hidden_activation", "leaky_relu"},
          {"leaky_slope", c.leaky_slope},   {"dropout", c.dropout},     {"loss", "cross_entropy"},
          {"optimizer", "adam"},            {"learning_rate", c.learning_rate}, {"beta1", c.beta1},
          {"beta2", c.beta2},               {"epsilon", c.epsilon},     {"epochs", c.epochs},
          {"batch_size", c.batch_size},     {"bias_init", c.bias_init}, {"seed", c.seed}};
}

MlpConfig mlp_config_from_json(const Json& j, MlpConfig c) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "hidden_units") c.hidden_units = value.get<std::size_t>();
      else if (key == "classes") c.classes = value.get<std::size_t>();
      else if (key == "leaky_slope") c.leaky_slope = value.get<double>();
      else if (key == "dropout") c.dropout = value.get<double>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "beta1") c.beta1 = value.get<double>();
      else if (key == "beta2") c.beta2 = value.get<double>();
      else if (key == "epsilon") c.epsilon = value.get<double>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "bias_init") c.bias_init = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "hidden_activation" || key == "loss" || key == "optimizer") continue;
      else throw ConfigError("unknown model config key '" + key + "'");
    } catch (const Json::exception& e) {
      throw ConfigError("model config key '" + key + "': " + e.what());
    }
  }
  if (c.classes != static_cast<std::size_t>(kQolClasses)) throw ConfigError("model config: classes must be 4");
  return c;
}

Json model_to_json(const TrainedModel& model) {
  return {{"format", "civicpb-mlp"},
          {"format_version", kModelFormatVersion},
          {"input_dim", model.params.input_dim()},
          {"hidden_units", model.params.hidden_units()},
          {"classes", model.params.classes()},
          {"feature_columns", model.feature_columns},
          {"config", to_json(model.config)},
          {"seed", model.config.seed},
          {"final_loss", num(model.final_loss)},
          {"scaler", {{"min", vector_json(model.scaler.min)}, {"max", vector_json(model.scaler.max)}}},
          {"hidden_weights", matrix_json(model.params.hidden_weights)},
          {"hidden_bias", vector_json(model.params.hidden_bias)},
          {"output_weights", matrix_json(model.params.output_weights)},
          {"output_bias", vector_json(model.params.output_bias)}};
}

TrainedModel model_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "civicpb-mlp") throw DataError("not a civicpb model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion) throw DataError("unsupported model format version");
    TrainedModel m;
    m.config = mlp_config_from_json(j.at("config"));
    m.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    m.final_loss = j.at("final_loss").is_null() ? std::nan("") : j.at("final_loss").get<double>();
    m.scaler.min = vector_from_json(j.at("scaler").at("min"));
    m.scaler.max = vector_from_json(j.at("scaler").at("max"));
    m.params.hidden_weights = matrix_from_json(j.at("hidden_weights"));
    m.params.hidden_bias = vector_from_json(j.at("hidden_bias"));
    m.params.output_weights = matrix_from_json(j.at("output_weights"));
    m.params.output_bias = vector_from_json(j.at("output_bias"));
    const auto& p = m.params;
    if (p.input_dim() != j.at("input_dim").get<Eigen::Index>() || p.hidden_units() != j.at("hidden_units").get<Eigen::Index>() ||
        p.classes() != j.at("classes").get<Eigen::Index>() || p.hidden_bias.size() != p.hidden_units() ||
        p.output_weights.cols() != p.hidden_units() || p.output_bias.size() != p.classes() ||
        m.scaler.dim() != p.input_dim()) {
      throw DataError("model file: inconsistent shapes");
    }
    return m;
  } catch (const Json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

std::string legitimacy_csv(const std::vector<LegitimacyMap>& maps) {
  std::vector<csv::Row> rows{{"axis", "scope", "k", "label", "L", "share_pct", "gain", "optimal_k"}};
  for (const auto& m : maps) {
    if (!m.has_demand) continue;
    if (m.curve) {
      const auto& c = *m.curve;
      for (std::size_t i = 0; i < c.size(); ++i) {
        rows.push_back({std::string(to_string(m.axis)), m.scope, std::to_string(i + 1), c.labels.at(i),
                        fmt(c.legitimacy[i]), fmt(100.0 * c.share[i]), fmt(c.gain[i]), std::to_string(m.knee.optimal_k)});
      }
    } else {
      rows.push_back({std::string(to_string(m.axis)), m.scope, "1", m.counts.entries.front().label, "1", "100", "1", "1"});
    }
  }
  return csv_text(rows);
}

std::string satisfaction_csv(const SatisfactionMatrix& sat) {
  std::vector<csv::Row> rows{{"sector", "neighborhood", "mean", "support"}};
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    for (std::size_t n = 0; n < sat.neighborhoods.size(); ++n) {
      if (!sat.mean[s][n]) continue;
      rows.push_back({std::string(kSatisfactionSectors[s].id), sat.neighborhoods[n], fmt(*sat.mean[s][n]),
                      std::to_string(sat.support[s][n])});
    }
  }
  return csv_text(rows);
}

std::string migration_csv(const MigrationMatrix& matrix) {
  std::vector<csv::Row> rows{{"from", "to", "count", "normalized"}};
  for (const auto& f : matrix.flows) rows.push_back({f.from, f.to, std::to_string(f.count), fmt(f.normalized)});
  return csv_text(rows);
}

std::string rqi_pqi_csv(const RelocationReport& report) {
  std::vector<csv::Row> rows{{"rank", "from", "to", "flow", "sector", "rqi", "pqi_mean", "pqi_count", "pqi_undefined"}};
  std::size_t rank = 0;
  for (const auto& p : report.pairs) {
    ++rank;
    rows.push_back({std::to_string(rank), p.flow.from, p.flow.to, std::to_string(p.flow.count), "overall",
                    fmt(p.rqi.overall), "", "", ""});
    for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
      rows.push_back({std::to_string(rank), p.flow.from, p.flow.to, std::to_string(p.flow.count),
                      std::string(kSatisfactionSectors[s].id), fmt(p.rqi.per_sector[s]), fmt(p.pqi[s].mean),
                      std::to_string(p.pqi[s].count), std::to_string(p.pqi[s].undefined)});
    }
  }
  return csv_text(rows);
}

Json to_json(const EvalReport& report) {
  Json classes = Json::array();
  for (const auto& c : report.classes) {
    Json roc = Json::array();
    for (const auto& p : c.roc) roc.push_back({num(p.fpr), num(p.tpr)});
    classes.push_back({{"class", c.label},
                       {"support", c.support},
                       {"predicted", c.predicted},
                       {"recall", opt(c.recall)},
                       {"precision", opt(c.precision)},
                       {"accuracy", opt(c.accuracy)},
                       {"auc", opt(c.auc)},
                       {"roc", roc}});
  }
  Json confusion = Json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  return {{"samples", report.samples},
          {"accuracy", num(report.accuracy)},
          {"recall", opt(report.recall)},
          {"precision", opt(report.precision)},
          {"macro_auc", opt(report.macro_auc)},
          {"per_class_accuracy", "one-vs-rest"},
          {"classes", classes},
          {"confusion", confusion},
          {"notes", report.notes}};
}

Json to_json(const SignificanceReport& report) {
  Json features = Json::array();
  for (const auto& f : report.features) {
    Json e{{"feature", f.feature},  {"p_value", num(f.p_value)}, {"statistic", num(f.statistic)},
           {"dof", f.dof},          {"unstable", f.unstable}};
    if (!f.warning.empty()) e["warning"] = f.warning;
    features.push_back(std::move(e));
  }
  return {{"method", report.method},
          {"samples", report.samples},
          {"classes", report.classes},
          {"full_log_likelihood", num(report.full_log_likelihood)},
          {"features", features}};
}

Json to_json(const std::vector<CrosscheckRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"sector", r.sector},
                   {"proposals", r.proposals},
                   {"ranking", r.ranking ? Json(*r.ranking) : Json(nullptr)},
                   {"optimal_gain_pct", num(r.optimal_gain_pct)},
                   {"feature", r.feature ? Json(*r.feature) : Json(nullptr)},
                   {"p_value", opt(r.p_value)}});
  }
  return out;
}

std::string table3_csv(const std::vector<Table3Row>& rows) {
  std::vector<csv::Row> out{{"dataset", "feature_set", "class", "recall", "precision", "accuracy"}};
  for (const auto& r : rows) {
    const std::string fs(to_string(r.features));
    for (const auto& c : r.eval.classes) {
      out.push_back({r.dataset, fs, std::to_string(c.label), fmt(c.recall), fmt(c.precision), fmt(c.accuracy)});
    }
    out.push_back({r.dataset, fs, "overall", fmt(r.eval.recall), fmt(r.eval.precision), fmt(r.eval.accuracy)});
  }
  return csv_text(out);
}

std::string roc_csv(const EvalReport& report) {
  std::vector<csv::Row> out{{"class", "fpr", "tpr", "auc"}};
  for (const auto& c : report.classes) {
    for (const auto& p : c.roc) out.push_back({std::to_string(c.label), fmt(p.fpr), fmt(p.tpr), fmt(c.auc)});
  }
  return csv_text(out);
}

std::string table2_csv(const std::vector<CrosscheckRow>& rows) {
  std::vector<csv::Row> out{{"sector", "ranking", "proposals", "optimal_gain_pct", "feature", "p_value"}};
  for (const auto& r : rows) {
    out.push_back({r.sector, r.ranking ? std::to_string(*r.ranking) : "", std::to_string(r.proposals),
                   fmt(r.optimal_gain_pct), r.feature.value_or(""), fmt(r.p_value)});
  }
  return csv_text(out);
}

}  // namespace civicpb
