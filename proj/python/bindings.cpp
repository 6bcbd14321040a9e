// Python bindings. Structured reports cross the boundary as JSON text and are
// decoded in civicpb/__init__.py.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <optional>

#include "civicpb/errors.hpp"
#include "civicpb/legitimacy.hpp"
#include "civicpb/qol_model.hpp"
#include "civicpb/relocation.hpp"
#include "civicpb/report.hpp"
#include "civicpb/serialize.hpp"

namespace py = pybind11;
using namespace civicpb;

namespace {

FeatureMatrix to_features(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                          std::vector<std::string> columns = {}) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw DataError("X and labels differ in length");
  FeatureMatrix fm;
  fm.values = x;
  fm.labels = labels;
  if (columns.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) columns.push_back("x" + std::to_string(j));
  }
  if (columns.size() != static_cast<std::size_t>(x.cols())) throw DataError("columns do not match X");
  fm.columns = std::move(columns);
  for (Eigen::Index i = 0; i < x.rows(); ++i) fm.ids.push_back("row-" + std::to_string(i + 1));
  return fm;
}

}  // namespace

PYBIND11_MODULE(_civicpb, m) {
  m.doc() = "civicpb core";
  m.attr("__version__") = CIVICPB_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

  m.def("merge_qol_classes", py::overload_cast<std::string_view>(&merge_qol_classes), py::arg("answer"));

  m.def(
      "legitimacy", [](const std::vector<double>& counts, std::size_t k) { return legitimacy(counts, k); },
      py::arg("counts"), py::arg("k"));
  m.def(
      "legitimacy_curve_json",
      [](const std::vector<double>& counts) { return to_json(legitimacy_curve(counts)).dump(); }, py::arg("counts"));
  m.def(
      "knee_index", [](const std::vector<double>& values) { return knee_index(values); }, py::arg("values"));
  m.def(
      "optimal_k_json",
      [](const std::vector<double>& counts) { return to_json(optimal_k(legitimacy_curve(counts))).dump(); },
      py::arg("counts"));

  m.def("relative_quality_improvement", &relative_quality_improvement, py::arg("mean_from"), py::arg("mean_to"));
  m.def(
      "perceived_quality_improvement",
      [](double mean_from, double mean_to, double individual) -> std::optional<double> {
        if (std::abs(mean_to - mean_from) < kPqiEpsilon) return std::nullopt;
        return perceived_quality_improvement(mean_from, mean_to, individual);
      },
      py::arg("mean_from"), py::arg("mean_to"), py::arg("individual"));

  py::class_<SchemaConfig>(m, "SchemaConfig")
      .def_static("from_file", &SchemaConfig::from_json_file, py::arg("path"))
      .def_static("from_text", &SchemaConfig::from_json_text, py::arg("text"))
      .def_readonly("neighborhoods", &SchemaConfig::neighborhoods)
      .def_readonly("sectors", &SchemaConfig::sectors)
      .def_readonly("sector_feature_map", &SchemaConfig::sector_feature_map);

  py::class_<SurveyDataset>(m, "SurveyDataset")
      .def("__len__", [](const SurveyDataset& d) { return d.responses.size(); })
      .def_readonly("neighborhoods", &SurveyDataset::neighborhood_labels)
      .def_readonly("sectors", &SurveyDataset::sector_labels)
      .def("to_csv", [](const SurveyDataset& d) { return survey_to_csv(d); });

  m.def(
      "load_survey",
      [](const std::filesystem::path& path, const SchemaConfig& schema) {
        auto res = load_survey(path, schema);
        return py::make_tuple(std::move(res.dataset), to_json(res.report).dump());
      },
      py::arg("path"), py::arg("schema"));
  m.def(
      "parse_survey",
      [](std::string_view text, const SchemaConfig& schema) {
        auto res = parse_survey(text, schema);
        return py::make_tuple(std::move(res.dataset), to_json(res.report).dump());
      },
      py::arg("text"), py::arg("schema"));

  m.def(
      "proposal_counts",
      [](const SurveyDataset& d, std::string_view axis, std::string_view scope) {
        std::vector<std::pair<std::string, std::uint64_t>> out;
        for (const auto& e : proposal_counts(d, parse_axis(axis), scope).entries) out.emplace_back(e.label, e.count);
        return out;
      },
      py::arg("dataset"), py::arg("axis"), py::arg("scope"));
  m.def(
      "legitimacy_maps_json",
      [](const SurveyDataset& d, std::string_view axis) {
        Json out = Json::array();
        for (const auto& map : legitimacy_maps(d, parse_axis(axis))) out.push_back(to_json(map));
        return out.dump();
      },
      py::arg("dataset"), py::arg("axis"));
  m.def(
      "mean_satisfaction_json", [](const SurveyDataset& d) { return to_json(mean_satisfaction(d)).dump(); },
      py::arg("dataset"));
  m.def(
      "relocation_report_json", [](const SurveyDataset& d) { return to_json(relocation_report(d)).dump(); },
      py::arg("dataset"));

  m.def(
      "build_features",
      [](const SurveyDataset& d, std::string_view set) {
        auto fm = build_features(d, parse_feature_set(set));
        return py::make_tuple(fm.values, fm.labels, fm.columns);
      },
      py::arg("dataset"), py::arg("feature_set") = "SP");

  m.def(
      "smote",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
        auto out = smote_oversample(to_features(x, labels), k, seed);
        return py::make_tuple(out.values, out.labels);
      },
      py::arg("X"), py::arg("labels"), py::arg("k_neighbors") = 5, py::arg("seed") = 0);

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_readonly("final_loss", &TrainedModel::final_loss)
      .def_readonly("epoch_loss", &TrainedModel::epoch_loss)
      .def_readonly("feature_columns", &TrainedModel::feature_columns)
      .def("predict_proba", [](const TrainedModel& model, const Eigen::MatrixXd& x) { return predict_proba(model, x); })
      .def("to_json", [](const TrainedModel& model) { return model_to_json(model).dump(); })
      .def_static("from_json", [](std::string_view text) { return model_from_json(Json::parse(text)); });

  m.def(
      "train",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, std::string_view config_json, bool scale) {
        const auto cfg = mlp_config_from_json(Json::parse(config_json.empty() ? "{}" : config_json));
        auto fm = to_features(x, labels);
        if (!scale) return train(fm, cfg);
        auto scaler = MinMaxScaler::fit(fm.values);
        fm.values = scaler.transform(fm.values);
        return train(fm, cfg, scaler);
      },
      py::arg("X"), py::arg("labels"), py::arg("config_json") = "", py::arg("scale") = true);

  m.def(
      "evaluate_probabilities_json",
      [](const Eigen::MatrixXd& probs, const std::vector<int>& labels) {
        return to_json(evaluate_probabilities(probs, labels)).dump();
      },
      py::arg("probabilities"), py::arg("labels"));

  m.def(
      "feature_significance_json",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, std::vector<std::string> columns) {
        return to_json(feature_significance(to_features(x, labels, std::move(columns)))).dump();
      },
      py::arg("X"), py::arg("labels"), py::arg("columns") = std::vector<std::string>{});

  m.def(
      "run_experiment_json",
      [](const SurveyDataset& d, std::string_view features, std::string_view sampling, std::uint64_t seed,
         std::string_view config_json) {
        ExperimentConfig cfg;
        cfg.features = parse_feature_set(features);
        cfg.sampling = parse_sampling(sampling);
        cfg.seed = seed;
        cfg.mlp = mlp_config_from_json(Json::parse(config_json.empty() ? "{}" : config_json));
        const auto r = run_experiment(d, cfg);
        return to_json(r.eval).dump();
      },
      py::arg("dataset"), py::arg("features") = "SP", py::arg("sampling") = "smote", py::arg("seed") = 0,
      py::arg("config_json") = "");
}
