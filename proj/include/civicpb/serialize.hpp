#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "civicpb/crosscheck.hpp"
#include "civicpb/legitimacy.hpp"
#include "civicpb/qol_model.hpp"
#include "civicpb/relocation.hpp"
#include "civicpb/survey.hpp"

namespace civicpb {

using Json = nlohmann::ordered_json;

Json to_json(const LoadReport& report);
Json to_json(const CountTable& table);
Json to_json(const LegitimacyCurve& curve);
Json to_json(const KneeResult& knee);
Json to_json(const LegitimacyMap& map);
Json to_json(const SatisfactionMatrix& sat);
Json to_json(const MigrationMatrix& matrix);
Json to_json(const RqiResult& rqi);
Json to_json(const PairAssessment& pair);
Json to_json(const RelocationReport& report);
Json to_json(const MlpConfig& config);
Json to_json(const EvalReport& report);
Json to_json(const SignificanceReport& report);
Json to_json(const std::vector<CrosscheckRow>& rows);

// Accepts the keys written by to_json(MlpConfig); unknown keys are rejected.
MlpConfig mlp_config_from_json(const Json& j, MlpConfig base = {});

inline constexpr int kModelFormatVersion = 1;

// Versioned model file: shapes, row-major weight arrays, scaler, config, seed.
Json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);

// Plot-data tables. Each returns the CSV body (header row first).
std::string legitimacy_csv(const std::vector<LegitimacyMap>& maps);
std::string satisfaction_csv(const SatisfactionMatrix& sat);
std::string migration_csv(const MigrationMatrix& matrix);
std::string rqi_pqi_csv(const RelocationReport& report);

struct Table3Row {
  std::string dataset;  // sampling tag: "none" | "smote"
  FeatureSet features = FeatureSet::SP;
  EvalReport eval;
};

// Long layout: dataset, feature_set, class, recall, precision, accuracy.
std::string table3_csv(const std::vector<Table3Row>& rows);
std::string roc_csv(const EvalReport& report);
std::string table2_csv(const std::vector<CrosscheckRow>& rows);

}  // namespace civicpb
