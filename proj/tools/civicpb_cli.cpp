// civicpb command line: one subcommand per pipeline stage plus report-all.
#include <iostream>

#include <CLI11.hpp>

#include "civicpb/errors.hpp"
#include "civicpb/report.hpp"

namespace {

using civicpb::Command;
using civicpb::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg, std::string& data, std::string& schema, std::string& out,
                std::string& format) {
  sub->add_option("--data", data, "survey CSV")->envname("CIVICPB_DATA");
  sub->add_option("--schema", schema, "schema config JSON")->envname("CIVICPB_SCHEMA");
  sub->add_option("--out", out, "output directory")->envname("CIVICPB_OUT")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "master seed")->envname("CIVICPB_SEED")->capture_default_str();
  sub->add_option("--format", format, "json or csv")
      ->envname("CIVICPB_FORMAT")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Participatory budgeting survey analysis"};
  app.set_version_flag("--version", std::string(CIVICPB_VERSION));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string data, schema, out = "out", format = "json";
  std::string axis = "sectors", features = "SP", sampling = "smote", model_config;
  std::optional<std::string> scope, from, to;
  std::optional<std::size_t> k, max_affordable_k;

  auto* ingest = app.add_subcommand("ingest", "validate and normalize the survey");
  auto* legit = app.add_subcommand("legitimacy", "legitimacy curves per scope");
  auto* optk = app.add_subcommand("optimal-k", "knee points ranked by decay rate");
  auto* reloc = app.add_subcommand("relocation", "migration flows, RQI and PQI");
  auto* train = app.add_subcommand("train", "train and evaluate the QoL classifier");
  auto* signif = app.add_subcommand("significance", "per-feature likelihood-ratio p-values");
  auto* all = app.add_subcommand("report-all", "every table and plot-data file");

  for (auto* sub : {ingest, legit, optk, reloc, train, signif, all}) add_common(sub, cfg, data, schema, out, format);

  for (auto* sub : {legit, optk}) {
    sub->add_option("--axis", axis, "sectors or neighborhoods")
        ->check(CLI::IsMember({"sectors", "neighborhoods"}))
        ->capture_default_str();
    sub->add_option("--scope", scope, "single neighbourhood (axis sectors) or sector (axis neighborhoods)");
  }
  legit->add_option("--k", k, "also report L(k)");
  for (auto* sub : {optk, all}) {
    sub->add_option("--max-affordable-k", max_affordable_k, "flag scopes whose optimal k exceeds this");
  }
  reloc->add_option("--from", from, "origin neighbourhood");
  reloc->add_option("--to", to, "destination neighbourhood");
  for (auto* sub : {train, signif, all}) {
    sub->add_option("--features", features, "S, P or SP")
        ->check(CLI::IsMember({"S", "P", "SP", "S+P"}))
        ->capture_default_str();
  }
  for (auto* sub : {train, all}) {
    sub->add_option("--sampling", sampling, "none or smote")
        ->check(CLI::IsMember({"none", "smote"}))
        ->capture_default_str();
    sub->add_option("--config", model_config, "model hyperparameter JSON")->envname("CIVICPB_MODEL_CONFIG");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : civicpb::kExitConfig;
  }

  try {
    cfg.command = civicpb::parse_command(app.get_subcommands().front()->get_name());
    cfg.data = data;
    cfg.schema = schema;
    cfg.out = out;
    cfg.format = format == "csv" ? civicpb::Format::Csv : civicpb::Format::Json;
    cfg.axis = civicpb::parse_axis(axis);
    cfg.scope = scope;
    cfg.k = k;
    cfg.max_affordable_k = max_affordable_k;
    cfg.from = from;
    cfg.to = to;
    cfg.features = civicpb::parse_feature_set(features);
    cfg.sampling = civicpb::parse_sampling(sampling);
    if (!model_config.empty()) cfg.model_config = model_config;
  } catch (const std::exception& e) {
    std::cerr << "civicpb: " << e.what() << "\n";
    return civicpb::kExitConfig;
  }

  const auto outcome = civicpb::run(cfg);
  if (outcome.exit_code != civicpb::kExitOk) {
    std::cerr << "civicpb: " << outcome.error << "\n";
    return outcome.exit_code;
  }
  for (const auto& p : outcome.artifacts) std::cout << p.generic_string() << "\n";
  return 0;
}
