// Writes a synthetic survey and its schema config: civicpb_synth OUT_DIR [respondents] [seed]
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: civicpb_synth OUT_DIR [respondents] [seed]\n";
    return 2;
  }
  civicpb::testing::SyntheticOptions opts;
  if (argc > 2) opts.respondents = std::stoul(argv[2]);
  if (argc > 3) opts.seed = std::stoull(argv[3]);
  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out);
  std::ofstream(out / "survey.csv", std::ios::binary) << civicpb::survey_to_csv(civicpb::testing::synthetic_survey(opts));
  std::ofstream(out / "schema.json", std::ios::binary) << civicpb::testing::synthetic_schema_json();
  return 0;
}
