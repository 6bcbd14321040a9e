#include "civicpb/relocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace civicpb {

const Flow* MigrationMatrix::find(std::string_view from, std::string_view to) const {
  for (const auto& f : flows) {
    if (f.from == from && f.to == to) return &f;
  }
  return nullptr;
}

MigrationMatrix migration_matrix(const SurveyDataset& dataset) {
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  for (const auto& r : dataset.responses) {
    if (!r.previous_neighborhood || *r.previous_neighborhood == r.neighborhood) continue;
    ++counts[{*r.previous_neighborhood, r.neighborhood}];
  }
  MigrationMatrix m;
  if (counts.empty()) return m;
  auto [lo, hi] = std::minmax_element(counts.begin(), counts.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  const double min_flow = static_cast<double>(lo->second);
  const double max_flow = static_cast<double>(hi->second);
  for (const auto& [pair, count] : counts) {
    double norm = max_flow > min_flow ? (static_cast<double>(count) - min_flow) / (max_flow - min_flow) : 1.0;
    m.flows.push_back({pair.first, pair.second, count, norm});
  }
  std::stable_sort(m.flows.begin(), m.flows.end(), [](const Flow& a, const Flow& b) { return a.count > b.count; });
  return m;
}

double relative_quality_improvement(double mean_from, double mean_to) { return (mean_to - mean_from) / mean_from; }

double perceived_quality_improvement(double mean_from, double mean_to, double individual) {
  return 1.0 - (mean_to - individual) / (mean_to - mean_from);
}

RqiResult rqi(const SatisfactionMatrix& sat, std::string_view from, std::string_view to,
              const std::vector<std::size_t>& sectors) {
  RqiResult r;
  r.from = std::string(from);
  r.to = std::string(to);
  const auto xi = sat.neighborhood_index(from);
  const auto yi = sat.neighborhood_index(to);
  double sum = 0.0;
  for (auto s : sectors) {
    const auto& mx = sat.mean.at(s)[xi];
    const auto& my = sat.mean.at(s)[yi];
    if (!mx || !my) {
      r.excluded.push_back(s);
      continue;
    }
    r.per_sector[s] = relative_quality_improvement(*mx, *my);
    sum += *r.per_sector[s];
    r.included.push_back(s);
  }
  if (!r.included.empty()) r.overall = sum / static_cast<double>(r.included.size());
  return r;
}

RqiResult rqi(const SatisfactionMatrix& sat, std::string_view from, std::string_view to) {
  std::vector<std::size_t> all(kSatisfactionCount);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return rqi(sat, from, to, all);
}

std::string_view to_string(PqiStatus status) {
  switch (status) {
    case PqiStatus::Defined: return "defined";
    case PqiStatus::NoRelocation: return "no relocation";
    case PqiStatus::MissingCode: return "missing or I-don't-know destination code";
    case PqiStatus::MissingMean: return "neighbourhood mean absent";
    case PqiStatus::Singular: return "undefined PQI: origin and destination means coincide";
  }
  return "";
}

PqiValue pqi(const SatisfactionMatrix& sat, const SurveyResponse& response, std::size_t sector) {
  if (!response.previous_neighborhood) return {PqiStatus::NoRelocation};
  const auto& code = response.satisfaction.at(sector);
  if (!code || *code == 0) return {PqiStatus::MissingCode};
  auto mx = sat.at(sector, *response.previous_neighborhood);
  auto my = sat.at(sector, response.neighborhood);
  if (!mx || !my) return {PqiStatus::MissingMean};
  if (std::abs(*my - *mx) < kPqiEpsilon) return {PqiStatus::Singular};
  return {PqiStatus::Defined, perceived_quality_improvement(*mx, *my, static_cast<double>(*code))};
}

PairAssessment assess_pair(const SurveyDataset& dataset, const SatisfactionMatrix& sat, const Flow& flow) {
  PairAssessment pa;
  pa.flow = flow;
  pa.rqi = rqi(sat, flow.from, flow.to);
  std::array<double, kSatisfactionCount> sums{};
  for (const auto& r : dataset.responses) {
    if (r.neighborhood != flow.to || r.previous_neighborhood != flow.from) continue;
    for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
      auto v = pqi(sat, r, s);
      if (v.defined()) {
        sums[s] += v.value;
        ++pa.pqi[s].count;
      } else {
        ++pa.pqi[s].undefined;
      }
    }
  }
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    if (pa.pqi[s].count) pa.pqi[s].mean = sums[s] / static_cast<double>(pa.pqi[s].count);
  }
  return pa;
}

RelocationReport relocation_report(const SurveyDataset& dataset) {
  RelocationReport report;
  report.matrix = migration_matrix(dataset);
  if (report.matrix.flows.empty()) return report;
  const auto sat = mean_satisfaction(dataset);

  std::array<double, kSatisfactionCount> weighted{};
  std::array<std::size_t, kSatisfactionCount> events{};
  for (const auto& flow : report.matrix.flows) {
    auto pa = assess_pair(dataset, sat, flow);
    for (auto s : pa.rqi.included) {
      weighted[s] += *pa.rqi.per_sector[s] * static_cast<double>(flow.count);
      events[s] += flow.count;
    }
    for (const auto& p : pa.pqi) report.undefined_pqi += p.undefined;
    report.pairs.push_back(std::move(pa));
  }
  for (std::size_t s = 0; s < kSatisfactionCount; ++s) {
    if (events[s]) report.global_sector_rqi[s] = weighted[s] / static_cast<double>(events[s]);
  }
  return report;
}

}  // namespace civicpb
