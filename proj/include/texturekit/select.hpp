#pragma once

#include <map>
#include <string>
#include <vector>

#include "texturekit/evaluate.hpp"

namespace tk {

enum class SbfsAction { Remove, ConditionalAdd };

struct SbfsStep {
  SbfsAction action;
  std::string feature;
  int subset_size;    // size after the action
  double criterion;   // mean CV AUC of the resulting subset
};

struct SelectionTrace {
  std::vector<SbfsStep> steps;
  std::map<int, std::pair<std::vector<std::string>, double>> best_subset_per_size;
  std::vector<std::string> final_subset;
  double final_criterion = 0;
  std::size_t evaluations = 0;
};

struct SbfsOptions {
  int min_size = 1;
  int patience = 20;          // sizes without global improvement before stopping
  double readd_margin = 1e-6; // conditional re-add needs this much strict gain
  // Optional prefilter: drop features with |Pearson r| > threshold to a kept
  // representative before the search. Disabled when <= 0.
  double prefilter_r = 0.0;
};

// Sequential backward floating selection over the table's columns, scored by
// mean cross-validated AUC on the fixed fold plan. Criterion failures score
// the subset as 0. Ties on removal keep the candidate that removes the
// lexicographically smallest feature name. Returns the best subset over all
// visited sizes (ties prefer the smaller subset).
SelectionTrace sbfs(const FeatureTable& table, const ModelParams& params,
                    const FoldPlan& plan, const SbfsOptions& opt);

void write_selection_csv(const std::filesystem::path& path, const SelectionTrace& trace);
void write_subset_txt(const std::filesystem::path& path,
                      const std::vector<std::string>& subset);
std::vector<std::string> read_subset_txt(const std::filesystem::path& path);

}  // namespace tk
