#pragma once

#include <string>
#include <vector>

#include "texturekit/features.hpp"
#include "texturekit/learners.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Pearson correlation over feature columns
// ---------------------------------------------------------------------------
struct CorrelationMatrix {
  std::vector<std::string> feature_names;  // all columns, valid or not
  std::vector<bool> valid;                 // false: zero variance or missing-flagged
  Eigen::MatrixXd r;                       // full size; invalid rows/cols are 0

  std::vector<std::string> invalid_columns() const;
};

CorrelationMatrix pearson_matrix(const FeatureTable& table);

// Square CSV restricted to valid columns plus a sidecar list of the omitted
// ones.
void write_correlation_csv(const std::filesystem::path& path,
                           const std::filesystem::path& sidecar_path,
                           const CorrelationMatrix& m);

// ---------------------------------------------------------------------------
// Shapley values for forest models (path-dependent conditioning by training
// fractions stored at every node)
// ---------------------------------------------------------------------------
struct ShapRow {
  std::string sample_id;
  double base_value = 0;
  double prediction = 0;
  Eigen::VectorXd phi;
};

// Expected model output over the training distribution (same per-node
// weighting TreeSHAP conditions on).
double forest_base_value(const ForestModel& m);

// Exact polynomial-time TreeSHAP. Throws DataError when any internal node
// lacks training sample counts.
Eigen::VectorXd treeshap(const ForestModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);
ShapRow treeshap_row(const ForestModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const std::string& sample_id);

// Literal Shapley definition by subset enumeration; refuses more than 15
// features. Used as the independent oracle for treeshap.
Eigen::VectorXd shap_bruteforce(const ForestModel& m,
                                const Eigen::Ref<const Eigen::VectorXd>& x);

// ---------------------------------------------------------------------------
// Per-feature attribution summary across a table
// ---------------------------------------------------------------------------
struct ShapSummaryEntry {
  std::string feature;
  double mean_abs_phi = 0;
  double share = 0;      // fraction of total mean |phi|
  double cum_share = 0;  // cumulative share in rank order
  bool in_top_set = false;
};

struct ShapSummary {
  std::vector<ShapRow> rows;               // one per sample
  std::vector<ShapSummaryEntry> ranking;   // mean |phi| descending
  double base_value = 0;
  int top_set_size = 0;  // smallest prefix whose cum_share reaches the threshold
};

ShapSummary shap_summary(const ForestModel& m, const FeatureTable& table,
                         double top_share_threshold = 0.7);

// `sample_id,feature,phi,feature_value` rows for every sample and feature.
void write_shap_csv(const std::filesystem::path& path, const ShapSummary& s,
                    const FeatureTable& table);
void write_shap_summary_csv(const std::filesystem::path& path, const ShapSummary& s);

}  // namespace tk
