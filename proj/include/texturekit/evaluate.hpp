#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "texturekit/augment.hpp"
#include "texturekit/features.hpp"
#include "texturekit/learners.hpp"
#include "texturekit/patch.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

// Mann-Whitney AUC: (correctly ordered pairs + half the ties) / (pos*neg).
// Throws DataError when only one class is present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ThresholdMetrics {
  double accuracy = 0, f1 = 0, sensitivity = 0, specificity = 0;
};

// Confusion counts at score >= threshold; zero-denominator cases are 0.
ThresholdMetrics threshold_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold = 0.5);

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct FoldPlan {
  int k = 5;
  std::map<std::string, int> fold_of_patient;

  std::vector<std::string> patients_in_fold(int fold) const;
};

// Patients shuffled by seed and dealt per class so fold class counts stay
// within one patient of even. A patient is positive when any of their
// samples is. All samples of a patient share a fold.
FoldPlan make_folds(const Dataset& d, int k, std::uint64_t seed);
FoldPlan make_folds(const std::vector<std::string>& patient_ids,
                    const std::vector<int>& patient_labels, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct MetricStat {
  double mean = 0, std = 0;
};

struct MetricSummary {
  std::string config_id;
  MetricStat auc, accuracy, f1, sensitivity, specificity;
  int cluster = -1;            // filled by cluster_configs / the cluster command
  int skipped_auc_folds = 0;   // folds whose test portion had one class
};

using ModelParams = std::variant<RFParams, SVMParams>;
std::string params_config_tag(const ModelParams& p);

struct FoldRecord {
  int fold = -1;
  std::vector<std::string> train_sample_ids;  // includes augmented samples
  std::vector<std::string> train_patient_ids;
  std::vector<std::string> test_sample_ids;   // held-out originals only
  std::vector<std::string> test_patient_ids;
  std::optional<double> auc;
  ThresholdMetrics thresholds;
};

struct CvOptions {
  int k = 5;
  std::uint64_t seed = 0;
  Prep prep = Prep::None;
  int resize_to = 0;  // 0 = keep loaded size
  std::optional<AugmentSpec> augment;  // training portions only
  GlcmConfig glcm;
  LbpConfig lbp;
  std::vector<std::string> feature_subset;  // empty = all features
};

struct CvResult {
  MetricSummary summary;
  std::vector<FoldRecord> folds;
};

// Dataset-level CV: per fold, augment only the training portion, fit VAR
// edges on it, extract features for both portions, train, then score the
// held-out originals.
CvResult cross_validate(const Dataset& d, const ModelParams& params, const CvOptions& opt);

// Table-level CV used by SBFS and the select stage: same folds, no
// augmentation or re-extraction, optional column subset.
MetricSummary cross_validate_table(const FeatureTable& table, const ModelParams& params,
                                   const FoldPlan& plan,
                                   const std::vector<std::string>& feature_subset);

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridSpec {
  std::vector<Prep> preps = {Prep::None, Prep::Normalize, Prep::Standardize, Prep::Both};
  std::vector<int> patch_sizes = {16, 32};
  std::vector<int> rf_trees = {50, 100, 150};
  std::vector<int> rf_depths = {0, 20};
  std::vector<int> rf_min_leaf = {2, 4};
  std::vector<int> rf_min_split = {1, 20, 40};
  std::vector<SVMParams> svm_configs;  // optional extra grid cells

  struct Cell {
    Prep prep;
    int patch_size;
    ModelParams params;
    std::string config_id;
  };
  std::vector<Cell> cells(std::uint64_t seed) const;
};

// One summary per cell, sorted by mean AUC descending (ties: accuracy, then
// config_id ascending).
std::vector<MetricSummary> grid_search(const Dataset& d, const GridSpec& grid,
                                       const CvOptions& base_options);

void rank_summaries(std::vector<MetricSummary>& summaries);

// ---------------------------------------------------------------------------
// k-means over metric vectors
// ---------------------------------------------------------------------------

struct ConfigCluster {
  std::vector<int> assignment;        // per summary, cluster id in [0,k)
  Eigen::MatrixXd centroids;          // k x 5, standardized metric space
  double inertia = 0;
  std::vector<double> inertia_trace;  // per Lloyd iteration of the kept restart
};

// k-means on the 5 metric means (each dimension standardized), k-means++
// seeding, 20 restarts, best inertia kept. Empty clusters are re-seeded to
// the farthest point during fitting.
ConfigCluster cluster_configs(const std::vector<MetricSummary>& summaries, int k,
                              std::uint64_t seed);

// Generic k-means used by cluster_configs; exposed for reuse/tests.
ConfigCluster kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                     int restarts = 20, int max_iter = 100);

// Metric summary CSV: `config_id,auc_mean,auc_std,acc_mean,acc_std,f1_mean,
// f1_std,sens_mean,sens_std,spec_mean,spec_std,cluster`.
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricSummary>& summaries);
std::vector<MetricSummary> read_metrics_csv(const std::filesystem::path& path);

}  // namespace tk
