#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "texturekit/features.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------
struct RFParams {
  int n_trees = 100;
  int max_depth = 0;          // 0 = unlimited
  int min_samples_leaf = 2;
  int min_samples_split = 1;  // 1 = no constraint beyond leaf sizes
  bool bootstrap = true;
  bool class_weighted = false;  // optional inverse-frequency row weights
  std::uint64_t seed = 0;

  std::string config_tag() const;
};

// Flat node array; children index into the same vector. Leaves have
// feature = -1. n_train counts bootstrap rows (with multiplicity) reaching
// the node; TreeSHAP needs these.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::int64_t n_train = 0;
  double probability = 0.0;  // positive fraction at the node (leaf output)

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct ForestModel {
  RFParams params;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  std::string train_fingerprint;

  double predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

Tree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, const RFParams& params,
                const std::vector<double>& row_weights, std::uint64_t seed);

ForestModel train_forest(const FeatureTable& table, const RFParams& params);
ForestModel train_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                         const std::vector<std::string>& feature_names,
                         const RFParams& params);

// ---------------------------------------------------------------------------
// SVM (SMO dual solver + Platt probability calibration)
// ---------------------------------------------------------------------------
enum class SvmKernel { Linear, Rbf };

struct SVMParams {
  SvmKernel kernel = SvmKernel::Rbf;
  double c = 1.0;
  double gamma = 0.1;       // rbf only
  double tolerance = 1e-3;
  int max_iterations = 200;  // full passes over the data
  std::uint64_t seed = 0;

  std::string config_tag() const;
};

struct SVMModel {
  SVMParams params;
  std::vector<std::string> feature_names;
  Eigen::VectorXd column_mean, column_std;  // training standardization
  Eigen::MatrixXd support_vectors;          // standardized space
  Eigen::VectorXd dual_coef;                // alpha_i * y_i
  double bias = 0.0;
  double platt_a = 0.0, platt_b = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // dual objective after each pass
  std::string train_fingerprint;

  double decision_value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

SVMModel train_svm(const FeatureTable& table, const SVMParams& params);
SVMModel train_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                   const std::vector<std::string>& feature_names, const SVMParams& params);

// ---------------------------------------------------------------------------
// Common model handle + persistence (deterministic JSON, sorted keys,
// shortest round-trip numbers)
// ---------------------------------------------------------------------------
using Model = std::variant<ForestModel, SVMModel>;

double predict_proba(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x);
const std::vector<std::string>& model_feature_names(const Model& m);

void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace tk
