#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "texturekit/patch.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Feature naming. 53 features per modality (4 first-order + 14 Haralick +
// 35 LBP), rendered "<modality_tag>_<feature_tag>" in a fixed canonical
// order: modalities t2-tra, adc, dwi_c-1400; tags mean, std, skewness,
// kurtosis, haralick01..14, lbp-01..35. 159 names total.
// ---------------------------------------------------------------------------
inline constexpr int kFeaturesPerModality = 53;
inline constexpr int kNumFeatures = kFeaturesPerModality * kNumModalities;

const std::vector<std::string>& canonical_feature_names();
std::string feature_name(Modality m, int feature_index_within_modality);

struct FirstOrder {
  double mean = 0, std = 0, skewness = 0, kurtosis = 0;  // kurtosis is excess
};

// Population moments; skewness/kurtosis are 0 by convention when std == 0.
FirstOrder first_order(const Grid& g);

// ---------------------------------------------------------------------------
// GLCM / Haralick
// ---------------------------------------------------------------------------
enum class GlcmDirection { Deg0 = 0, Deg45 = 1, Deg90 = 2, Deg135 = 3 };

struct GlcmConfig {
  int levels = 32;
  int distance = 1;
};

// Symmetric, normalized co-occurrence matrix. Intensities are quantized to
// `levels` uniform bins over the grid's empirical [min,max]; a constant grid
// puts every pixel in bin 0.
Eigen::MatrixXd compute_glcm(const Grid& g, int levels, int distance, GlcmDirection dir);

inline constexpr int kNumHaralick = 14;

// f1..f14 for a single GLCM. Undefined entries (zero marginal std in
// correlation, degenerate information measures, eigen failure in f14) come
// back disengaged rather than throwing.
std::array<std::optional<double>, kNumHaralick> haralick_single(const Eigen::MatrixXd& glcm);

// Per-direction values averaged over the given GLCMs; a feature missing in
// any direction is missing in the result.
std::array<std::optional<double>, kNumHaralick> haralick_features(
    const std::vector<Eigen::MatrixXd>& glcms);

// ---------------------------------------------------------------------------
// LBP: riu2 histograms at (P=8,R=1) and (P=16,R=2) plus a quantile histogram
// of the local variance VAR(8,1). Circular neighbors are sampled with
// bilinear interpolation; border pixels without a full neighborhood are
// skipped. Each sub-histogram sums to 1.
// ---------------------------------------------------------------------------
struct LbpConfig {
  int p1 = 8;
  double r1 = 1.0;
  int p2 = 16;
  double r2 = 2.0;
  int var_p = 8;
  double var_r = 1.0;
  int var_bins = 7;
  // Quantile edges for the VAR histogram (var_bins-1 ascending values).
  // Empty = edges from this grid's own VAR quantiles; the pipeline fits them
  // on training data and freezes them in the model artifact instead.
  std::vector<double> var_edges;

  int total_bins() const { return (p1 + 2) + (p2 + 2) + var_bins; }
};

// riu2 code histogram, (p+2) bins, normalized.
Eigen::VectorXd lbp_riu2_histogram(const Grid& g, int p, double r);

// VAR values for every pixel with a full neighborhood, row-major order.
std::vector<double> lbp_var_values(const Grid& g, int p, double r);

// Full 35-value LBP block for one grid.
Eigen::VectorXd lbp_features(const Grid& g, const LbpConfig& cfg);

// Linear-interpolation quantile of sorted values (like numpy's default).
double quantile_sorted(const std::vector<double>& sorted, double q);
std::vector<double> quantile_edges(std::vector<double> values, int bins);

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------
struct FeatureConfig {
  Prep prep = Prep::None;
  GlcmConfig glcm;
  LbpConfig lbp;
  // Per-modality VAR edges; when set they override lbp.var_edges.
  std::array<std::vector<double>, kNumModalities> var_edges_per_modality;

  bool has_fitted_edges() const {
    for (const auto& e : var_edges_per_modality)
      if (!e.empty()) return true;
    return false;
  }
};

struct FeatureVector {
  Eigen::VectorXd values{kNumFeatures};
  std::array<bool, kNumFeatures> missing{};
};

FeatureVector extract_features(const SampleTriple& s, const FeatureConfig& cfg);

struct FeatureTable {
  std::vector<std::string> feature_names;   // canonical order
  std::vector<std::string> sample_ids;
  std::vector<std::string> patient_ids;
  std::vector<int> labels;                  // 0/1
  Eigen::MatrixXd values;                   // rows x features, post-imputation
  std::vector<std::vector<bool>> missing;   // pre-imputation flags
  std::vector<std::string> imputed_columns; // columns imputed in any row

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  int column_index(const std::string& name) const;  // -1 when absent

  // Copy restricted to the named columns (order preserved as given).
  FeatureTable select_columns(const std::vector<std::string>& names) const;
};

// One row per sample; features missing in any row are imputed with 0 and the
// affected column names recorded in imputed_columns.
FeatureTable build_table(const Dataset& d, const FeatureConfig& cfg);

// Pools VAR values over all patches per modality and returns 7-quantile
// edges, for freezing into configs/models (training split only, to keep the
// test fold out of the estimate).
std::array<std::vector<double>, kNumModalities> fit_var_edges(const Dataset& d,
                                                              const FeatureConfig& cfg);

// CSV with header `sample_id,patient_id,label,<feature names>`; missing
// values as empty cells when `imputed` is false.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t,
                       bool imputed);
FeatureTable read_feature_csv(const std::filesystem::path& path);

}  // namespace tk
