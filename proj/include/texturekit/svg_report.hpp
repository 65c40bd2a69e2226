#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "texturekit/explain.hpp"

namespace tk {

struct SvgOptions {
  bool timestamp_comment = true;  // suppressed with --no-timestamp for byte-stable output
};

// Correlation heatmap: one colored cell per coefficient, blue (none) to
// yellow (strong), white for omitted columns skipped entirely.
void write_correlation_svg(const std::filesystem::path& path, const CorrelationMatrix& m,
                           const SvgOptions& opt);

// Strip plot of per-sample phi values for the top features, dots colored by
// the sample's feature-value percentile (blue low, red high).
void write_shap_strip_svg(const std::filesystem::path& path, const ShapSummary& summary,
                          const FeatureTable& table, int max_features,
                          const SvgOptions& opt);

// Per-class value ranges (min/quartiles/max) per feature.
void write_feature_ranges_csv(const std::filesystem::path& path, const FeatureTable& table);

}  // namespace tk
