#include "texturekit/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "texturekit/csv.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/strings.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Pearson correlation
// ---------------------------------------------------------------------------

std::vector<std::string> CorrelationMatrix::invalid_columns() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < feature_names.size(); ++i)
    if (!valid[i]) out.push_back(feature_names[i]);
  return out;
}

CorrelationMatrix pearson_matrix(const FeatureTable& table) {
  if (table.rows() < 2) throw DataError("correlation needs at least two rows");
  const Eigen::Index n = table.rows(), f = table.cols();

  CorrelationMatrix m;
  m.feature_names = table.feature_names;
  m.valid.assign(static_cast<std::size_t>(f), true);
  m.r = Eigen::MatrixXd::Zero(f, f);

  Eigen::MatrixXd centered(n, f);
  Eigen::VectorXd sd(f);
  for (Eigen::Index j = 0; j < f; ++j) {
    bool flagged = false;
    for (Eigen::Index i = 0; i < n && !flagged; ++i)
      flagged = table.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const double mean = table.values.col(j).mean();
    centered.col(j) = table.values.col(j).array() - mean;
    const double var = centered.col(j).squaredNorm() / static_cast<double>(n);
    sd(j) = std::sqrt(var);
    if (flagged || var == 0.0) m.valid[static_cast<std::size_t>(j)] = false;
  }
  for (Eigen::Index a = 0; a < f; ++a) {
    if (!m.valid[static_cast<std::size_t>(a)]) continue;
    m.r(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < f; ++b) {
      if (!m.valid[static_cast<std::size_t>(b)]) continue;
      const double cov = centered.col(a).dot(centered.col(b)) / static_cast<double>(n);
      const double r = cov / (sd(a) * sd(b));
      m.r(a, b) = r;
      m.r(b, a) = r;
    }
  }
  return m;
}

void write_correlation_csv(const std::filesystem::path& path,
                           const std::filesystem::path& sidecar_path,
                           const CorrelationMatrix& m) {
  CsvTable csv;
  csv.header.push_back("feature");
  std::vector<std::size_t> valid_idx;
  for (std::size_t i = 0; i < m.feature_names.size(); ++i)
    if (m.valid[i]) {
      csv.header.push_back(m.feature_names[i]);
      valid_idx.push_back(i);
    }
  for (std::size_t a : valid_idx) {
    CsvRow row;
    row.push_back(m.feature_names[a]);
    for (std::size_t b : valid_idx)
      row.push_back(fmt_double(m.r(static_cast<Eigen::Index>(a),
                                   static_cast<Eigen::Index>(b))));
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);

  std::ofstream side(sidecar_path, std::ios::binary);
  if (!side) throw DataError("cannot write sidecar file: " + sidecar_path.string());
  for (const auto& name : m.invalid_columns()) side << name << '\n';
}

// ---------------------------------------------------------------------------
// TreeSHAP
// ---------------------------------------------------------------------------

namespace {

struct PathElement {
  int feature;
  double zero_frac;  // fraction of training paths that flow through when excluded
  double one_frac;   // 1 while the path matches x, 0 on the cold branch
  double pweight;
};

void extend_path(std::vector<PathElement>& path, double zero_frac, double one_frac,
                 int feature) {
  const int len = static_cast<int>(path.size());
  path.push_back({feature, zero_frac, one_frac, len == 0 ? 1.0 : 0.0});
  for (int i = len - 1; i >= 0; --i) {
    path[static_cast<std::size_t>(i + 1)].pweight +=
        one_frac * path[static_cast<std::size_t>(i)].pweight * (i + 1) /
        static_cast<double>(len + 1);
    path[static_cast<std::size_t>(i)].pweight =
        zero_frac * path[static_cast<std::size_t>(i)].pweight * (len - i) /
        static_cast<double>(len + 1);
  }
}

void unwind_path(std::vector<PathElement>& path, int index) {
  const int depth = static_cast<int>(path.size()) - 1;
  const double one_frac = path[static_cast<std::size_t>(index)].one_frac;
  const double zero_frac = path[static_cast<std::size_t>(index)].zero_frac;
  double next_one = path[static_cast<std::size_t>(depth)].pweight;
  for (int i = depth - 1; i >= 0; --i) {
    auto& el = path[static_cast<std::size_t>(i)];
    if (one_frac != 0.0) {
      const double tmp = el.pweight;
      el.pweight = next_one * (depth + 1) / static_cast<double>((i + 1) * one_frac);
      next_one = tmp - el.pweight * zero_frac * (depth - i) / static_cast<double>(depth + 1);
    } else {
      el.pweight = el.pweight * (depth + 1) / (zero_frac * static_cast<double>(depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[static_cast<std::size_t>(i)].feature = path[static_cast<std::size_t>(i + 1)].feature;
    path[static_cast<std::size_t>(i)].zero_frac =
        path[static_cast<std::size_t>(i + 1)].zero_frac;
    path[static_cast<std::size_t>(i)].one_frac =
        path[static_cast<std::size_t>(i + 1)].one_frac;
  }
  path.pop_back();
}

double unwound_sum(const std::vector<PathElement>& path, int index) {
  std::vector<PathElement> copy = path;
  unwind_path(copy, index);
  double total = 0;
  for (const auto& el : copy) total += el.pweight;
  return total;
}

void shap_recurse(const Tree& tree, int node_index, std::vector<PathElement> path,
                  double zero_frac, double one_frac, int parent_feature,
                  const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXd& phi) {
  extend_path(path, zero_frac, one_frac, parent_feature);
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
  if (node.is_leaf()) {
    for (int i = 1; i < static_cast<int>(path.size()); ++i) {
      const auto& el = path[static_cast<std::size_t>(i)];
      const double w = unwound_sum(path, i);
      phi(el.feature) += w * (el.one_frac - el.zero_frac) * node.probability;
    }
    return;
  }

  const bool go_left = x(node.feature) <= node.threshold;
  const int hot = go_left ? node.left : node.right;
  const int cold = go_left ? node.right : node.left;

  double incoming_zero = 1.0, incoming_one = 1.0;
  int repeat = -1;
  for (int i = 1; i < static_cast<int>(path.size()); ++i)
    if (path[static_cast<std::size_t>(i)].feature == node.feature) {
      repeat = i;
      break;
    }
  if (repeat >= 0) {
    incoming_zero = path[static_cast<std::size_t>(repeat)].zero_frac;
    incoming_one = path[static_cast<std::size_t>(repeat)].one_frac;
    unwind_path(path, repeat);
  }

  const double n = static_cast<double>(node.n_train);
  const double hot_frac =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(hot)].n_train) / n;
  const double cold_frac =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(cold)].n_train) / n;
  shap_recurse(tree, hot, path, incoming_zero * hot_frac, incoming_one, node.feature, x,
               phi);
  shap_recurse(tree, cold, path, incoming_zero * cold_frac, 0.0, node.feature, x, phi);
}

void require_counts(const ForestModel& m) {
  for (const auto& tree : m.trees)
    for (const auto& node : tree.nodes)
      if (node.n_train <= 0)
        throw DataError("model lacks per-node training counts required for TreeSHAP");
}

double tree_expected_value(const Tree& tree, int node_index) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
  if (node.is_leaf()) return node.probability;
  const double n = static_cast<double>(node.n_train);
  const double nl =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(node.left)].n_train);
  const double nr =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(node.right)].n_train);
  return (nl / n) * tree_expected_value(tree, node.left) +
         (nr / n) * tree_expected_value(tree, node.right);
}

}  // namespace

double forest_base_value(const ForestModel& m) {
  require_counts(m);
  double sum = 0;
  for (const auto& tree : m.trees) sum += tree_expected_value(tree, 0);
  return sum / static_cast<double>(m.trees.size());
}

Eigen::VectorXd treeshap(const ForestModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != static_cast<Eigen::Index>(m.feature_names.size()))
    throw DataError("feature count does not match model");
  require_counts(m);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(x.size());
  for (const auto& tree : m.trees) {
    if (tree.nodes.size() == 1) continue;  // constant tree contributes nothing
    shap_recurse(tree, 0, {}, 1.0, 1.0, -1, x, phi);
  }
  phi /= static_cast<double>(m.trees.size());
  return phi;
}

ShapRow treeshap_row(const ForestModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const std::string& sample_id) {
  ShapRow row;
  row.sample_id = sample_id;
  row.phi = treeshap(m, x);
  row.base_value = forest_base_value(m);
  row.prediction = m.predict_proba(x);
  return row;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

namespace {

double tree_coalition_value(const Tree& tree, int node_index, std::uint32_t mask,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
  if (node.is_leaf()) return node.probability;
  if (mask & (1u << node.feature)) {
    const int next = x(node.feature) <= node.threshold ? node.left : node.right;
    return tree_coalition_value(tree, next, mask, x);
  }
  const double n = static_cast<double>(node.n_train);
  const double nl =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(node.left)].n_train);
  const double nr =
      static_cast<double>(tree.nodes[static_cast<std::size_t>(node.right)].n_train);
  return (nl / n) * tree_coalition_value(tree, node.left, mask, x) +
         (nr / n) * tree_coalition_value(tree, node.right, mask, x);
}

}  // namespace

Eigen::VectorXd shap_bruteforce(const ForestModel& m,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  const int f = static_cast<int>(m.feature_names.size());
  if (f > 15) throw ConfigError("brute-force Shapley refuses more than 15 features");
  if (x.size() != f) throw DataError("feature count does not match model");
  require_counts(m);

  const std::uint32_t n_masks = 1u << f;
  std::vector<double> value(n_masks);
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    double sum = 0;
    for (const auto& tree : m.trees) sum += tree_coalition_value(tree, 0, mask, x);
    value[mask] = sum / static_cast<double>(m.trees.size());
  }

  std::vector<double> factorial(static_cast<std::size_t>(f) + 1, 1.0);
  for (int i = 1; i <= f; ++i)
    factorial[static_cast<std::size_t>(i)] = factorial[static_cast<std::size_t>(i - 1)] * i;

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(f);
  for (int i = 0; i < f; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      const double w = factorial[static_cast<std::size_t>(s)] *
                       factorial[static_cast<std::size_t>(f - s - 1)] /
                       factorial[static_cast<std::size_t>(f)];
      phi(i) += w * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Summary across a table
// ---------------------------------------------------------------------------

ShapSummary shap_summary(const ForestModel& m, const FeatureTable& table,
                         double top_share_threshold) {
  if (table.feature_names != m.feature_names)
    throw DataError("feature table columns do not match the model");
  ShapSummary s;
  s.base_value = forest_base_value(m);
  s.rows.resize(static_cast<std::size_t>(table.rows()));
  parallel_for(s.rows.size(), [&](std::size_t i) {
    s.rows[i] = treeshap_row(m, table.values.row(static_cast<Eigen::Index>(i)).transpose(),
                             table.sample_ids[i]);
  });

  const std::size_t f = table.feature_names.size();
  std::vector<double> mean_abs(f, 0.0);
  for (const auto& row : s.rows)
    for (std::size_t j = 0; j < f; ++j)
      mean_abs[j] += std::abs(row.phi(static_cast<Eigen::Index>(j)));
  for (double& v : mean_abs) v /= static_cast<double>(s.rows.size());

  std::vector<std::size_t> order(f);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mean_abs[a] > mean_abs[b];  // stable: ties keep column order
  });

  const double total = std::accumulate(mean_abs.begin(), mean_abs.end(), 0.0);
  double cum = 0;
  s.top_set_size = 0;
  for (std::size_t rank = 0; rank < f; ++rank) {
    ShapSummaryEntry e;
    e.feature = table.feature_names[order[rank]];
    e.mean_abs_phi = mean_abs[order[rank]];
    e.share = total > 0 ? e.mean_abs_phi / total : 0.0;
    cum += e.share;
    e.cum_share = cum;
    if (s.top_set_size == 0 && cum >= top_share_threshold)
      s.top_set_size = static_cast<int>(rank) + 1;
    s.ranking.push_back(std::move(e));
  }
  if (s.top_set_size == 0) s.top_set_size = static_cast<int>(f);
  for (int i = 0; i < s.top_set_size; ++i)
    s.ranking[static_cast<std::size_t>(i)].in_top_set = true;
  return s;
}

void write_shap_csv(const std::filesystem::path& path, const ShapSummary& s,
                    const FeatureTable& table) {
  CsvTable csv;
  csv.header = {"sample_id", "feature", "phi", "feature_value"};
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& row = s.rows[i];
    for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
      CsvRow out;
      out.push_back(row.sample_id);
      out.push_back(table.feature_names[j]);
      out.push_back(fmt_double(row.phi(static_cast<Eigen::Index>(j))));
      out.push_back(fmt_double(table.values(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j))));
      csv.rows.push_back(std::move(out));
    }
  }
  write_csv(path, csv);
}

void write_shap_summary_csv(const std::filesystem::path& path, const ShapSummary& s) {
  CsvTable csv;
  csv.header = {"rank", "feature", "mean_abs_phi", "share", "cum_share", "in_top_set"};
  int rank = 1;
  for (const auto& e : s.ranking) {
    CsvRow row;
    row.push_back(std::to_string(rank++));
    row.push_back(e.feature);
    row.push_back(fmt_double(e.mean_abs_phi));
    row.push_back(fmt_double(e.share));
    row.push_back(fmt_double(e.cum_share));
    row.push_back(e.in_top_set ? "1" : "0");
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

}  // namespace tk
