#include "texturekit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "texturekit/errors.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/rng.hpp"
#include "texturekit/strings.hpp"

namespace tk {

using nlohmann::json;

std::string RFParams::config_tag() const {
  std::string tag = "rf-t" + std::to_string(n_trees) + "-d" + std::to_string(max_depth) +
                    "-l" + std::to_string(min_samples_leaf) + "-s" +
                    std::to_string(min_samples_split);
  if (!bootstrap) tag += "-nb";
  if (class_weighted) tag += "-w";
  return tag;
}

std::string SVMParams::config_tag() const {
  std::string tag = std::string("svm-") + (kernel == SvmKernel::Linear ? "linear" : "rbf") +
                    "-c" + fmt_double(c);
  if (kernel == SvmKernel::Rbf) tag += "-g" + fmt_double(gamma);
  return tag;
}

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const std::vector<int>& y;
  const std::vector<double>& weights;  // per original row
  const RFParams& params;
  Rng& rng;
  std::vector<TreeNode> nodes;
  int mtry;

  TreeBuilder(const Eigen::MatrixXd& x_, const std::vector<int>& y_,
              const std::vector<double>& w_, const RFParams& p_, Rng& rng_)
      : x(x_), y(y_), weights(w_), params(p_), rng(rng_) {
    mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
  }

  static double gini(double w_pos, double w_total) {
    if (w_total <= 0.0) return 0.0;
    const double p = w_pos / w_total;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
  }

  std::vector<int> sample_features() {
    const int f = static_cast<int>(x.cols());
    const int k = std::min(mtry, f);
    std::vector<int> all(f);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(f - i)));
      std::swap(all[i], all[j]);
    }
    std::vector<int> out(all.begin(), all.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  }

  // rows: indices into x (bootstrap rows appear repeatedly)
  int build(std::vector<int>& rows, int depth) {
    double w_pos = 0, w_total = 0;
    std::int64_t n_pos = 0;
    for (int r : rows) {
      const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(r)];
      w_total += w;
      if (y[static_cast<std::size_t>(r)]) {
        w_pos += w;
        ++n_pos;
      }
    }
    const std::int64_t n = static_cast<std::int64_t>(rows.size());

    TreeNode node;
    node.n_train = n;
    node.probability = w_total > 0.0 ? w_pos / w_total : 0.0;

    const bool pure = n_pos == 0 || n_pos == n;
    const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
    const std::int64_t min_rows =
        std::max<std::int64_t>(params.min_samples_split, 2LL * params.min_samples_leaf);
    if (pure || !depth_ok || n < min_rows) {
      nodes.push_back(node);
      return static_cast<int>(nodes.size()) - 1;
    }

    const double parent_impurity = gini(w_pos, w_total);

    // best split: minimize weighted child Gini; first candidate wins ties,
    // and candidates are scanned by ascending (feature, threshold)
    int best_feature = -1;
    double best_threshold = 0, best_quality = 0;
    const auto candidates = sample_features();
    std::vector<std::pair<double, int>> vals(rows.size());  // (value, row)
    for (int feature : candidates) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        vals[i] = {x(rows[i], feature), rows[i]};
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_pos = 0, left_total = 0;
      std::int64_t left_n = 0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const int r = vals[i].second;
        const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(r)];
        left_total += w;
        if (y[static_cast<std::size_t>(r)]) left_pos += w;
        ++left_n;
        if (vals[i].first == vals[i + 1].first) continue;  // not a boundary
        const std::int64_t right_n = n - left_n;
        if (left_n < params.min_samples_leaf || right_n < params.min_samples_leaf)
          continue;
        const double right_total = w_total - left_total;
        const double right_pos = w_pos - left_pos;
        const double quality = (left_total * gini(left_pos, left_total) +
                                right_total * gini(right_pos, right_total)) /
                               w_total;
        if (best_feature < 0 || quality < best_quality) {
          best_feature = feature;
          best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          best_quality = quality;
        }
      }
    }

    if (best_feature < 0 || parent_impurity - best_quality <= 1e-12) {
      nodes.push_back(node);
      return static_cast<int>(nodes.size()) - 1;
    }

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    for (int r : rows)
      (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes.push_back(node);
    const int self = static_cast<int>(nodes.size()) - 1;
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    nodes[self].left = left;
    nodes[self].right = right;
    return self;
  }
};

}  // namespace

Tree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, const RFParams& params,
                const std::vector<double>& row_weights, std::uint64_t seed) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("cannot train a tree on empty data");
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw DataError("label count does not match row count");
  if (!x.allFinite()) throw NumericError("non-finite feature value in training data");
  Rng rng(mix_seed(seed));
  TreeBuilder builder(x, y, row_weights, params, rng);
  std::vector<int> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  builder.build(rows, 0);
  Tree t;
  t.nodes = std::move(builder.nodes);
  return t;
}

double Tree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int at = 0;
  while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(at)];
    at = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(at)].probability;
}

double ForestModel::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != static_cast<Eigen::Index>(feature_names.size()))
    throw DataError("feature count does not match model");
  double sum = 0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

std::string data_fingerprint(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const std::string& params_tag, std::uint64_t seed) {
  Fnv1a h;
  h.update_u64(static_cast<std::uint64_t>(x.rows()));
  h.update_u64(static_cast<std::uint64_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) h.update_double(x(r, c));
  for (int v : y) h.update_u64(static_cast<std::uint64_t>(v));
  h.update(params_tag);
  h.update_u64(seed);
  return fmt_u64_hex(h.h);
}

}  // namespace

ForestModel train_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                         const std::vector<std::string>& feature_names,
                         const RFParams& params) {
  if (x.rows() == 0) throw DataError("cannot train a forest on empty data");
  if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  const std::size_t n = static_cast<std::size_t>(x.rows());

  std::vector<double> weights;
  if (params.class_weighted) {
    std::size_t n_pos = 0;
    for (int v : y) n_pos += v != 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("class weighting needs both classes");
    weights.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      weights[i] = y[i] ? static_cast<double>(n) / (2.0 * static_cast<double>(n_pos))
                        : static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
  }

  ForestModel m;
  m.params = params;
  m.feature_names = feature_names;
  m.trees.resize(static_cast<std::size_t>(params.n_trees));
  parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
    const std::uint64_t tree_seed = mix_seed(params.seed, t);
    Rng rng(tree_seed);
    std::vector<int> rows(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<int>(rng.next_below(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(x, y, weights, params, rng);
    builder.build(rows, 0);
    m.trees[t].nodes = std::move(builder.nodes);
  });
  m.train_fingerprint = data_fingerprint(x, y, params.config_tag(), params.seed);
  return m;
}

ForestModel train_forest(const FeatureTable& table, const RFParams& params) {
  return train_forest(table.values, table.labels, table.feature_names, params);
}

// ---------------------------------------------------------------------------
// SVM: SMO solver
// ---------------------------------------------------------------------------

namespace {

struct SmoSolver {
  const Eigen::MatrixXd& z;  // standardized rows
  const std::vector<double>& y;  // +-1
  const SVMParams& params;
  Eigen::MatrixXd kernel;
  Eigen::VectorXd alpha, error;
  double bias = 0.0;
  Rng rng;

  SmoSolver(const Eigen::MatrixXd& z_, const std::vector<double>& y_, const SVMParams& p_)
      : z(z_), y(y_), params(p_), rng(mix_seed(p_.seed, 0x534d4fULL)) {
    const Eigen::Index n = z.rows();
    kernel.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double k = kernel_value(i, j);
        kernel(i, j) = k;
        kernel(j, i) = k;
      }
    alpha = Eigen::VectorXd::Zero(n);
    error.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) error(i) = -y[static_cast<std::size_t>(i)];
  }

  double kernel_value(Eigen::Index i, Eigen::Index j) const {
    if (params.kernel == SvmKernel::Linear) return z.row(i).dot(z.row(j));
    return std::exp(-params.gamma * (z.row(i) - z.row(j)).squaredNorm());
  }

  double objective() const {
    double obj = alpha.sum();
    double quad = 0;
    const Eigen::Index n = z.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (alpha(i) == 0.0) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (alpha(j) == 0.0) continue;
        quad += alpha(i) * alpha(j) * y[static_cast<std::size_t>(i)] *
                y[static_cast<std::size_t>(j)] * kernel(i, j);
      }
    }
    return obj - 0.5 * quad;
  }

  bool take_step(Eigen::Index i1, Eigen::Index i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha(i1), a2_old = alpha(i2);
    const double y1 = y[static_cast<std::size_t>(i1)], y2 = y[static_cast<std::size_t>(i2)];
    const double e1 = error(i1), e2 = error(i2);
    const double s = y1 * y2;
    const double c = params.c;
    double lo, hi;
    if (s > 0) {
      lo = std::max(0.0, a1_old + a2_old - c);
      hi = std::min(c, a1_old + a2_old);
    } else {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(c, c + a2_old - a1_old);
    }
    if (lo >= hi) return false;

    const double k11 = kernel(i1, i1), k12 = kernel(i1, i2), k22 = kernel(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2;
    if (eta > 1e-12) {
      a2 = a2_old + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, lo, hi);
    } else {
      // evaluate the pair objective at both clip ends
      const double f1 = y1 * e1 - a1_old * k11 - s * a2_old * k12;
      const double f2 = y2 * e2 - a2_old * k22 - s * a1_old * k12;
      const double l1 = a1_old + s * (a2_old - lo);
      const double h1 = a1_old + s * (a2_old - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12)
        a2 = lo;
      else if (obj_lo > obj_hi + 1e-12)
        a2 = hi;
      else
        return false;
    }
    if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;
    const double a1 = a1_old + s * (a2_old - a2);

    const double d1 = y1 * (a1 - a1_old), d2 = y2 * (a2 - a2_old);
    const double b1 = bias - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1 > 0 && a1 < c)
      b_new = b1;
    else if (a2 > 0 && a2 < c)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);

    const double db = b_new - bias;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      error(i) += d1 * kernel(i1, i) + d2 * kernel(i2, i) + db;
    alpha(i1) = a1;
    alpha(i2) = a2;
    bias = b_new;
    return true;
  }

  bool violates_kkt(Eigen::Index i) const {
    const double yi = y[static_cast<std::size_t>(i)];
    const double r = error(i) * yi;
    return (r < -params.tolerance && alpha(i) < params.c) ||
           (r > params.tolerance && alpha(i) > 0);
  }

  bool examine(Eigen::Index i2) {
    if (!violates_kkt(i2)) return false;
    const Eigen::Index n = z.rows();

    // heuristic 1: the non-bound point with the largest |E1 - E2|
    Eigen::Index best = -1;
    double best_gap = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (alpha(i) <= 0 || alpha(i) >= params.c) continue;
      const double gap = std::abs(error(i) - error(i2));
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return true;

    // heuristic 2: all non-bound points from a seeded start
    const Eigen::Index start =
        static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index i = (start + k) % n;
      if (alpha(i) <= 0 || alpha(i) >= params.c) continue;
      if (take_step(i, i2)) return true;
    }
    // heuristic 3: everything
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index i = (start + k) % n;
      if (take_step(i, i2)) return true;
    }
    return false;
  }

  // returns (converged, objective trace)
  std::pair<bool, std::vector<double>> solve() {
    std::vector<double> trace;
    bool examine_all = true;
    int changed = 0;
    int pass = 0;
    while ((changed > 0 || examine_all) && pass < params.max_iterations) {
      changed = 0;
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        if (!examine_all && (alpha(i) <= 0 || alpha(i) >= params.c)) continue;
        changed += examine(i) ? 1 : 0;
      }
      trace.push_back(objective());
      ++pass;
      if (examine_all) {
        if (changed == 0) break;  // full sweep with no KKT violations fixed
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    bool converged = true;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (violates_kkt(i)) {
        converged = false;
        break;
      }
    return {converged, trace};
  }
};

// Platt's sigmoid fit with the Lin-Weng correction; deterministic Newton.
std::pair<double, double> fit_platt(const std::vector<double>& decision,
                                    const std::vector<int>& labels) {
  const std::size_t n = decision.size();
  double prior1 = 0, prior0 = 0;
  for (int v : labels) (v ? prior1 : prior0) += 1.0;
  const double hi_t = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_t = 1.0 / (prior0 + 2.0);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] ? hi_t : lo_t;

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  const double min_step = 1e-10, sigma = 1e-12;

  auto value = [&](double av, double bv) {
    double f = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = decision[i] * av + bv;
      if (fapb >= 0)
        f += target[i] * fapb + std::log1p(std::exp(-fapb));
      else
        f += (target[i] - 1.0) * fapb + std::log1p(std::exp(fapb));
    }
    return f;
  };

  double fval = value(a, b);
  for (int it = 0; it < 100; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fapb = decision[i] * a + b;
      double p, q;
      if (fapb >= 0) {
        p = std::exp(-fapb) / (1.0 + std::exp(-fapb));
        q = 1.0 / (1.0 + std::exp(-fapb));
      } else {
        p = 1.0 / (1.0 + std::exp(fapb));
        q = std::exp(fapb) / (1.0 + std::exp(fapb));
      }
      const double d2 = p * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      const double d1 = target[i] - p;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= min_step) {
      const double a_new = a + step * da, b_new = b + step * db;
      const double f_new = value(a_new, b_new);
      if (f_new < fval + 1e-4 * step * gd) {
        a = a_new;
        b = b_new;
        fval = f_new;
        break;
      }
      step *= 0.5;
    }
    if (step < min_step) break;
  }
  return {a, b};
}

}  // namespace

SVMModel train_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                   const std::vector<std::string>& feature_names, const SVMParams& params) {
  const Eigen::Index n = x.rows();
  if (n == 0) throw DataError("cannot train an SVM on empty data");
  bool pos = false, neg = false;
  for (int v : y) (v ? pos : neg) = true;
  if (!pos || !neg) throw DataError("SVM training needs both classes");
  if (params.c <= 0) throw ConfigError("SVM C must be > 0");
  if (params.tolerance <= 0) throw ConfigError("SVM tolerance must be > 0");

  SVMModel m;
  m.params = params;
  m.feature_names = feature_names;
  m.column_mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - m.column_mean.transpose();
  m.column_std = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < m.column_std.size(); ++j)
    if (m.column_std(j) == 0.0) m.column_std(j) = 1.0;
  Eigen::MatrixXd z = centered.array().rowwise() / m.column_std.transpose().array();

  std::vector<double> ypm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ypm[static_cast<std::size_t>(i)] = y[i] ? 1.0 : -1.0;

  SmoSolver solver(z, ypm, params);
  auto [converged, trace] = solver.solve();
  m.converged = converged;
  m.objective_trace = std::move(trace);
  m.bias = solver.bias;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < n; ++i)
    if (solver.alpha(i) > 1e-12) sv.push_back(i);
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), z.cols());
  m.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = z.row(sv[k]);
    m.dual_coef(static_cast<Eigen::Index>(k)) =
        solver.alpha(sv[k]) * ypm[static_cast<std::size_t>(sv[k])];
  }

  std::vector<double> decision(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // in-sample decision values reuse the cached kernel
    double d = solver.bias;
    for (std::size_t k = 0; k < sv.size(); ++k)
      d += solver.alpha(sv[k]) * ypm[static_cast<std::size_t>(sv[k])] *
           solver.kernel(sv[k], i);
    decision[static_cast<std::size_t>(i)] = d;
  }
  auto [pa, pb] = fit_platt(decision, y);
  m.platt_a = pa;
  m.platt_b = pb;
  m.train_fingerprint = data_fingerprint(x, y, params.config_tag(), params.seed);
  return m;
}

SVMModel train_svm(const FeatureTable& table, const SVMParams& params) {
  return train_svm(table.values, table.labels, table.feature_names, params);
}

double SVMModel::decision_value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != static_cast<Eigen::Index>(feature_names.size()))
    throw DataError("feature count does not match model");
  Eigen::VectorXd z = (x - column_mean).cwiseQuotient(column_std);
  double d = bias;
  for (Eigen::Index k = 0; k < support_vectors.rows(); ++k) {
    double kv;
    if (params.kernel == SvmKernel::Linear)
      kv = support_vectors.row(k).dot(z.transpose());
    else
      kv = std::exp(-params.gamma *
                    (support_vectors.row(k).transpose() - z).squaredNorm());
    d += dual_coef(k) * kv;
  }
  return d;
}

double SVMModel::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double f = decision_value(x);
  const double fapb = platt_a * f + platt_b;
  // numerically safe sigmoid 1/(1+exp(fapb))
  if (fapb >= 0) return std::exp(-fapb) / (1.0 + std::exp(-fapb));
  return 1.0 / (1.0 + std::exp(fapb));
}

double predict_proba(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (const auto* f = std::get_if<ForestModel>(&m)) return f->predict_proba(x);
  return std::get<SVMModel>(m).predict_proba(x);
}

const std::vector<std::string>& model_feature_names(const Model& m) {
  if (const auto* f = std::get_if<ForestModel>(&m)) return f->feature_names;
  return std::get<SVMModel>(m).feature_names;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr int kFormatVersion = 1;

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& nd : t.nodes) {
    json j;
    j["n"] = nd.n_train;
    if (nd.is_leaf()) {
      j["p"] = nd.probability;
    } else {
      j["f"] = nd.feature;
      j["t"] = nd.threshold;
      j["l"] = nd.left;
      j["r"] = nd.right;
    }
    nodes.push_back(std::move(j));
  }
  return nodes;
}

Tree tree_from_json(const json& arr) {
  Tree t;
  for (const auto& j : arr) {
    TreeNode nd;
    nd.n_train = j.value("n", std::int64_t{0});
    if (j.contains("f")) {
      nd.feature = j.at("f").get<int>();
      nd.threshold = j.at("t").get<double>();
      nd.left = j.at("l").get<int>();
      nd.right = j.at("r").get<int>();
    } else {
      nd.probability = j.at("p").get<double>();
    }
    t.nodes.push_back(nd);
  }
  if (t.nodes.empty()) throw DataError("model tree has no nodes");
  return t;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

}  // namespace

void save_model(const Model& m, const std::filesystem::path& path) {
  json j;
  j["format_version"] = kFormatVersion;
  if (const auto* f = std::get_if<ForestModel>(&m)) {
    j["kind"] = "random_forest";
    j["params"] = {{"n_trees", f->params.n_trees},
                   {"max_depth", f->params.max_depth},
                   {"min_samples_leaf", f->params.min_samples_leaf},
                   {"min_samples_split", f->params.min_samples_split},
                   {"bootstrap", f->params.bootstrap},
                   {"class_weighted", f->params.class_weighted},
                   {"seed", f->params.seed}};
    j["feature_names"] = f->feature_names;
    json trees = json::array();
    for (const auto& t : f->trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
    j["train_fingerprint"] = f->train_fingerprint;
  } else {
    const auto& s = std::get<SVMModel>(m);
    j["kind"] = "svm";
    j["params"] = {{"kernel", s.params.kernel == SvmKernel::Linear ? "linear" : "rbf"},
                   {"c", s.params.c},
                   {"gamma", s.params.gamma},
                   {"tolerance", s.params.tolerance},
                   {"max_iterations", s.params.max_iterations},
                   {"seed", s.params.seed}};
    j["feature_names"] = s.feature_names;
    j["column_mean"] = vector_to_json(s.column_mean);
    j["column_std"] = vector_to_json(s.column_std);
    json svs = json::array();
    for (Eigen::Index r = 0; r < s.support_vectors.rows(); ++r)
      svs.push_back(vector_to_json(s.support_vectors.row(r).transpose()));
    j["support_vectors"] = std::move(svs);
    j["dual_coef"] = vector_to_json(s.dual_coef);
    j["bias"] = s.bias;
    j["platt_a"] = s.platt_a;
    j["platt_b"] = s.platt_b;
    j["converged"] = s.converged;
    j["objective_trace"] = s.objective_trace;
    j["train_fingerprint"] = s.train_fingerprint;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << j.dump(1, '\t') << '\n';
  if (!out) throw DataError("failed writing model file: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
  try {
    if (j.value("format_version", -1) != kFormatVersion)
      throw DataError("unsupported model format version in " + path.string());
    const std::string kind = j.value("kind", "");
    if (kind == "random_forest") {
      ForestModel f;
      const json& p = j.at("params");
      f.params.n_trees = p.at("n_trees").get<int>();
      f.params.max_depth = p.at("max_depth").get<int>();
      f.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
      f.params.min_samples_split = p.at("min_samples_split").get<int>();
      f.params.bootstrap = p.at("bootstrap").get<bool>();
      f.params.class_weighted = p.at("class_weighted").get<bool>();
      f.params.seed = p.at("seed").get<std::uint64_t>();
      f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
      if (f.trees.empty()) throw DataError("model has no trees: " + path.string());
      const int nf = static_cast<int>(f.feature_names.size());
      for (const auto& t : f.trees)
        for (const auto& nd : t.nodes)
          if (!nd.is_leaf() && (nd.feature >= nf || nd.left < 0 || nd.right < 0 ||
                                nd.left >= static_cast<int>(t.nodes.size()) ||
                                nd.right >= static_cast<int>(t.nodes.size())))
            throw DataError("model tree references invalid indices: " + path.string());
      f.train_fingerprint = j.value("train_fingerprint", "");
      return f;
    }
    if (kind == "svm") {
      SVMModel s;
      const json& p = j.at("params");
      s.params.kernel = p.at("kernel").get<std::string>() == "linear" ? SvmKernel::Linear
                                                                      : SvmKernel::Rbf;
      s.params.c = p.at("c").get<double>();
      s.params.gamma = p.at("gamma").get<double>();
      s.params.tolerance = p.at("tolerance").get<double>();
      s.params.max_iterations = p.at("max_iterations").get<int>();
      s.params.seed = p.at("seed").get<std::uint64_t>();
      s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      s.column_mean = vector_from_json(j.at("column_mean"));
      s.column_std = vector_from_json(j.at("column_std"));
      const json& svs = j.at("support_vectors");
      s.support_vectors.resize(static_cast<Eigen::Index>(svs.size()),
                               s.column_mean.size());
      Eigen::Index r = 0;
      for (const auto& row : svs)
        s.support_vectors.row(r++) = vector_from_json(row).transpose();
      s.dual_coef = vector_from_json(j.at("dual_coef"));
      s.bias = j.at("bias").get<double>();
      s.platt_a = j.at("platt_a").get<double>();
      s.platt_b = j.at("platt_b").get<double>();
      s.converged = j.at("converged").get<bool>();
      s.objective_trace = j.at("objective_trace").get<std::vector<double>>();
      s.train_fingerprint = j.value("train_fingerprint", "");
      return s;
    }
    throw DataError("unknown model kind in " + path.string());
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
}

}  // namespace tk
