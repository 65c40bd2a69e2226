#include "texturekit/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "texturekit/errors.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/rng.hpp"
#include "texturekit/strings.hpp"
#include "texturekit/csv.hpp"

namespace tk {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DataError("score/label size mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int v : labels) n_pos += v != 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC requires both classes");

  // midrank formulation, equivalent to pairwise counting with half ties
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]]) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

ThresholdMetrics threshold_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold) {
  if (scores.size() != labels.size()) throw DataError("score/label size mismatch");
  if (scores.empty()) throw DataError("no scores");
  bool pos = false, neg = false;
  for (int v : labels) (v ? pos : neg) = true;
  if (!pos || !neg) throw DataError("threshold metrics require both classes");

  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) (predicted ? tp : fn) += 1.0;
    else (predicted ? fp : tn) += 1.0;
  }
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  ThresholdMetrics m;
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  m.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  m.sensitivity = ratio(tp, tp + fn);
  m.specificity = ratio(tn, tn + fp);
  return m;
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

std::vector<std::string> FoldPlan::patients_in_fold(int fold) const {
  std::vector<std::string> out;
  for (const auto& [patient, f] : fold_of_patient)
    if (f == fold) out.push_back(patient);
  return out;
}

FoldPlan make_folds(const std::vector<std::string>& patient_ids,
                    const std::vector<int>& patient_labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be >= 2");
  if (static_cast<int>(patient_ids.size()) < k)
    throw DataError("fewer patients than folds: " + std::to_string(patient_ids.size()) +
                    " < " + std::to_string(k));
  bool pos = false, neg = false;
  for (int v : patient_labels) (v ? pos : neg) = true;
  if (!pos || !neg) throw DataError("fold construction requires both classes");

  std::vector<std::size_t> order(patient_ids.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0xf01d5ULL));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  FoldPlan plan;
  plan.k = k;
  std::vector<int> class_count[2];
  class_count[0].assign(static_cast<std::size_t>(k), 0);
  class_count[1].assign(static_cast<std::size_t>(k), 0);
  std::vector<int> total(static_cast<std::size_t>(k), 0);
  for (int cls : {1, 0}) {
    for (std::size_t idx : order) {
      if (patient_labels[idx] != cls) continue;
      // fewest patients of this class, then fewest overall, then lowest index
      int best = 0;
      for (int f = 1; f < k; ++f) {
        const auto fu = static_cast<std::size_t>(f), bu = static_cast<std::size_t>(best);
        if (class_count[cls][fu] < class_count[cls][bu] ||
            (class_count[cls][fu] == class_count[cls][bu] && total[fu] < total[bu]))
          best = f;
      }
      plan.fold_of_patient[patient_ids[idx]] = best;
      ++class_count[cls][static_cast<std::size_t>(best)];
      ++total[static_cast<std::size_t>(best)];
    }
  }
  return plan;
}

FoldPlan make_folds(const Dataset& d, int k, std::uint64_t seed) {
  std::vector<std::string> patients = d.patient_ids();
  std::unordered_map<std::string, int> label_of;
  for (const auto& s : d.samples) {
    int& l = label_of[s.patient_id()];
    if (s.label() == Label::Positive) l = 1;
  }
  std::vector<int> labels;
  labels.reserve(patients.size());
  for (const auto& p : patients) labels.push_back(label_of[p]);
  return make_folds(patients, labels, k, seed);
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

std::string params_config_tag(const ModelParams& p) {
  if (const auto* rf = std::get_if<RFParams>(&p)) return rf->config_tag();
  return std::get<SVMParams>(p).config_tag();
}

namespace {

MetricStat stat_of(const std::vector<double>& values) {
  MetricStat s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  return s;
}

Model train_model(const Eigen::MatrixXd& x, const std::vector<int>& y,
                  const std::vector<std::string>& names, const ModelParams& params) {
  if (const auto* rf = std::get_if<RFParams>(&params))
    return train_forest(x, y, names, *rf);
  return train_svm(x, y, names, std::get<SVMParams>(params));
}

ModelParams with_seed(const ModelParams& params, std::uint64_t seed) {
  ModelParams p = params;
  if (auto* rf = std::get_if<RFParams>(&p)) rf->seed = seed;
  else std::get<SVMParams>(p).seed = seed;
  return p;
}

std::uint64_t params_seed_base(const ModelParams& p) {
  if (const auto* rf = std::get_if<RFParams>(&p)) return rf->seed;
  return std::get<SVMParams>(p).seed;
}

MetricSummary aggregate_folds(const std::vector<FoldRecord>& folds,
                              const std::string& config_id) {
  MetricSummary s;
  s.config_id = config_id;
  std::vector<double> auc, acc, f1, sens, spec;
  for (const auto& f : folds) {
    if (f.auc) auc.push_back(*f.auc);
    else ++s.skipped_auc_folds;
    acc.push_back(f.thresholds.accuracy);
    f1.push_back(f.thresholds.f1);
    sens.push_back(f.thresholds.sensitivity);
    spec.push_back(f.thresholds.specificity);
  }
  s.auc = stat_of(auc);
  s.accuracy = stat_of(acc);
  s.f1 = stat_of(f1);
  s.sensitivity = stat_of(sens);
  s.specificity = stat_of(spec);
  return s;
}

}  // namespace

CvResult cross_validate(const Dataset& d, const ModelParams& params, const CvOptions& opt) {
  if (!d.has_both_classes()) throw DataError("cross-validation requires both classes");
  const FoldPlan plan = make_folds(d, opt.k, opt.seed);

  CvResult result;
  result.folds.resize(static_cast<std::size_t>(opt.k));
  for (int fold = 0; fold < opt.k; ++fold) {
    FoldRecord& rec = result.folds[static_cast<std::size_t>(fold)];
    rec.fold = fold;

    Dataset train_ds, test_ds;
    std::unordered_set<std::string> train_patients, test_patients;
    for (const auto& s : d.samples) {
      SampleTriple sample = s;
      if (opt.resize_to) {
        sample.t2w = resize_patch(sample.t2w, opt.resize_to);
        sample.adc = resize_patch(sample.adc, opt.resize_to);
        sample.dwi = resize_patch(sample.dwi, opt.resize_to);
      }
      if (plan.fold_of_patient.at(s.patient_id()) == fold) {
        if (!s.augmented()) {
          test_ds.samples.push_back(std::move(sample));
          test_patients.insert(s.patient_id());
        }
      } else {
        train_ds.samples.push_back(std::move(sample));
        train_patients.insert(s.patient_id());
      }
    }
    if (opt.augment && opt.augment->per_sample_count > 0)
      train_ds = augment_dataset(train_ds, *opt.augment,
                                 mix_seed(opt.seed, static_cast<std::uint64_t>(fold), 0xa6));

    FeatureConfig cfg;
    cfg.prep = opt.prep;
    cfg.glcm = opt.glcm;
    cfg.lbp = opt.lbp;
    cfg.var_edges_per_modality = fit_var_edges(train_ds, cfg);  // training split only

    FeatureTable train_table = build_table(train_ds, cfg);
    FeatureTable test_table = build_table(test_ds, cfg);
    if (!opt.feature_subset.empty()) {
      train_table = train_table.select_columns(opt.feature_subset);
      test_table = test_table.select_columns(opt.feature_subset);
    }

    const ModelParams fold_params = with_seed(
        params, mix_seed(opt.seed, static_cast<std::uint64_t>(fold), 0x5eed));
    const Model model = train_model(train_table.values, train_table.labels,
                                    train_table.feature_names, fold_params);

    std::vector<double> scores(static_cast<std::size_t>(test_table.rows()));
    parallel_for(scores.size(), [&](std::size_t i) {
      scores[i] = predict_proba(model, test_table.values.row(static_cast<Eigen::Index>(i))
                                           .transpose());
    });

    rec.train_sample_ids = train_table.sample_ids;
    rec.train_patient_ids = train_table.patient_ids;
    rec.test_sample_ids = test_table.sample_ids;
    rec.test_patient_ids = test_table.patient_ids;

    bool pos = false, neg = false;
    for (int v : test_table.labels) (v ? pos : neg) = true;
    if (pos && neg) {
      rec.auc = roc_auc(scores, test_table.labels);
      rec.thresholds = threshold_metrics(scores, test_table.labels);
    }
  }

  std::string config_id = params_config_tag(params);
  config_id += std::string("-") + prep_name(opt.prep);
  config_id += "-sz" + std::to_string(opt.resize_to ? opt.resize_to : 0);
  result.summary = aggregate_folds(result.folds, config_id);
  return result;
}

MetricSummary cross_validate_table(const FeatureTable& table, const ModelParams& params,
                                   const FoldPlan& plan,
                                   const std::vector<std::string>& feature_subset) {
  const FeatureTable view =
      feature_subset.empty() ? table : table.select_columns(feature_subset);
  std::vector<FoldRecord> folds;
  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (Eigen::Index i = 0; i < view.rows(); ++i) {
      const auto it = plan.fold_of_patient.find(view.patient_ids[static_cast<std::size_t>(i)]);
      if (it == plan.fold_of_patient.end())
        throw DataError("patient missing from fold plan: " +
                        view.patient_ids[static_cast<std::size_t>(i)]);
      (it->second == fold ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.empty() || test_rows.empty())
      throw DataError("fold " + std::to_string(fold) + " has an empty portion");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(train_rows.size()), view.cols());
    std::vector<int> y(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = view.values.row(train_rows[i]);
      y[i] = view.labels[static_cast<std::size_t>(train_rows[i])];
    }
    const ModelParams fold_params =
        with_seed(params, mix_seed(params_seed_base(params),
                                   static_cast<std::uint64_t>(fold), 0x5eed));
    const Model model = train_model(x, y, view.feature_names, fold_params);

    FoldRecord rec;
    rec.fold = fold;
    std::vector<double> scores(test_rows.size());
    std::vector<int> labels(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      scores[i] = predict_proba(model, view.values.row(test_rows[i]).transpose());
      labels[i] = view.labels[static_cast<std::size_t>(test_rows[i])];
    }
    bool pos = false, neg = false;
    for (int v : labels) (v ? pos : neg) = true;
    if (pos && neg) {
      rec.auc = roc_auc(scores, labels);
      rec.thresholds = threshold_metrics(scores, labels);
    }
    folds.push_back(std::move(rec));
  }
  return aggregate_folds(folds, params_config_tag(params));
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

std::vector<GridSpec::Cell> GridSpec::cells(std::uint64_t seed) const {
  std::vector<Cell> out;
  for (Prep prep : preps)
    for (int size : patch_sizes) {
      for (int trees : rf_trees)
        for (int depth : rf_depths)
          for (int leaf : rf_min_leaf)
            for (int split : rf_min_split) {
              RFParams p;
              p.n_trees = trees;
              p.max_depth = depth;
              p.min_samples_leaf = leaf;
              p.min_samples_split = split;
              p.seed = seed;
              Cell c{prep, size, p, ""};
              c.config_id = p.config_tag() + "-" + prep_name(prep) + "-sz" +
                            std::to_string(size);
              out.push_back(std::move(c));
            }
      for (SVMParams sp : svm_configs) {
        sp.seed = seed;
        Cell c{prep, size, sp, ""};
        c.config_id =
            sp.config_tag() + "-" + prep_name(prep) + "-sz" + std::to_string(size);
        out.push_back(std::move(c));
      }
    }
  return out;
}

void rank_summaries(std::vector<MetricSummary>& summaries) {
  std::stable_sort(summaries.begin(), summaries.end(),
                   [](const MetricSummary& a, const MetricSummary& b) {
                     if (a.auc.mean != b.auc.mean) return a.auc.mean > b.auc.mean;
                     if (a.accuracy.mean != b.accuracy.mean)
                       return a.accuracy.mean > b.accuracy.mean;
                     return a.config_id < b.config_id;
                   });
}

std::vector<MetricSummary> grid_search(const Dataset& d, const GridSpec& grid,
                                       const CvOptions& base_options) {
  const auto cells = grid.cells(base_options.seed);
  if (cells.empty()) throw ConfigError("empty hyperparameter grid");
  std::vector<MetricSummary> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CvOptions opt = base_options;
    opt.prep = cells[i].prep;
    opt.resize_to = cells[i].patch_size;
    MetricSummary s = cross_validate(d, cells[i].params, opt).summary;
    s.config_id = cells[i].config_id;
    out[i] = std::move(s);
  }
  rank_summaries(out);
  return out;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

namespace {

double sq_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return (a - b).squaredNorm();
}

}  // namespace

ConfigCluster kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                     int restarts, int max_iter) {
  const Eigen::Index n = points.rows();
  if (n < k) throw DataError("fewer points than clusters");
  if (k < 1) throw ConfigError("cluster count must be >= 1");

  ConfigCluster best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(restart), 0x4b4dULL));

    // k-means++ seeding
    Eigen::MatrixXd centroids(k, points.cols());
    std::vector<double> min_d2(static_cast<std::size_t>(n),
                               std::numeric_limits<double>::infinity());
    const Eigen::Index first = static_cast<Eigen::Index>(rng.next_below(
        static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);
    for (int c = 1; c < k; ++c) {
      double total = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = sq_dist(points.row(i), centroids.row(c - 1));
        if (d2 < min_d2[static_cast<std::size_t>(i)])
          min_d2[static_cast<std::size_t>(i)] = d2;
        total += min_d2[static_cast<std::size_t>(i)];
      }
      Eigen::Index chosen = 0;
      if (total > 0) {
        const double u = rng.next_double() * total;
        double acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += min_d2[static_cast<std::size_t>(i)];
          if (u < acc || i == n - 1) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n)));
      }
      centroids.row(c) = points.row(chosen);
    }

    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    std::vector<double> trace;
    double inertia = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      bool changed = false;
      inertia = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double dmin = sq_dist(points.row(i), centroids.row(0));
        for (int c = 1; c < k; ++c) {
          const double d2 = sq_dist(points.row(i), centroids.row(c));
          if (d2 < dmin) {
            dmin = d2;
            arg = c;
          }
        }
        if (assignment[static_cast<std::size_t>(i)] != arg) {
          assignment[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
        inertia += dmin;
      }
      trace.push_back(inertia);
      if (!changed && iter > 0) break;

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        } else {
          // empty cluster: re-seed to the point farthest from its centroid
          Eigen::Index far = 0;
          double dmax = -1;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double d2 = sq_dist(
                points.row(i), centroids.row(assignment[static_cast<std::size_t>(i)]));
            if (d2 > dmax) {
              dmax = d2;
              far = i;
            }
          }
          centroids.row(c) = points.row(far);
        }
      }
    }

    if (inertia < best.inertia) {
      best.assignment = assignment;
      best.centroids = centroids;
      best.inertia = inertia;
      best.inertia_trace = trace;
    }
  }
  return best;
}

ConfigCluster cluster_configs(const std::vector<MetricSummary>& summaries, int k,
                              std::uint64_t seed) {
  if (static_cast<int>(summaries.size()) < k)
    throw DataError("fewer configurations than clusters");
  Eigen::MatrixXd points(static_cast<Eigen::Index>(summaries.size()), 5);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    points.row(static_cast<Eigen::Index>(i)) << s.auc.mean, s.accuracy.mean, s.f1.mean,
        s.sensitivity.mean, s.specificity.mean;
  }
  // standardize each metric dimension
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mean = points.col(j).mean();
    const double var = (points.col(j).array() - mean).square().mean();
    if (var > 0)
      points.col(j) = (points.col(j).array() - mean) / std::sqrt(var);
    else
      points.col(j).setZero();
  }
  return kmeans(points, k, seed);
}

// ---------------------------------------------------------------------------
// Metric CSV
// ---------------------------------------------------------------------------

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricSummary>& summaries) {
  CsvTable csv;
  csv.header = {"config_id", "auc_mean",  "auc_std",  "acc_mean", "acc_std",
                "f1_mean",   "f1_std",    "sens_mean", "sens_std", "spec_mean",
                "spec_std",  "cluster"};
  for (const auto& s : summaries) {
    CsvRow row;
    row.push_back(s.config_id);
    for (const MetricStat* m : {&s.auc, &s.accuracy, &s.f1, &s.sensitivity, &s.specificity}) {
      row.push_back(fmt_double(m->mean));
      row.push_back(fmt_double(m->std));
    }
    row.push_back(s.cluster >= 0 ? std::to_string(s.cluster) : "");
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

std::vector<MetricSummary> read_metrics_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  if (csv.header.size() != 12 || csv.header[0] != "config_id")
    throw DataError("metrics CSV header mismatch in " + path.string());
  std::vector<MetricSummary> out;
  for (const auto& row : csv.rows) {
    if (row.size() != 12)
      throw DataError("metrics CSV row with wrong field count in " + path.string());
    MetricSummary s;
    s.config_id = row[0];
    MetricStat* stats[5] = {&s.auc, &s.accuracy, &s.f1, &s.sensitivity, &s.specificity};
    for (int m = 0; m < 5; ++m) {
      if (!parse_double(row[1 + 2 * m], stats[m]->mean) ||
          !parse_double(row[2 + 2 * m], stats[m]->std))
        throw DataError("bad numeric cell in metrics CSV: " + path.string());
    }
    if (!trim(row[11]).empty()) {
      std::int64_t c = -1;
      if (!parse_i64(row[11], c)) throw DataError("bad cluster cell in " + path.string());
      s.cluster = static_cast<int>(c);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace tk
