#include "texturekit/select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "texturekit/csv.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/strings.hpp"

namespace tk {

namespace {

double evaluate_subset(const FeatureTable& table, const ModelParams& params,
                       const FoldPlan& plan, const std::vector<std::string>& subset,
                       std::size_t& evaluations) {
  ++evaluations;
  try {
    return cross_validate_table(table, params, plan, subset).auc.mean;
  } catch (const std::exception&) {
    return 0.0;  // failed evaluations score the subset as 0
  }
}

// Correlation prefilter: keep the first feature of each |r|>threshold group.
std::vector<std::string> prefilter_columns(const FeatureTable& table, double threshold) {
  const Eigen::Index n = table.rows(), f = table.cols();
  Eigen::VectorXd mean(f), inv_std(f);
  Eigen::MatrixXd z(n, f);
  for (Eigen::Index j = 0; j < f; ++j) {
    mean(j) = table.values.col(j).mean();
    const double var = (table.values.col(j).array() - mean(j)).square().mean();
    inv_std(j) = var > 0 ? 1.0 / std::sqrt(var) : 0.0;
    z.col(j) = (table.values.col(j).array() - mean(j)) * inv_std(j);
  }
  std::vector<std::string> kept;
  std::vector<Eigen::Index> kept_idx;
  for (Eigen::Index j = 0; j < f; ++j) {
    bool redundant = false;
    if (inv_std(j) != 0.0) {
      for (Eigen::Index k : kept_idx) {
        if (inv_std(k) == 0.0) continue;
        const double r = z.col(j).dot(z.col(k)) / static_cast<double>(n);
        if (std::abs(r) > threshold) {
          redundant = true;
          break;
        }
      }
    }
    if (!redundant) {
      kept.push_back(table.feature_names[static_cast<std::size_t>(j)]);
      kept_idx.push_back(j);
    }
  }
  return kept;
}

}  // namespace

SelectionTrace sbfs(const FeatureTable& table, const ModelParams& params,
                    const FoldPlan& plan, const SbfsOptions& opt) {
  if (table.cols() < 2) throw DataError("SBFS needs at least two features");

  std::vector<std::string> current =
      opt.prefilter_r > 0.0 ? prefilter_columns(table, opt.prefilter_r)
                            : table.feature_names;
  if (current.size() < 2) throw DataError("prefilter left fewer than two features");

  SelectionTrace trace;
  auto record_best = [&](const std::vector<std::string>& subset, double criterion) {
    const int size = static_cast<int>(subset.size());
    auto it = trace.best_subset_per_size.find(size);
    if (it == trace.best_subset_per_size.end() || criterion > it->second.second)
      trace.best_subset_per_size[size] = {subset, criterion};
  };

  // subsets keep the table's column order so criterion evaluations do not
  // depend on the removal/re-add history
  std::map<std::string, std::size_t> column_order;
  for (std::size_t i = 0; i < table.feature_names.size(); ++i)
    column_order[table.feature_names[i]] = i;
  auto insert_ordered = [&](std::vector<std::string>& subset, const std::string& name) {
    const std::size_t pos = column_order.at(name);
    auto it = std::lower_bound(subset.begin(), subset.end(), pos,
                               [&](const std::string& a, std::size_t p) {
                                 return column_order.at(a) < p;
                               });
    subset.insert(it, name);
  };

  double current_criterion =
      evaluate_subset(table, params, plan, current, trace.evaluations);
  record_best(current, current_criterion);

  double global_best = current_criterion;
  int sizes_without_improvement = 0;
  std::vector<std::string> removed_pool;

  while (static_cast<int>(current.size()) > opt.min_size) {
    // removal step: drop the feature whose removal maximizes the criterion;
    // candidates evaluated in parallel, tie kept on smallest removed name
    std::vector<double> scores(current.size());
    std::vector<std::vector<std::string>> candidates(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
      candidates[i] = current;
      candidates[i].erase(candidates[i].begin() + static_cast<std::ptrdiff_t>(i));
    }
    parallel_for(current.size(), [&](std::size_t i) {
      std::size_t local = 0;
      scores[i] = evaluate_subset(table, params, plan, candidates[i], local);
    });
    trace.evaluations += current.size();

    std::size_t best_i = 0;
    for (std::size_t i = 1; i < current.size(); ++i) {
      if (scores[i] > scores[best_i] ||
          (scores[i] == scores[best_i] && current[i] < current[best_i]))
        best_i = i;
    }

    const std::string removed = current[best_i];
    current = std::move(candidates[best_i]);
    current_criterion = scores[best_i];
    removed_pool.push_back(removed);
    trace.steps.push_back({SbfsAction::Remove, removed,
                           static_cast<int>(current.size()), current_criterion});
    record_best(current, current_criterion);

    // floating step: re-add previously removed features while that strictly
    // improves the best known criterion at the larger size
    bool readded = true;
    while (readded && !removed_pool.empty()) {
      readded = false;
      std::vector<double> add_scores(removed_pool.size());
      std::vector<std::vector<std::string>> add_candidates(removed_pool.size());
      for (std::size_t i = 0; i < removed_pool.size(); ++i) {
        add_candidates[i] = current;
        insert_ordered(add_candidates[i], removed_pool[i]);
      }
      parallel_for(removed_pool.size(), [&](std::size_t i) {
        std::size_t local = 0;
        add_scores[i] = evaluate_subset(table, params, plan, add_candidates[i], local);
      });
      trace.evaluations += removed_pool.size();

      std::size_t best_a = 0;
      for (std::size_t i = 1; i < removed_pool.size(); ++i) {
        if (add_scores[i] > add_scores[best_a] ||
            (add_scores[i] == add_scores[best_a] &&
             removed_pool[i] < removed_pool[best_a]))
          best_a = i;
      }
      const int up_size = static_cast<int>(current.size()) + 1;
      const auto it = trace.best_subset_per_size.find(up_size);
      const double bar = it != trace.best_subset_per_size.end()
                             ? it->second.second
                             : -std::numeric_limits<double>::infinity();
      if (add_scores[best_a] > bar + opt.readd_margin) {
        const std::string added = removed_pool[best_a];
        current = std::move(add_candidates[best_a]);
        current_criterion = add_scores[best_a];
        removed_pool.erase(removed_pool.begin() + static_cast<std::ptrdiff_t>(best_a));
        trace.steps.push_back({SbfsAction::ConditionalAdd, added,
                               static_cast<int>(current.size()), current_criterion});
        record_best(current, current_criterion);
        readded = true;
      }
    }

    if (current_criterion > global_best + 1e-12) {
      global_best = current_criterion;
      sizes_without_improvement = 0;
    } else {
      ++sizes_without_improvement;
    }
    if (sizes_without_improvement > opt.patience) break;
  }

  // final subset: argmax criterion over all visited sizes, ties to smaller
  double best_c = -std::numeric_limits<double>::infinity();
  int best_size = 0;
  for (const auto& [size, entry] : trace.best_subset_per_size) {
    if (entry.second > best_c || (entry.second == best_c && size < best_size)) {
      best_c = entry.second;
      best_size = size;
    }
  }
  trace.final_subset = trace.best_subset_per_size.at(best_size).first;
  trace.final_criterion = best_c;
  return trace;
}

void write_selection_csv(const std::filesystem::path& path, const SelectionTrace& trace) {
  CsvTable csv;
  csv.header = {"step", "action", "feature", "subset_size", "criterion"};
  int step = 0;
  for (const auto& s : trace.steps) {
    CsvRow row;
    row.push_back(std::to_string(step++));
    row.push_back(s.action == SbfsAction::Remove ? "remove" : "conditional_add");
    row.push_back(s.feature);
    row.push_back(std::to_string(s.subset_size));
    row.push_back(fmt_double(s.criterion));
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

void write_subset_txt(const std::filesystem::path& path,
                      const std::vector<std::string>& subset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write subset file: " + path.string());
  for (const auto& name : subset) out << name << '\n';
  if (!out) throw DataError("failed writing subset file: " + path.string());
}

std::vector<std::string> read_subset_txt(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open subset file: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string name = trim(line);
    if (!name.empty()) out.push_back(name);
  }
  if (out.empty()) throw DataError("subset file is empty: " + path.string());
  return out;
}

}  // namespace tk
