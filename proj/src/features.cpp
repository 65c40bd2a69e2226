#include "texturekit/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "texturekit/errors.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/strings.hpp"
#include "texturekit/csv.hpp"

namespace tk {

namespace {

std::vector<std::string> make_feature_tags() {
  std::vector<std::string> tags = {"mean", "std", "skewness", "kurtosis"};
  for (int i = 1; i <= kNumHaralick; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "haralick%02d", i);
    tags.emplace_back(buf);
  }
  for (int i = 1; i <= 35; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "lbp-%02d", i);
    tags.emplace_back(buf);
  }
  return tags;
}

const std::vector<std::string>& feature_tags() {
  static const std::vector<std::string> tags = make_feature_tags();
  return tags;
}

}  // namespace

const std::vector<std::string>& canonical_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    out.reserve(kNumFeatures);
    for (int m = 0; m < kNumModalities; ++m)
      for (const auto& tag : feature_tags())
        out.push_back(std::string(modality_tag(static_cast<Modality>(m))) + "_" + tag);
    return out;
  }();
  return names;
}

std::string feature_name(Modality m, int feature_index_within_modality) {
  return std::string(modality_tag(m)) + "_" + feature_tags().at(feature_index_within_modality);
}

FirstOrder first_order(const Grid& g) {
  FirstOrder f;
  const double n = static_cast<double>(g.size());
  f.mean = g.mean();
  const Grid centered = g - f.mean;
  const double m2 = centered.square().sum() / n;
  f.std = std::sqrt(m2);
  if (m2 == 0.0) return f;  // skewness/kurtosis are 0 by convention
  const double m3 = centered.cube().sum() / n;
  const double m4 = centered.square().square().sum() / n;
  f.skewness = m3 / (f.std * f.std * f.std);
  f.kurtosis = m4 / (m2 * m2) - 3.0;
  return f;
}

// ---------------------------------------------------------------------------
// GLCM
// ---------------------------------------------------------------------------

Eigen::MatrixXd compute_glcm(const Grid& g, int levels, int distance, GlcmDirection dir) {
  if (levels < 2) throw ConfigError("GLCM levels must be >= 2");
  if (distance < 1) throw ConfigError("GLCM distance must be >= 1");

  const double lo = g.minCoeff(), hi = g.maxCoeff();
  const double range = hi - lo;
  GridI q(g.rows(), g.cols());
  if (range == 0.0) {
    q.setZero();
  } else {
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      for (Eigen::Index c = 0; c < g.cols(); ++c) {
        int bin = static_cast<int>(std::floor((g(r, c) - lo) / range * levels));
        q(r, c) = std::min(bin, levels - 1);
      }
  }

  int dr = 0, dc = 0;
  switch (dir) {
    case GlcmDirection::Deg0: dr = 0; dc = 1; break;
    case GlcmDirection::Deg45: dr = -1; dc = 1; break;
    case GlcmDirection::Deg90: dr = -1; dc = 0; break;
    case GlcmDirection::Deg135: dr = -1; dc = -1; break;
  }
  dr *= distance;
  dc *= distance;

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(levels, levels);
  double total = 0.0;
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const Eigen::Index r2 = r + dr, c2 = c + dc;
      if (r2 < 0 || r2 >= q.rows() || c2 < 0 || c2 >= q.cols()) continue;
      counts(q(r, c), q(r2, c2)) += 1.0;
      counts(q(r2, c2), q(r, c)) += 1.0;
      total += 2.0;
    }
  if (total == 0.0)
    throw DataError("grid has no pixel pair at the requested GLCM offset");
  return counts / total;
}

// ---------------------------------------------------------------------------
// Haralick features
// ---------------------------------------------------------------------------

namespace {

inline double lg(double x) { return std::log2(x); }
inline double entropy_term(double p) { return p > 0.0 ? -p * lg(p) : 0.0; }

std::optional<double> haralick_f14(const Eigen::MatrixXd& p, const Eigen::VectorXd& px,
                                   const Eigen::VectorXd& py) {
  std::vector<int> support;
  for (int i = 0; i < px.size(); ++i)
    if (px(i) > 0.0 && py(i) > 0.0) support.push_back(i);
  const int s = static_cast<int>(support.size());
  if (s < 2) return std::nullopt;

  // Q = Dx^-1 P Dy^-1 P^T is similar to M M^T with M = Dx^-1/2 P Dy^-1/2,
  // so its spectrum is that of a symmetric PSD matrix with top eigenvalue 1.
  Eigen::MatrixXd m(s, s);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      m(a, b) = p(support[a], support[b]) /
                std::sqrt(px(support[a]) * py(support[b]));
  Eigen::MatrixXd a = m * m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const double second = solver.eigenvalues()(s - 2);  // ascending order
  if (!std::isfinite(second) || second < -1e-8 || second > 1.0 + 1e-8)
    return std::nullopt;
  return std::sqrt(std::clamp(second, 0.0, 1.0));
}

}  // namespace

std::array<std::optional<double>, kNumHaralick> haralick_single(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  std::array<std::optional<double>, kNumHaralick> f;

  const Eigen::VectorXd px = p.rowwise().sum();
  const Eigen::VectorXd py = p.colwise().sum();

  double mu_x = 0, mu_y = 0;
  for (int i = 0; i < n; ++i) {
    mu_x += i * px(i);
    mu_y += i * py(i);
  }
  double var_x = 0, var_y = 0;
  for (int i = 0; i < n; ++i) {
    var_x += (i - mu_x) * (i - mu_x) * px(i);
    var_y += (i - mu_y) * (i - mu_y) * py(i);
  }

  Eigen::VectorXd p_sum = Eigen::VectorXd::Zero(2 * n - 1);
  Eigen::VectorXd p_diff = Eigen::VectorXd::Zero(n);
  double asm_ = 0, idm = 0, entropy = 0, cross_moment = 0, hxy1 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = p(i, j);
      if (v == 0.0) continue;
      p_sum(i + j) += v;
      p_diff(std::abs(i - j)) += v;
      asm_ += v * v;
      idm += v / (1.0 + (i - j) * (i - j));
      entropy += entropy_term(v);
      cross_moment += static_cast<double>(i) * j * v;
      hxy1 += -v * lg(px(i) * py(j));
    }

  f[0] = asm_;

  double contrast = 0;
  for (int k = 0; k < n; ++k) contrast += static_cast<double>(k) * k * p_diff(k);
  f[1] = contrast;

  if (var_x > 0.0 && var_y > 0.0)
    f[2] = (cross_moment - mu_x * mu_y) / std::sqrt(var_x * var_y);

  f[3] = var_x;
  f[4] = idm;

  double sum_avg = 0;
  for (int k = 0; k < p_sum.size(); ++k) sum_avg += k * p_sum(k);
  f[5] = sum_avg;

  double sum_var = 0, sum_entropy = 0;
  for (int k = 0; k < p_sum.size(); ++k) {
    sum_var += (k - sum_avg) * (k - sum_avg) * p_sum(k);
    sum_entropy += entropy_term(p_sum(k));
  }
  f[6] = sum_var;
  f[7] = sum_entropy;
  f[8] = entropy;

  double diff_mean = 0;
  for (int k = 0; k < n; ++k) diff_mean += k * p_diff(k);
  double diff_var = 0, diff_entropy = 0;
  for (int k = 0; k < n; ++k) {
    diff_var += (k - diff_mean) * (k - diff_mean) * p_diff(k);
    diff_entropy += entropy_term(p_diff(k));
  }
  f[9] = diff_var;
  f[10] = diff_entropy;

  double hx = 0, hy = 0;
  for (int i = 0; i < n; ++i) {
    hx += entropy_term(px(i));
    hy += entropy_term(py(i));
  }
  const double hmax = std::max(hx, hy);
  if (hmax > 0.0) f[11] = (entropy - hxy1) / hmax;

  double hxy2 = 0;
  for (int i = 0; i < n; ++i) {
    if (px(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (py(j) == 0.0) continue;
      hxy2 += entropy_term(px(i) * py(j));
    }
  }
  f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - entropy))));

  f[13] = haralick_f14(p, px, py);

  for (auto& v : f)
    if (v && !std::isfinite(*v)) v = std::nullopt;
  return f;
}

std::array<std::optional<double>, kNumHaralick> haralick_features(
    const std::vector<Eigen::MatrixXd>& glcms) {
  std::array<std::optional<double>, kNumHaralick> out;
  if (glcms.empty()) return out;
  std::array<double, kNumHaralick> acc{};
  std::array<bool, kNumHaralick> ok;
  ok.fill(true);
  for (const auto& g : glcms) {
    const auto f = haralick_single(g);
    for (int i = 0; i < kNumHaralick; ++i) {
      if (f[i])
        acc[i] += *f[i];
      else
        ok[i] = false;  // missing in any direction means missing overall
    }
  }
  for (int i = 0; i < kNumHaralick; ++i)
    if (ok[i]) out[i] = acc[i] / static_cast<double>(glcms.size());
  return out;
}

// ---------------------------------------------------------------------------
// LBP
// ---------------------------------------------------------------------------

namespace {

struct Offset {
  double dy, dx;
};

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

// Sample offsets on the circle. When p is a multiple of 4 the quadrants are
// derived by exact 90-degree rotation so the sample set is bit-exactly
// 4-fold symmetric.
std::vector<Offset> circle_offsets(int p, double r) {
  std::vector<Offset> offs(p);
  const double two_pi = 6.283185307179586476925286766559;
  if (p % 4 == 0) {
    const int quarter = p / 4;
    for (int k = 0; k < quarter; ++k) {
      const double a = two_pi * k / p;
      const double mx = snap(r * std::cos(a));
      const double my = snap(r * std::sin(a));
      offs[k] = {-my, mx};
    }
    for (int k = quarter; k < p; ++k) {
      // rotate the previous quadrant by exactly 90 degrees CCW
      const Offset& prev = offs[k - quarter];
      offs[k] = {-prev.dx, prev.dy};
    }
  } else {
    for (int k = 0; k < p; ++k) {
      const double a = two_pi * k / p;
      offs[k] = {-snap(r * std::sin(a)), snap(r * std::cos(a))};
    }
  }
  return offs;
}

// Bilinear sample inside a full neighborhood; constant 2x2 cells return the
// exact cell value so equal-to-center comparisons stay exact.
double sample_ring(const Grid& g, double y, double x) {
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  const Eigen::Index y1 = std::min(y0 + 1, g.rows() - 1);
  const Eigen::Index x1 = std::min(x0 + 1, g.cols() - 1);
  const double v00 = g(y0, x0), v01 = g(y0, x1), v10 = g(y1, x0), v11 = g(y1, x1);
  if (v00 == v01 && v00 == v10 && v00 == v11) return v00;
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
}

int border_for(double r) { return static_cast<int>(std::ceil(r)); }

}  // namespace

Eigen::VectorXd lbp_riu2_histogram(const Grid& g, int p, double r) {
  const int border = border_for(r);
  const Eigen::Index rows = g.rows(), cols = g.cols();
  if (rows <= 2 * border || cols <= 2 * border)
    throw DataError("grid too small for LBP radius " + fmt_double(r));

  const auto offs = circle_offsets(p, r);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(p + 2);
  std::vector<int> bits(p);
  double centers = 0;
  for (Eigen::Index y = border; y < rows - border; ++y)
    for (Eigen::Index x = border; x < cols - border; ++x) {
      const double center = g(y, x);
      int ones = 0;
      for (int k = 0; k < p; ++k) {
        const double v = sample_ring(g, y + offs[k].dy, x + offs[k].dx);
        bits[k] = v >= center ? 1 : 0;
        ones += bits[k];
      }
      int transitions = 0;
      for (int k = 0; k < p; ++k) transitions += bits[k] != bits[(k + 1) % p];
      const int code = transitions <= 2 ? ones : p + 1;
      hist(code) += 1.0;
      centers += 1.0;
    }
  return hist / centers;
}

std::vector<double> lbp_var_values(const Grid& g, int p, double r) {
  const int border = border_for(r);
  const Eigen::Index rows = g.rows(), cols = g.cols();
  if (rows <= 2 * border || cols <= 2 * border)
    throw DataError("grid too small for VAR radius " + fmt_double(r));

  const auto offs = circle_offsets(p, r);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>((rows - 2 * border) * (cols - 2 * border)));
  std::vector<double> ring(p);
  for (Eigen::Index y = border; y < rows - border; ++y)
    for (Eigen::Index x = border; x < cols - border; ++x) {
      double mu = 0;
      for (int k = 0; k < p; ++k) {
        ring[k] = sample_ring(g, y + offs[k].dy, x + offs[k].dx);
        mu += ring[k];
      }
      mu /= p;
      double var = 0;
      for (int k = 0; k < p; ++k) var += (ring[k] - mu) * (ring[k] - mu);
      out.push_back(var / p);
    }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantile_edges(std::vector<double> values, int bins) {
  if (values.empty()) throw DataError("no values to fit quantile edges");
  std::sort(values.begin(), values.end());
  std::vector<double> edges(bins - 1);
  for (int i = 1; i < bins; ++i)
    edges[i - 1] = quantile_sorted(values, static_cast<double>(i) / bins);
  return edges;
}

Eigen::VectorXd lbp_features(const Grid& g, const LbpConfig& cfg) {
  Eigen::VectorXd out(cfg.total_bins());
  int at = 0;
  const Eigen::VectorXd h1 = lbp_riu2_histogram(g, cfg.p1, cfg.r1);
  out.segment(at, h1.size()) = h1;
  at += static_cast<int>(h1.size());
  const Eigen::VectorXd h2 = lbp_riu2_histogram(g, cfg.p2, cfg.r2);
  out.segment(at, h2.size()) = h2;
  at += static_cast<int>(h2.size());

  const std::vector<double> vars = lbp_var_values(g, cfg.var_p, cfg.var_r);
  std::vector<double> edges = cfg.var_edges;
  if (edges.empty()) edges = quantile_edges(vars, cfg.var_bins);
  if (static_cast<int>(edges.size()) != cfg.var_bins - 1)
    throw ConfigError("VAR edge count does not match bin count");

  Eigen::VectorXd vh = Eigen::VectorXd::Zero(cfg.var_bins);
  for (double v : vars) {
    int bin = cfg.var_bins - 1;
    for (int i = 0; i < cfg.var_bins - 1; ++i)
      if (v <= edges[i]) {
        bin = i;
        break;
      }
    vh(bin) += 1.0;
  }
  vh /= static_cast<double>(vars.size());
  out.segment(at, cfg.var_bins) = vh;
  return out;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

FeatureVector extract_features(const SampleTriple& s, const FeatureConfig& cfg) {
  FeatureVector fv;
  fv.values.setZero();
  const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
  for (int m = 0; m < kNumModalities; ++m) {
    const int base = m * kFeaturesPerModality;
    Grid grid;
    try {
      grid = apply_prep(s.patch(mods[m]).pixels, cfg.prep);

      const FirstOrder fo = first_order(grid);
      fv.values(base + 0) = fo.mean;
      fv.values(base + 1) = fo.std;
      fv.values(base + 2) = fo.skewness;
      fv.values(base + 3) = fo.kurtosis;

      std::vector<Eigen::MatrixXd> glcms;
      for (int d = 0; d < 4; ++d)
        glcms.push_back(compute_glcm(grid, cfg.glcm.levels, cfg.glcm.distance,
                                     static_cast<GlcmDirection>(d)));
      const auto har = haralick_features(glcms);
      for (int i = 0; i < kNumHaralick; ++i) {
        if (har[i]) {
          fv.values(base + 4 + i) = *har[i];
        } else {
          fv.missing[base + 4 + i] = true;
        }
      }

      LbpConfig lbp = cfg.lbp;
      if (!cfg.var_edges_per_modality[m].empty())
        lbp.var_edges = cfg.var_edges_per_modality[m];
      const Eigen::VectorXd lb = lbp_features(grid, lbp);
      fv.values.segment(base + 4 + kNumHaralick, lb.size()) = lb;
    } catch (const DataError& e) {
      throw DataError("sample " + s.sample_id() + ": " + e.what());
    }
  }
  return fv;
}

int FeatureTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i)
    if (feature_names[i] == name) return static_cast<int>(i);
  return -1;
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
  FeatureTable out;
  out.sample_ids = sample_ids;
  out.patient_ids = patient_ids;
  out.labels = labels;
  out.feature_names = names;
  out.values.resize(rows(), static_cast<Eigen::Index>(names.size()));
  out.missing.assign(static_cast<std::size_t>(rows()),
                     std::vector<bool>(names.size(), false));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const int src = column_index(names[j]);
    if (src < 0) throw DataError("unknown feature column: " + names[j]);
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(src);
    for (Eigen::Index r = 0; r < rows(); ++r)
      out.missing[static_cast<std::size_t>(r)][j] =
          missing[static_cast<std::size_t>(r)][static_cast<std::size_t>(src)];
  }
  for (const auto& name : imputed_columns)
    if (std::find(names.begin(), names.end(), name) != names.end())
      out.imputed_columns.push_back(name);
  return out;
}

FeatureTable build_table(const Dataset& d, const FeatureConfig& cfg) {
  if (d.samples.empty()) throw DataError("cannot build a feature table from an empty dataset");
  FeatureTable t;
  t.feature_names = canonical_feature_names();
  const std::size_t n = d.samples.size();
  t.sample_ids.resize(n);
  t.patient_ids.resize(n);
  t.labels.resize(n);
  t.values.resize(static_cast<Eigen::Index>(n), kNumFeatures);
  t.missing.assign(n, std::vector<bool>(kNumFeatures, false));

  std::vector<FeatureVector> fvs(n);
  parallel_for(n, [&](std::size_t i) { fvs[i] = extract_features(d.samples[i], cfg); });

  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = d.samples[i];
    t.sample_ids[i] = s.sample_id();
    t.patient_ids[i] = s.patient_id();
    t.labels[i] = s.label() == Label::Positive ? 1 : 0;
    t.values.row(static_cast<Eigen::Index>(i)) = fvs[i].values.transpose();
    for (int j = 0; j < kNumFeatures; ++j) t.missing[i][j] = fvs[i].missing[j];
  }

  for (int j = 0; j < kNumFeatures; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (t.missing[i][j]) {
        t.values(static_cast<Eigen::Index>(i), j) = 0.0;  // imputation
        any = true;
      }
    if (any) t.imputed_columns.push_back(t.feature_names[j]);
  }
  return t;
}

std::array<std::vector<double>, kNumModalities> fit_var_edges(const Dataset& d,
                                                              const FeatureConfig& cfg) {
  std::array<std::vector<double>, kNumModalities> edges;
  const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
  for (int m = 0; m < kNumModalities; ++m) {
    std::vector<double> pooled;
    for (const auto& s : d.samples) {
      const Grid grid = apply_prep(s.patch(mods[m]).pixels, cfg.prep);
      const auto vals = lbp_var_values(grid, cfg.lbp.var_p, cfg.lbp.var_r);
      pooled.insert(pooled.end(), vals.begin(), vals.end());
    }
    edges[m] = quantile_edges(std::move(pooled), cfg.lbp.var_bins);
  }
  return edges;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t,
                       bool imputed) {
  CsvTable csv;
  csv.header = {"sample_id", "patient_id", "label"};
  for (const auto& name : t.feature_names) csv.header.push_back(name);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    CsvRow row;
    row.reserve(csv.header.size());
    row.push_back(t.sample_ids[static_cast<std::size_t>(i)]);
    row.push_back(t.patient_ids[static_cast<std::size_t>(i)]);
    row.push_back(std::to_string(t.labels[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      if (!imputed && t.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
        row.emplace_back();  // empty cell marks a missing value
      else
        row.push_back(fmt_double(t.values(i, j)));
    }
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  if (csv.header.size() < 4 || csv.header[0] != "sample_id" ||
      csv.header[1] != "patient_id" || csv.header[2] != "label")
    throw DataError("feature CSV header mismatch in " + path.string());
  FeatureTable t;
  t.feature_names.assign(csv.header.begin() + 3, csv.header.end());
  const std::size_t ncols = t.feature_names.size();
  const std::size_t nrows = csv.rows.size();
  if (nrows == 0) throw DataError("feature CSV has no rows: " + path.string());
  t.sample_ids.resize(nrows);
  t.patient_ids.resize(nrows);
  t.labels.resize(nrows);
  t.values.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  t.missing.assign(nrows, std::vector<bool>(ncols, false));
  for (std::size_t i = 0; i < nrows; ++i) {
    const CsvRow& row = csv.rows[i];
    if (row.size() != ncols + 3)
      throw DataError("feature CSV row with wrong field count in " + path.string());
    t.sample_ids[i] = row[0];
    t.patient_ids[i] = row[1];
    std::int64_t label = -1;
    if (!parse_i64(row[2], label) || (label != 0 && label != 1))
      throw DataError("label outside {0,1} in feature CSV for sample " + row[0]);
    t.labels[i] = static_cast<int>(label);
    for (std::size_t j = 0; j < ncols; ++j) {
      if (trim(row[3 + j]).empty()) {
        t.missing[i][j] = true;
        t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
      } else {
        double v = 0;
        if (!parse_double(row[3 + j], v))
          throw DataError("bad numeric cell in feature CSV for sample " + row[0]);
        t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    }
  }
  for (std::size_t j = 0; j < ncols; ++j)
    for (std::size_t i = 0; i < nrows; ++i)
      if (t.missing[i][j]) {
        t.imputed_columns.push_back(t.feature_names[j]);
        break;
      }
  return t;
}

}  // namespace tk
