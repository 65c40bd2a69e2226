#pragma once

// Independent brute-force reference implementations used to check the
// library. These deliberately avoid calling the code paths they verify.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// population moments by plain accumulation loops
struct Moments {
  double mean, std, skewness, kurtosis;
};

inline Moments moments(const Eigen::ArrayXXd& g) {
  const double n = static_cast<double>(g.size());
  double sum = 0;
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) sum += g(r, c);
  const double mean = sum / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      const double d = g(r, c) - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
    }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments m{mean, std::sqrt(m2), 0, 0};
  if (m2 > 0) {
    m.skewness = m3 / (m.std * m.std * m.std);
    m.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

// direct bilinear evaluation with half-pixel centers (resize reference)
inline double bilinear_at(const Eigen::ArrayXXd& g, double y, double x) {
  y = std::clamp(y, 0.0, static_cast<double>(g.rows() - 1));
  x = std::clamp(x, 0.0, static_cast<double>(g.cols() - 1));
  const auto y0 = static_cast<Eigen::Index>(std::floor(y));
  const auto x0 = static_cast<Eigen::Index>(std::floor(x));
  const auto y1 = std::min(y0 + 1, g.rows() - 1);
  const auto x1 = std::min(x0 + 1, g.cols() - 1);
  const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  return (1 - fy) * ((1 - fx) * g(y0, x0) + fx * g(y0, x1)) +
         fy * ((1 - fx) * g(y1, x0) + fx * g(y1, x1));
}

inline Eigen::ArrayXXd resize_direct(const Eigen::ArrayXXd& g, int out_rows, int out_cols) {
  Eigen::ArrayXXd out(out_rows, out_cols);
  for (int r = 0; r < out_rows; ++r)
    for (int c = 0; c < out_cols; ++c) {
      const double y = (r + 0.5) * g.rows() / out_rows - 0.5;
      const double x = (c + 0.5) * g.cols() / out_cols - 0.5;
      out(r, c) = bilinear_at(g, y, x);
    }
  return out;
}

// GLCM by direct pair enumeration
inline Eigen::MatrixXd glcm_direct(const Eigen::ArrayXXd& g, int levels, int distance,
                                   int dr, int dc) {
  const double lo = g.minCoeff(), hi = g.maxCoeff();
  auto bin = [&](double v) {
    if (hi == lo) return 0;
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * levels));
    return std::min(b, levels - 1);
  };
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(levels, levels);
  double total = 0;
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      const Eigen::Index r2 = r + dr * distance, c2 = c + dc * distance;
      if (r2 < 0 || r2 >= g.rows() || c2 < 0 || c2 >= g.cols()) continue;
      counts(bin(g(r, c)), bin(g(r2, c2))) += 1;
      counts(bin(g(r2, c2)), bin(g(r, c))) += 1;
      total += 2;
    }
  return counts / total;
}

// Haralick f1..f13 straight from the textbook formulas (base-2 logs,
// 0 log 0 = 0); returns NaN for entries whose intermediates are undefined
struct HaralickRef {
  double f[13];
};

inline HaralickRef haralick_direct(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  auto lg = [](double v) { return std::log2(v); };
  std::vector<double> px(n, 0), py(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      px[i] += p(i, j);
      py[j] += p(i, j);
    }
  double mux = 0, muy = 0;
  for (int i = 0; i < n; ++i) {
    mux += i * px[i];
    muy += i * py[i];
  }
  double sx2 = 0, sy2 = 0;
  for (int i = 0; i < n; ++i) {
    sx2 += (i - mux) * (i - mux) * px[i];
    sy2 += (i - muy) * (i - muy) * py[i];
  }
  std::vector<double> psum(2 * n - 1, 0), pdiff(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      psum[i + j] += p(i, j);
      pdiff[std::abs(i - j)] += p(i, j);
    }

  HaralickRef h{};
  double& f1 = h.f[0];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f1 += p(i, j) * p(i, j);
  for (int k = 0; k < n; ++k) h.f[1] += static_cast<double>(k) * k * pdiff[k];
  double cross = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cross += static_cast<double>(i) * j * p(i, j);
  h.f[2] = (sx2 > 0 && sy2 > 0) ? (cross - mux * muy) / std::sqrt(sx2 * sy2)
                                : std::nan("");
  h.f[3] = sx2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.f[4] += p(i, j) / (1.0 + (i - j) * (i - j));
  for (std::size_t k = 0; k < psum.size(); ++k) h.f[5] += k * psum[k];
  for (std::size_t k = 0; k < psum.size(); ++k)
    h.f[6] += (k - h.f[5]) * (k - h.f[5]) * psum[k];
  for (double v : psum)
    if (v > 0) h.f[7] -= v * lg(v);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p(i, j) > 0) h.f[8] -= p(i, j) * lg(p(i, j));
  double dmean = 0;
  for (int k = 0; k < n; ++k) dmean += k * pdiff[k];
  for (int k = 0; k < n; ++k) h.f[9] += (k - dmean) * (k - dmean) * pdiff[k];
  for (double v : pdiff)
    if (v > 0) h.f[10] -= v * lg(v);
  double hx = 0, hy = 0, hxy1 = 0, hxy2 = 0;
  for (int i = 0; i < n; ++i) {
    if (px[i] > 0) hx -= px[i] * lg(px[i]);
    if (py[i] > 0) hy -= py[i] * lg(py[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (p(i, j) > 0 && px[i] * py[j] > 0) hxy1 -= p(i, j) * lg(px[i] * py[j]);
      if (px[i] * py[j] > 0) hxy2 -= px[i] * py[j] * lg(px[i] * py[j]);
    }
  h.f[11] = std::max(hx, hy) > 0 ? (h.f[8] - hxy1) / std::max(hx, hy) : std::nan("");
  h.f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - h.f[8]))));
  return h;
}

// f14 via the general (non-symmetric) eigen decomposition of Q restricted to
// the marginal support: a different route than the library's symmetric form
inline double haralick_f14_direct(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<double> px(n, 0), py(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      px[i] += p(i, j);
      py[j] += p(i, j);
    }
  std::vector<int> sup;
  for (int i = 0; i < n; ++i)
    if (px[i] > 0 && py[i] > 0) sup.push_back(i);
  const int s = static_cast<int>(sup.size());
  if (s < 2) return std::nan("");
  Eigen::MatrixXd q(s, s);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      double acc = 0;
      for (int c = 0; c < s; ++c)
        acc += p(sup[a], sup[c]) * p(sup[b], sup[c]) / (px[sup[a]] * py[sup[c]]);
      q(a, b) = acc;
    }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(q);
  std::vector<double> re;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    re.push_back(solver.eigenvalues()(i).real());
  std::sort(re.begin(), re.end());
  return std::sqrt(std::clamp(re[re.size() - 2], 0.0, 1.0));
}

// naive per-pixel riu2 LBP with its own trigonometry and interpolation
inline Eigen::VectorXd lbp_riu2_naive(const Eigen::ArrayXXd& g, int p, double r) {
  const int border = static_cast<int>(std::ceil(r));
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(p + 2);
  double centers = 0;
  for (Eigen::Index y = border; y < g.rows() - border; ++y)
    for (Eigen::Index x = border; x < g.cols() - border; ++x) {
      std::vector<int> bits(p);
      for (int k = 0; k < p; ++k) {
        const double a = 2.0 * M_PI * k / p;
        double sx = x + r * std::cos(a);
        double sy = y - r * std::sin(a);
        if (std::abs(sx - std::round(sx)) < 1e-9) sx = std::round(sx);
        if (std::abs(sy - std::round(sy)) < 1e-9) sy = std::round(sy);
        const auto x0 = static_cast<Eigen::Index>(std::floor(sx));
        const auto y0 = static_cast<Eigen::Index>(std::floor(sy));
        const auto x1 = std::min(x0 + 1, g.cols() - 1);
        const auto y1 = std::min(y0 + 1, g.rows() - 1);
        const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
        double v;
        if (g(y0, x0) == g(y0, x1) && g(y0, x0) == g(y1, x0) && g(y0, x0) == g(y1, x1))
          v = g(y0, x0);
        else
          v = (1 - fy) * ((1 - fx) * g(y0, x0) + fx * g(y0, x1)) +
              fy * ((1 - fx) * g(y1, x0) + fx * g(y1, x1));
        bits[k] = v >= g(y, x) ? 1 : 0;
      }
      int transitions = 0, ones = 0;
      for (int k = 0; k < p; ++k) {
        transitions += bits[k] != bits[(k + 1) % p];
        ones += bits[k];
      }
      hist(transitions <= 2 ? ones : p + 1) += 1;
      centers += 1;
    }
  return hist / centers;
}

// pairwise Mann-Whitney AUC
inline double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1;
      if (scores[i] > scores[j]) num += 1;
      else if (scores[i] == scores[j]) num += 0.5;
    }
  }
  return num / pairs;
}

// textbook Pearson r
inline double pearson_direct(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// adjusted Rand index between two labelings
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<double>> table(ka, std::vector<double>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]] += 1;
  auto comb2 = [](double x) { return x * (x - 1) / 2; };
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (int i = 0; i < ka; ++i) {
    double row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_ij += comb2(table[i][j]);
      row += table[i][j];
    }
    sum_a += comb2(row);
  }
  for (int j = 0; j < kb; ++j) {
    double col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    sum_b += comb2(col);
  }
  const double n = static_cast<double>(a.size());
  const double expected = sum_a * sum_b / comb2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

// unique scratch directory, removed on destruction
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() /
           ("tk_test_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace oracle
