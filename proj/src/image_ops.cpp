#include "texturekit/image_ops.hpp"

#include <cmath>
#include <vector>

namespace tk {

Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  Eigen::Index j = i % period;
  if (j < 0) j += period;
  return j < n ? j : period - j;
}

Grid gaussian_blur(const Grid& g, double sigma) {
  if (sigma <= 0.0) return g;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    sum += kernel[k + radius];
  }
  for (double& w : kernel) w /= sum;

  const Eigen::Index rows = g.rows(), cols = g.cols();
  Grid tmp(rows, cols), out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * g(r, reflect_index(c + k, cols));
      tmp(r, c) = acc;
    }
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * tmp(reflect_index(r + k, rows), c);
      out(r, c) = acc;
    }
  return out;
}

double sample_bilinear_reflect(const Grid& g, double y, double x) {
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  const Eigen::Index r0 = reflect_index(y0, g.rows());
  const Eigen::Index r1 = reflect_index(y0 + 1, g.rows());
  const Eigen::Index c0 = reflect_index(x0, g.cols());
  const Eigen::Index c1 = reflect_index(x0 + 1, g.cols());
  return (1.0 - fy) * ((1.0 - fx) * g(r0, c0) + fx * g(r0, c1)) +
         fy * ((1.0 - fx) * g(r1, c0) + fx * g(r1, c1));
}

Grid flip_horizontal(const Grid& g) {
  Grid out(g.rows(), g.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) out(r, c) = g(r, g.cols() - 1 - c);
  return out;
}

}  // namespace tk
