#pragma once

#include "texturekit/patch.hpp"

namespace tk {

// Separable Gaussian blur, kernel radius ceil(3*sigma), reflect-101 borders.
// sigma <= 0 returns the input unchanged.
Grid gaussian_blur(const Grid& g, double sigma);

// Mirror index into [0, n) without repeating the edge sample (reflect-101).
Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n);

// Bilinear sample at (row y, col x); out-of-range coordinates are reflected.
double sample_bilinear_reflect(const Grid& g, double y, double x);

Grid flip_horizontal(const Grid& g);

}  // namespace tk
