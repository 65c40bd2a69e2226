#include "texturekit/augment.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "texturekit/errors.hpp"
#include "texturekit/image_ops.hpp"
#include "texturekit/parallel.hpp"
#include "texturekit/rng.hpp"
#include "texturekit/strings.hpp"

namespace tk {

void AugmentSpec::validate() const {
  if (per_sample_count < 0) throw ConfigError("per_sample_count must be >= 0");
  if (rotation_deg < 0 || shear_deg < 0 || brightness < 0)
    throw ConfigError("augmentation ranges must be non-negative");
  if (scale_lo > scale_hi || blur_sigma_lo > blur_sigma_hi || contrast_lo > contrast_hi)
    throw ConfigError("augmentation range is not well-ordered");
  if (elastic_alpha < 0 || elastic_sigma < 0 || noise_sigma < 0 || blur_sigma_lo < 0)
    throw ConfigError("augmentation sigmas must be >= 0");
}

AugmentSpec AugmentSpec::identity() {
  AugmentSpec s;
  s.rotation_deg = 0.0;
  s.allow_flips = false;
  s.scale_lo = s.scale_hi = 1.0;
  s.elastic_alpha = 0.0;
  s.elastic_sigma = 1.0;
  s.shear_deg = 0.0;
  s.noise_sigma = 0.0;
  s.blur_sigma_lo = s.blur_sigma_hi = 0.0;
  s.contrast_lo = s.contrast_hi = 1.0;
  s.brightness = 0.0;
  return s;
}

namespace {

struct GeometricDraw {
  Eigen::Matrix2d inverse;  // output->input linear map (about the center)
  bool flip = false;
  Grid disp_row, disp_col;  // elastic displacement sampled at output pixels
  bool has_elastic = false;
};

GeometricDraw draw_geometry(const AugmentSpec& spec, Eigen::Index rows,
                            Eigen::Index cols, Rng& rng) {
  GeometricDraw g;
  const double deg2rad = 0.017453292519943295;
  const double theta = rng.uniform(-spec.rotation_deg, spec.rotation_deg) * deg2rad;
  const double scale = rng.uniform(spec.scale_lo, spec.scale_hi);
  const double shear = rng.uniform(-spec.shear_deg, spec.shear_deg) * deg2rad;
  g.flip = spec.allow_flips && rng.bernoulli(0.5);

  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::Matrix2d sh;
  sh << 1.0, std::tan(shear), 0.0, 1.0;
  Eigen::Matrix2d fwd = rot * sh * scale;
  g.inverse = fwd.inverse();

  if (spec.elastic_alpha > 0.0) {
    g.has_elastic = true;
    Grid raw_r(rows, cols), raw_c(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) raw_r(r, c) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) raw_c(r, c) = rng.uniform(-1.0, 1.0);
    g.disp_row = gaussian_blur(raw_r, spec.elastic_sigma) * spec.elastic_alpha;
    g.disp_col = gaussian_blur(raw_c, spec.elastic_sigma) * spec.elastic_alpha;
  }
  return g;
}

bool geometry_is_identity(const GeometricDraw& g) {
  return !g.flip && !g.has_elastic && g.inverse.isIdentity(0.0);
}

Grid warp(const Grid& in, const GeometricDraw& g) {
  if (geometry_is_identity(g)) return in;
  const Eigen::Index rows = in.rows(), cols = in.cols();
  const double cr = 0.5 * static_cast<double>(rows - 1);
  const double cc = 0.5 * static_cast<double>(cols - 1);
  Grid out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double oc = static_cast<double>(c) - cc;
      const double orr = static_cast<double>(r) - cr;
      if (g.flip) oc = -oc;
      Eigen::Vector2d src = g.inverse * Eigen::Vector2d(oc, orr);
      double sy = src(1) + cr;
      double sx = src(0) + cc;
      if (g.has_elastic) {
        sy += g.disp_row(r, c);
        sx += g.disp_col(r, c);
      }
      out(r, c) = sample_bilinear_reflect(in, sy, sx);
    }
  return out;
}

Grid photometric(const Grid& in, const AugmentSpec& spec, Rng& rng) {
  const double blur_sigma = rng.uniform(spec.blur_sigma_lo, spec.blur_sigma_hi);
  const double gain = rng.uniform(spec.contrast_lo, spec.contrast_hi);
  const double offset = rng.uniform(-spec.brightness, spec.brightness);

  Grid out = gaussian_blur(in, blur_sigma);
  if (spec.noise_sigma > 0.0) {
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        out(r, c) += rng.normal(0.0, spec.noise_sigma);
  }
  if (gain != 1.0 || offset != 0.0) out = (out - 0.5) * gain + 0.5 + offset;
  return out;
}

}  // namespace

SampleTriple augment_triple(const SampleTriple& s, const AugmentSpec& spec,
                            std::uint64_t seed) {
  spec.validate();
  Rng geo_rng(mix_seed(seed, 0));
  const GeometricDraw geo =
      draw_geometry(spec, s.t2w.pixels.rows(), s.t2w.pixels.cols(), geo_rng);

  SampleTriple out = s;
  const std::string child_id = s.sample_id() + "-a" + fmt_u64_hex(seed);
  const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
  for (int m = 0; m < 3; ++m) {
    Patch& p = out.patch(mods[m]);
    Rng photo_rng(mix_seed(seed, 1 + static_cast<std::uint64_t>(m)));
    Grid pixels = warp(s.patch(mods[m]).pixels, geo);
    pixels = photometric(pixels, spec, photo_rng);
    p.pixels = pixels.min(1.0).max(0.0);
    p.sample_id = child_id;
    p.augmented = true;
  }
  return out;
}

Dataset augment_dataset(const Dataset& d, const AugmentSpec& spec, std::uint64_t seed) {
  spec.validate();
  Dataset out;
  out.name = d.name;
  out.samples.resize(d.samples.size() * (1 + spec.per_sample_count));
  const std::size_t stride = 1 + static_cast<std::size_t>(spec.per_sample_count);
  parallel_for(d.samples.size(), [&](std::size_t i) {
    out.samples[i * stride] = d.samples[i];
    for (int a = 0; a < spec.per_sample_count; ++a) {
      const std::uint64_t child_seed =
          mix_seed(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(a));
      out.samples[i * stride + 1 + a] = augment_triple(d.samples[i], spec, child_seed);
    }
  });
  return out;
}

}  // namespace tk
