#include "texturekit/patch.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "texturekit/errors.hpp"

namespace tk {

const char* modality_tag(Modality m) {
  switch (m) {
    case Modality::T2W: return "t2-tra";
    case Modality::ADC: return "adc";
    case Modality::DWI: return "dwi_c-1400";
  }
  return "?";
}

bool Dataset::has_both_classes() const {
  bool pos = false, neg = false;
  for (const auto& s : samples) {
    (s.label() == Label::Positive ? pos : neg) = true;
    if (pos && neg) return true;
  }
  return false;
}

std::vector<std::string> Dataset::patient_ids() const {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& s : samples)
    if (seen.insert(s.patient_id()).second) ids.push_back(s.patient_id());
  return ids;
}

namespace {

void validate_patch(const Patch& p, const std::string& ctx) {
  if (p.pixels.size() == 0) throw DataError("empty patch for sample " + ctx);
  if (!((p.pixels >= 0.0).all() && (p.pixels <= 1.0).all()))
    throw DataError("pixel value outside [0,1] for sample " + ctx);
}

}  // namespace

void validate_triple(const SampleTriple& s) {
  const std::string& ctx = s.t2w.sample_id;
  validate_patch(s.t2w, ctx);
  validate_patch(s.adc, ctx);
  validate_patch(s.dwi, ctx);
  for (Modality m : {Modality::ADC, Modality::DWI}) {
    const Patch& p = s.patch(m);
    if (p.sample_id != s.t2w.sample_id || p.patient_id != s.t2w.patient_id ||
        p.label != s.t2w.label)
      throw DataError("modalities disagree on ids/label for sample " + ctx);
    if (p.width() != s.t2w.width() || p.height() != s.t2w.height())
      throw DataError("modalities disagree on dimensions for sample " + ctx);
  }
  if (s.t2w.modality != Modality::T2W || s.adc.modality != Modality::ADC ||
      s.dwi.modality != Modality::DWI)
    throw DataError("modality tags out of place for sample " + ctx);
}

Grid rescale_intensity(const GridI& raw, int bit_depth) {
  if (bit_depth < 8 || bit_depth > 16)
    throw ConfigError("bit_depth must be in [8,16], got " + std::to_string(bit_depth));
  const int maxval = (1 << bit_depth) - 1;
  if ((raw < 0).any() || (raw > maxval).any())
    throw DataError("raw intensity outside [0, 2^bit_depth - 1]");
  return raw.cast<double>() / static_cast<double>(maxval);
}

Grid resize_grid(const Grid& g, Eigen::Index out_rows, Eigen::Index out_cols) {
  const Eigen::Index in_rows = g.rows(), in_cols = g.cols();
  Grid out(out_rows, out_cols);
  const double sr = static_cast<double>(in_rows) / static_cast<double>(out_rows);
  const double sc = static_cast<double>(in_cols) / static_cast<double>(out_cols);
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    // half-pixel centers: output pixel center maps into input pixel space
    double y = (static_cast<double>(r) + 0.5) * sr - 0.5;
    y = std::clamp(y, 0.0, static_cast<double>(in_rows - 1));
    const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(y));
    const Eigen::Index y1 = std::min(y0 + 1, in_rows - 1);
    const double fy = y - static_cast<double>(y0);
    for (Eigen::Index c = 0; c < out_cols; ++c) {
      double x = (static_cast<double>(c) + 0.5) * sc - 0.5;
      x = std::clamp(x, 0.0, static_cast<double>(in_cols - 1));
      const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index x1 = std::min(x0 + 1, in_cols - 1);
      const double fx = x - static_cast<double>(x0);
      out(r, c) = (1.0 - fy) * ((1.0 - fx) * g(y0, x0) + fx * g(y0, x1)) +
                  fy * ((1.0 - fx) * g(y1, x0) + fx * g(y1, x1));
    }
  }
  return out;
}

Patch resize_patch(const Patch& p, int target) {
  if (target != 16 && target != 32)
    throw ConfigError("patch size must be 16 or 32, got " + std::to_string(target));
  if (p.pixels.size() == 0) throw DataError("cannot resize empty patch " + p.sample_id);
  if (p.height() == target && p.width() == target) return p;
  Patch out = p;
  out.pixels = resize_grid(p.pixels, target, target).min(1.0).max(0.0);
  return out;
}

Grid normalize(const Grid& g) {
  const double lo = g.minCoeff(), hi = g.maxCoeff();
  if (hi == lo) return Grid::Zero(g.rows(), g.cols());
  return (g - lo) / (hi - lo);
}

Patch normalize(const Patch& p) {
  Patch out = p;
  out.pixels = normalize(p.pixels);
  return out;
}

Grid standardize(const Grid& g) {
  const double mean = g.mean();
  const double var = (g - mean).square().mean();
  if (var == 0.0) return Grid::Zero(g.rows(), g.cols());
  return (g - mean) / std::sqrt(var);
}

const char* prep_name(Prep p) {
  switch (p) {
    case Prep::None: return "none";
    case Prep::Normalize: return "normalize";
    case Prep::Standardize: return "standardize";
    case Prep::Both: return "both";
  }
  return "?";
}

Prep prep_from_name(const std::string& name) {
  if (name == "none") return Prep::None;
  if (name == "normalize") return Prep::Normalize;
  if (name == "standardize") return Prep::Standardize;
  if (name == "both") return Prep::Both;
  throw ConfigError("unknown preprocessing variant: " + name);
}

Grid apply_prep(const Grid& g, Prep prep) {
  switch (prep) {
    case Prep::None: return g;
    case Prep::Normalize: return normalize(g);
    case Prep::Standardize: return standardize(g);
    case Prep::Both: return normalize(standardize(g));
  }
  return g;
}

}  // namespace tk
