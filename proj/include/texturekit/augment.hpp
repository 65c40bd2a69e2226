#pragma once

#include <cstdint>

#include "texturekit/patch.hpp"

namespace tk {

// Label-preserving augmentation. Geometric parameters (rotation, flip,
// scale, shear, elastic field) are drawn once per augmentation and shared by
// all three modalities to keep them co-registered; photometric parameters
// (noise, blur, contrast, brightness) are drawn per modality.
struct AugmentSpec {
  double rotation_deg = 15.0;     // rotation ~ U(-r, r)
  bool allow_flips = true;        // horizontal flip with probability 1/2
  double scale_lo = 0.9, scale_hi = 1.1;
  double elastic_alpha = 8.0;     // displacement magnitude (pixels, pre-smoothing)
  double elastic_sigma = 3.0;     // smoothing width (pixels)
  double shear_deg = 8.0;         // shear ~ U(-s, s)
  double noise_sigma = 0.02;      // additive Gaussian, intensity units
  double blur_sigma_lo = 0.0, blur_sigma_hi = 1.0;
  double contrast_lo = 0.8, contrast_hi = 1.2;   // gain around mid-gray 0.5
  double brightness = 0.1;        // offset ~ U(-b, b)
  int per_sample_count = 39;

  void validate() const;  // throws ConfigError on ill-formed ranges

  // All ranges collapsed to the identity transform; useful for tests.
  static AugmentSpec identity();
};

// One augmented triple; deterministic in (s, spec, seed). Output pixels are
// clamped to [0,1], augmented=true, sample_id = parent id + "-a<seed hex>".
SampleTriple augment_triple(const SampleTriple& s, const AugmentSpec& spec,
                            std::uint64_t seed);

// Originals plus spec.per_sample_count augmentations per sample. Child seeds
// are derived from (seed, sample index, augmentation index), so the result
// does not depend on scheduling.
Dataset augment_dataset(const Dataset& d, const AugmentSpec& spec, std::uint64_t seed);

}  // namespace tk
