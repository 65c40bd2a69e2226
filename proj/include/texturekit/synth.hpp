#pragma once

#include <cstdint>
#include <filesystem>

#include "texturekit/patch.hpp"

namespace tk {

enum class ClassEffect { FirstOrderShift, TextureShift, Mixed };
const char* class_effect_name(ClassEffect e);
ClassEffect class_effect_from_name(const std::string& name);

// Synthetic stand-in dataset: per-patient sample triples built from smoothed
// noise textures. Negative patients use the base process; positive patients
// get an intensity shift (first_order_shift), a coarser spatial correlation
// with matched first-order statistics (texture_shift), or both (mixed).
struct SyntheticSpec {
  int n_patients = 40;
  int samples_per_patient = 2;
  int patch_size = 16;
  ClassEffect class_effect = ClassEffect::Mixed;
  double noise_level = 0.02;
  std::uint64_t seed = 1;
};

Dataset synth_dataset(const SyntheticSpec& spec);

// Writes patches plus manifest into out_dir and returns the manifest path.
std::filesystem::path synth(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace tk
