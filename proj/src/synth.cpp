#include "texturekit/synth.hpp"

#include <cmath>
#include <cstdio>

#include "texturekit/errors.hpp"
#include "texturekit/image_ops.hpp"
#include "texturekit/patch_io.hpp"
#include "texturekit/rng.hpp"

namespace tk {

const char* class_effect_name(ClassEffect e) {
  switch (e) {
    case ClassEffect::FirstOrderShift: return "first_order_shift";
    case ClassEffect::TextureShift: return "texture_shift";
    case ClassEffect::Mixed: return "mixed";
  }
  return "?";
}

ClassEffect class_effect_from_name(const std::string& name) {
  if (name == "first_order_shift") return ClassEffect::FirstOrderShift;
  if (name == "texture_shift") return ClassEffect::TextureShift;
  if (name == "mixed") return ClassEffect::Mixed;
  throw ConfigError("unknown class effect: " + name);
}

namespace {

// Per-modality base intensity and the positive-class adjustments. ADC shifts
// down (lesions read dark there), the other two shift up.
struct ModalityProfile {
  double base_mean;
  double mean_shift;
};

constexpr ModalityProfile kProfiles[3] = {
    {0.50, +0.10},  // t2w
    {0.55, -0.10},  // adc
    {0.45, +0.10},  // dwi
};

Grid make_texture(int size, double smooth_sigma, double target_mean, double target_std,
                  double noise_level, Rng& rng) {
  Grid field(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) field(r, c) = rng.normal();
  field = gaussian_blur(field, smooth_sigma);
  // rescale to the requested first-order statistics
  const double mean = field.mean();
  const double sd = std::sqrt((field - mean).square().mean());
  if (sd > 0) field = (field - mean) / sd * target_std + target_mean;
  else field = Grid::Constant(size, size, target_mean);
  if (noise_level > 0) {
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) field(r, c) += rng.normal(0.0, noise_level);
  }
  return field.min(1.0).max(0.0);
}

}  // namespace

Dataset synth_dataset(const SyntheticSpec& spec) {
  if (spec.n_patients < 5) throw ConfigError("synthetic spec needs at least 5 patients");
  if (spec.samples_per_patient < 1)
    throw ConfigError("samples_per_patient must be >= 1");
  if (spec.patch_size != 16 && spec.patch_size != 32)
    throw ConfigError("patch size must be 16 or 32");

  const bool shift_stats = spec.class_effect != ClassEffect::TextureShift;
  const bool shift_texture = spec.class_effect != ClassEffect::FirstOrderShift;
  const double sigma_neg = 0.6;
  const double sigma_pos = shift_texture ? 1.5 : sigma_neg;

  Dataset d;
  d.name = "synthetic";
  for (int pat = 0; pat < spec.n_patients; ++pat) {
    const bool positive = pat % 2 == 1;
    char pat_id[16];
    std::snprintf(pat_id, sizeof pat_id, "p%03d", pat);
    Rng pat_rng(mix_seed(spec.seed, static_cast<std::uint64_t>(pat), 0x9a7));
    const double patient_jitter = pat_rng.normal(0.0, 0.02);

    for (int k = 0; k < spec.samples_per_patient; ++k) {
      char sid[32];
      std::snprintf(sid, sizeof sid, "%s-s%02d", pat_id, k);
      SampleTriple s;
      const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
      for (int m = 0; m < 3; ++m) {
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(pat),
                         static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(m)));
        const ModalityProfile& prof = kProfiles[m];
        double mean = prof.base_mean + patient_jitter;
        double sd = 0.10;
        if (positive && shift_stats) {
          mean += prof.mean_shift;
          sd *= 1.4;
        }
        Patch& p = s.patch(mods[m]);
        p.pixels = make_texture(spec.patch_size, positive ? sigma_pos : sigma_neg, mean,
                                sd, spec.noise_level, rng);
        p.modality = mods[m];
        p.patient_id = pat_id;
        p.sample_id = sid;
        p.label = positive ? Label::Positive : Label::Negative;
      }
      d.samples.push_back(std::move(s));
    }
  }
  return d;
}

std::filesystem::path synth(const SyntheticSpec& spec,
                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  {
    // probe writability up front for a clean error
    const auto probe = out_dir / ".write_probe";
    FILE* fp = std::fopen(probe.string().c_str(), "wb");
    if (!fp) throw DataError("output directory is not writable: " + out_dir.string());
    std::fclose(fp);
    std::filesystem::remove(probe, ec);
  }
  return save_dataset(synth_dataset(spec), out_dir);
}

}  // namespace tk
