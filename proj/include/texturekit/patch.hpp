#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace tk {

using Grid = Eigen::ArrayXXd;  // row index = image row, column index = image column
using GridI = Eigen::ArrayXXi;

enum class Modality { T2W = 0, ADC = 1, DWI = 2 };
inline constexpr int kNumModalities = 3;

const char* modality_tag(Modality m);  // "t2-tra", "adc", "dwi_c-1400"

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

// One 2D intensity grid for one modality of one sample. Pixels live in [0,1].
struct Patch {
  Grid pixels;
  Modality modality = Modality::T2W;
  std::string patient_id;
  std::string sample_id;
  Label label = Label::Negative;
  bool augmented = false;

  Eigen::Index width() const { return pixels.cols(); }
  Eigen::Index height() const { return pixels.rows(); }
};

// Co-registered patches of the three modalities for one sample.
struct SampleTriple {
  Patch t2w, adc, dwi;

  const std::string& sample_id() const { return t2w.sample_id; }
  const std::string& patient_id() const { return t2w.patient_id; }
  Label label() const { return t2w.label; }
  bool augmented() const { return t2w.augmented; }

  const Patch& patch(Modality m) const {
    switch (m) {
      case Modality::ADC: return adc;
      case Modality::DWI: return dwi;
      default: return t2w;
    }
  }
  Patch& patch(Modality m) {
    switch (m) {
      case Modality::ADC: return adc;
      case Modality::DWI: return dwi;
      default: return t2w;
    }
  }
};

struct Dataset {
  std::vector<SampleTriple> samples;
  std::string name;

  bool has_both_classes() const;
  std::vector<std::string> patient_ids() const;  // unique, in first-appearance order
};

// Throws DataError when an invariant is violated (pixel range, mismatched
// modality dims/ids within a triple).
void validate_triple(const SampleTriple& s);

// raw / (2^bit_depth - 1). Rejects values outside [0, 2^bit_depth - 1].
Grid rescale_intensity(const GridI& raw, int bit_depth);

// Bilinear resize to target x target (target in {16, 32}), half-pixel
// centered sampling, output clamped to [0,1].
Patch resize_patch(const Patch& p, int target);
Grid resize_grid(const Grid& g, Eigen::Index out_rows, Eigen::Index out_cols);

// Min-max rescale to [0,1]; constant input maps to all zeros.
Grid normalize(const Grid& g);
Patch normalize(const Patch& p);

// Zero-mean unit-variance (population std); constant input maps to all
// zeros. Output is unbounded, so it is a plain Grid, not a Patch.
Grid standardize(const Grid& g);

enum class Prep { None = 0, Normalize, Standardize, Both };
const char* prep_name(Prep p);
Prep prep_from_name(const std::string& name);

// Applies the preprocessing variant. Both = standardize then min-max.
Grid apply_prep(const Grid& g, Prep prep);

}  // namespace tk
