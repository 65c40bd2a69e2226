#pragma once

#include <filesystem>

#include "texturekit/patch.hpp"

namespace tk {

// Patch file: 8-byte header (magic "TKP1", u16 width, u16 height, both
// little-endian) followed by width*height float32 little-endian pixels in
// row-major order.
void write_patch_file(const std::filesystem::path& path, const Grid& pixels);
Grid read_patch_file(const std::filesystem::path& path);

// Manifest CSV: header `sample_id,patient_id,label,t2w_path,adc_path,dwi_path`,
// label in {0,1}, paths relative to the manifest directory.
Dataset load_manifest(const std::filesystem::path& manifest_path);

// Writes patch files into dir and a manifest referencing them; returns the
// manifest path. Pixels are stored as float32, so values must be float32
// representable for bit-exact round-trips (load_manifest(save) == identity
// on datasets that came from disk).
std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir);

}  // namespace tk
