#include "texturekit/patch_io.hpp"

#include <cstring>
#include <fstream>
#include <unordered_set>

#include "texturekit/csv.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/strings.hpp"

namespace tk {

namespace {

constexpr char kMagic[4] = {'T', 'K', 'P', '1'};

void put_u16(std::ofstream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_patch_file(const std::filesystem::path& path, const Grid& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write patch file: " + path.string());
  out.write(kMagic, 4);
  put_u16(out, static_cast<std::uint16_t>(pixels.cols()));
  put_u16(out, static_cast<std::uint16_t>(pixels.rows()));
  for (Eigen::Index r = 0; r < pixels.rows(); ++r)
    for (Eigen::Index c = 0; c < pixels.cols(); ++c) {
      const float f = static_cast<float>(pixels(r, c));
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      const unsigned char b[4] = {static_cast<unsigned char>(u & 0xff),
                                  static_cast<unsigned char>((u >> 8) & 0xff),
                                  static_cast<unsigned char>((u >> 16) & 0xff),
                                  static_cast<unsigned char>(u >> 24)};
      out.write(reinterpret_cast<const char*>(b), 4);
    }
  if (!out) throw DataError("failed writing patch file: " + path.string());
}

Grid read_patch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open patch file: " + path.string());
  unsigned char header[8];
  in.read(reinterpret_cast<char*>(header), 8);
  if (in.gcount() != 8 || std::memcmp(header, kMagic, 4) != 0)
    throw DataError("bad patch file header: " + path.string());
  const std::uint16_t width = get_u16(header + 4);
  const std::uint16_t height = get_u16(header + 6);
  if (width == 0 || height == 0)
    throw DataError("patch file has zero dimension: " + path.string());
  Grid pixels(height, width);
  std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw DataError("truncated patch file: " + path.string());
  std::size_t off = 0;
  for (std::uint16_t r = 0; r < height; ++r)
    for (std::uint16_t c = 0; c < width; ++c) {
      std::uint32_t u = static_cast<std::uint32_t>(buf[off]) |
                        (static_cast<std::uint32_t>(buf[off + 1]) << 8) |
                        (static_cast<std::uint32_t>(buf[off + 2]) << 16) |
                        (static_cast<std::uint32_t>(buf[off + 3]) << 24);
      off += 4;
      float f;
      std::memcpy(&f, &u, 4);
      pixels(r, c) = static_cast<double>(f);
    }
  return pixels;
}

Dataset load_manifest(const std::filesystem::path& manifest_path) {
  const CsvTable csv = read_csv(manifest_path);
  const CsvRow expected = {"sample_id", "patient_id", "label",
                           "t2w_path",  "adc_path",   "dwi_path"};
  if (csv.header != expected)
    throw DataError("manifest header mismatch in " + manifest_path.string());
  const auto base = manifest_path.parent_path();

  Dataset d;
  d.name = manifest_path.stem().string();
  std::unordered_set<std::string> seen_ids;
  for (const CsvRow& row : csv.rows) {
    if (row.size() != 6)
      throw DataError("manifest row with wrong field count in " + manifest_path.string());
    const std::string& sample_id = row[0];
    const std::string& patient_id = row[1];
    std::int64_t label_raw = -1;
    if (!parse_i64(row[2], label_raw) || (label_raw != 0 && label_raw != 1))
      throw DataError("label outside {0,1} for sample " + sample_id);
    if (!seen_ids.insert(sample_id).second)
      throw DataError("duplicate sample_id in manifest: " + sample_id);

    SampleTriple s;
    const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
    for (int m = 0; m < 3; ++m) {
      const auto path = base / row[3 + m];
      Patch& p = s.patch(mods[m]);
      try {
        p.pixels = read_patch_file(path);
      } catch (const DataError& e) {
        throw DataError("sample " + sample_id + ": " + e.what());
      }
      p.modality = mods[m];
      p.sample_id = sample_id;
      p.patient_id = patient_id;
      p.label = label_raw ? Label::Positive : Label::Negative;
      p.augmented = false;
    }
    validate_triple(s);
    d.samples.push_back(std::move(s));
  }
  return d;
}

std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  CsvTable manifest;
  manifest.header = {"sample_id", "patient_id", "label",
                     "t2w_path",  "adc_path",   "dwi_path"};
  for (const auto& s : d.samples) {
    CsvRow row(6);
    row[0] = s.sample_id();
    row[1] = s.patient_id();
    row[2] = s.label() == Label::Positive ? "1" : "0";
    const char* suffix[3] = {"t2w", "adc", "dwi"};
    const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
    for (int m = 0; m < 3; ++m) {
      const std::string fname = s.sample_id() + "_" + suffix[m] + ".tkp";
      write_patch_file(dir / fname, s.patch(mods[m]).pixels);
      row[3 + m] = fname;
    }
    manifest.rows.push_back(std::move(row));
  }
  const auto manifest_path = dir / "manifest.csv";
  write_csv(manifest_path, manifest);
  return manifest_path;
}

}  // namespace tk
