#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/patch.hpp"
#include "texturekit/patch_io.hpp"
#include "texturekit/rng.hpp"

using namespace tk;

namespace {

Patch make_patch(const Grid& g, const std::string& sid = "s0",
                 const std::string& pid = "p0", Modality m = Modality::T2W,
                 Label label = Label::Negative) {
  Patch p;
  p.pixels = g;
  p.modality = m;
  p.sample_id = sid;
  p.patient_id = pid;
  p.label = label;
  return p;
}

Grid random_grid(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Grid g(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) g(r, c) = rng.next_double();
  return g;
}

SampleTriple make_triple(const std::string& sid, const std::string& pid, Label label,
                         std::uint64_t seed, int size = 8) {
  SampleTriple s;
  const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
  for (int m = 0; m < 3; ++m) {
    s.patch(mods[m]) = make_patch(random_grid(size, size, seed + m), sid, pid, mods[m], label);
  }
  return s;
}

}  // namespace

TEST_CASE("rescale_intensity maps the 12-bit range onto [0,1]") {
  GridI raw(1, 3);
  raw << 4095, 0, 2048;
  const Grid out = rescale_intensity(raw, 12);
  CHECK(out(0, 0) == 1.0);
  CHECK(out(0, 1) == 0.0);
  CHECK(out(0, 2) == doctest::Approx(2048.0 / 4095.0).epsilon(1e-15));
}

TEST_CASE("rescale_intensity rejects out-of-range values and bad depths") {
  GridI raw(1, 1);
  raw << 4096;
  CHECK_THROWS_AS(rescale_intensity(raw, 12), DataError);
  raw << -1;
  CHECK_THROWS_AS(rescale_intensity(raw, 12), DataError);
  raw << 1;
  CHECK_THROWS_AS(rescale_intensity(raw, 7), ConfigError);
  CHECK_THROWS_AS(rescale_intensity(raw, 17), ConfigError);
}

TEST_CASE("rescale_intensity is monotone") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    GridI raw(1, 2);
    raw(0, 0) = static_cast<int>(rng.next_below(4096));
    raw(0, 1) = static_cast<int>(rng.next_below(4096));
    const Grid out = rescale_intensity(raw, 12);
    if (raw(0, 0) <= raw(0, 1)) CHECK(out(0, 0) <= out(0, 1));
    else CHECK(out(0, 0) >= out(0, 1));
  }
}

TEST_CASE("resize of a constant patch stays constant") {
  const Patch p = make_patch(Grid::Constant(8, 8, 0.3));
  const Patch out = resize_patch(p, 16);
  REQUIRE(out.pixels.rows() == 16);
  REQUIRE(out.pixels.cols() == 16);
  CHECK(((out.pixels - 0.3).abs() < 1e-12).all());
}

TEST_CASE("resize to the same size is the identity") {
  const Patch p = make_patch(random_grid(16, 16, 3));
  const Patch out = resize_patch(p, 16);
  CHECK((out.pixels == p.pixels).all());
}

TEST_CASE("resize matches direct bilinear evaluation and keeps column order") {
  Grid g(2, 2);
  g << 0, 1, 0, 1;
  const Grid direct = oracle::resize_direct(g, 4, 4);
  const Grid mine = resize_grid(g, 4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(mine(r, c) == doctest::Approx(direct(r, c)).epsilon(1e-12));
  // columns monotonically non-decreasing left to right, values within bounds
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c + 1 < 4; ++c) CHECK(mine(r, c) <= mine(r, c + 1) + 1e-12);
  CHECK(mine.minCoeff() >= -1e-12);
  CHECK(mine.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("resize keeps values inside the input range") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Grid g = random_grid(11, 7, seed);
    const Grid out = resize_grid(g, 16, 16);
    CHECK(out.minCoeff() >= g.minCoeff() - 1e-12);
    CHECK(out.maxCoeff() <= g.maxCoeff() + 1e-12);
  }
}

TEST_CASE("resize validates the target size") {
  const Patch p = make_patch(random_grid(8, 8, 5));
  CHECK_THROWS_AS(resize_patch(p, 17), ConfigError);
  CHECK_THROWS_AS(resize_patch(p, 0), ConfigError);
}

TEST_CASE("normalize rescales to [0,1]") {
  Grid g(2, 2);
  g << 0.2, 0.4, 0.6, 0.8;
  const Grid out = normalize(g);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(out(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(out(1, 1) == 1.0);
}

TEST_CASE("normalize of a constant patch is all zeros") {
  const Grid out = normalize(Grid::Constant(4, 4, 0.7));
  CHECK((out == 0.0).all());
}

TEST_CASE("normalize leaves an already spanning patch unchanged and is idempotent") {
  Grid g = random_grid(8, 8, 11);
  g(0, 0) = 0.0;
  g(7, 7) = 1.0;
  CHECK((normalize(g) == g).all());
  const Grid once = normalize(random_grid(8, 8, 12) * 0.4 + 0.2);
  const Grid twice = normalize(once);
  CHECK((once == twice).all());
}

TEST_CASE("standardize hits the two-value case exactly") {
  Grid g(2, 2);
  g << 0, 1, 0, 1;
  const Grid out = standardize(g);
  CHECK(out(0, 0) == -1.0);
  CHECK(out(0, 1) == 1.0);
  CHECK(out(1, 0) == -1.0);
  CHECK(out(1, 1) == 1.0);
}

TEST_CASE("standardize of a constant patch is all zeros") {
  CHECK((standardize(Grid::Constant(5, 5, 0.2)) == 0.0).all());
}

TEST_CASE("standardize yields zero mean and unit variance") {
  const Grid out = standardize(random_grid(16, 16, 21));
  CHECK(std::abs(out.mean()) < 1e-12);
  CHECK(std::abs((out - out.mean()).square().mean() - 1.0) < 1e-12);
}

TEST_CASE("manifest round-trips datasets bit-exactly") {
  oracle::TempDir dir("manifest");
  Dataset d;
  d.samples.push_back(make_triple("s0", "p0", Label::Negative, 100));
  d.samples.push_back(make_triple("s1", "p1", Label::Positive, 200));
  const auto manifest = save_dataset(d, dir.path / "a");

  const Dataset loaded = load_manifest(manifest);
  REQUIRE(loaded.samples.size() == 2);
  CHECK(loaded.samples[0].sample_id() == "s0");
  CHECK(loaded.samples[1].label() == Label::Positive);

  // save -> load -> save produces identical manifests and patch bytes
  const auto manifest2 = save_dataset(loaded, dir.path / "b");
  const Dataset reloaded = load_manifest(manifest2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK((reloaded.samples[i].t2w.pixels == loaded.samples[i].t2w.pixels).all());
    CHECK((reloaded.samples[i].adc.pixels == loaded.samples[i].adc.pixels).all());
    CHECK((reloaded.samples[i].dwi.pixels == loaded.samples[i].dwi.pixels).all());
    CHECK(reloaded.samples[i].patient_id() == loaded.samples[i].patient_id());
    CHECK(reloaded.samples[i].label() == loaded.samples[i].label());
  }
}

TEST_CASE("missing modality file errors with the sample id") {
  oracle::TempDir dir("missing");
  Dataset d;
  d.samples.push_back(make_triple("s7", "p0", Label::Negative, 5));
  const auto manifest = save_dataset(d, dir.path);
  std::filesystem::remove(dir.path / "s7_adc.tkp");
  try {
    load_manifest(manifest);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("s7") != std::string::npos);
  }
}

TEST_CASE("bad labels and duplicate ids are rejected") {
  oracle::TempDir dir("bad");
  Dataset d;
  d.samples.push_back(make_triple("s0", "p0", Label::Negative, 5));
  const auto manifest = save_dataset(d, dir.path);

  // corrupt the label
  {
    std::ifstream in(manifest);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    in.close();
    const auto pos = row.find(",0,");
    row.replace(pos, 3, ",2,");
    std::ofstream out(manifest, std::ios::binary);
    out << header << '\n' << row << '\n';
  }
  CHECK_THROWS_AS(load_manifest(manifest), DataError);

  // duplicate the row with the original label
  {
    Dataset d2;
    d2.samples.push_back(make_triple("s0", "p0", Label::Negative, 5));
    save_dataset(d2, dir.path);
    std::ifstream in(manifest);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    in.close();
    std::ofstream out(manifest, std::ios::binary);
    out << header << '\n' << row << '\n' << row << '\n';
  }
  CHECK_THROWS_AS(load_manifest(manifest), DataError);
}

TEST_CASE("an empty manifest loads as an empty dataset") {
  oracle::TempDir dir("empty");
  const auto manifest = dir.path / "manifest.csv";
  std::ofstream out(manifest, std::ios::binary);
  out << "sample_id,patient_id,label,t2w_path,adc_path,dwi_path\n";
  out.close();
  const Dataset d = load_manifest(manifest);
  CHECK(d.samples.empty());
  CHECK_FALSE(d.has_both_classes());
}

TEST_CASE("pixel values outside [0,1] are rejected at load") {
  oracle::TempDir dir("range");
  Grid g = Grid::Constant(4, 4, 0.5);
  g(0, 0) = 1.5;
  write_patch_file(dir.path / "bad.tkp", g);
  const Grid ok = Grid::Constant(4, 4, 0.5);
  write_patch_file(dir.path / "ok.tkp", ok);
  std::ofstream out(dir.path / "manifest.csv", std::ios::binary);
  out << "sample_id,patient_id,label,t2w_path,adc_path,dwi_path\n";
  out << "s0,p0,0,bad.tkp,ok.tkp,ok.tkp\n";
  out.close();
  CHECK_THROWS_AS(load_manifest(dir.path / "manifest.csv"), DataError);
}

TEST_CASE("truncated patch files are rejected") {
  oracle::TempDir dir("trunc");
  write_patch_file(dir.path / "p.tkp", Grid::Constant(4, 4, 0.5));
  std::filesystem::resize_file(dir.path / "p.tkp", 20);
  CHECK_THROWS_AS(read_patch_file(dir.path / "p.tkp"), DataError);
}
