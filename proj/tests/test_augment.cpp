#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "texturekit/augment.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/image_ops.hpp"
#include "texturekit/rng.hpp"

using namespace tk;

namespace {

Grid random_grid(int n, std::uint64_t seed) {
  Rng rng(seed);
  Grid g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = rng.next_double();
  return g;
}

SampleTriple make_triple(std::uint64_t seed, int size = 16) {
  SampleTriple s;
  const Modality mods[3] = {Modality::T2W, Modality::ADC, Modality::DWI};
  for (int m = 0; m < 3; ++m) {
    Patch& p = s.patch(mods[m]);
    p.pixels = random_grid(size, seed + m);
    p.modality = mods[m];
    p.sample_id = "s0";
    p.patient_id = "p0";
    p.label = Label::Positive;
  }
  return s;
}

}  // namespace

TEST_CASE("a degenerate spec is the identity chain") {
  const SampleTriple s = make_triple(1);
  const SampleTriple out = augment_triple(s, AugmentSpec::identity(), 42);
  CHECK(((out.t2w.pixels - s.t2w.pixels).abs() < 1e-9).all());
  CHECK(((out.adc.pixels - s.adc.pixels).abs() < 1e-9).all());
  CHECK(((out.dwi.pixels - s.dwi.pixels).abs() < 1e-9).all());
  CHECK(out.augmented());
  CHECK(out.sample_id() != s.sample_id());
}

TEST_CASE("same sample, spec and seed give bit-identical output") {
  const SampleTriple s = make_triple(2);
  const AugmentSpec spec;
  const SampleTriple a = augment_triple(s, spec, 99);
  const SampleTriple b = augment_triple(s, spec, 99);
  CHECK((a.t2w.pixels == b.t2w.pixels).all());
  CHECK((a.adc.pixels == b.adc.pixels).all());
  CHECK((a.dwi.pixels == b.dwi.pixels).all());
  CHECK(a.sample_id() == b.sample_id());
}

TEST_CASE("horizontal flip is an involution") {
  const Grid g = random_grid(16, 3);
  CHECK((flip_horizontal(flip_horizontal(g)) == g).all());
}

TEST_CASE("geometry is shared across modalities") {
  // identical pixels in all three modalities plus zero photometric ranges
  // must produce identical outputs if the geometric draw is shared
  SampleTriple s = make_triple(4);
  s.adc.pixels = s.t2w.pixels;
  s.dwi.pixels = s.t2w.pixels;
  AugmentSpec spec;  // non-degenerate geometry
  spec.noise_sigma = 0.0;
  spec.blur_sigma_lo = spec.blur_sigma_hi = 0.0;
  spec.contrast_lo = spec.contrast_hi = 1.0;
  spec.brightness = 0.0;
  const SampleTriple out = augment_triple(s, spec, 1234);
  CHECK((out.t2w.pixels == out.adc.pixels).all());
  CHECK((out.t2w.pixels == out.dwi.pixels).all());
  // and the geometry actually did something
  CHECK(((out.t2w.pixels - s.t2w.pixels).abs().maxCoeff()) > 1e-6);
}

TEST_CASE("augment_dataset adds per_sample_count augmentations per sample") {
  Dataset d;
  d.samples.push_back(make_triple(5));
  d.samples.push_back(make_triple(6));
  d.samples[1].t2w.sample_id = d.samples[1].adc.sample_id = d.samples[1].dwi.sample_id = "s1";
  AugmentSpec spec;
  spec.per_sample_count = 39;
  const Dataset out = augment_dataset(d, spec, 7);
  CHECK(out.samples.size() == 80);

  std::set<std::string> ids;
  int originals = 0;
  for (const auto& s : out.samples) {
    ids.insert(s.sample_id());
    if (!s.augmented()) ++originals;
    CHECK(s.label() == Label::Positive);
    CHECK(s.patient_id() == "p0");
    CHECK((s.t2w.pixels >= 0.0).all());
    CHECK((s.t2w.pixels <= 1.0).all());
    CHECK((s.adc.pixels >= 0.0).all());
    CHECK((s.adc.pixels <= 1.0).all());
    CHECK((s.dwi.pixels >= 0.0).all());
    CHECK((s.dwi.pixels <= 1.0).all());
  }
  CHECK(ids.size() == 80);  // sample ids stay unique
  CHECK(originals == 2);
}

TEST_CASE("per_sample_count zero returns the dataset unchanged") {
  Dataset d;
  d.samples.push_back(make_triple(8));
  AugmentSpec spec;
  spec.per_sample_count = 0;
  const Dataset out = augment_dataset(d, spec, 9);
  REQUIRE(out.samples.size() == 1);
  CHECK((out.samples[0].t2w.pixels == d.samples[0].t2w.pixels).all());
  CHECK(out.samples[0].sample_id() == d.samples[0].sample_id());
  CHECK_FALSE(out.samples[0].augmented());
}

TEST_CASE("changing the seed changes the output") {
  const SampleTriple s = make_triple(10);
  const AugmentSpec spec;
  const SampleTriple a = augment_triple(s, spec, 1);
  const SampleTriple b = augment_triple(s, spec, 2);
  CHECK(((a.t2w.pixels - b.t2w.pixels).abs().maxCoeff()) > 0.0);
}

TEST_CASE("augment_dataset is deterministic") {
  Dataset d;
  d.samples.push_back(make_triple(11));
  AugmentSpec spec;
  spec.per_sample_count = 5;
  const Dataset a = augment_dataset(d, spec, 13);
  const Dataset b = augment_dataset(d, spec, 13);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].sample_id() == b.samples[i].sample_id());
    CHECK((a.samples[i].t2w.pixels == b.samples[i].t2w.pixels).all());
  }
}

TEST_CASE("ill-formed specs are rejected") {
  AugmentSpec spec;
  spec.per_sample_count = -1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = AugmentSpec{};
  spec.scale_lo = 1.2;
  spec.scale_hi = 0.8;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
