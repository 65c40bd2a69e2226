#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/features.hpp"
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

Grid rot90(const Grid& g) {
  Grid out(g.cols(), g.rows());
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index c = 0; c < g.cols(); ++c) out(g.cols() - 1 - c, r) = g(r, c);
  return out;
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
    p.label = Label::Negative;
  }
  return s;
}

}  // namespace

TEST_CASE("canonical feature names are 159 well-formed names") {
  const auto& names = canonical_feature_names();
  REQUIRE(names.size() == 159);
  CHECK(names[0] == "t2-tra_mean");
  CHECK(names[1] == "t2-tra_std");
  CHECK(names[2] == "t2-tra_skewness");
  CHECK(names[3] == "t2-tra_kurtosis");
  CHECK(names[4] == "t2-tra_haralick01");
  CHECK(names[17] == "t2-tra_haralick14");
  CHECK(names[18] == "t2-tra_lbp-01");
  CHECK(names[52] == "t2-tra_lbp-35");
  CHECK(names[53] == "adc_mean");
  CHECK(names[106] == "dwi_c-1400_mean");
  CHECK(names[158] == "dwi_c-1400_lbp-35");
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == 159);
}

TEST_CASE("first_order handles the degenerate and Bernoulli cases") {
  const FirstOrder constant = first_order(Grid::Constant(4, 4, 0.5));
  CHECK(constant.mean == 0.5);
  CHECK(constant.std == 0.0);
  CHECK(constant.skewness == 0.0);
  CHECK(constant.kurtosis == 0.0);

  Grid half(2, 2);
  half << 0, 1, 0, 1;
  const FirstOrder b = first_order(half);
  CHECK(b.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.std == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.skewness == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.kurtosis == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("first_order matches the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Grid g = random_grid(16, seed);
    const FirstOrder f = first_order(g);
    const auto m = oracle::moments(g);
    CHECK(std::abs(f.mean - m.mean) < 1e-12);
    CHECK(std::abs(f.std - m.std) < 1e-12);
    CHECK(std::abs(f.skewness - m.skewness) < 1e-12);
    CHECK(std::abs(f.kurtosis - m.kurtosis) < 1e-12);
  }
}

TEST_CASE("GLCM of the two-row grid matches hand enumeration") {
  Grid g(2, 2);
  g << 0, 0, 1, 1;
  const Eigen::MatrixXd p = compute_glcm(g, 2, 1, GlcmDirection::Deg0);
  CHECK(p(0, 0) == 0.5);
  CHECK(p(1, 1) == 0.5);
  CHECK(p(0, 1) == 0.0);
  CHECK(p(1, 0) == 0.0);
}

TEST_CASE("GLCM of a checkerboard puts all mass off-diagonal") {
  Grid g(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = (r + c) % 2;
  const Eigen::MatrixXd p = compute_glcm(g, 2, 1, GlcmDirection::Deg0);
  CHECK(p(0, 1) == 0.5);
  CHECK(p(1, 0) == 0.5);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(1, 1) == 0.0);
}

TEST_CASE("GLCMs are symmetric, normalized and match direct enumeration") {
  const int offsets[4][2] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Grid g = random_grid(16, seed);
    for (int d = 0; d < 4; ++d) {
      const Eigen::MatrixXd p = compute_glcm(g, 32, 1, static_cast<GlcmDirection>(d));
      CHECK(std::abs(p.sum() - 1.0) < 1e-12);
      CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::MatrixXd ref =
          oracle::glcm_direct(g, 32, 1, offsets[d][0], offsets[d][1]);
      CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("GLCM rejects grids with no valid pair") {
  Grid g(1, 1);
  g << 0.5;
  CHECK_THROWS_AS(compute_glcm(g, 2, 1, GlcmDirection::Deg0), DataError);
}

TEST_CASE("haralick closed forms: point mass and uniform GLCMs") {
  Eigen::MatrixXd point = Eigen::MatrixXd::Zero(4, 4);
  point(2, 2) = 1.0;
  const auto fp = haralick_single(point);
  CHECK(*fp[0] == 1.0);   // ASM
  CHECK(*fp[8] == 0.0);   // entropy
  CHECK_FALSE(fp[2].has_value());                     // correlation undefined
  CHECK_FALSE(fp[11].has_value());                    // info measure 1 undefined
  CHECK_FALSE(fp[13].has_value());                    // MCC needs support >= 2

  const int n = 8;
  Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(n, n, 1.0 / (n * n));
  const auto fu = haralick_single(uniform);
  CHECK(*fu[0] == doctest::Approx(1.0 / (n * n)).epsilon(1e-12));
}

TEST_CASE("haralick f1..f14 on the known diagonal GLCM") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2, 2);
  p(0, 0) = 0.5;
  p(1, 1) = 0.5;
  const auto f = haralick_single(p);
  // hand-evaluated: px=py=(.5,.5), p_sum=(.5,0,.5), p_diff=(1,0)
  const double expected[13] = {0.5, 0.0, 1.0, 0.25, 1.0, 1.0, 1.0,
                               1.0, 1.0, 0.0, 0.0, -1.0,
                               std::sqrt(1.0 - std::exp(-2.0))};
  for (int i = 0; i < 13; ++i) {
    REQUIRE(f[static_cast<std::size_t>(i)].has_value());
    CHECK(*f[static_cast<std::size_t>(i)] == doctest::Approx(expected[i]).epsilon(1e-9));
  }
  REQUIRE(f[13].has_value());
  CHECK(*f[13] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("haralick f1..f13 matches the textbook oracle on random patches") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Grid g = random_grid(16, seed);
    const Eigen::MatrixXd p = compute_glcm(g, 32, 1, GlcmDirection::Deg45);
    const auto f = haralick_single(p);
    const auto ref = oracle::haralick_direct(p);
    for (int i = 0; i < 13; ++i) {
      REQUIRE(f[static_cast<std::size_t>(i)].has_value());
      CHECK(std::abs(*f[static_cast<std::size_t>(i)] - ref.f[i]) < 1e-9);
    }
  }
}

TEST_CASE("haralick f14 matches the general eigen-solver oracle on dense GLCMs") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const int n = 6;
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        p(i, j) = rng.next_double() + 0.05;  // dense, strictly positive
        p(j, i) = p(i, j);
      }
    p /= p.sum();
    const auto f = haralick_single(p);
    REQUIRE(f[13].has_value());
    CHECK(std::abs(*f[13] - oracle::haralick_f14_direct(p)) < 1e-6);
  }
}

TEST_CASE("direction averaging marks a feature missing if any direction is") {
  std::vector<Eigen::MatrixXd> glcms;
  Eigen::MatrixXd good = Eigen::MatrixXd::Zero(2, 2);
  good(0, 1) = good(1, 0) = 0.5;
  Eigen::MatrixXd degenerate = Eigen::MatrixXd::Zero(2, 2);
  degenerate(0, 0) = 1.0;
  glcms = {good, degenerate};
  const auto f = haralick_features(glcms);
  CHECK_FALSE(f[2].has_value());   // correlation undefined in the degenerate one
  CHECK(f[0].has_value());
  CHECK(*f[0] == doctest::Approx(0.5 * (0.5 + 1.0)).epsilon(1e-12));
}

TEST_CASE("LBP of a constant patch concentrates in the full-ones bins") {
  const Grid g = Grid::Constant(16, 16, 0.42);
  const Eigen::VectorXd h8 = lbp_riu2_histogram(g, 8, 1.0);
  CHECK(h8(8) == 1.0);
  CHECK(h8.sum() == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd h16 = lbp_riu2_histogram(g, 16, 2.0);
  CHECK(h16(16) == 1.0);

  LbpConfig cfg;
  const Eigen::VectorXd all = lbp_features(g, cfg);
  REQUIRE(all.size() == 35);
  CHECK(all(28) == 1.0);  // lowest VAR bin
}

TEST_CASE("riu2 histograms are invariant under 90-degree rotations") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Grid g = random_grid(16, seed);
    const Grid r1 = rot90(g), r2 = rot90(r1), r3 = rot90(r2);
    for (const Grid* rg : {&r1, &r2, &r3}) {
      CHECK((lbp_riu2_histogram(g, 8, 1.0) - lbp_riu2_histogram(*rg, 8, 1.0))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      CHECK((lbp_riu2_histogram(g, 16, 2.0) - lbp_riu2_histogram(*rg, 16, 2.0))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("riu2 histogram equals the naive per-pixel oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Grid g = random_grid(16, seed);
    CHECK((lbp_riu2_histogram(g, 8, 1.0) - oracle::lbp_riu2_naive(g, 8, 1.0))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK((lbp_riu2_histogram(g, 16, 2.0) - oracle::lbp_riu2_naive(g, 16, 2.0))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("LBP rejects grids too small for the radius") {
  CHECK_THROWS_AS(lbp_riu2_histogram(Grid::Constant(2, 2, 0.1), 8, 1.0), DataError);
  CHECK_THROWS_AS(lbp_features(Grid::Constant(4, 4, 0.1), LbpConfig{}), DataError);
}

TEST_CASE("VAR histogram respects fixed edges and sums to one") {
  const Grid g = random_grid(16, 9);
  LbpConfig cfg;
  cfg.var_edges = {1e-9, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1};  // heavily skewed edges
  const Eigen::VectorXd out = lbp_features(g, cfg);
  CHECK(out.segment(28, 7).sum() == doctest::Approx(1.0).epsilon(1e-12));
  // typical ring variances of uniform noise sit near 1/12, in the top bins
  CHECK(out(33) + out(34) > 0.5);
}

TEST_CASE("quantile edges split pooled values evenly") {
  std::vector<double> vals;
  for (int i = 0; i < 700; ++i) vals.push_back(static_cast<double>(i));
  const auto edges = quantile_edges(vals, 7);
  REQUIRE(edges.size() == 6);
  CHECK(edges[0] == doctest::Approx(99.857142857).epsilon(1e-9));
  CHECK(std::is_sorted(edges.begin(), edges.end()));
}

TEST_CASE("extract_features produces 159 deterministic values") {
  const SampleTriple s = make_triple(33);
  FeatureConfig cfg;
  const FeatureVector a = extract_features(s, cfg);
  const FeatureVector b = extract_features(s, cfg);
  REQUIRE(a.values.size() == 159);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.missing == b.missing);
  for (int i = 0; i < 159; ++i)
    if (!a.missing[static_cast<std::size_t>(i)]) CHECK(std::isfinite(a.values(i)));
}

TEST_CASE("a constant DWI patch flags its undefined Haralick features") {
  SampleTriple s = make_triple(44);
  s.dwi.pixels = Grid::Constant(16, 16, 0.25);
  FeatureConfig cfg;
  const FeatureVector f = extract_features(s, cfg);
  std::vector<std::string> flagged;
  const auto& names = canonical_feature_names();
  for (int i = 0; i < 159; ++i)
    if (f.missing[static_cast<std::size_t>(i)]) flagged.push_back(names[static_cast<std::size_t>(i)]);
  // a degenerate GLCM voids correlation, information measure 1 and the MCC
  const std::vector<std::string> expected = {"dwi_c-1400_haralick03",
                                             "dwi_c-1400_haralick12",
                                             "dwi_c-1400_haralick14"};
  CHECK(flagged == expected);
}

TEST_CASE("build_table assembles, imputes and logs missing columns") {
  Dataset d;
  for (std::uint64_t i = 0; i < 4; ++i) {
    SampleTriple s = make_triple(100 + i);
    s.t2w.sample_id = s.adc.sample_id = s.dwi.sample_id = "s" + std::to_string(i);
    s.t2w.patient_id = s.adc.patient_id = s.dwi.patient_id = "p" + std::to_string(i / 2);
    d.samples.push_back(std::move(s));
  }
  d.samples[1].dwi.pixels = Grid::Constant(16, 16, 0.5);  // forces missing features

  FeatureConfig cfg;
  const FeatureTable t = build_table(d, cfg);
  CHECK(t.rows() == 4);
  CHECK(t.cols() == 159);
  CHECK(t.feature_names == canonical_feature_names());
  CHECK(t.imputed_columns == std::vector<std::string>{"dwi_c-1400_haralick03",
                                                      "dwi_c-1400_haralick12",
                                                      "dwi_c-1400_haralick14"});
  const int col = t.column_index("dwi_c-1400_haralick14");
  CHECK(t.values(1, col) == 0.0);  // imputed
  CHECK(t.missing[1][static_cast<std::size_t>(col)]);

  const FeatureTable again = build_table(d, cfg);
  CHECK((t.values - again.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feature CSV round-trips tables including missing cells") {
  oracle::TempDir dir("featcsv");
  Dataset d;
  for (std::uint64_t i = 0; i < 2; ++i) {
    SampleTriple s = make_triple(200 + i);
    s.t2w.sample_id = s.adc.sample_id = s.dwi.sample_id = "s" + std::to_string(i);
    d.samples.push_back(std::move(s));
  }
  d.samples[0].dwi.pixels = Grid::Constant(16, 16, 0.5);
  FeatureConfig cfg;
  const FeatureTable t = build_table(d, cfg);
  write_feature_csv(dir.path / "f.csv", t, /*imputed=*/false);
  const FeatureTable back = read_feature_csv(dir.path / "f.csv");
  CHECK(back.feature_names == t.feature_names);
  CHECK(back.sample_ids == t.sample_ids);
  CHECK(back.labels == t.labels);
  CHECK((back.values - t.values).cwiseAbs().maxCoeff() == 0.0);  // shortest round-trip
  CHECK(back.missing == t.missing);
  CHECK(back.imputed_columns == t.imputed_columns);
}

TEST_CASE("prep variants keep first-order contracts") {
  const Grid g = random_grid(16, 55);
  CHECK(first_order(apply_prep(g, Prep::Normalize)).mean >= 0.0);
  CHECK(first_order(apply_prep(g, Prep::Normalize)).mean <= 1.0);
  const FirstOrder st = first_order(apply_prep(g, Prep::Standardize));
  CHECK(std::abs(st.mean) < 1e-9);
  CHECK(std::abs(st.std - 1.0) < 1e-9);
}

TEST_CASE("fit_var_edges returns ascending per-modality edges") {
  Dataset d;
  for (std::uint64_t i = 0; i < 3; ++i) {
    SampleTriple s = make_triple(300 + i);
    s.t2w.sample_id = s.adc.sample_id = s.dwi.sample_id = "s" + std::to_string(i);
    d.samples.push_back(std::move(s));
  }
  FeatureConfig cfg;
  const auto edges = fit_var_edges(d, cfg);
  for (const auto& e : edges) {
    REQUIRE(e.size() == 6);
    CHECK(std::is_sorted(e.begin(), e.end()));
  }
}
