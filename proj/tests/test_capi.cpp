// Exercises the shared-library boundary only: every call goes through the
// C header, no internal headers are included.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include "diffract.h"
#include "doctest.h"

namespace {

const double kTau = (1.0 + std::sqrt(5.0)) / 2.0;

struct CombGuard {
  df_comb* p = nullptr;
  ~CombGuard() { df_comb_free(p); }
};
struct SpectrumGuard {
  df_spectrum* p = nullptr;
  ~SpectrumGuard() { df_spectrum_free(p); }
};
struct EstimateGuard {
  df_estimate* p = nullptr;
  ~EstimateGuard() { df_estimate_free(p); }
};
struct AutocorrGuard {
  df_autocorr* p = nullptr;
  ~AutocorrGuard() { df_autocorr_free(p); }
};
struct DistfnGuard {
  df_distfn* p = nullptr;
  ~DistfnGuard() { df_distfn_free(p); }
};

}  // namespace

TEST_CASE("version and error channel") {
  REQUIRE(df_version() != nullptr);
  CHECK(std::strlen(df_version()) > 0);
  CHECK(df_gen_thue_morse(-1, nullptr) == DF_ERR_INVALID);
  CHECK(std::strlen(df_last_error()) > 0);
}

TEST_CASE("golden ring through the boundary") {
  std::int64_t a = 0, b = 0;
  REQUIRE(df_golden_mul(0, 1, 0, 1, &a, &b) == DF_OK);
  CHECK(a == 1);
  CHECK(b == 1);
  REQUIRE(df_golden_star(0, 1, &a, &b) == DF_OK);
  CHECK(a == 1);
  CHECK(b == -1);
  double x = 0;
  REQUIRE(df_golden_embed(0, 1, &x) == DF_OK);
  CHECK(x == doctest::Approx(kTau).epsilon(1e-15));
  int c = 0;
  REQUIRE(df_golden_cmp(46368, -28657, 0, 0, &c) == DF_OK);
  CHECK(c == -1);
  CHECK(df_golden_mul(std::int64_t{1} << 40, std::int64_t{1} << 40,
                      std::int64_t{1} << 40, std::int64_t{1} << 40, &a, &b) ==
        DF_ERR_OVERFLOW);

  char buf[64];
  REQUIRE(df_golden_to_string(3, -2, buf, sizeof buf) == DF_OK);
  CHECK(std::string(buf) == "3-2*tau");
  CHECK(df_golden_to_string(3, -2, buf, 3) == DF_ERR_INVALID);
  REQUIRE(df_golden_parse("3-2*tau", &a, &b) == DF_OK);
  CHECK(a == 3);
  CHECK(b == -2);
  CHECK(df_golden_parse("zebra", &a, &b) == DF_ERR_INVALID);

  CHECK(df_seed_stream(0, 0) == 0xe220a8397b1dcdafull);
}

TEST_CASE("generators and comb accessors") {
  SUBCASE("default model set over [0,5]") {
    df_cps_params cps;
    df_cps_fibonacci(&cps);
    CHECK(cps.gen2_b == 1);
    CombGuard g;
    REQUIRE(df_gen_model_set(nullptr, 0.0, 5.0, &g.p) == DF_OK);
    REQUIRE(df_comb_size(g.p) == 4);
    CHECK(df_comb_dim(g.p) == 1);
    CHECK(df_comb_has_exact(g.p) == 1);
    CHECK(df_comb_volume(g.p) == 5.0);
    std::int64_t a = 0, b = 0;
    REQUIRE(df_comb_exact(g.p, 3, &a, &b) == DF_OK);
    CHECK(a == 1);
    CHECK(b == 2);
    double lo[3], hi[3];
    REQUIRE(df_comb_patch(g.p, lo, hi) == DF_OK);
    CHECK(lo[0] == 0.0);
    CHECK(hi[0] == 5.0);
    CombGuard same;
    REQUIRE(df_gen_model_set(&cps, 0.0, 5.0, &same.p) == DF_OK);
    CHECK(df_comb_size(same.p) == 4);
  }

  SUBCASE("thue-morse word") {
    CombGuard g;
    REQUIRE(df_gen_thue_morse(2, &g.p) == DF_OK);
    REQUIRE(df_comb_size(g.p) == 4);
    double expect[4] = {1, -1, -1, 1};
    for (std::size_t i = 0; i < 4; ++i) {
      double re = 0, im = 0, pos = 0;
      REQUIRE(df_comb_weight(g.p, i, &re, &im) == DF_OK);
      REQUIRE(df_comb_position(g.p, i, &pos) == DF_OK);
      CHECK(re == expect[i]);
      CHECK(im == 0.0);
      CHECK(pos == static_cast<double>(i));
    }
  }

  SUBCASE("weight function and random draws") {
    int w = 0;
    REQUIRE(df_rudin_shapiro_weight(3, &w) == DF_OK);
    CHECK(w == -1);
    CombGuard g;
    REQUIRE(df_gen_bernoulli(7, 1.0, 0, 3, &g.p) == DF_OK);
    for (std::size_t i = 0; i < 4; ++i) {
      double re = 0, im = 0;
      REQUIRE(df_comb_weight(g.p, i, &re, &im) == DF_OK);
      CHECK(re == 1.0);
    }
    CombGuard t;
    REQUIRE(df_gen_random_fibonacci(3, 0.5, 100, &t.p) == DF_OK);
    CHECK(df_comb_size(t.p) == 100);
    CHECK(df_comb_has_exact(t.p) == 1);
  }

  SUBCASE("crystal generator") {
    double basis[1] = {1.0};
    double fracs[1] = {0.0};
    double weights[2] = {1.0, 0.0};
    CombGuard g;
    REQUIRE(df_gen_crystal(1, basis, 1, fracs, weights, 10.0, &g.p) == DF_OK);
    CHECK(df_comb_size(g.p) == 21);
  }
}

TEST_CASE("analytic results through the boundary") {
  SUBCASE("crystal peaks") {
    double basis[1] = {1.0};
    double fracs[1] = {0.0};
    double weights[2] = {1.0, 0.0};
    SpectrumGuard m;
    REQUIRE(df_crystal_diffraction(1, basis, 1, fracs, weights, 5.5, &m.p) ==
            DF_OK);
    REQUIRE(df_spectrum_peak_count(m.p) == 11);
    double k = 0, intensity = 0;
    REQUIRE(df_spectrum_peak(m.p, 0, &k, &intensity) == DF_OK);
    CHECK(k == -5.0);
    CHECK(intensity == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("fibonacci central intensity and extinction") {
    double v = 0;
    REQUIRE(df_fibonacci_intensity(0, 0, &v) == DF_OK);
    CHECK(v == doctest::Approx((kTau + 1.0) / 5.0).epsilon(1e-14));
    REQUIRE(df_fibonacci_intensity(2, 1, &v) == DF_OK);
    CHECK(v == 0.0);
    SpectrumGuard m;
    REQUIRE(df_model_set_spectrum(nullptr, 10.0, 1e-3, &m.p) == DF_OK);
    CHECK(df_spectrum_peak_count(m.p) > 20);
    SpectrumGuard strong;
    REQUIRE(df_spectrum_threshold(m.p, 0.3, &strong.p) == DF_OK);
    CHECK(df_spectrum_peak_count(strong.p) <
          df_spectrum_peak_count(m.p));
  }

  SUBCASE("two-atom cell") {
    double v = 0;
    REQUIRE(df_two_atom_intensity(0, 0, 1, 0, 0.5, 0.5, &v) == DF_OK);
    CHECK(v == 4.0);
  }

  SUBCASE("thue-morse identities") {
    double r = 0;
    REQUIRE(df_tm_riesz_partial(0.37, 8, &r) == DF_OK);
    double re = 0, im = 0;
    REQUIRE(df_tm_exponential_sum(0.37, 8, &re, &im) == DF_OK);
    CHECK(std::abs((re * re + im * im) / 256.0 - r) <= 1e-10);
    DistfnGuard f;
    REQUIRE(df_tm_distribution(10, 257, &f.p) == DF_OK);
    REQUIRE(df_distfn_size(f.p) == 257);
    double k = 0, val = 0;
    REQUIRE(df_distfn_point(f.p, 0, &k, &val) == DF_OK);
    CHECK(k == 0.0);
    CHECK(val == 0.0);
    char method[32];
    REQUIRE(df_distfn_method(f.p, method, sizeof method) == DF_OK);
    CHECK(std::string(method) == "riesz-trapezoid");
    CHECK(df_distfn_disagreement(f.p) <= 16.0 / 1024.0);  // depth-10 envelope
  }

  SUBCASE("flat and tiling densities") {
    SpectrumGuard flat;
    REQUIRE(df_rs_diffraction(0.0, 1.0, 11, &flat.p) == DF_OK);
    REQUIRE(df_spectrum_density_count(flat.p) == 11);
    double k = 0, val = 0;
    REQUIRE(df_spectrum_density(flat.p, 5, &k, &val) == DF_OK);
    CHECK(val == 1.0);
    double h = 0;
    REQUIRE(df_random_fibonacci_density(0.7, &h) == DF_OK);
    CHECK(h > 0.0);
    SpectrumGuard tiling;
    REQUIRE(df_random_fibonacci_spectrum(0.1, 5.0, 50, &tiling.p) == DF_OK);
    CHECK(df_spectrum_density_count(tiling.p) == 50);

    SpectrumGuard avg;
    REQUIRE(df_random_fibonacci_binavg(0.1, 0.05, 4, 3, &avg.p) == DF_OK);
    REQUIRE(df_spectrum_density_count(avg.p) == 4);
    REQUIRE(df_spectrum_density(avg.p, 1, &k, &val) == DF_OK);
    CHECK(k == 0.1 + 0.05);
    double manual = 0;
    for (int i = 0; i < 3; ++i) {
      double hi = 0;
      REQUIRE(df_random_fibonacci_density(0.1 + 0.05 + i * 0.05 / 3, &hi) ==
              DF_OK);
      manual += hi;
    }
    CHECK(val == manual / 3);
    CHECK(df_random_fibonacci_binavg(0.1, 0.0, 4, 3, &avg.p) ==
          DF_ERR_INVALID);
    CHECK(df_random_fibonacci_binavg(0.1, 0.05, 0, 3, &avg.p) ==
          DF_ERR_INVALID);
  }
}

TEST_CASE("estimation through the boundary") {
  SUBCASE("autocorrelation entries") {
    CombGuard g;
    REQUIRE(df_gen_bernoulli(0, 1.0, 0, 99, &g.p) == DF_OK);
    AutocorrGuard t;
    REQUIRE(df_autocorrelation(g.p, 10.0, &t.p) == DF_OK);
    REQUIRE(df_autocorr_size(t.p) == 21);
    double z = 0, re = 0, im = 0;
    REQUIRE(df_autocorr_entry(t.p, 20, &z, &re, &im) == DF_OK);
    CHECK(z == 10.0);
    CHECK(re == 0.9);
  }

  SUBCASE("periodogram and comparison round trip") {
    CombGuard g;
    REQUIRE(df_gen_thue_morse(8, &g.p) == DF_OK);
    double grid[3] = {0.1, 0.2, 0.35};
    EstimateGuard est;
    REQUIRE(df_periodogram(g.p, grid, 3, DF_NORM_DENSITY, &est.p) == DF_OK);
    REQUIRE(df_estimate_size(est.p) == 3);
    CHECK(df_estimate_norm(est.p) == DF_NORM_DENSITY);
    CHECK(df_estimate_volume(est.p) == 256.0);
    SpectrumGuard ref;
    REQUIRE(df_estimate_as_reference(est.p, &ref.p) == DF_OK);
    double err = -1;
    REQUIRE(df_compare(est.p, ref.p, 0.0, 1.0, DF_METRIC_L1REL, &err) == DF_OK);
    CHECK(err == 0.0);
  }

  SUBCASE("ensemble and scaling") {
    EstimateGuard est;
    REQUIRE(df_ensemble_periodogram(DF_ENSEMBLE_BERNOULLI, 0.5, 128, 9, 0.0,
                                    0.05, 8, 1, 3, DF_NORM_DENSITY,
                                    &est.p) == DF_OK);
    REQUIRE(df_estimate_size(est.p) == 8);
    CHECK(df_estimate_realizations(est.p) == 3);

    CombGuard c8, c9, c10, c11;
    REQUIRE(df_gen_bernoulli(0, 1.0, 0, 255, &c8.p) == DF_OK);
    REQUIRE(df_gen_bernoulli(0, 1.0, 0, 511, &c9.p) == DF_OK);
    REQUIRE(df_gen_bernoulli(0, 1.0, 0, 1023, &c10.p) == DF_OK);
    REQUIRE(df_gen_bernoulli(0, 1.0, 0, 2047, &c11.p) == DF_OK);
    const df_comb* family[4] = {c8.p, c9.p, c10.p, c11.p};
    double slope = 0;
    REQUIRE(df_scaling_exponent(family, 4, 0.0, &slope) == DF_OK);
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-9));
  }

  SUBCASE("status codes for bad input") {
    CHECK(df_periodogram(nullptr, nullptr, 0, DF_NORM_DENSITY, nullptr) ==
          DF_ERR_INVALID);
    CombGuard g;
    REQUIRE(df_gen_thue_morse(4, &g.p) == DF_OK);
    double bad_grid[2] = {0.5, 0.5};
    EstimateGuard est;
    CHECK(df_periodogram(g.p, bad_grid, 2, DF_NORM_DENSITY, &est.p) ==
          DF_ERR_INVALID);
    CHECK(df_comb_read_csv("missing_file.csv", nullptr) == DF_ERR_INVALID);
    df_comb* out = nullptr;
    CHECK(df_comb_read_csv("missing_file.csv", &out) == DF_ERR_IO);
  }
}

TEST_CASE("csv and digests through the boundary") {
  CombGuard g;
  REQUIRE(df_gen_model_set(nullptr, 0.0, 30.0, &g.p) == DF_OK);
  const char* path = "capi_comb.csv";
  REQUIRE(df_comb_write_csv(g.p, path) == DF_OK);
  CombGuard back;
  REQUIRE(df_comb_read_csv(path, &back.p) == DF_OK);
  REQUIRE(df_comb_size(back.p) == df_comb_size(g.p));
  for (std::size_t i = 0; i < df_comb_size(g.p); ++i) {
    double pa = 0, pb = 0;
    REQUIRE(df_comb_position(g.p, i, &pa) == DF_OK);
    REQUIRE(df_comb_position(back.p, i, &pb) == DF_OK);
    CHECK(pa == pb);
  }
  char h1[17], h2[17];
  REQUIRE(df_file_digest(path, h1) == DF_OK);
  REQUIRE(df_comb_write_csv(g.p, path) == DF_OK);
  REQUIRE(df_file_digest(path, h2) == DF_OK);
  CHECK(std::string(h1) == h2);
  std::remove(path);

  SpectrumGuard m;
  REQUIRE(df_model_set_spectrum(nullptr, 8.0, 1e-3, &m.p) == DF_OK);
  REQUIRE(df_spectrum_write_csv(m.p, "capi_spec.csv") == DF_OK);
  SpectrumGuard mback;
  REQUIRE(df_spectrum_read_csv("capi_spec.csv", &mback.p) == DF_OK);
  CHECK(df_spectrum_peak_count(mback.p) == df_spectrum_peak_count(m.p));
  std::remove("capi_spec.csv");

  EstimateGuard est;
  double grid[2] = {0.0, 0.5};
  REQUIRE(df_periodogram(g.p, grid, 2, DF_NORM_BRAGG, &est.p) == DF_OK);
  REQUIRE(df_estimate_write_csv(est.p, "capi_est.csv") == DF_OK);
  EstimateGuard eback;
  REQUIRE(df_estimate_read_csv("capi_est.csv", &eback.p) == DF_OK);
  CHECK(df_estimate_norm(eback.p) == DF_NORM_BRAGG);
  double k = 0, v1 = 0, v2 = 0;
  REQUIRE(df_estimate_point(est.p, 0, &k, &v1) == DF_OK);
  REQUIRE(df_estimate_point(eback.p, 0, &k, &v2) == DF_OK);
  CHECK(v1 == v2);
  std::remove("capi_est.csv");

  AutocorrGuard t;
  REQUIRE(df_autocorrelation(g.p, 3.0, &t.p) == DF_OK);
  REQUIRE(df_autocorr_write_csv(t.p, "capi_table.csv") == DF_OK);
  std::remove("capi_table.csv");
}
