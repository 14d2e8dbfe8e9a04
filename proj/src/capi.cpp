#define DIFFRACT_BUILD
#include "diffract.h"

#include <cstring>
#include <string>

#include "estimation.hpp"
#include "io.hpp"
#include "rng.hpp"

struct df_comb {
  diffract::WeightedComb v;
};
struct df_spectrum {
  diffract::SpectralMeasure v;
};
struct df_estimate {
  diffract::DiffractionEstimate v;
};
struct df_autocorr {
  diffract::AutocorrelationTable v;
};
struct df_distfn {
  diffract::DistributionFn v;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
df_status guarded(F&& body) noexcept {
  try {
    body();
    return DF_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return DF_ERR_INVALID;
  } catch (const diffract::OverflowError& e) {
    g_last_error = e.what();
    return DF_ERR_OVERFLOW;
  } catch (const diffract::IoError& e) {
    g_last_error = e.what();
    return DF_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DF_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown failure";
    return DF_ERR_RUNTIME;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

diffract::CPSSpec to_cps(const df_cps_params* p) {
  if (p == nullptr) return diffract::CPSSpec::fibonacci();
  diffract::CPSSpec cps;
  cps.gen1 = {p->gen1_a, p->gen1_b};
  cps.gen2 = {p->gen2_a, p->gen2_b};
  cps.lo_num = {p->lo_num_a, p->lo_num_b};
  cps.lo_den = p->lo_den;
  cps.hi_num = {p->hi_num_a, p->hi_num_b};
  cps.hi_den = p->hi_den;
  return cps;
}

diffract::CrystalSpec to_crystal(int dim, const double* basis, size_t natoms,
                                 const double* fracs, const double* weights) {
  require(basis != nullptr && fracs != nullptr && weights != nullptr,
          "null crystal data");
  require(dim >= 1 && dim <= 3, "dim must be 1, 2, or 3");
  std::vector<diffract::CrystalSpec::Atom> motif(natoms);
  for (size_t i = 0; i < natoms; ++i) {
    for (int c = 0; c < dim; ++c)
      motif[i].frac[static_cast<size_t>(c)] =
          fracs[i * static_cast<size_t>(dim) + static_cast<size_t>(c)];
    motif[i].weight = {weights[2 * i], weights[2 * i + 1]};
  }
  return diffract::CrystalSpec::make(dim, basis, motif);
}

void copy_string(const std::string& s, char* buf, size_t buflen) {
  require(buf != nullptr, "null buffer");
  require(buflen > s.size(), "buffer too small");
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
}

}  // namespace

extern "C" {

const char* df_version(void) { return "0.1.0"; }

const char* df_last_error(void) { return g_last_error.c_str(); }

/* ---- golden arithmetic ---- */

df_status df_golden_embed(int64_t a, int64_t b, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::embed({a, b});
  });
}

df_status df_golden_star(int64_t a, int64_t b, int64_t* out_a, int64_t* out_b) {
  return guarded([&] {
    require(out_a != nullptr && out_b != nullptr, "null output");
    auto r = diffract::star({a, b});
    *out_a = r.a;
    *out_b = r.b;
  });
}

df_status df_golden_add(int64_t xa, int64_t xb, int64_t ya, int64_t yb,
                        int64_t* out_a, int64_t* out_b) {
  return guarded([&] {
    require(out_a != nullptr && out_b != nullptr, "null output");
    auto r = diffract::add({xa, xb}, {ya, yb});
    *out_a = r.a;
    *out_b = r.b;
  });
}

df_status df_golden_sub(int64_t xa, int64_t xb, int64_t ya, int64_t yb,
                        int64_t* out_a, int64_t* out_b) {
  return guarded([&] {
    require(out_a != nullptr && out_b != nullptr, "null output");
    auto r = diffract::sub({xa, xb}, {ya, yb});
    *out_a = r.a;
    *out_b = r.b;
  });
}

df_status df_golden_mul(int64_t xa, int64_t xb, int64_t ya, int64_t yb,
                        int64_t* out_a, int64_t* out_b) {
  return guarded([&] {
    require(out_a != nullptr && out_b != nullptr, "null output");
    auto r = diffract::mul({xa, xb}, {ya, yb});
    *out_a = r.a;
    *out_b = r.b;
  });
}

df_status df_golden_cmp(int64_t xa, int64_t xb, int64_t ya, int64_t yb,
                        int* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::cmp({xa, xb}, {ya, yb});
  });
}

df_status df_golden_to_string(int64_t a, int64_t b, char* buf, size_t buflen) {
  return guarded([&] { copy_string(diffract::to_string({a, b}), buf, buflen); });
}

df_status df_golden_parse(const char* text, int64_t* out_a, int64_t* out_b) {
  return guarded([&] {
    require(text != nullptr && out_a != nullptr && out_b != nullptr,
            "null argument");
    auto r = diffract::parse_golden(text);
    require(r.has_value(), "unparseable golden integer");
    *out_a = r->a;
    *out_b = r->b;
  });
}

uint64_t df_seed_stream(uint64_t master, uint64_t index) {
  return diffract::seed_stream(master, index);
}

/* ---- generators ---- */

df_status df_gen_crystal(int dim, const double* basis, size_t natoms,
                         const double* fracs, const double* weights,
                         double radius, df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    auto spec = to_crystal(dim, basis, natoms, fracs, weights);
    *out = new df_comb{diffract::gen_crystal_patch(spec, radius)};
  });
}

df_status df_gen_model_set(const df_cps_params* cps, double lo, double hi,
                           df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_fibonacci_model_set(to_cps(cps), lo, hi)};
  });
}

void df_cps_fibonacci(df_cps_params* out) {
  if (out == nullptr) return;
  auto cps = diffract::CPSSpec::fibonacci();
  out->gen1_a = cps.gen1.a;
  out->gen1_b = cps.gen1.b;
  out->gen2_a = cps.gen2.a;
  out->gen2_b = cps.gen2.b;
  out->lo_num_a = cps.lo_num.a;
  out->lo_num_b = cps.lo_num.b;
  out->lo_den = cps.lo_den;
  out->hi_num_a = cps.hi_num.a;
  out->hi_num_b = cps.hi_num.b;
  out->hi_den = cps.hi_den;
}

df_status df_gen_thue_morse(int n, df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_thue_morse(n)};
  });
}

df_status df_gen_rudin_shapiro(int64_t lo, int64_t hi, df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_rudin_shapiro(lo, hi)};
  });
}

df_status df_rudin_shapiro_weight(int64_t n, int* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::rudin_shapiro_weight(n);
  });
}

df_status df_gen_bernoulli(uint64_t seed, double p, int64_t lo, int64_t hi,
                           df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_bernoulli({seed, p}, lo, hi)};
  });
}

df_status df_gen_rs_bernoulli(uint64_t seed, double p, int64_t lo, int64_t hi,
                              df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_rs_bernoulli({seed, p}, lo, hi)};
  });
}

df_status df_gen_random_fibonacci(uint64_t seed, double p, int64_t count,
                                  df_comb** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_comb{diffract::gen_random_fibonacci_tiling({seed, p}, count)};
  });
}

/* ---- comb accessors ---- */

void df_comb_free(df_comb* comb) { delete comb; }

size_t df_comb_size(const df_comb* comb) {
  return comb == nullptr ? 0 : comb->v.size();
}

int df_comb_dim(const df_comb* comb) {
  return comb == nullptr ? 0 : comb->v.dim;
}

double df_comb_volume(const df_comb* comb) {
  return comb == nullptr ? 0.0 : comb->v.volume;
}

int df_comb_has_exact(const df_comb* comb) {
  return comb != nullptr && comb->v.has_exact() ? 1 : 0;
}

df_status df_comb_position(const df_comb* comb, size_t i, double* xyz) {
  return guarded([&] {
    require(comb != nullptr && xyz != nullptr, "null argument");
    require(i < comb->v.size(), "index out of range");
    const auto d = static_cast<size_t>(comb->v.dim);
    for (size_t c = 0; c < d; ++c) xyz[c] = comb->v.positions[i * d + c];
  });
}

df_status df_comb_weight(const df_comb* comb, size_t i, double* re, double* im) {
  return guarded([&] {
    require(comb != nullptr && re != nullptr && im != nullptr, "null argument");
    require(i < comb->v.size(), "index out of range");
    *re = comb->v.weights[i].real();
    *im = comb->v.weights[i].imag();
  });
}

df_status df_comb_exact(const df_comb* comb, size_t i, int64_t* a, int64_t* b) {
  return guarded([&] {
    require(comb != nullptr && a != nullptr && b != nullptr, "null argument");
    require(comb->v.has_exact(), "comb has no exact coordinates");
    require(i < comb->v.size(), "index out of range");
    *a = comb->v.exact[i].a;
    *b = comb->v.exact[i].b;
  });
}

df_status df_comb_patch(const df_comb* comb, double* lo, double* hi) {
  return guarded([&] {
    require(comb != nullptr && lo != nullptr && hi != nullptr, "null argument");
    const auto d = static_cast<size_t>(comb->v.dim);
    for (size_t c = 0; c < d; ++c) {
      lo[c] = comb->v.patch_lo[c];
      hi[c] = comb->v.patch_hi[c];
    }
  });
}

df_status df_comb_write_csv(const df_comb* comb, const char* path) {
  return guarded([&] {
    require(comb != nullptr && path != nullptr, "null argument");
    diffract::write_comb_csv(comb->v, path);
  });
}

df_status df_comb_read_csv(const char* path, df_comb** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new df_comb{diffract::read_comb_csv(path)};
  });
}

/* ---- closed-form diffraction ---- */

df_status df_crystal_diffraction(int dim, const double* basis, size_t natoms,
                                 const double* fracs, const double* weights,
                                 double kmax, df_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    auto spec = to_crystal(dim, basis, natoms, fracs, weights);
    *out = new df_spectrum{diffract::crystal_diffraction(spec, kmax)};
  });
}

df_status df_two_atom_intensity(double k1, double k2, double alpha_re,
                                double alpha_im, double a, double b,
                                double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::two_atom_intensity(k1, k2, {alpha_re, alpha_im}, a, b);
  });
}

df_status df_model_set_spectrum(const df_cps_params* cps, double kmax,
                                double threshold, df_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_spectrum{
        diffract::model_set_spectrum(to_cps(cps), kmax, threshold)};
  });
}

df_status df_fibonacci_intensity(int64_t a, int64_t b, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::fibonacci_intensity({a, b});
  });
}

df_status df_tm_riesz_partial(double k, int depth, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::tm_riesz_partial(k, depth);
  });
}

df_status df_tm_exponential_sum(double k, int n, double* re, double* im) {
  return guarded([&] {
    require(re != nullptr && im != nullptr, "null output");
    auto g = diffract::tm_exponential_sum(k, n);
    *re = g.real();
    *im = g.imag();
  });
}

df_status df_tm_distribution(int depth, int gridsize, df_distfn** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_distfn{diffract::tm_distribution(depth, gridsize)};
  });
}

df_status df_rs_diffraction(double kmin, double kmax, int gridsize,
                            df_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new df_spectrum{diffract::rs_diffraction(kmin, kmax, gridsize)};
  });
}

df_status df_random_fibonacci_density(double k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = diffract::random_fibonacci_density(k);
  });
}

df_status df_random_fibonacci_spectrum(double kmin, double kmax, int gridsize,
                                       df_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    require(kmin < kmax, "empty wavenumber range");
    require(gridsize >= 2, "gridsize must be >= 2");
    diffract::SpectralMeasure m;
    m.dim = 1;
    for (int i = 0; i < gridsize; ++i) {
      double k = kmin + (kmax - kmin) * i / (gridsize - 1);
      m.ac_grid.push_back(k);
      m.ac_values.push_back(diffract::random_fibonacci_density(k));
    }
    *out = new df_spectrum{std::move(m)};
  });
}

df_status df_random_fibonacci_binavg(double kmin, double dk, int bins,
                                     int substeps, df_spectrum** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    require(dk > 0, "dk must be positive");
    diffract::SpectralMeasure m;
    m.dim = 1;
    for (int j = 0; j < bins; ++j) m.ac_grid.push_back(kmin + j * dk);
    m.ac_values = diffract::sample_binavg(diffract::random_fibonacci_density,
                                          kmin, dk, bins, substeps);
    *out = new df_spectrum{std::move(m)};
  });
}

/* ---- spectrum accessors ---- */

void df_spectrum_free(df_spectrum* m) { delete m; }

int df_spectrum_dim(const df_spectrum* m) {
  return m == nullptr ? 0 : m->v.dim;
}

size_t df_spectrum_peak_count(const df_spectrum* m) {
  return m == nullptr ? 0 : m->v.pp_count();
}

df_status df_spectrum_peak(const df_spectrum* m, size_t i, double* k,
                           double* intensity) {
  return guarded([&] {
    require(m != nullptr && k != nullptr && intensity != nullptr,
            "null argument");
    require(i < m->v.pp_count(), "index out of range");
    const auto d = static_cast<size_t>(m->v.dim);
    for (size_t c = 0; c < d; ++c) k[c] = m->v.pp_pos[i * d + c];
    *intensity = m->v.pp_intensity[i];
  });
}

size_t df_spectrum_density_count(const df_spectrum* m) {
  if (m == nullptr) return 0;
  return !m->v.ac_grid.empty() ? m->v.ac_grid.size() : m->v.sc_grid.size();
}

df_status df_spectrum_density(const df_spectrum* m, size_t i, double* k,
                              double* value) {
  return guarded([&] {
    require(m != nullptr && k != nullptr && value != nullptr, "null argument");
    const auto& grid = !m->v.ac_grid.empty() ? m->v.ac_grid : m->v.sc_grid;
    const auto& vals = !m->v.ac_grid.empty() ? m->v.ac_values : m->v.sc_values;
    require(i < grid.size(), "index out of range");
    *k = grid[i];
    *value = vals[i];
  });
}

df_status df_spectrum_threshold(const df_spectrum* m, double threshold,
                                df_spectrum** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "null argument");
    *out = new df_spectrum{diffract::threshold_peaks(m->v, threshold)};
  });
}

df_status df_spectrum_write_csv(const df_spectrum* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "null argument");
    diffract::write_spectrum_csv(m->v, path);
  });
}

df_status df_spectrum_read_csv(const char* path, df_spectrum** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new df_spectrum{diffract::read_spectrum_csv(path)};
  });
}

/* ---- distribution function accessors ---- */

void df_distfn_free(df_distfn* f) { delete f; }

size_t df_distfn_size(const df_distfn* f) {
  return f == nullptr ? 0 : f->v.grid.size();
}

df_status df_distfn_point(const df_distfn* f, size_t i, double* k,
                          double* value) {
  return guarded([&] {
    require(f != nullptr && k != nullptr && value != nullptr, "null argument");
    require(i < f->v.grid.size(), "index out of range");
    *k = f->v.grid[i];
    *value = f->v.values[i];
  });
}

df_status df_distfn_method(const df_distfn* f, char* buf, size_t buflen) {
  return guarded([&] {
    require(f != nullptr, "null argument");
    copy_string(f->v.method, buf, buflen);
  });
}

double df_distfn_disagreement(const df_distfn* f) {
  return f == nullptr ? 0.0 : f->v.max_disagreement;
}

df_status df_distfn_write_csv(const df_distfn* f, const char* path) {
  return guarded([&] {
    require(f != nullptr && path != nullptr, "null argument");
    diffract::write_distribution_csv(f->v, path);
  });
}

/* ---- finite-patch estimation ---- */

df_status df_autocorrelation(const df_comb* comb, double maxdist,
                             df_autocorr** out) {
  return guarded([&] {
    require(comb != nullptr && out != nullptr, "null argument");
    *out = new df_autocorr{diffract::autocorrelation(comb->v, maxdist)};
  });
}

void df_autocorr_free(df_autocorr* t) { delete t; }

size_t df_autocorr_size(const df_autocorr* t) {
  return t == nullptr ? 0 : t->v.size();
}

df_status df_autocorr_entry(const df_autocorr* t, size_t i, double* z,
                            double* re, double* im) {
  return guarded([&] {
    require(t != nullptr && z != nullptr && re != nullptr && im != nullptr,
            "null argument");
    require(i < t->v.size(), "index out of range");
    const auto d = static_cast<size_t>(t->v.dim);
    for (size_t c = 0; c < d; ++c) z[c] = t->v.z[i * d + c];
    *re = t->v.coeff[i].real();
    *im = t->v.coeff[i].imag();
  });
}

df_status df_autocorr_write_csv(const df_autocorr* t, const char* path) {
  return guarded([&] {
    require(t != nullptr && path != nullptr, "null argument");
    diffract::write_autocorr_csv(t->v, path);
  });
}

df_status df_periodogram(const df_comb* comb, const double* grid,
                         size_t gridlen, df_norm norm, df_estimate** out) {
  return guarded([&] {
    require(comb != nullptr && grid != nullptr && out != nullptr,
            "null argument");
    std::vector<double> g(grid, grid + gridlen);
    auto n = norm == DF_NORM_BRAGG ? diffract::Norm::bragg
                                   : diffract::Norm::density;
    *out = new df_estimate{diffract::periodogram(comb->v, g, n)};
  });
}

df_status df_ensemble_periodogram(df_ensemble system, double p, int64_t size,
                                  uint64_t master_seed, double kmin, double dk,
                                  int bins, int substeps, int realizations,
                                  df_norm norm, df_estimate** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    diffract::EnsembleSpec spec;
    switch (system) {
      case DF_ENSEMBLE_BERNOULLI:
        spec.system = diffract::EnsembleSystem::bernoulli;
        break;
      case DF_ENSEMBLE_RUDIN_SHAPIRO:
        spec.system = diffract::EnsembleSystem::rudin_shapiro;
        break;
      case DF_ENSEMBLE_RS_BERNOULLI:
        spec.system = diffract::EnsembleSystem::rs_bernoulli;
        break;
      case DF_ENSEMBLE_RANDOM_FIBONACCI:
        spec.system = diffract::EnsembleSystem::random_fibonacci;
        break;
      default:
        throw std::invalid_argument("unknown ensemble system");
    }
    spec.p = p;
    spec.size = size;
    spec.master_seed = master_seed;
    auto n = norm == DF_NORM_BRAGG ? diffract::Norm::bragg
                                   : diffract::Norm::density;
    *out = new df_estimate{diffract::ensemble_periodogram(
        spec, kmin, dk, bins, substeps, realizations, n)};
  });
}

df_status df_scaling_exponent(const df_comb* const* family, size_t count,
                              double k, double* out) {
  return guarded([&] {
    require(family != nullptr && out != nullptr, "null argument");
    std::vector<diffract::WeightedComb> combs;
    combs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(family[i] != nullptr, "null comb in family");
      combs.push_back(family[i]->v);
    }
    *out = diffract::scaling_exponent(combs, k);
  });
}

df_status df_compare(const df_estimate* est, const df_spectrum* ref, double lo,
                     double hi, df_metric metric, double* out) {
  return guarded([&] {
    require(est != nullptr && ref != nullptr && out != nullptr,
            "null argument");
    auto m = metric == DF_METRIC_MAXREL ? diffract::Metric::maxrel
                                        : diffract::Metric::l1rel;
    *out = diffract::compare(est->v, ref->v, lo, hi, m);
  });
}

df_status df_estimate_as_reference(const df_estimate* est, df_spectrum** out) {
  return guarded([&] {
    require(est != nullptr && out != nullptr, "null argument");
    diffract::SpectralMeasure m;
    m.dim = 1;
    if (est->v.norm == diffract::Norm::bragg) {
      m.pp_pos = est->v.grid;
      m.pp_intensity = est->v.values;
    } else {
      m.ac_grid = est->v.grid;
      m.ac_values = est->v.values;
    }
    *out = new df_spectrum{std::move(m)};
  });
}

/* ---- estimate accessors ---- */

void df_estimate_free(df_estimate* est) { delete est; }

size_t df_estimate_size(const df_estimate* est) {
  return est == nullptr ? 0 : est->v.grid.size();
}

df_status df_estimate_point(const df_estimate* est, size_t i, double* k,
                            double* value) {
  return guarded([&] {
    require(est != nullptr && k != nullptr && value != nullptr,
            "null argument");
    require(i < est->v.grid.size(), "index out of range");
    *k = est->v.grid[i];
    *value = est->v.values[i];
  });
}

df_norm df_estimate_norm(const df_estimate* est) {
  return est != nullptr && est->v.norm == diffract::Norm::bragg
             ? DF_NORM_BRAGG
             : DF_NORM_DENSITY;
}

double df_estimate_volume(const df_estimate* est) {
  return est == nullptr ? 0.0 : est->v.volume;
}

int df_estimate_realizations(const df_estimate* est) {
  return est == nullptr ? 0 : est->v.realizations;
}

df_status df_estimate_write_csv(const df_estimate* est, const char* path) {
  return guarded([&] {
    require(est != nullptr && path != nullptr, "null argument");
    diffract::write_estimate_csv(est->v, path);
  });
}

df_status df_estimate_read_csv(const char* path, df_estimate** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new df_estimate{diffract::read_estimate_csv(path)};
  });
}

/* ---- files ---- */

df_status df_file_digest(const char* path, char out_hex[17]) {
  return guarded([&] {
    require(path != nullptr && out_hex != nullptr, "null argument");
    auto hex = diffract::hex64(diffract::fnv1a64_file(path));
    std::memcpy(out_hex, hex.data(), 16);
    out_hex[16] = '\0';
  });
}

}  // extern "C"
