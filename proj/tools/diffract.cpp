// Command-line front end: generates point sets, evaluates closed-form
// spectra, runs finite-patch estimators, and compares the two. Every
// command that writes files also writes PREFIX.manifest.json recording
// the full argument vector and output digests; `replay` re-runs a
// manifest and verifies the outputs are reproduced bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "diffract.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CliExit {
  int code;
};

std::vector<std::string> g_current_args;

int rc_for(df_status s) {
  return s == DF_ERR_INVALID || s == DF_ERR_IO ? 2 : 1;
}

void check(df_status s) {
  if (s == DF_OK) return;
  std::cerr << "diffract: " << df_last_error() << "\n";
  throw CliExit{rc_for(s)};
}

void usage_error(const std::string& msg) {
  std::cerr << "diffract: " << msg << "\n";
  throw CliExit{2};
}

template <typename T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
using CombPtr = std::unique_ptr<df_comb, Deleter<df_comb, df_comb_free>>;
using SpecPtr =
    std::unique_ptr<df_spectrum, Deleter<df_spectrum, df_spectrum_free>>;
using EstPtr =
    std::unique_ptr<df_estimate, Deleter<df_estimate, df_estimate_free>>;
using AcPtr =
    std::unique_ptr<df_autocorr, Deleter<df_autocorr, df_autocorr_free>>;
using DfnPtr = std::unique_ptr<df_distfn, Deleter<df_distfn, df_distfn_free>>;

std::string fmt17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  std::tm g{};
  gmtime_r(&t, &g);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &g);
  return buf;
}

// A bare prefix lands in DIFFRACT_OUT_DIR when that is set; anything with
// a path separator is taken literally.
std::string resolve_prefix(const std::string& out) {
  const char* dir = std::getenv("DIFFRACT_OUT_DIR");
  if (dir != nullptr && *dir != '\0' &&
      out.find('/') == std::string::npos)
    return std::string(dir) + "/" + out;
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (f) f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) {
    std::cerr << "diffract: cannot write " << path << "\n";
    throw CliExit{1};
  }
}

void write_manifest(const std::string& command, const json& params,
                    const std::vector<std::string>& outputs,
                    const std::string& prefix) {
  json m;
  m["schema_version"] = 1;
  m["tool_version"] = df_version();
  m["command"] = command;
  m["argv"] = g_current_args;
  m["params"] = params;
  m["created_utc"] = iso_now();
  json outs = json::array();
  for (const auto& f : outputs) {
    char hex[17];
    check(df_file_digest(f.c_str(), hex));
    outs.push_back(json{{"file", f}, {"fnv1a64", hex}});
  }
  m["outputs"] = outs;
  write_text_file(prefix + ".manifest.json", m.dump(2) + "\n");
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(',', start);
    std::string tok = s.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (...) {
      usage_error("malformed number list: '" + s + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> linear_grid(double kmin, double kmax, int n) {
  if (n < 1) usage_error("--grid must be >= 1");
  if (n == 1) return {kmin};
  if (!(kmin < kmax)) usage_error("need --kmin < --kmax");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = kmin + (kmax - kmin) * i / (n - 1);
  return g;
}

double golden_ratio() { return (1.0 + std::sqrt(5.0)) / 2.0; }

/* ---- crystal flag plumbing shared by generate and analytic ---- */

struct CrystalArgs {
  int dim = 1;
  std::string basis = "1";
  std::vector<std::string> atoms;
};

void add_crystal_flags(CLI::App* c, CrystalArgs& a) {
  c->add_option("--dim", a.dim, "lattice dimension (1-3)")
      ->capture_default_str();
  c->add_option("--basis", a.basis,
                "column-major basis entries, comma separated")
      ->capture_default_str();
  c->add_option("--atom", a.atoms,
                "motif atom 'f0[,f1[,f2]],w_re,w_im'; repeatable "
                "(default: one unit atom at the origin)");
}

void build_crystal(const CrystalArgs& a, std::vector<double>& basis,
                   std::vector<double>& fracs, std::vector<double>& weights) {
  if (a.dim < 1 || a.dim > 3) usage_error("--dim must be 1, 2, or 3");
  basis = parse_csv_doubles(a.basis);
  if (basis.size() != static_cast<std::size_t>(a.dim * a.dim))
    usage_error("--basis needs dim*dim entries");
  if (a.atoms.empty()) {
    fracs.assign(static_cast<std::size_t>(a.dim), 0.0);
    weights = {1.0, 0.0};
    return;
  }
  for (const auto& s : a.atoms) {
    auto v = parse_csv_doubles(s);
    if (v.size() != static_cast<std::size_t>(a.dim) + 2)
      usage_error("--atom needs dim+2 entries");
    fracs.insert(fracs.end(), v.begin(), v.begin() + a.dim);
    weights.push_back(v[static_cast<std::size_t>(a.dim)]);
    weights.push_back(v[static_cast<std::size_t>(a.dim) + 1]);
  }
}

json crystal_params(const CrystalArgs& a) {
  return json{{"dim", a.dim}, {"basis", a.basis}, {"atoms", a.atoms}};
}

/* ---- shared writers ---- */

void finish_comb(df_comb* comb, const std::string& command, const json& params,
                 const std::string& out) {
  const std::string prefix = resolve_prefix(out);
  const std::string csv = prefix + ".csv";
  check(df_comb_write_csv(comb, csv.c_str()));
  write_manifest(command, params, {csv}, prefix);
  std::cout << csv << " (" << df_comb_size(comb) << " points)\n";
}

void finish_spectrum(df_spectrum* m, const std::string& command,
                     const json& params, const std::string& out) {
  const std::string prefix = resolve_prefix(out);
  const std::string csv = prefix + ".csv";
  check(df_spectrum_write_csv(m, csv.c_str()));
  write_manifest(command, params, {csv}, prefix);
  const std::size_t rows = df_spectrum_peak_count(m) != 0
                               ? df_spectrum_peak_count(m)
                               : df_spectrum_density_count(m);
  std::cout << csv << " (" << rows << " rows)\n";
}

void finish_estimate(df_estimate* est, const std::string& command,
                     const json& params, const std::string& out) {
  const std::string prefix = resolve_prefix(out);
  const std::string csv = prefix + ".csv";
  check(df_estimate_write_csv(est, csv.c_str()));
  write_manifest(command, params, {csv}, prefix);
  std::cout << csv << " (" << df_estimate_size(est) << " rows)\n";
}

int run_cli(std::vector<std::string> args);

/* ---- command handlers ---- */

struct GenCrystalOpts {
  CrystalArgs crystal;
  double radius = 10;
  std::string out;
};

void cmd_generate_crystal(const GenCrystalOpts& o) {
  std::vector<double> basis, fracs, weights;
  build_crystal(o.crystal, basis, fracs, weights);
  df_comb* comb = nullptr;
  check(df_gen_crystal(o.crystal.dim, basis.data(), weights.size() / 2,
                       fracs.data(), weights.data(), o.radius, &comb));
  CombPtr g(comb);
  json params = crystal_params(o.crystal);
  params["radius"] = o.radius;
  params["out"] = o.out;
  finish_comb(comb, "generate crystal", params, o.out);
}

struct GenFibOpts {
  std::vector<double> range{0, 100};
  std::string out;
};

void cmd_generate_fibonacci(const GenFibOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_model_set(nullptr, o.range[0], o.range[1], &comb));
  CombPtr g(comb);
  finish_comb(comb, "generate fibonacci",
              json{{"range", o.range}, {"out", o.out}}, o.out);
}

struct GenTmOpts {
  int n = 10;
  std::string out;
};

void cmd_generate_tm(const GenTmOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_thue_morse(o.n, &comb));
  CombPtr g(comb);
  finish_comb(comb, "generate tm", json{{"n", o.n}, {"out", o.out}}, o.out);
}

struct GenRsOpts {
  std::vector<std::int64_t> range{0, 255};
  std::string out;
};

void cmd_generate_rs(const GenRsOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_rudin_shapiro(o.range[0], o.range[1], &comb));
  CombPtr g(comb);
  finish_comb(comb, "generate rs", json{{"range", o.range}, {"out", o.out}},
              o.out);
}

struct GenRandomOpts {
  std::int64_t n = 1024;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_generate_bernoulli(const GenRandomOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_bernoulli(o.seed, o.p, 0, o.n - 1, &comb));
  CombPtr g(comb);
  finish_comb(comb, "generate bernoulli",
              json{{"n", o.n}, {"p", o.p}, {"seed", o.seed}, {"out", o.out}},
              o.out);
}

void cmd_generate_rs_bernoulli(const GenRandomOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_rs_bernoulli(o.seed, o.p, 0, o.n - 1, &comb));
  CombPtr g(comb);
  finish_comb(comb, "generate rs-bernoulli",
              json{{"n", o.n}, {"p", o.p}, {"seed", o.seed}, {"out", o.out}},
              o.out);
}

struct GenTilingOpts {
  std::int64_t tiles = 1000;
  double p = 1.0 / golden_ratio();
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_generate_random_fibonacci(const GenTilingOpts& o) {
  df_comb* comb = nullptr;
  check(df_gen_random_fibonacci(o.seed, o.p, o.tiles, &comb));
  CombPtr g(comb);
  finish_comb(
      comb, "generate random-fibonacci",
      json{{"tiles", o.tiles}, {"p", o.p}, {"seed", o.seed}, {"out", o.out}},
      o.out);
}

struct AnalyticCrystalOpts {
  CrystalArgs crystal;
  double kmax = 10;
  std::string out;
};

void cmd_analytic_crystal(const AnalyticCrystalOpts& o) {
  std::vector<double> basis, fracs, weights;
  build_crystal(o.crystal, basis, fracs, weights);
  df_spectrum* m = nullptr;
  check(df_crystal_diffraction(o.crystal.dim, basis.data(),
                               weights.size() / 2, fracs.data(),
                               weights.data(), o.kmax, &m));
  SpecPtr g(m);
  json params = crystal_params(o.crystal);
  params["kmax"] = o.kmax;
  params["out"] = o.out;
  finish_spectrum(m, "analytic crystal", params, o.out);
}

struct AnalyticFibOpts {
  double kmax = 20;
  double threshold_frac = 0.001;
  std::string out;
};

void cmd_analytic_fibonacci(const AnalyticFibOpts& o) {
  if (!(o.threshold_frac > 0)) usage_error("--threshold-frac must be > 0");
  double central = 0;
  check(df_fibonacci_intensity(0, 0, &central));
  df_spectrum* m = nullptr;
  check(df_model_set_spectrum(nullptr, o.kmax, o.threshold_frac * central, &m));
  SpecPtr g(m);
  finish_spectrum(m, "analytic fibonacci",
                  json{{"kmax", o.kmax},
                       {"threshold_frac", o.threshold_frac},
                       {"out", o.out}},
                  o.out);
}

struct AnalyticTmOpts {
  int depth = 16;
  int grid = 16385;
  std::string out;
};

void cmd_analytic_tm_distribution(const AnalyticTmOpts& o) {
  df_distfn* f = nullptr;
  check(df_tm_distribution(o.depth, o.grid, &f));
  DfnPtr g(f);
  const std::string prefix = resolve_prefix(o.out);
  const std::string csv = prefix + ".csv";
  check(df_distfn_write_csv(f, csv.c_str()));
  write_manifest("analytic tm-distribution",
                 json{{"N", o.depth}, {"grid", o.grid}, {"out", o.out}}, {csv},
                 prefix);
  std::cout << csv << " (" << df_distfn_size(f)
            << " rows, cross-check gap " << fmt17(df_distfn_disagreement(f))
            << ")\n";
}

struct AnalyticGridOpts {
  double kmin = 0;
  double kmax = 1;
  int grid = 501;
  std::string out;
};

void cmd_analytic_rs(const AnalyticGridOpts& o) {
  df_spectrum* m = nullptr;
  check(df_rs_diffraction(o.kmin, o.kmax, o.grid, &m));
  SpecPtr g(m);
  finish_spectrum(m, "analytic rs",
                  json{{"kmin", o.kmin},
                       {"kmax", o.kmax},
                       {"grid", o.grid},
                       {"out", o.out}},
                  o.out);
}

struct AnalyticRandomOpts {
  double kmin = 0;
  double kmax = 20;
  int grid = 2001;
  double dk = 0;
  int bins = 0;
  int substeps = 1;
  bool binavg = false;
  std::string out;
};

void cmd_analytic_random_fibonacci(const AnalyticRandomOpts& o) {
  df_spectrum* m = nullptr;
  json params;
  if (o.binavg) {
    check(df_random_fibonacci_binavg(o.kmin, o.dk, o.bins, o.substeps, &m));
    params = json{{"kmin", o.kmin},
                  {"dk", o.dk},
                  {"bins", o.bins},
                  {"substeps", o.substeps},
                  {"out", o.out}};
  } else {
    check(df_random_fibonacci_spectrum(o.kmin, o.kmax, o.grid, &m));
    params = json{
        {"kmin", o.kmin}, {"kmax", o.kmax}, {"grid", o.grid}, {"out", o.out}};
  }
  SpecPtr g(m);
  finish_spectrum(m, "analytic random-fibonacci", params, o.out);
}

struct EstPeriodogramOpts {
  std::string input;
  double kmin = 0;
  double kmax = 1;
  int grid = 0;
  std::string at;
  std::string norm = "density";
  std::string out;
};

void cmd_estimate_periodogram(const EstPeriodogramOpts& o) {
  df_comb* comb = nullptr;
  check(df_comb_read_csv(o.input.c_str(), &comb));
  CombPtr g1(comb);
  std::vector<double> grid;
  if (!o.at.empty()) {
    df_spectrum* ref = nullptr;
    check(df_spectrum_read_csv(o.at.c_str(), &ref));
    SpecPtr g2(ref);
    if (df_spectrum_dim(ref) != 1 || df_spectrum_peak_count(ref) == 0)
      usage_error("--at needs a 1-d peak spectrum");
    for (std::size_t i = 0; i < df_spectrum_peak_count(ref); ++i) {
      double k = 0, intensity = 0;
      check(df_spectrum_peak(ref, i, &k, &intensity));
      if (grid.empty() || k > grid.back()) grid.push_back(k);
    }
  } else {
    if (o.grid < 1) usage_error("give --grid or --at");
    grid = linear_grid(o.kmin, o.kmax, o.grid);
  }
  df_estimate* est = nullptr;
  check(df_periodogram(comb, grid.data(), grid.size(),
                       o.norm == "bragg" ? DF_NORM_BRAGG : DF_NORM_DENSITY,
                       &est));
  EstPtr g3(est);
  finish_estimate(est, "estimate periodogram",
                  json{{"input", o.input},
                       {"kmin", o.kmin},
                       {"kmax", o.kmax},
                       {"grid", o.grid},
                       {"at", o.at},
                       {"norm", o.norm},
                       {"out", o.out}},
                  o.out);
}

struct EstAutocorrOpts {
  std::string input;
  double maxdist = -1;
  std::string out;
};

void cmd_estimate_autocorr(const EstAutocorrOpts& o) {
  df_comb* comb = nullptr;
  check(df_comb_read_csv(o.input.c_str(), &comb));
  CombPtr g1(comb);
  double maxdist = o.maxdist;
  if (maxdist < 0) {
    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    check(df_comb_patch(comb, lo, hi));
    double e2 = 0;
    for (int c = 0; c < df_comb_dim(comb); ++c)
      e2 += (hi[c] - lo[c]) * (hi[c] - lo[c]);
    maxdist = std::sqrt(e2) / 10.0;  // default cap keeps edge bias small
  }
  df_autocorr* t = nullptr;
  check(df_autocorrelation(comb, maxdist, &t));
  AcPtr g2(t);
  const std::string prefix = resolve_prefix(o.out);
  const std::string csv = prefix + ".csv";
  check(df_autocorr_write_csv(t, csv.c_str()));
  write_manifest(
      "estimate autocorr",
      json{{"input", o.input}, {"maxdist", maxdist}, {"out", o.out}}, {csv},
      prefix);
  std::cout << csv << " (" << df_autocorr_size(t) << " rows)\n";
}

struct EstEnsembleOpts {
  std::string system = "bernoulli";
  std::int64_t size = 16384;
  double p = 0.5;
  std::uint64_t seed = 0;
  int realizations = 100;
  double kmin = 0;
  double dk = 0;
  int bins = 0;
  int substeps = 1;
  std::string norm = "density";
  std::string out;
  CLI::Option* p_opt = nullptr;
};

void cmd_estimate_ensemble(const EstEnsembleOpts& o) {
  df_ensemble system = DF_ENSEMBLE_BERNOULLI;
  if (o.system == "bernoulli")
    system = DF_ENSEMBLE_BERNOULLI;
  else if (o.system == "rs")
    system = DF_ENSEMBLE_RUDIN_SHAPIRO;
  else if (o.system == "rs-bernoulli")
    system = DF_ENSEMBLE_RS_BERNOULLI;
  else if (o.system == "random-fibonacci")
    system = DF_ENSEMBLE_RANDOM_FIBONACCI;
  else
    usage_error("unknown ensemble system '" + o.system + "'");
  double p = o.p;
  if (o.p_opt != nullptr && o.p_opt->count() == 0 &&
      system == DF_ENSEMBLE_RANDOM_FIBONACCI)
    p = 1.0 / golden_ratio();
  df_estimate* est = nullptr;
  check(df_ensemble_periodogram(
      system, p, o.size, o.seed, o.kmin, o.dk, o.bins, o.substeps,
      o.realizations, o.norm == "bragg" ? DF_NORM_BRAGG : DF_NORM_DENSITY,
      &est));
  EstPtr g(est);
  finish_estimate(est, "estimate ensemble",
                  json{{"system", o.system},
                       {"size", o.size},
                       {"p", p},
                       {"seed", o.seed},
                       {"realizations", o.realizations},
                       {"kmin", o.kmin},
                       {"dk", o.dk},
                       {"bins", o.bins},
                       {"substeps", o.substeps},
                       {"norm", o.norm},
                       {"out", o.out}},
                  o.out);
}

struct EstScalingOpts {
  std::string system = "tm";
  double k = 0;
  int min_log2 = 8;
  int max_log2 = 16;
  std::string out;
};

void cmd_estimate_scaling(const EstScalingOpts& o) {
  if (o.min_log2 < 1 || o.max_log2 < o.min_log2 + 3 || o.max_log2 > 24)
    usage_error("need 1 <= --min-log2 and --max-log2 >= --min-log2 + 3");
  std::vector<CombPtr> guards;
  std::vector<df_comb*> family;
  for (int n = o.min_log2; n <= o.max_log2; ++n) {
    df_comb* comb = nullptr;
    const std::int64_t len = std::int64_t{1} << n;
    if (o.system == "tm")
      check(df_gen_thue_morse(n, &comb));
    else if (o.system == "rs")
      check(df_gen_rudin_shapiro(0, len - 1, &comb));
    else if (o.system == "fibonacci")
      check(df_gen_model_set(nullptr, 0, static_cast<double>(len), &comb));
    else
      usage_error("unknown scaling system '" + o.system + "'");
    guards.emplace_back(comb);
    family.push_back(comb);
  }
  double slope = 0;
  check(df_scaling_exponent(family.data(), family.size(), o.k, &slope));
  std::cout << "slope " << fmt17(slope) << "\n";
  const std::string prefix = resolve_prefix(o.out);
  const std::string report = prefix + ".report.json";
  json r{{"system", o.system},
         {"k", o.k},
         {"min_log2", o.min_log2},
         {"max_log2", o.max_log2},
         {"slope", slope}};
  write_text_file(report, r.dump(2) + "\n");
  write_manifest("estimate scaling",
                 json{{"system", o.system},
                      {"k", o.k},
                      {"min_log2", o.min_log2},
                      {"max_log2", o.max_log2},
                      {"out", o.out}},
                 {report}, prefix);
}

struct CompareOpts {
  std::string estimate;
  std::string reference;
  double lo = -HUGE_VAL;
  double hi = HUGE_VAL;
  std::string metric = "l1rel";
  double tolerance = -1;
  std::string out;
  CLI::Option* tol_opt = nullptr;
};

void cmd_compare(const CompareOpts& o) {
  df_estimate* est = nullptr;
  check(df_estimate_read_csv(o.estimate.c_str(), &est));
  EstPtr g1(est);
  df_spectrum* ref = nullptr;
  SpecPtr g2;
  if (df_spectrum_read_csv(o.reference.c_str(), &ref) == DF_OK) {
    g2.reset(ref);
  } else {
    df_estimate* ref_est = nullptr;
    if (df_estimate_read_csv(o.reference.c_str(), &ref_est) != DF_OK) {
      std::cerr << "diffract: cannot read reference: " << df_last_error()
                << "\n";
      throw CliExit{2};
    }
    EstPtr g3(ref_est);
    check(df_estimate_as_reference(ref_est, &ref));
    g2.reset(ref);
  }
  double value = 0;
  check(df_compare(est, ref, o.lo, o.hi,
                   o.metric == "maxrel" ? DF_METRIC_MAXREL : DF_METRIC_L1REL,
                   &value));
  const bool has_tol = o.tol_opt != nullptr && o.tol_opt->count() > 0;
  const bool pass = !has_tol || value <= o.tolerance;
  std::cout << o.metric << " " << fmt17(value) << (pass ? "" : "  EXCEEDED")
            << "\n";
  if (!o.out.empty()) {
    const std::string prefix = resolve_prefix(o.out);
    const std::string report = prefix + ".report.json";
    json r{{"estimate", o.estimate}, {"reference", o.reference},
           {"lo", o.lo},             {"hi", o.hi},
           {"metric", o.metric},     {"value", value},
           {"pass", pass}};
    if (has_tol) r["tolerance"] = o.tolerance;
    write_text_file(report, r.dump(2) + "\n");
    write_manifest("compare",
                   json{{"estimate", o.estimate},
                        {"reference", o.reference},
                        {"lo", o.lo},
                        {"hi", o.hi},
                        {"metric", o.metric},
                        {"tolerance", has_tol ? json(o.tolerance) : json()},
                        {"out", o.out}},
                   {report}, prefix);
  }
  if (!pass) throw CliExit{1};
}

struct ReplayOpts {
  std::string manifest;
};

void cmd_replay(const ReplayOpts& o) {
  std::ifstream f(o.manifest, std::ios::binary);
  if (!f) usage_error("cannot open manifest: " + o.manifest);
  json m;
  try {
    f >> m;
  } catch (...) {
    usage_error("malformed manifest: " + o.manifest);
  }
  if (!m.contains("argv") || !m["argv"].is_array() || !m.contains("outputs"))
    usage_error("manifest lacks argv/outputs: " + o.manifest);
  std::vector<std::string> args;
  for (const auto& a : m["argv"]) {
    if (!a.is_string()) usage_error("manifest argv must be strings");
    args.push_back(a.get<std::string>());
  }
  if (args.empty() || args[0] == "replay")
    usage_error("manifest does not record a replayable command");
  const int rc = run_cli(args);
  if (rc != 0) {
    std::cerr << "diffract: replayed command exited with " << rc << "\n";
    throw CliExit{1};
  }
  bool ok = true;
  for (const auto& entry : m["outputs"]) {
    const std::string file = entry.at("file").get<std::string>();
    const std::string want = entry.at("fnv1a64").get<std::string>();
    char hex[17];
    check(df_file_digest(file.c_str(), hex));
    const bool same = want == hex;
    std::cout << (same ? "REPRODUCED " : "MISMATCH   ") << file << "\n";
    ok = ok && same;
  }
  if (!ok) throw CliExit{1};
}

int run_cli(std::vector<std::string> args) {
  g_current_args = args;
  CLI::App app{"deterministic point-set diffraction toolkit"};
  app.set_version_flag("--version", std::string(df_version()));
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker cap (accepted for compatibility; execution is "
                 "sequential and schedule independent)")
      ->check(CLI::NonNegativeNumber);

  auto* gen = app.add_subcommand("generate", "write a point-set CSV");
  gen->require_subcommand(1);
  {
    auto o = std::make_shared<GenCrystalOpts>();
    auto* c = gen->add_subcommand("crystal", "lattice-plus-motif patch");
    add_crystal_flags(c, o->crystal);
    c->add_option("--radius", o->radius, "patch ball radius")
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_crystal(*o); });
  }
  {
    auto o = std::make_shared<GenFibOpts>();
    auto* c = gen->add_subcommand("fibonacci", "golden-ratio model set");
    c->add_option("--range", o->range, "patch interval lo hi")
        ->expected(2)
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_fibonacci(*o); });
  }
  {
    auto o = std::make_shared<GenTmOpts>();
    auto* c = gen->add_subcommand("tm", "Thue-Morse word of length 2^n");
    c->add_option("--n", o->n, "doubling steps")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_tm(*o); });
  }
  {
    auto o = std::make_shared<GenRsOpts>();
    auto* c = gen->add_subcommand("rs", "Rudin-Shapiro weights on lo..hi");
    c->add_option("--range", o->range, "integer interval lo hi")
        ->expected(2)
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_rs(*o); });
  }
  {
    auto o = std::make_shared<GenRandomOpts>();
    auto* c = gen->add_subcommand("bernoulli", "i.i.d. +-1 weights on 0..n-1");
    c->add_option("--n", o->n, "number of sites")->capture_default_str();
    c->add_option("--p", o->p, "probability of +1")->capture_default_str();
    c->add_option("--seed", o->seed, "random seed")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_bernoulli(*o); });
  }
  {
    auto o = std::make_shared<GenRandomOpts>();
    auto* c = gen->add_subcommand(
        "rs-bernoulli", "Rudin-Shapiro times i.i.d. +-1 on 0..n-1");
    c->add_option("--n", o->n, "number of sites")->capture_default_str();
    c->add_option("--p", o->p, "probability of +1")->capture_default_str();
    c->add_option("--seed", o->seed, "random seed")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_rs_bernoulli(*o); });
  }
  {
    auto o = std::make_shared<GenTilingOpts>();
    auto* c = gen->add_subcommand("random-fibonacci",
                                  "random tiling of tau and unit tiles");
    c->add_option("--tiles", o->tiles, "tile count")->capture_default_str();
    c->add_option("--p", o->p, "probability of a tau tile")
        ->capture_default_str();
    c->add_option("--seed", o->seed, "random seed")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_generate_random_fibonacci(*o); });
  }

  auto* ana = app.add_subcommand("analytic", "write a closed-form spectrum CSV");
  ana->require_subcommand(1);
  {
    auto o = std::make_shared<AnalyticCrystalOpts>();
    auto* c = ana->add_subcommand("crystal", "dual-lattice peak spectrum");
    add_crystal_flags(c, o->crystal);
    c->add_option("--kmax", o->kmax, "wavenumber cutoff")
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_analytic_crystal(*o); });
  }
  {
    auto o = std::make_shared<AnalyticFibOpts>();
    auto* c = ana->add_subcommand("fibonacci", "model-set peak spectrum");
    c->add_option("--kmax", o->kmax, "wavenumber cutoff")
        ->capture_default_str();
    c->add_option("--threshold-frac", o->threshold_frac,
                  "keep peaks at least this fraction of the central intensity")
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_analytic_fibonacci(*o); });
  }
  {
    auto o = std::make_shared<AnalyticTmOpts>();
    auto* c = ana->add_subcommand("tm-distribution",
                                  "cumulative spectral mass on [0,1]");
    c->add_option("--N", o->depth, "product depth")->capture_default_str();
    c->add_option("--grid", o->grid, "sample count")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_analytic_tm_distribution(*o); });
  }
  {
    auto o = std::make_shared<AnalyticGridOpts>();
    auto* c = ana->add_subcommand("rs", "flat density samples");
    c->add_option("--kmin", o->kmin, "lower wavenumber")->capture_default_str();
    c->add_option("--kmax", o->kmax, "upper wavenumber")->capture_default_str();
    c->add_option("--grid", o->grid, "sample count")->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_analytic_rs(*o); });
  }
  {
    auto o = std::make_shared<AnalyticRandomOpts>();
    auto* c = ana->add_subcommand("random-fibonacci",
                                  "tiling-ensemble density samples");
    c->add_option("--kmin", o->kmin, "lower wavenumber")->capture_default_str();
    c->add_option("--kmax", o->kmax, "upper wavenumber")->capture_default_str();
    c->add_option("--grid", o->grid, "sample count")->capture_default_str();
    // bin-averaged mode, matching the ensemble estimator's discretization
    auto* dk_opt = c->add_option(
        "--dk", o->dk, "bin width; switches to bin-averaged reference mode");
    c->add_option("--bins", o->bins, "bin count (with --dk)")->needs(dk_opt);
    c->add_option("--substeps", o->substeps, "sub-frequencies per bin")
        ->needs(dk_opt)
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o, dk_opt] {
      o->binavg = dk_opt->count() > 0;
      if (o->binavg && o->bins < 1) usage_error("--bins is required with --dk");
      cmd_analytic_random_fibonacci(*o);
    });
  }

  auto* est = app.add_subcommand("estimate", "finite-patch spectral estimates");
  est->require_subcommand(1);
  {
    auto o = std::make_shared<EstPeriodogramOpts>();
    auto* c = est->add_subcommand("periodogram", "|S(k)|^2 on a grid");
    c->add_option("--input", o->input, "comb CSV")->required();
    c->add_option("--kmin", o->kmin, "lower wavenumber")->capture_default_str();
    c->add_option("--kmax", o->kmax, "upper wavenumber")->capture_default_str();
    c->add_option("--grid", o->grid, "uniform grid size");
    c->add_option("--at", o->at, "evaluate at the peak positions of this "
                                 "spectrum CSV instead of a uniform grid");
    c->add_option("--norm", o->norm, "density or bragg")
        ->check(CLI::IsMember({"density", "bragg"}))
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_estimate_periodogram(*o); });
  }
  {
    auto o = std::make_shared<EstAutocorrOpts>();
    auto* c = est->add_subcommand("autocorr", "pair-coefficient table");
    c->add_option("--input", o->input, "comb CSV")->required();
    c->add_option("--maxdist", o->maxdist,
                  "largest displacement (default: a tenth of the patch "
                  "extent)");
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_estimate_autocorr(*o); });
  }
  {
    auto o = std::make_shared<EstEnsembleOpts>();
    auto* c = est->add_subcommand("ensemble", "mean periodogram over draws");
    c->add_option("--system", o->system,
                  "bernoulli, rs, rs-bernoulli, or random-fibonacci")
        ->check(CLI::IsMember(
            {"bernoulli", "rs", "rs-bernoulli", "random-fibonacci"}))
        ->capture_default_str();
    c->add_option("--size", o->size, "sites or tiles per realization")
        ->capture_default_str();
    o->p_opt = c->add_option(
        "--p", o->p,
        "sign or tile probability (random-fibonacci default: 1/golden ratio)");
    c->add_option("--seed", o->seed, "master seed")->capture_default_str();
    c->add_option("--realizations", o->realizations, "number of draws")
        ->capture_default_str();
    c->add_option("--kmin", o->kmin, "first bin wavenumber")
        ->capture_default_str();
    c->add_option("--dk", o->dk, "bin width")->required();
    c->add_option("--bins", o->bins, "bin count")->required();
    c->add_option("--substeps", o->substeps,
                  "sub-frequencies averaged per bin")
        ->capture_default_str();
    c->add_option("--norm", o->norm, "density or bragg")
        ->check(CLI::IsMember({"density", "bragg"}))
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_estimate_ensemble(*o); });
  }
  {
    auto o = std::make_shared<EstScalingOpts>();
    auto* c = est->add_subcommand("scaling",
                                  "log-log slope of |S(k)|^2 vs volume");
    c->add_option("--system", o->system, "tm, rs, or fibonacci")
        ->check(CLI::IsMember({"tm", "rs", "fibonacci"}))
        ->capture_default_str();
    c->add_option("--k", o->k, "wavenumber")->required();
    c->add_option("--min-log2", o->min_log2, "smallest size exponent")
        ->capture_default_str();
    c->add_option("--max-log2", o->max_log2, "largest size exponent")
        ->capture_default_str();
    c->add_option("--out", o->out, "output prefix")->required();
    c->callback([o] { cmd_estimate_scaling(*o); });
  }

  {
    auto o = std::make_shared<CompareOpts>();
    auto* c = app.add_subcommand(
        "compare", "error of an estimate against a reference CSV");
    c->add_option("--estimate", o->estimate, "estimate CSV")->required();
    c->add_option("--reference", o->reference,
                  "spectrum CSV (or estimate CSV to compare runs)")
        ->required();
    c->add_option("--lo", o->lo, "region lower bound");
    c->add_option("--hi", o->hi, "region upper bound");
    c->add_option("--metric", o->metric, "l1rel or maxrel")
        ->check(CLI::IsMember({"l1rel", "maxrel"}))
        ->capture_default_str();
    o->tol_opt = c->add_option("--tolerance", o->tolerance,
                               "exit 1 when the metric exceeds this");
    c->add_option("--out", o->out, "report prefix");
    c->callback([o] { cmd_compare(*o); });
  }
  {
    auto o = std::make_shared<ReplayOpts>();
    auto* c = app.add_subcommand(
        "replay", "re-run a manifest and verify output digests");
    c->add_option("manifest", o->manifest, "manifest JSON path")->required();
    c->callback([o] { cmd_replay(*o); });
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "diffract: " << e.what() << "\n"
              << "run 'diffract --help' for usage\n";
    return 2;
  } catch (const CliExit& e) {
    return e.code;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_cli(std::move(args));
  } catch (const CliExit& e) {
    return e.code;
  }
}
