#include "estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rng.hpp"

namespace diffract {

namespace {

constexpr std::size_t kFftMinWork = std::size_t{1} << 18;
constexpr std::size_t kLadderMinWork = std::size_t{1} << 24;
constexpr std::int64_t kFftMaxSize = std::int64_t{1} << 22;
constexpr std::size_t kLadderResync = 2048;

// In-place forward DFT, X_t = sum_n a_n e^{-2 pi i t n / N}, N a power
// of two. Twiddles come from one table indexed by stage stride so the
// result is a pure function of the input.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t t = 0; t < n / 2; ++t)
    tw[t] = std::polar(1.0, -2 * M_PI * static_cast<double>(t) /
                                static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len)
      for (std::size_t j = 0; j < len / 2; ++j) {
        auto u = a[i + j];
        auto v = a[i + j + len / 2] * tw[j * stride];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
  }
}

// S(k_j) = sum_x w(x) e^{-2 pi i k_j x} for a 1-d comb. Path choice
// depends only on the comb and grid. The transform path applies when the
// grid is exactly { (t0+j)/M } with M a power of two and positions are
// integers: folding n mod M then leaves every phase unchanged.
std::vector<std::complex<double>> spectrum_on_grid(
    const WeightedComb& comb, const std::vector<double>& grid) {
  const std::size_t n = comb.size();
  const std::size_t g = grid.size();
  std::vector<std::complex<double>> out(g);

  if (comb.integer_positions && g >= 2 && n * g >= kFftMinWork) {
    const double delta = grid[1] - grid[0];
    const double minv = 1.0 / delta;
    const auto m = static_cast<std::int64_t>(std::llround(minv));
    if (m >= 2 && m <= kFftMaxSize && (m & (m - 1)) == 0 &&
        static_cast<double>(m) == minv) {
      const double md = static_cast<double>(m);
      const auto t0 = static_cast<std::int64_t>(std::llround(grid[0] * md));
      bool exact_grid = static_cast<double>(t0) / md == grid[0];
      for (std::size_t j = 1; j < g && exact_grid; ++j)
        exact_grid =
            grid[j] == static_cast<double>(t0 + static_cast<std::int64_t>(j)) / md;
      if (exact_grid) {
        std::vector<std::complex<double>> buf(static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < n; ++i) {
          auto x = static_cast<std::int64_t>(std::llround(comb.pos1(i)));
          auto idx = static_cast<std::size_t>(((x % m) + m) % m);
          buf[idx] += comb.weights[i];
        }
        fft_radix2(buf);
        for (std::size_t j = 0; j < g; ++j) {
          auto t = (t0 + static_cast<std::int64_t>(j)) % m;
          if (t < 0) t += m;
          out[j] = buf[static_cast<std::size_t>(t)];
        }
        return out;
      }
    }
  }

  if (g >= 2 && n * g >= kLadderMinWork) {
    const double k0 = grid[0];
    const double delta = (grid[g - 1] - k0) / static_cast<double>(g - 1);
    bool uniform = true;
    for (std::size_t j = 1; j + 1 < g && uniform; ++j)
      uniform = std::abs(grid[j] - (k0 + static_cast<double>(j) * delta)) <=
                1e-12;
    if (uniform) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = comb.pos1(i);
        const std::complex<double> w = comb.weights[i];
        const std::complex<double> step = std::polar(1.0, -2 * M_PI * delta * x);
        std::complex<double> z{1, 0};
        for (std::size_t j = 0; j < g; ++j) {
          if (j % kLadderResync == 0)
            z = std::polar(1.0, -2 * M_PI * grid[j] * x);
          out[j] += w * z;
          z *= step;
        }
      }
      return out;
    }
  }

  for (std::size_t j = 0; j < g; ++j) {
    std::complex<double> s{0, 0};
    for (std::size_t i = 0; i < n; ++i)
      s += comb.weights[i] * std::polar(1.0, -2 * M_PI * grid[j] * comb.pos1(i));
    out[j] = s;
  }
  return out;
}

WeightedComb ensemble_realization(const EnsembleSpec& spec, int r) {
  const auto ur = static_cast<std::uint64_t>(r);
  switch (spec.system) {
    case EnsembleSystem::bernoulli:
      return gen_bernoulli({seed_stream(spec.master_seed, ur), spec.p}, 0,
                           spec.size - 1);
    case EnsembleSystem::rudin_shapiro:
      return gen_rudin_shapiro(static_cast<std::int64_t>(r) * spec.size,
                               (static_cast<std::int64_t>(r) + 1) * spec.size - 1);
    case EnsembleSystem::rs_bernoulli:
      return gen_rs_bernoulli({seed_stream(spec.master_seed, ur), spec.p}, 0,
                              spec.size - 1);
    case EnsembleSystem::random_fibonacci:
      return gen_random_fibonacci_tiling(
          {seed_stream(spec.master_seed, ur), spec.p}, spec.size);
  }
  throw std::invalid_argument("unknown ensemble system");
}

double patch_extent(const WeightedComb& comb) {
  double e2 = 0;
  for (int c = 0; c < comb.dim; ++c) {
    double e = comb.patch_hi[static_cast<std::size_t>(c)] -
               comb.patch_lo[static_cast<std::size_t>(c)];
    e2 += e * e;
  }
  return std::sqrt(e2);
}

struct GoldenLess {
  bool operator()(GoldenInt x, GoldenInt y) const { return less(x, y); }
};

AutocorrelationTable ac_exact_golden(const WeightedComb& comb, double maxdist) {
  const std::size_t n = comb.size();
  std::map<GoldenInt, std::complex<double>, GoldenLess> acc;
  std::complex<double> c0{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    c0 += comb.weights[i] * std::conj(comb.weights[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      GoldenInt z = sub(comb.exact[j], comb.exact[i]);
      if (embed(z) > maxdist) break;
      acc[z] += comb.weights[j] * std::conj(comb.weights[i]);
    }
  }
  AutocorrelationTable out;
  out.dim = 1;
  out.volume = comb.volume;
  const double vol = comb.volume;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
    out.zg.push_back(neg(it->first));
    out.z.push_back(embed(neg(it->first)));
    out.coeff.push_back(std::conj(it->second) / vol);
  }
  out.zg.push_back(GoldenInt{0, 0});
  out.z.push_back(0.0);
  out.coeff.push_back(c0 / vol);
  for (const auto& [z, c] : acc) {
    out.zg.push_back(z);
    out.z.push_back(embed(z));
    out.coeff.push_back(c / vol);
  }
  return out;
}

AutocorrelationTable ac_exact_integer(const WeightedComb& comb, double maxdist) {
  const std::size_t n = comb.size();
  std::map<std::int64_t, std::complex<double>> acc;
  std::complex<double> c0{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = static_cast<std::int64_t>(std::llround(comb.pos1(i)));
    c0 += comb.weights[i] * std::conj(comb.weights[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = static_cast<std::int64_t>(std::llround(comb.pos1(j)));
      const std::int64_t z = xj - xi;
      if (static_cast<double>(z) > maxdist) break;
      acc[z] += comb.weights[j] * std::conj(comb.weights[i]);
    }
  }
  AutocorrelationTable out;
  out.dim = 1;
  out.volume = comb.volume;
  const double vol = comb.volume;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
    out.z.push_back(static_cast<double>(-it->first));
    out.coeff.push_back(std::conj(it->second) / vol);
  }
  out.z.push_back(0.0);
  out.coeff.push_back(c0 / vol);
  for (const auto& [z, c] : acc) {
    out.z.push_back(static_cast<double>(z));
    out.coeff.push_back(c / vol);
  }
  return out;
}

AutocorrelationTable ac_clustered(const WeightedComb& comb, double maxdist) {
  const std::size_t n = comb.size();
  const int d = comb.dim;
  struct Entry {
    std::array<double, 3> z;
    std::complex<double> c;
  };
  std::vector<Entry> raw;
  std::complex<double> c0{0, 0};
  // positions are lex sorted, so the first coordinate bounds the scan
  for (std::size_t i = 0; i < n; ++i) {
    c0 += comb.weights[i] * std::conj(comb.weights[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t di = i * static_cast<std::size_t>(d);
      const std::size_t dj = j * static_cast<std::size_t>(d);
      if (comb.positions[dj] - comb.positions[di] > maxdist) break;
      Entry e{};
      double r2 = 0;
      for (int c = 0; c < d; ++c) {
        e.z[static_cast<std::size_t>(c)] =
            comb.positions[dj + static_cast<std::size_t>(c)] -
            comb.positions[di + static_cast<std::size_t>(c)];
        r2 += e.z[static_cast<std::size_t>(c)] * e.z[static_cast<std::size_t>(c)];
      }
      if (r2 > maxdist * maxdist) continue;
      e.c = comb.weights[j] * std::conj(comb.weights[i]);
      // canonical representative: lex-positive displacement
      bool negate = false;
      for (int c = 0; c < d; ++c) {
        double v = e.z[static_cast<std::size_t>(c)];
        if (v != 0) {
          negate = v < 0;
          break;
        }
      }
      if (negate) {
        for (int c = 0; c < d; ++c)
          e.z[static_cast<std::size_t>(c)] = -e.z[static_cast<std::size_t>(c)];
        e.c = std::conj(e.c);
      }
      raw.push_back(e);
    }
  }
  std::sort(raw.begin(), raw.end(), [d](const Entry& a, const Entry& b) {
    for (int c = 0; c < d; ++c) {
      auto uc = static_cast<std::size_t>(c);
      if (a.z[uc] != b.z[uc]) return a.z[uc] < b.z[uc];
    }
    return false;
  });
  std::vector<Entry> merged;
  for (const auto& e : raw) {
    bool close = !merged.empty();
    if (close)
      for (int c = 0; c < d; ++c) {
        auto uc = static_cast<std::size_t>(c);
        close = close && std::abs(e.z[uc] - merged.back().z[uc]) <= 1e-9;
      }
    if (close)
      merged.back().c += e.c;
    else
      merged.push_back(e);
  }
  AutocorrelationTable out;
  out.dim = d;
  out.volume = comb.volume;
  const double vol = comb.volume;
  for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
    for (int c = 0; c < d; ++c)
      out.z.push_back(-it->z[static_cast<std::size_t>(c)]);
    out.coeff.push_back(std::conj(it->c) / vol);
  }
  for (int c = 0; c < d; ++c) out.z.push_back(0.0);
  out.coeff.push_back(c0 / vol);
  for (const auto& e : merged) {
    for (int c = 0; c < d; ++c) out.z.push_back(e.z[static_cast<std::size_t>(c)]);
    out.coeff.push_back(e.c / vol);
  }
  return out;
}

}  // namespace

AutocorrelationTable autocorrelation(const WeightedComb& comb, double maxdist) {
  if (comb.size() == 0) throw std::invalid_argument("empty comb");
  if (!(comb.volume > 0)) throw std::invalid_argument("comb has no volume");
  if (!(maxdist >= 0)) throw std::invalid_argument("maxdist must be >= 0");
  if (maxdist > patch_extent(comb) * (1 + 1e-12))
    throw std::invalid_argument("maxdist exceeds the patch extent");
  if (comb.dim == 1 && comb.has_exact()) return ac_exact_golden(comb, maxdist);
  if (comb.dim == 1 && comb.integer_positions)
    return ac_exact_integer(comb, maxdist);
  return ac_clustered(comb, maxdist);
}

DiffractionEstimate periodogram(const WeightedComb& comb,
                                const std::vector<double>& grid, Norm norm) {
  if (comb.dim != 1)
    throw std::invalid_argument("periodogram needs a 1-d comb");
  if (grid.empty()) throw std::invalid_argument("empty wavenumber grid");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1]))
      throw std::invalid_argument("grid must be strictly increasing");
  if (!(comb.volume > 0)) throw std::invalid_argument("comb has no volume");

  const auto s = spectrum_on_grid(comb, grid);
  const double scale =
      norm == Norm::density ? comb.volume : comb.volume * comb.volume;
  DiffractionEstimate out;
  out.grid = grid;
  out.norm = norm;
  out.volume = comb.volume;
  out.realizations = 1;
  out.values.resize(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    out.values[j] = std::norm(s[j]) / scale;
  return out;
}

DiffractionEstimate ensemble_periodogram(const EnsembleSpec& spec, double kmin,
                                         double dk, int bins, int substeps,
                                         int realizations, Norm norm) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (!(dk > 0)) throw std::invalid_argument("bin width must be positive");
  if (spec.size < 1) throw std::invalid_argument("ensemble size must be >= 1");

  const double sub = dk / substeps;
  std::vector<double> fine;
  fine.reserve(static_cast<std::size_t>(bins) * static_cast<std::size_t>(substeps));
  for (int j = 0; j < bins; ++j)
    for (int i = 0; i < substeps; ++i) fine.push_back(kmin + j * dk + i * sub);

  std::vector<double> acc(fine.size(), 0.0);
  double volsum = 0;
  for (int r = 0; r < realizations; ++r) {
    const WeightedComb comb = ensemble_realization(spec, r);
    const auto est = periodogram(comb, fine, norm);
    for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += est.values[t];
    volsum += comb.volume;
  }

  DiffractionEstimate out;
  out.norm = norm;
  out.volume = volsum / realizations;
  out.realizations = realizations;
  out.grid.resize(static_cast<std::size_t>(bins));
  out.values.resize(static_cast<std::size_t>(bins));
  const double weight = 1.0 / (static_cast<double>(substeps) *
                               static_cast<double>(realizations));
  for (int j = 0; j < bins; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    out.grid[uj] = kmin + j * dk;
    double s = 0;
    for (int i = 0; i < substeps; ++i)
      s += acc[uj * static_cast<std::size_t>(substeps) +
               static_cast<std::size_t>(i)];
    out.values[uj] = s * weight;
  }
  return out;
}

double scaling_exponent(std::span<const WeightedComb> family, double k) {
  if (family.size() < 4)
    throw std::invalid_argument("scaling fit needs at least 4 sizes");
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!(family[i].volume > 0))
      throw std::invalid_argument("comb has no volume");
    if (i > 0 && !(family[i].volume > family[i - 1].volume))
      throw std::invalid_argument("volumes must be strictly increasing");
  }
  std::vector<double> lx, ly;
  for (const auto& comb : family) {
    const auto s = spectrum_on_grid(comb, {k});
    const double p = std::norm(s[0]);
    if (!(p > 0) || !std::isfinite(p))
      throw EvaluationError("spectral mass vanishes at this wavenumber");
    lx.push_back(std::log(comb.volume));
    ly.push_back(std::log(p));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

double compare(const DiffractionEstimate& est, const SpectralMeasure& ref,
               double lo, double hi, Metric metric) {
  if (!(lo <= hi)) throw std::invalid_argument("empty comparison region");
  std::vector<double> ev, rv;

  if (est.norm == Norm::bragg) {
    if (ref.pp_count() == 0)
      throw std::invalid_argument("reference has no point component");
    if (ref.dim != 1)
      throw std::invalid_argument("comparison needs a 1-d reference");
    for (std::size_t p = 0; p < ref.pp_count(); ++p) {
      const double pos = ref.pp_pos[p];
      if (pos < lo || pos > hi) continue;
      auto it = std::lower_bound(est.grid.begin(), est.grid.end(), pos);
      std::size_t j = static_cast<std::size_t>(it - est.grid.begin());
      if (j == est.grid.size() ||
          (j > 0 && pos - est.grid[j - 1] < est.grid[j] - pos))
        --j;
      if (std::abs(est.grid[j] - pos) > 1e-9 * std::max(1.0, std::abs(pos)))
        continue;
      ev.push_back(est.values[j]);
      rv.push_back(ref.pp_intensity[p]);
    }
  } else {
    if (ref.ac_grid.empty())
      throw std::invalid_argument("reference has no density component");
    for (std::size_t j = 0; j < est.grid.size(); ++j) {
      const double k = est.grid[j];
      if (k < lo || k > hi) continue;
      if (k < ref.ac_grid.front() || k > ref.ac_grid.back()) continue;
      auto it = std::upper_bound(ref.ac_grid.begin(), ref.ac_grid.end(), k);
      auto hi_idx = static_cast<std::size_t>(it - ref.ac_grid.begin());
      double r;
      if (hi_idx == 0) {
        r = ref.ac_values.front();
      } else if (hi_idx == ref.ac_grid.size()) {
        r = ref.ac_values.back();
      } else {
        const double k0 = ref.ac_grid[hi_idx - 1], k1 = ref.ac_grid[hi_idx];
        const double t = (k - k0) / (k1 - k0);
        r = ref.ac_values[hi_idx - 1] * (1 - t) + ref.ac_values[hi_idx] * t;
      }
      ev.push_back(est.values[j]);
      rv.push_back(r);
    }
  }

  if (ev.empty())
    throw std::invalid_argument("no comparison points in the region");
  if (metric == Metric::l1rel) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      num += std::abs(ev[i] - rv[i]);
      den += std::abs(rv[i]);
    }
    if (den == 0) throw EvaluationError("reference mass is zero in the region");
    return num / den;
  }
  double worst = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (rv[i] == 0) {
      if (ev[i] == 0) continue;
      throw EvaluationError("reference vanishes at a compared point");
    }
    worst = std::max(worst, std::abs(ev[i] - rv[i]) / std::abs(rv[i]));
  }
  return worst;
}

SpectralMeasure threshold_peaks(const SpectralMeasure& spectrum,
                                double threshold) {
  if (!(threshold > 0)) throw std::invalid_argument("threshold must be positive");
  SpectralMeasure out;
  out.dim = spectrum.dim;
  const auto d = static_cast<std::size_t>(spectrum.dim);
  for (std::size_t p = 0; p < spectrum.pp_count(); ++p) {
    if (spectrum.pp_intensity[p] < threshold) continue;
    for (std::size_t c = 0; c < d; ++c)
      out.pp_pos.push_back(spectrum.pp_pos[p * d + c]);
    out.pp_intensity.push_back(spectrum.pp_intensity[p]);
  }
  return out;
}

}  // namespace diffract
