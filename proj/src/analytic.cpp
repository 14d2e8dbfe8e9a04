#include "analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diffract {

double sinc(double x) {
  double ax = std::abs(x);
  if (ax < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace {

double det_nd(const double* b, int dim) {
  if (dim == 1) return b[0];
  if (dim == 2) return b[0] * b[3] - b[2] * b[1];
  return b[0] * (b[4] * b[8] - b[7] * b[5]) -
         b[3] * (b[1] * b[8] - b[7] * b[2]) +
         b[6] * (b[1] * b[5] - b[4] * b[2]);
}

std::array<double, 9> invert_nd(const double* b, int dim) {
  std::array<double, 9> inv{};
  double d = det_nd(b, dim);
  if (dim == 1) {
    inv[0] = 1.0 / d;
  } else if (dim == 2) {
    inv[0] = b[3] / d;
    inv[1] = -b[1] / d;
    inv[2] = -b[2] / d;
    inv[3] = b[0] / d;
  } else {
    auto cof = [&](int r, int c) {
      int r1 = (r + 1) % 3, r2 = (r + 2) % 3;
      int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
      return b[c1 * 3 + r1] * b[c2 * 3 + r2] - b[c2 * 3 + r1] * b[c1 * 3 + r2];
    };
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) inv[r * 3 + c] = cof(c, r) / d;
  }
  return inv;
}

struct PeakNd {
  std::array<double, 3> k;
  double intensity;
};

void emit_sorted(std::vector<PeakNd>& peaks, int dim, SpectralMeasure& out) {
  std::sort(peaks.begin(), peaks.end(), [dim](const PeakNd& p, const PeakNd& q) {
    for (int c = 0; c < dim; ++c)
      if (p.k[c] != q.k[c]) return p.k[c] < q.k[c];
    return false;
  });
  for (const auto& p : peaks) {
    for (int c = 0; c < dim; ++c) out.pp_pos.push_back(p.k[c]);
    out.pp_intensity.push_back(p.intensity);
  }
}

}  // namespace

SpectralMeasure crystal_diffraction(const CrystalSpec& spec, double kmax) {
  if (!(kmax > 0)) throw std::invalid_argument("kmax must be positive");
  const int d = spec.dim;
  const double* B = spec.basis.data();
  auto inv = invert_nd(B, d);
  const double dens = 1.0 / std::abs(spec.det());

  double wsum = 0;
  for (const auto& at : spec.motif) wsum += std::abs(at.weight);
  const double drop = 1e-12 * dens * dens * wsum * wsum;

  // n = B^T k, so |n_i| <= ||col_i(B)|| kmax
  long nb[3] = {0, 0, 0};
  for (int c = 0; c < d; ++c) {
    double n2 = 0;
    for (int r = 0; r < d; ++r) n2 += B[c * d + r] * B[c * d + r];
    nb[c] = static_cast<long>(std::sqrt(n2) * kmax) + 1;
  }

  SpectralMeasure out;
  out.dim = d;
  std::vector<PeakNd> peaks;
  long n[3] = {0, 0, 0};
  long lo1 = d > 1 ? -nb[1] : 0, hi1 = d > 1 ? nb[1] : 0;
  long lo2 = d > 2 ? -nb[2] : 0, hi2 = d > 2 ? nb[2] : 0;
  for (n[0] = -nb[0]; n[0] <= nb[0]; ++n[0])
    for (n[1] = lo1; n[1] <= hi1; ++n[1])
      for (n[2] = lo2; n[2] <= hi2; ++n[2]) {
        PeakNd p{};
        double k2 = 0;
        for (int r = 0; r < d; ++r) {
          double kr = 0;
          for (int c = 0; c < d; ++c) kr += inv[r * d + c] * n[c];
          p.k[r] = kr;
          k2 += kr * kr;
        }
        if (k2 > kmax * kmax) continue;
        // phase <k|B(m+f)> reduces to <n|f> on the dual lattice
        std::complex<double> amp{0, 0};
        for (const auto& at : spec.motif) {
          double ph = 0;
          for (int c = 0; c < d; ++c) ph += n[c] * at.frac[c];
          amp += at.weight * std::polar(1.0, -2 * M_PI * ph);
        }
        p.intensity = dens * dens * std::norm(amp);
        if (p.intensity < drop) continue;
        peaks.push_back(p);
      }
  emit_sorted(peaks, d, out);
  return out;
}

double two_atom_intensity(double k1, double k2, std::complex<double> alpha,
                          double a, double b) {
  std::complex<double> z =
      1.0 + alpha * std::polar(1.0, -2 * M_PI * (k1 * a + k2 * b));
  return std::norm(z);
}

SpectralMeasure model_set_spectrum(const CPSSpec& cps, double kmax,
                                   double threshold) {
  if (!(kmax > 0)) throw std::invalid_argument("kmax must be positive");
  if (threshold < 0) throw std::invalid_argument("threshold must be >= 0");
  cps.validate();

  const auto E = cps.embedding_matrix();  // rows (e(g), e(g*))
  const double det = cps.embedding_det();
  const double volw = cps.window_vol();
  const double dens = volw / std::abs(det);
  const double central = dens * dens;
  const double thr = std::max(threshold, 1e-12 * central);

  // |sinc(x)| <= 1/|x| bounds the internal coordinate of any peak above thr
  const double ksmax = dens / (M_PI * volw * std::sqrt(thr)) + 1.0 / volw;

  // (m, n) = E (k, kstar)
  const double mb = std::abs(E[0]) * kmax + std::abs(E[1]) * ksmax + 1;
  const double nb = std::abs(E[2]) * kmax + std::abs(E[3]) * ksmax + 1;
  const auto m_hi = static_cast<std::int64_t>(mb);
  const auto n_hi = static_cast<std::int64_t>(nb);

  SpectralMeasure out;
  out.dim = 1;
  std::vector<PeakNd> peaks;
  for (std::int64_t m = -m_hi; m <= m_hi; ++m)
    for (std::int64_t n = -n_hi; n <= n_hi; ++n) {
      double k = (E[3] * m - E[1] * n) / det;
      double ks = (-E[2] * m + E[0] * n) / det;
      if (std::abs(k) > kmax || std::abs(ks) > ksmax) continue;
      double a = dens * sinc(M_PI * volw * ks);
      double intensity = a * a;
      if (intensity < thr) continue;
      peaks.push_back({{k, 0, 0}, intensity});
    }
  emit_sorted(peaks, 1, out);
  return out;
}

double fibonacci_intensity(GoldenInt numerator) {
  const std::int64_t a = numerator.a, b = numerator.b;
  const double dens = kTau / kSqrt5;
  if (a == 0 && b == 0) return dens * dens;
  // k = (a+b tau)/sqrt5 has tau kstar = (b - a tau)/sqrt5; for a == 2b this
  // is the integer -b, so the peak is extinct.
  if (a == 2 * b) return 0.0;
  double arg = M_PI * embed(GoldenInt{b, -a}) / kSqrt5;
  double s = dens * sinc(arg);
  return s * s;
}

double tm_riesz_partial(double k, int depth) {
  if (depth < 0 || depth > 63)
    throw std::invalid_argument("riesz depth out of range");
  double prod = 1.0;
  double f = 2.0 * k;
  for (int n = 0; n < depth; ++n) {
    prod *= 1.0 - std::cos(M_PI * f);
    f *= 2.0;
  }
  return prod;
}

std::complex<double> tm_exponential_sum(double k, int n) {
  if (n < 0 || n > 24)
    throw std::invalid_argument("exponential sum order out of range");
  std::complex<double> g{1, 0};
  double f = k;
  for (int j = 0; j < n; ++j) {
    g *= 1.0 - std::polar(1.0, -2 * M_PI * f);
    f *= 2.0;
  }
  return g;
}

namespace {

// Thue-Morse autocorrelation eta(m) = sum_l v_l v_{l+m} / 2^wordlog,
// summed over l in [0, 2^wordlog - m). Bit-packed: set bit means v = -1.
std::vector<double> tm_autocorrelation(int wordlog, int cutoff) {
  const std::size_t nbits = std::size_t{1} << wordlog;
  const std::size_t nwords = nbits / 64 + 2;  // zero padding for shifts
  std::vector<std::uint64_t> bits(nwords, 0);
  for (std::size_t i = 0; i < nbits; ++i)
    if (__builtin_parityll(i)) bits[i >> 6] |= std::uint64_t{1} << (i & 63);

  auto shifted = [&](std::size_t word, std::size_t m) -> std::uint64_t {
    std::size_t q = m >> 6, r = m & 63;
    if (r == 0) return bits[word + q];
    return (bits[word + q] >> r) | (bits[word + q + 1] << (64 - r));
  };

  std::vector<double> eta(static_cast<std::size_t>(cutoff) + 1);
  eta[0] = 1.0;
  for (int m = 1; m <= cutoff; ++m) {
    const std::size_t overlap = nbits - static_cast<std::size_t>(m);
    std::int64_t mismatch = 0;
    std::size_t full = overlap >> 6;
    for (std::size_t w = 0; w < full; ++w)
      mismatch += __builtin_popcountll(bits[w] ^ shifted(w, m));
    std::size_t rem = overlap & 63;
    if (rem) {
      std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
      mismatch += __builtin_popcountll((bits[full] ^ shifted(full, m)) & mask);
    }
    std::int64_t corr = static_cast<std::int64_t>(overlap) - 2 * mismatch;
    eta[static_cast<std::size_t>(m)] =
        static_cast<double>(corr) / static_cast<double>(nbits);
  }
  return eta;
}

}  // namespace

DistributionFn tm_distribution(int depth, int gridsize,
                               const TmDistributionOptions& opt) {
  if (depth < 1 || depth > 20)
    throw std::invalid_argument("distribution depth out of range");
  if (gridsize < 2) throw std::invalid_argument("gridsize must be >= 2");
  if (opt.word_log2 < 10 || opt.word_log2 > 26 ||
      opt.fourier_cutoff < 1 ||
      opt.fourier_cutoff >= (1 << (opt.word_log2 - 2)) ||
      opt.tolerance < 0.0)
    throw std::invalid_argument("bad distribution options");
  const double tol =
      opt.tolerance > 0.0
          ? opt.tolerance
          : std::max(1e-3, 16.0 * std::pow(2.0, -static_cast<double>(depth)));

  const std::int64_t cells = gridsize - 1;
  const std::int64_t fine_min = std::int64_t{1} << (depth + 4);
  const std::int64_t sub = (fine_min + cells - 1) / cells;
  const std::int64_t fine = sub * cells;
  const double h = 1.0 / static_cast<double>(fine);

  // route (a): trapezoid of the Riesz density; exact for this trig
  // polynomial since fine exceeds its degree
  std::vector<double> grid(static_cast<std::size_t>(gridsize));
  std::vector<double> fa(static_cast<std::size_t>(gridsize));
  double acc = 0.0;
  double prev = tm_riesz_partial(0.0, depth);
  fa[0] = 0.0;
  grid[0] = 0.0;
  for (std::int64_t i = 1; i <= fine; ++i) {
    double rho = tm_riesz_partial(static_cast<double>(i) * h, depth);
    acc += 0.5 * (prev + rho) * h;
    prev = rho;
    if (i % sub == 0) {
      auto j = static_cast<std::size_t>(i / sub);
      grid[j] = static_cast<double>(j) / static_cast<double>(cells);
      fa[j] = acc;
    }
  }

  // route (b): Fourier series with empirical autocorrelation coefficients
  const auto eta = tm_autocorrelation(opt.word_log2, opt.fourier_cutoff);
  std::vector<double> fb(static_cast<std::size_t>(gridsize));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid[j];
    const std::complex<double> rot = std::polar(1.0, 2 * M_PI * k);
    std::complex<double> z = rot;
    double s = 0.0;
    for (int m = 1; m <= opt.fourier_cutoff; ++m) {
      s += eta[static_cast<std::size_t>(m)] * z.imag() / (M_PI * m);
      z *= rot;
      if ((m & 8191) == 0) z = std::polar(1.0, 2 * M_PI * k * (m + 1));
    }
    fb[j] = k + s;
  }

  double dev = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    dev = std::max(dev, std::abs(fa[j] - fb[j]));
  if (dev > tol)
    throw DistributionMismatch("distribution function routes disagree", grid,
                               fa, fb, dev);

  DistributionFn out;
  out.grid = std::move(grid);
  out.values = std::move(fa);
  out.method = "riesz-trapezoid";
  out.max_disagreement = dev;
  return out;
}

SpectralMeasure rs_diffraction(double kmin, double kmax, int gridsize) {
  if (!(kmin < kmax)) throw std::invalid_argument("empty wavenumber range");
  if (gridsize < 2) throw std::invalid_argument("gridsize must be >= 2");
  SpectralMeasure out;
  out.dim = 1;
  out.ac_grid.reserve(static_cast<std::size_t>(gridsize));
  out.ac_values.assign(static_cast<std::size_t>(gridsize), 1.0);
  for (int i = 0; i < gridsize; ++i)
    out.ac_grid.push_back(kmin + (kmax - kmin) * i / (gridsize - 1));
  return out;
}

namespace {

double rf_density_impl(double k, int level) {
  const double sn = std::sin(M_PI * k / kTau);
  const double num = sn * sn;
  const double s1 = std::sin(M_PI * k * kTau);
  const double s2 = std::sin(M_PI * k);
  const double den = kTau * kTau * s1 * s1 + kTau * s2 * s2 - num;
  if (!std::isfinite(num) || !std::isfinite(den))
    throw EvaluationError("density evaluation failed at k=" +
                          std::to_string(k));
  if (std::abs(den) < 1e-13 * (kTau * kTau + kTau + 1.0)) {
    if (level >= 1)
      throw EvaluationError("density singular at k=" + std::to_string(k));
    return 0.5 * (rf_density_impl(k - 1e-6, 1) + rf_density_impl(k + 1e-6, 1));
  }
  return (kTau + 2.0) / 5.0 * num / den;
}

}  // namespace

double random_fibonacci_density(double k) { return rf_density_impl(k, 0); }

std::vector<double> sample_binavg(const std::function<double(double)>& f,
                                  double kmin, double dk, int bins,
                                  int substeps) {
  if (bins < 1 || substeps < 1)
    throw std::invalid_argument("bins and substeps must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(bins));
  for (int j = 0; j < bins; ++j) {
    double s = 0;
    for (int i = 0; i < substeps; ++i)
      s += f(kmin + j * dk + i * dk / substeps);
    out[static_cast<std::size_t>(j)] = s / substeps;
  }
  return out;
}

}  // namespace diffract
