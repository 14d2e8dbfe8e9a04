#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "golden.hpp"

namespace diffract {

/// Diffraction measure in its pure point / absolutely continuous /
/// singular continuous decomposition. pp holds strictly positive peaks
/// (extinct positions are simply absent), ac holds density samples, sc
/// holds distribution-function samples. A wavenumber never carries more
/// than one component.
struct SpectralMeasure {
  int dim = 1;
  std::vector<double> pp_pos;  // dim-strided
  std::vector<double> pp_intensity;
  std::vector<double> ac_grid;
  std::vector<double> ac_values;
  std::vector<double> sc_grid;
  std::vector<double> sc_values;

  std::size_t pp_count() const { return pp_intensity.size(); }
};

/// Cumulative spectral mass F(k) on [0,1], nondecreasing, F(0) = 0.
/// method names the construction that produced values; max_disagreement
/// is the uniform gap against the cross-checking construction.
struct DistributionFn {
  std::vector<double> grid;
  std::vector<double> values;
  std::string method;
  double max_disagreement = 0;
};

class EvaluationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when the two distribution-function routes drift apart; carries
/// both curves for diagnosis.
class DistributionMismatch : public std::runtime_error {
public:
  DistributionMismatch(std::string what, std::vector<double> grid,
                       std::vector<double> first, std::vector<double> second,
                       double dev)
      : std::runtime_error(std::move(what)),
        grid(std::move(grid)),
        first(std::move(first)),
        second(std::move(second)),
        max_dev(dev) {}
  std::vector<double> grid, first, second;
  double max_dev;
};

double sinc(double x);  // sin(x)/x, 1 at 0, series below |x| < 1e-4

/// Pure point spectrum of a crystal: peaks on the dual lattice (inverse
/// transpose of the basis applied to Z^d) with |k| <= kmax, intensity
/// (dens Gamma)^2 |sum_motif w exp(-2 pi i <n|frac>)|^2. Numerically zero
/// peaks are dropped.
SpectralMeasure crystal_diffraction(const CrystalSpec& spec, double kmax);

/// |1 + alpha exp(-2 pi i (k1 a + k2 b))|^2, the two-scatterer cell on Z^2.
double two_atom_intensity(double k1, double k2, std::complex<double> alpha,
                          double a, double b);

/// Bragg spectrum of a cut-and-project set: dual points (k, kstar) of the
/// embedding lattice, intensity (dens sinc(pi volW kstar))^2, emitted for
/// |k| <= kmax and intensity >= threshold. threshold == 0 applies an
/// internal floor of 1e-12 times the central intensity so the enumeration
/// stays finite.
SpectralMeasure model_set_spectrum(const CPSSpec& cps, double kmax,
                                   double threshold);

/// Intensity at k = (a + b tau)/sqrt(5) for the standard Fibonacci window.
/// The extinction class a == 2b, b != 0 returns exactly zero (the sinc
/// argument is the integer -b there, detected in ring arithmetic).
double fibonacci_intensity(GoldenInt numerator);

/// Partial Riesz product prod_{n<depth} (1 - cos(2^{n+1} pi k)).
double tm_riesz_partial(double k, int depth);

/// g_n(k) = prod_{j<n} (1 - exp(-2 pi i k 2^j)), g_0 = 1.
/// |g_n(k)|^2 / 2^n equals tm_riesz_partial(k, n).
std::complex<double> tm_exponential_sum(double k, int n);

struct TmDistributionOptions {
  int fourier_cutoff = 1 << 14;  // series truncation M
  int word_log2 = 22;            // autocorrelation word length 2^n
  // Uniform agreement requirement between the two routes. Route (a) is the
  // distribution of the depth-`depth` partial product, route (b) of the
  // limit, so their honest gap shrinks like 2^-depth; 0 selects the
  // envelope max(1e-3, 16 * 2^-depth).
  double tolerance = 0.0;
};

/// Distribution function F(k) of the Thue-Morse spectrum on a uniform grid
/// over [0,1], built two independent ways and cross-checked:
///   (a) trapezoidal integration of the depth-`depth` Riesz product on a
///       refinement of the grid with at least 2^(depth+4) cells;
///   (b) F(k) = k + sum_m eta(m) sin(2 pi m k)/(pi m) with eta(m) the exact
///       autocorrelation sums of a length-2^word_log2 word.
/// Returns route (a) samples; throws DistributionMismatch if the routes
/// differ by more than the tolerance anywhere on the grid.
DistributionFn tm_distribution(int depth, int gridsize,
                               const TmDistributionOptions& opt = {});

inline double rs_density(double) { return 1.0; }

/// Lebesgue spectrum of the Rudin-Shapiro comb, sampled on a grid.
SpectralMeasure rs_diffraction(double kmin, double kmax, int gridsize);

/// Radon-Nikodym density of the random Fibonacci tiling ensemble,
///   h(k) = (tau+2)/5 * sin^2(pi k/tau)
///          / (tau^2 sin^2(pi k tau) + tau sin^2(pi k) - sin^2(pi k/tau)).
/// Vanishing denominators are resolved by a symmetric +-1e-6 offset
/// average. The k = 0 Bragg peak ((tau+1)/5) is not part of the density.
double random_fibonacci_density(double k);

/// Mean of f over `substeps` equally spaced points per bin, bin j covering
/// [kmin + j dk, kmin + (j+1) dk). Matches the sub-frequency discretization
/// of ensemble averaging so estimates and references share a grid.
std::vector<double> sample_binavg(const std::function<double(double)>& f,
                                  double kmin, double dk, int bins,
                                  int substeps);

}  // namespace diffract
