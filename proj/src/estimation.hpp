#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "analytic.hpp"
#include "generators.hpp"

namespace diffract {

/// Volume-normalized pair coefficients: coeff at displacement z is
/// sum of w(x) conj(w(y)) over pairs with x - y = z, divided by the patch
/// volume. Entries come mirrored (z and -z hold conjugate coefficients)
/// and include z = 0. z is dim-strided; zg carries the displacements
/// exactly when the source comb does.
struct AutocorrelationTable {
  int dim = 1;
  std::vector<double> z;
  std::vector<std::complex<double>> coeff;
  std::vector<GoldenInt> zg;
  double volume = 0;

  std::size_t size() const { return coeff.size(); }
  bool has_exact() const { return !zg.empty(); }
};

/// Normalization of |S(k)|^2: density divides by the patch volume
/// (estimates an intensity density), bragg by its square (estimates
/// point-mass intensities).
enum class Norm { density, bragg };

struct DiffractionEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  Norm norm = Norm::density;
  double volume = 0;
  int realizations = 1;
};

enum class EnsembleSystem { bernoulli, rudin_shapiro, rs_bernoulli,
                            random_fibonacci };

/// Ensemble of combs indexed by realization: bernoulli and rs_bernoulli
/// redraw signs on [0, size) with a fresh per-realization seed,
/// rudin_shapiro walks consecutive deterministic blocks
/// [r*size, (r+1)*size), random_fibonacci draws a fresh tiling of `size`
/// tiles. Per-realization seeds derive from master_seed via seed_stream.
struct EnsembleSpec {
  EnsembleSystem system = EnsembleSystem::bernoulli;
  double p = 0.5;
  std::int64_t size = 0;
  std::uint64_t master_seed = 0;
};

/// All displacements z = x - y with |z| <= maxdist. Displacements group
/// exactly when positions are exact (Z[tau] or integer); otherwise they
/// are clustered after a lexicographic sort, merging neighbors within
/// 1e-9 per coordinate. maxdist beyond the patch extent is refused since
/// the far coefficients would be pure edge artifacts.
AutocorrelationTable autocorrelation(const WeightedComb& comb, double maxdist);

/// value(k) = |sum_x w(x) e^{-2 pi i k x}|^2 normalized per `norm`.
/// Dim 1 only. Deterministic for a fixed comb and grid: fast paths
/// (uniform-grid phase ladder, radix-2 transform for integer combs on
/// full 1/M grids) are keyed on the inputs alone, never on load.
DiffractionEstimate periodogram(const WeightedComb& comb,
                                const std::vector<double>& grid, Norm norm);

/// Mean of per-realization periodograms over `realizations` draws of the
/// ensemble, each normalized by its own patch volume. Every output bin
/// j averages `substeps` sub-frequencies kmin + j*dk + i*dk/substeps
/// (substeps = 1 evaluates the bare grid). Accumulation order is fixed,
/// so results are reproducible bit for bit.
DiffractionEstimate ensemble_periodogram(const EnsembleSpec& spec, double kmin,
                                         double dk, int bins, int substeps,
                                         int realizations, Norm norm);

/// Least-squares slope of log |S_L(k)|^2 against log L over a family of
/// growing patches (at least 4, volumes strictly increasing). Slope near
/// 2 marks a Bragg peak, near 1 a flat background, strictly between a
/// locally singular scaling.
double scaling_exponent(std::span<const WeightedComb> family, double k);

enum class Metric { l1rel, maxrel };

/// Error of an estimate against the matching component of a reference
/// measure on [lo, hi]: bragg-normalized estimates compare at the
/// reference's peak positions (grid point matched within 1e-9), density
/// ones pointwise against the interpolated ac density. Throws when no
/// grid point lands in the region or the components do not match.
double compare(const DiffractionEstimate& est, const SpectralMeasure& ref,
               double lo, double hi, Metric metric);

/// Peaks of `spectrum` with intensity >= threshold (> 0), in position
/// order; other components are dropped.
SpectralMeasure threshold_peaks(const SpectralMeasure& spectrum,
                                double threshold);

}  // namespace diffract
