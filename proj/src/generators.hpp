#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "golden.hpp"

namespace diffract {

/// Finite patch of a weighted Dirac comb.
///
/// positions is dim-strided; for dim==1 the points are strictly increasing,
/// for dim>=2 lexicographically ordered, never duplicated. When the points
/// live in Z[tau] the exact vector carries them losslessly (positions then
/// holds the embeddings). integer_positions marks combs supported on Z.
struct WeightedComb {
  int dim = 1;
  std::vector<double> positions;
  std::vector<std::complex<double>> weights;
  std::vector<GoldenInt> exact;
  bool integer_positions = false;
  std::array<double, 3> patch_lo{0, 0, 0};
  std::array<double, 3> patch_hi{0, 0, 0};
  double volume = 0;

  std::size_t size() const { return weights.size(); }
  double pos1(std::size_t i) const { return positions[i]; }
  bool has_exact() const { return !exact.empty(); }
};

/// Lattice-plus-motif crystal: columns of basis generate the lattice,
/// motif entries are (fractional coordinates in [0,1)^dim, weight).
struct CrystalSpec {
  int dim = 1;
  std::array<double, 9> basis{};  // column-major, dim x dim
  struct Atom {
    std::array<double, 3> frac{0, 0, 0};
    std::complex<double> weight{1, 0};
  };
  std::vector<Atom> motif;

  static CrystalSpec make(int dim, const double* basis,
                          const std::vector<Atom>& motif);
  double det() const;
};

/// Cut-and-project data: two lattice generators of Z[tau] and a half-open
/// window (lo, hi] with endpoints lo_num/lo_den, hi_num/hi_den. Rational
/// denominators keep window membership decidable in exact arithmetic.
struct CPSSpec {
  GoldenInt gen1{1, 0};
  GoldenInt gen2{0, 1};
  GoldenInt lo_num{-1, 0};
  std::int64_t lo_den = 1;
  GoldenInt hi_num{-1, 1};  // tau - 1
  std::int64_t hi_den = 1;

  static CPSSpec fibonacci();  // generators 1, tau; window (-1, tau-1]
  void validate() const;
  double window_lo() const { return embed(lo_num) / static_cast<double>(lo_den); }
  double window_hi() const { return embed(hi_num) / static_cast<double>(hi_den); }
  double window_vol() const { return window_hi() - window_lo(); }
  // rows (embed(g), embed(star g)) for g = gen1, gen2
  std::array<double, 4> embedding_matrix() const;
  double embedding_det() const;
  bool window_contains(GoldenInt internal) const;
};

struct RandomSpec {
  std::uint64_t seed = 0;
  double p = 0.5;
};

WeightedComb gen_crystal_patch(const CrystalSpec& spec, double radius);

/// All x = m*gen1 + n*gen2 with embed(x) in [lo, hi] and star(x) in the
/// window, unit weights, exact positions. Membership is decided entirely
/// in Z[tau]; floats only bound the enumeration box.
WeightedComb gen_fibonacci_model_set(const CPSSpec& cps, double lo, double hi);

/// Thue-Morse word of length 2^n by block doubling v -> v vbar, weights
/// +-1 on 0..2^n-1. Requires 0 <= n <= 24.
WeightedComb gen_thue_morse(int n);

/// Rudin-Shapiro weights on [lo, hi], two-sided:
///   w(4m+l) = w(m)            for l in {0,1}
///   w(4m+l) = (-1)^(m+l) w(m) for l in {2,3}
/// anchored at w(0) = 1, w(-1) = -1 (floored base-4 digits).
WeightedComb gen_rudin_shapiro(std::int64_t lo, std::int64_t hi);
int rudin_shapiro_weight(std::int64_t n);

/// i.i.d. weights on [lo, hi]: +1 with probability p, else -1.
WeightedComb gen_bernoulli(const RandomSpec& spec, std::int64_t lo,
                           std::int64_t hi);

/// Rudin-Shapiro sign times an i.i.d. +-1 factor (homometric family).
WeightedComb gen_rs_bernoulli(const RandomSpec& spec, std::int64_t lo,
                              std::int64_t hi);

/// Random tiling of tiles tau (probability p) and 1; unit weights at the
/// left endpoints of `count` tiles starting at 0. Endpoint after j tiles is
/// a + b*tau with a unit tiles and b tau tiles used so far.
WeightedComb gen_random_fibonacci_tiling(const RandomSpec& spec,
                                         std::int64_t count);

}  // namespace diffract
