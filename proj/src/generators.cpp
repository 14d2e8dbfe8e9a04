#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "rng.hpp"

namespace diffract {

namespace {

// column-major dim x dim determinant, dim <= 3
double det_nd(const double* b, int dim) {
  if (dim == 1) return b[0];
  if (dim == 2) return b[0] * b[3] - b[2] * b[1];
  return b[0] * (b[4] * b[8] - b[7] * b[5]) -
         b[3] * (b[1] * b[8] - b[7] * b[2]) +
         b[6] * (b[1] * b[5] - b[4] * b[2]);
}

// inverse of column-major dim x dim, dim <= 3
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
      for (int c = 0; c < 3; ++c) inv[r * 3 + c] = cof(c, r) / d;  // adjugate^T
  }
  return inv;
}

void sort_lex(WeightedComb& comb) {
  const int d = comb.dim;
  std::vector<std::size_t> idx(comb.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    for (int c = 0; c < d; ++c) {
      double a = comb.positions[i * d + c], b = comb.positions[j * d + c];
      if (a != b) return a < b;
    }
    return false;
  });
  std::vector<double> pos(comb.positions.size());
  std::vector<std::complex<double>> w(comb.weights.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (int c = 0; c < d; ++c) pos[k * d + c] = comb.positions[idx[k] * d + c];
    w[k] = comb.weights[idx[k]];
  }
  comb.positions = std::move(pos);
  comb.weights = std::move(w);
  for (std::size_t k = 1; k < comb.size(); ++k) {
    bool eq = true;
    for (int c = 0; c < d; ++c)
      if (comb.positions[k * d + c] != comb.positions[(k - 1) * d + c]) eq = false;
    if (eq) throw std::invalid_argument("duplicate comb positions");
  }
}

}  // namespace

CrystalSpec CrystalSpec::make(int dim, const double* basis,
                              const std::vector<Atom>& motif) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("crystal dim must be 1..3");
  if (motif.empty()) throw std::invalid_argument("crystal motif is empty");
  CrystalSpec s;
  s.dim = dim;
  for (int i = 0; i < dim * dim; ++i) s.basis[i] = basis[i];
  if (det_nd(s.basis.data(), dim) == 0.0)
    throw std::invalid_argument("crystal basis is singular");
  for (const auto& at : motif)
    for (int c = 0; c < dim; ++c)
      if (!(at.frac[c] >= 0.0 && at.frac[c] < 1.0))
        throw std::invalid_argument("motif coordinates must lie in [0,1)");
  s.motif = motif;
  return s;
}

double CrystalSpec::det() const { return det_nd(basis.data(), dim); }

WeightedComb gen_crystal_patch(const CrystalSpec& spec, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  const int d = spec.dim;
  const double* B = spec.basis.data();
  auto inv = invert_nd(B, d);

  // |m_i| <= ||row_i(B^-1)|| * (radius + motif reach) + 1
  double reach = 0;
  for (const auto& at : spec.motif) {
    double y[3] = {0, 0, 0};
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) y[r] += B[c * d + r] * at.frac[c];
    double n2 = 0;
    for (int r = 0; r < d; ++r) n2 += y[r] * y[r];
    reach = std::max(reach, std::sqrt(n2));
  }
  long mbound[3] = {0, 0, 0};
  for (int r = 0; r < d; ++r) {
    double n2 = 0;
    for (int c = 0; c < d; ++c) n2 += inv[c * d + r] * inv[c * d + r];
    mbound[r] = static_cast<long>(std::sqrt(n2) * (radius + reach)) + 2;
  }

  WeightedComb comb;
  comb.dim = d;
  long m[3] = {0, 0, 0};
  long lo0 = -mbound[0], hi0 = mbound[0];
  long lo1 = d > 1 ? -mbound[1] : 0, hi1 = d > 1 ? mbound[1] : 0;
  long lo2 = d > 2 ? -mbound[2] : 0, hi2 = d > 2 ? mbound[2] : 0;
  const double r2 = radius * radius;
  for (m[0] = lo0; m[0] <= hi0; ++m[0])
    for (m[1] = lo1; m[1] <= hi1; ++m[1])
      for (m[2] = lo2; m[2] <= hi2; ++m[2])
        for (const auto& at : spec.motif) {
          double y[3] = {0, 0, 0};
          for (int c = 0; c < d; ++c)
            for (int r = 0; r < d; ++r)
              y[r] += B[c * d + r] * (static_cast<double>(m[c]) + at.frac[c]);
          double n2 = 0;
          for (int r = 0; r < d; ++r) n2 += y[r] * y[r];
          if (n2 > r2) continue;  // closed ball / closed interval
          for (int r = 0; r < d; ++r) comb.positions.push_back(y[r]);
          comb.weights.push_back(at.weight);
        }
  sort_lex(comb);
  for (int r = 0; r < d; ++r) {
    comb.patch_lo[r] = -radius;
    comb.patch_hi[r] = radius;
  }
  if (d == 1)
    comb.volume = 2 * radius;
  else if (d == 2)
    comb.volume = M_PI * r2;
  else
    comb.volume = 4.0 / 3.0 * M_PI * r2 * radius;
  return comb;
}

CPSSpec CPSSpec::fibonacci() { return CPSSpec{}; }

void CPSSpec::validate() const {
  if (lo_den <= 0 || hi_den <= 0)
    throw std::invalid_argument("window denominators must be positive");
  // lo < hi: lo_num*hi_den < hi_num*lo_den
  if (cmp(mul_int(lo_num, hi_den), mul_int(hi_num, lo_den)) >= 0)
    throw std::invalid_argument("window must have positive length");
  if ((gen1.a == 0 && gen1.b == 0) || (gen2.a == 0 && gen2.b == 0))
    throw std::invalid_argument("lattice generators must be nonzero");
  if (mul(gen1, star(gen2)).b == 0)
    throw std::invalid_argument("embedding basis is singular");
}

std::array<double, 4> CPSSpec::embedding_matrix() const {
  return {embed(gen1), embed(star(gen1)), embed(gen2), embed(star(gen2))};
}

double CPSSpec::embedding_det() const {
  // det = embed(x) - embed(star x) for x = gen1 * star(gen2), i.e. b(x)*sqrt5
  return static_cast<double>(mul(gen1, star(gen2)).b) * kSqrt5;
}

bool CPSSpec::window_contains(GoldenInt s) const {
  // lo_num/lo_den < s <= hi_num/hi_den, denominators positive
  return cmp(mul_int(s, lo_den), lo_num) > 0 &&
         cmp(mul_int(s, hi_den), hi_num) <= 0;
}

WeightedComb gen_fibonacci_model_set(const CPSSpec& cps, double lo, double hi) {
  cps.validate();
  if (!(lo <= hi)) throw std::invalid_argument("empty range");
  if (std::abs(lo) > 1e15 || std::abs(hi) > 1e15)
    throw OverflowError("range exceeds exact integer width");

  const double e1 = embed(cps.gen1), e1s = embed(star(cps.gen1));
  const double e2 = embed(cps.gen2), e2s = embed(star(cps.gen2));
  const double wlo = cps.window_lo(), whi = cps.window_hi();
  const double det = e1 * e2s - e2 * e1s;

  // (m, n) = (x, x*) . E^-1 over the box corners, then exact filtering
  auto nrange = [&](double& nmin, double& nmax) {
    nmin = 1e300;
    nmax = -1e300;
    for (double x : {lo, hi})
      for (double s : {wlo, whi}) {
        double n = (e1 * s - e1s * x) / det;
        nmin = std::min(nmin, n);
        nmax = std::max(nmax, n);
      }
  };
  double nmin, nmax;
  nrange(nmin, nmax);

  struct Entry {
    GoldenInt g;
    double x;
  };
  std::vector<Entry> out;
  const auto n_lo = static_cast<std::int64_t>(std::floor(nmin)) - 2;
  const auto n_hi = static_cast<std::int64_t>(std::ceil(nmax)) + 2;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    // m from both the range and the window constraint
    double m1a = (lo - n * e2) / e1, m1b = (hi - n * e2) / e1;
    double m2a = (wlo - n * e2s) / e1s, m2b = (whi - n * e2s) / e1s;
    double mlo = std::max(std::min(m1a, m1b), std::min(m2a, m2b));
    double mhi = std::min(std::max(m1a, m1b), std::max(m2a, m2b));
    if (mlo > mhi + 4) continue;
    const auto m_lo = static_cast<std::int64_t>(std::floor(mlo)) - 2;
    const auto m_hi = static_cast<std::int64_t>(std::ceil(mhi)) + 2;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
      GoldenInt x = add(mul_int(cps.gen1, m), mul_int(cps.gen2, n));
      double ex = embed(x);
      if (ex < lo || ex > hi) continue;
      if (!cps.window_contains(star(x))) continue;
      out.push_back({x, ex});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Entry& p, const Entry& q) { return less(p.g, q.g); });

  WeightedComb comb;
  comb.dim = 1;
  comb.positions.reserve(out.size());
  comb.exact.reserve(out.size());
  for (const auto& e : out) {
    comb.positions.push_back(e.x);
    comb.exact.push_back(e.g);
    comb.weights.emplace_back(1.0, 0.0);
  }
  comb.patch_lo[0] = lo;
  comb.patch_hi[0] = hi;
  comb.volume = hi - lo;
  return comb;
}

WeightedComb gen_thue_morse(int n) {
  if (n < 0 || n > 24) throw std::invalid_argument("thue-morse order out of range");
  const std::size_t len = std::size_t{1} << n;
  std::vector<signed char> v(len);
  v[0] = 1;
  for (std::size_t half = 1; half < len; half *= 2)
    for (std::size_t i = 0; i < half; ++i) v[half + i] = -v[i];

  WeightedComb comb;
  comb.dim = 1;
  comb.integer_positions = true;
  comb.positions.reserve(len);
  comb.weights.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    comb.positions.push_back(static_cast<double>(i));
    comb.weights.emplace_back(static_cast<double>(v[i]), 0.0);
  }
  comb.patch_lo[0] = 0;
  comb.patch_hi[0] = static_cast<double>(len);
  comb.volume = static_cast<double>(len);
  return comb;
}

int rudin_shapiro_weight(std::int64_t n) {
  int sign = 1;
  while (n != 0 && n != -1) {
    std::int64_t l = ((n % 4) + 4) % 4;
    std::int64_t m = (n - l) / 4;
    if (l >= 2 && (((m & 1) ^ (l & 1)) != 0)) sign = -sign;
    n = m;
  }
  return n == 0 ? sign : -sign;
}

namespace {

WeightedComb integer_comb(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty integer range");
  if (hi - lo + 1 > (std::int64_t{1} << 28))
    throw std::invalid_argument("integer range too large");
  WeightedComb comb;
  comb.dim = 1;
  comb.integer_positions = true;
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  comb.positions.reserve(len);
  comb.weights.reserve(len);
  for (std::int64_t i = lo; i <= hi; ++i)
    comb.positions.push_back(static_cast<double>(i));
  comb.patch_lo[0] = static_cast<double>(lo);
  comb.patch_hi[0] = static_cast<double>(hi) + 1;
  comb.volume = static_cast<double>(hi - lo + 1);
  return comb;
}

}  // namespace

WeightedComb gen_rudin_shapiro(std::int64_t lo, std::int64_t hi) {
  WeightedComb comb = integer_comb(lo, hi);
  for (std::int64_t i = lo; i <= hi; ++i)
    comb.weights.emplace_back(static_cast<double>(rudin_shapiro_weight(i)), 0.0);
  return comb;
}

WeightedComb gen_bernoulli(const RandomSpec& spec, std::int64_t lo,
                           std::int64_t hi) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0))
    throw std::invalid_argument("probability out of [0,1]");
  WeightedComb comb = integer_comb(lo, hi);
  Rng rng(spec.seed);
  for (std::int64_t i = lo; i <= hi; ++i)
    comb.weights.emplace_back(rng.uniform() < spec.p ? 1.0 : -1.0, 0.0);
  return comb;
}

WeightedComb gen_rs_bernoulli(const RandomSpec& spec, std::int64_t lo,
                              std::int64_t hi) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0))
    throw std::invalid_argument("probability out of [0,1]");
  WeightedComb comb = integer_comb(lo, hi);
  Rng rng(spec.seed);
  for (std::int64_t i = lo; i <= hi; ++i) {
    double x = rng.uniform() < spec.p ? 1.0 : -1.0;
    comb.weights.emplace_back(rudin_shapiro_weight(i) * x, 0.0);
  }
  return comb;
}

WeightedComb gen_random_fibonacci_tiling(const RandomSpec& spec,
                                         std::int64_t count) {
  if (count < 1) throw std::invalid_argument("tile count must be >= 1");
  if (!(spec.p >= 0.0 && spec.p <= 1.0))
    throw std::invalid_argument("probability out of [0,1]");
  WeightedComb comb;
  comb.dim = 1;
  Rng rng(spec.seed);
  GoldenInt pos{0, 0};  // a unit tiles + b tau tiles laid so far
  comb.positions.reserve(static_cast<std::size_t>(count));
  comb.exact.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    comb.positions.push_back(embed(pos));
    comb.exact.push_back(pos);
    comb.weights.emplace_back(1.0, 0.0);
    if (rng.uniform() < spec.p)
      pos = add(pos, GoldenInt{0, 1});  // long tile tau
    else
      pos = add(pos, GoldenInt{1, 0});
  }
  comb.patch_lo[0] = 0;
  comb.patch_hi[0] = embed(pos);
  comb.volume = embed(pos);
  return comb;
}

}  // namespace diffract
