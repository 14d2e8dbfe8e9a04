#include "golden.hpp"

#include <cmath>
#include <charconv>
#include <cstdlib>

namespace diffract {

double embed(GoldenInt x) {
  // TwoProd for b*tau, then fold in the low parts.
  double hi = static_cast<double>(x.b) * kTau;
  double lo = std::fma(static_cast<double>(x.b), kTau, -hi);
  lo += static_cast<double>(x.b) * kTauLo;
  double s = static_cast<double>(x.a) + hi;
  // a and hi can cancel; recover the rounding error of the sum.
  double e = (static_cast<double>(x.a) - s) + hi;
  return s + (e + lo);
}

GoldenInt star(GoldenInt x) {
  GoldenInt r;
  if (__builtin_add_overflow(x.a, x.b, &r.a))
    throw OverflowError("golden star overflow");
  r.b = -x.b;
  return r;
}

GoldenInt add(GoldenInt x, GoldenInt y) {
  GoldenInt r;
  if (__builtin_add_overflow(x.a, y.a, &r.a) ||
      __builtin_add_overflow(x.b, y.b, &r.b))
    throw OverflowError("golden add overflow");
  return r;
}

GoldenInt sub(GoldenInt x, GoldenInt y) {
  GoldenInt r;
  if (__builtin_sub_overflow(x.a, y.a, &r.a) ||
      __builtin_sub_overflow(x.b, y.b, &r.b))
    throw OverflowError("golden sub overflow");
  return r;
}

GoldenInt neg(GoldenInt x) {
  if (x.a == INT64_MIN || x.b == INT64_MIN)
    throw OverflowError("golden neg overflow");
  return {-x.a, -x.b};
}

GoldenInt mul(GoldenInt x, GoldenInt y) {
  std::int64_t ac, bd, ad, bc;
  GoldenInt r;
  if (__builtin_mul_overflow(x.a, y.a, &ac) ||
      __builtin_mul_overflow(x.b, y.b, &bd) ||
      __builtin_mul_overflow(x.a, y.b, &ad) ||
      __builtin_mul_overflow(x.b, y.a, &bc) ||
      __builtin_add_overflow(ac, bd, &r.a) ||
      __builtin_add_overflow(ad, bc, &r.b) ||
      __builtin_add_overflow(r.b, bd, &r.b))
    throw OverflowError("golden mul overflow");
  return r;
}

GoldenInt mul_int(GoldenInt x, std::int64_t s) {
  GoldenInt r;
  if (__builtin_mul_overflow(x.a, s, &r.a) ||
      __builtin_mul_overflow(x.b, s, &r.b))
    throw OverflowError("golden scalar mul overflow");
  return r;
}

int cmp(GoldenInt x, GoldenInt y) {
  using I128 = __int128;
  I128 da = static_cast<I128>(x.a) - y.a;
  I128 db = static_cast<I128>(x.b) - y.b;
  I128 u = 2 * da + db;
  I128 v = db;
  if (u == 0 && v == 0) return 0;
  if (u >= 0 && v >= 0) return 1;
  if (u <= 0 && v <= 0) return -1;
  // Mixed signs: compare u^2 against 5 v^2; squares must fit in 128 bits.
  constexpr I128 lim = static_cast<I128>(1) << 61;
  if (u >= lim || u <= -lim || v >= lim || v <= -lim)
    throw OverflowError("golden cmp operands too large");
  I128 uu = u * u;
  I128 vv = 5 * v * v;
  if (uu == vv) return 0;  // unreachable: sqrt5 irrational, kept for clarity
  bool mag = uu > vv;      // |u| dominates |v*sqrt5|
  return (u > 0) == mag ? 1 : -1;
}

std::string to_string(GoldenInt x) {
  std::string s = std::to_string(x.a);
  if (x.b >= 0) {
    s += '+';
    s += std::to_string(static_cast<std::uint64_t>(x.b));
  } else {
    s += '-';
    // two's-complement negate in unsigned, safe for INT64_MIN
    s += std::to_string(~static_cast<std::uint64_t>(x.b) + 1);
  }
  s += "*tau";
  return s;
}

std::optional<GoldenInt> parse_golden(std::string_view text) {
  // Form: <int> ('+'|'-') <uint> "*tau"
  const char* p = text.data();
  const char* end = p + text.size();
  GoldenInt g;
  auto r1 = std::from_chars(p, end, g.a);
  if (r1.ec != std::errc{}) return std::nullopt;
  p = r1.ptr;
  if (p == end || (*p != '+' && *p != '-')) return std::nullopt;
  bool negb = (*p == '-');
  ++p;
  std::uint64_t mag = 0;
  auto r2 = std::from_chars(p, end, mag);
  if (r2.ec != std::errc{}) return std::nullopt;
  p = r2.ptr;
  if (std::string_view(p, end - p) != "*tau") return std::nullopt;
  if (negb) {
    if (mag > static_cast<std::uint64_t>(INT64_MAX) + 1) return std::nullopt;
    g.b = (mag == static_cast<std::uint64_t>(INT64_MAX) + 1)
              ? INT64_MIN
              : -static_cast<std::int64_t>(mag);
  } else {
    if (mag > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    g.b = static_cast<std::int64_t>(mag);
  }
  return g;
}

}  // namespace diffract
