#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diffract {

// tau = (1+sqrt(5))/2 as a double-double pair; kTauLo is the residual of
// the nearest-double rounding, so kTau + kTauLo carries ~107 bits.
inline constexpr double kTau = 0x1.9e3779b97f4a8p+0;
inline constexpr double kTauLo = -0x1.f506319fcfd19p-55;
inline constexpr double kSqrt5 = 0x1.1e3779b97f4a8p+1;
inline constexpr double kSqrt5Lo = -0x1.f506319fcfd19p-54;

class OverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Element a + b*tau of the golden-ratio ring Z[tau].
///
/// tau^2 = tau + 1, so pairs are closed under multiplication. Equality is
/// componentwise; the real embedding is injective, so cmp() below orders
/// elements by embedded value without ever consulting floating point.
struct GoldenInt {
  std::int64_t a = 0;
  std::int64_t b = 0;

  friend bool operator==(const GoldenInt&, const GoldenInt&) = default;
};

/// a + b*tau evaluated with a compensated product, accurate to ~1 ulp of
/// the result even when a and b*tau nearly cancel.
double embed(GoldenInt x);

/// Galois conjugate: a + b*tau -> (a+b) - b*tau, i.e. tau -> 1-tau.
/// Ring map and involution: star(x*y) = star(x)*star(y), star(star(x)) = x.
GoldenInt star(GoldenInt x);

GoldenInt add(GoldenInt x, GoldenInt y);
GoldenInt sub(GoldenInt x, GoldenInt y);
GoldenInt neg(GoldenInt x);

/// (a,b)*(c,d) = (ac+bd, ad+bc+bd). Throws OverflowError instead of wrapping.
GoldenInt mul(GoldenInt x, GoldenInt y);
GoldenInt mul_int(GoldenInt x, std::int64_t s);

/// Exact three-way comparison by embedded value: sign of u + v*sqrt(5)
/// with u = 2(xa-ya)+(xb-yb), v = xb-yb, decided in 128-bit integers.
/// Zero only when the pairs coincide. Throws OverflowError if components
/// exceed +-2^60 (the squared forms would no longer fit).
int cmp(GoldenInt x, GoldenInt y);

inline bool less(GoldenInt x, GoldenInt y) { return cmp(x, y) < 0; }

/// Canonical text form "a+b*tau", e.g. "3-2*tau", "0+1*tau".
/// parse_golden round-trips to_string bit-exactly.
std::string to_string(GoldenInt x);
std::optional<GoldenInt> parse_golden(std::string_view text);

}  // namespace diffract
