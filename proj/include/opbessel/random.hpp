#pragma once

// Seeded generators for reproducible randomized fixtures. Only the raw
// mt19937_64 stream is used (its output is fixed by the standard); the
// mapping to values is done here so results do not depend on the
// standard library's distribution implementations.

#include "opbessel/opcore.hpp"

#include <cstdint>
#include <random>

namespace opbessel {

class SeededRng {
 public:
  static constexpr std::uint64_t kDefaultSeed = 20240601;

  explicit SeededRng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  /// Integer in [lo, hi].
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(engine_() % span);
  }

  /// Double in [lo, hi).
  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return lo + (hi - lo) * unit;
  }

  /// p/q with |p| <= max_num and 1 <= q <= max_den.
  Rational small_rational(long max_num = 5, long max_den = 4) {
    const long p = integer(-max_num, max_num);
    const long q = integer(1, max_den);
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Random rational operator; strictly upper triangular when requested.
Operator<Rational> random_rational_operator(std::size_t n, SeededRng& rng, bool strictly_upper = false,
                                            long max_num = 5, long max_den = 4);

/// Random float operator with entries uniform in [-1, 1).
Operator<double> random_float_operator(std::size_t n, SeededRng& rng);

}  // namespace opbessel
