// Deterministic sampling. The engine is std::mt19937_64 (fully specified by
// the standard) and doubles are produced by the explicit 53-bit mapping
// (x >> 11) * 2^-53, so identical seeds give identical draws on every
// conforming implementation. Library distributions are avoided on purpose.

#ifndef RSLAB_RNG_HPP
#define RSLAB_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace rslab {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::mt19937_64 eng_;
};

} // namespace rslab

#endif
