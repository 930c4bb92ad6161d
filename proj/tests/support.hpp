#pragma once

#include <array>
#include <complex>

#include "bgdisc/torus.hpp"

namespace bgdisc::testing {

inline const std::array<cd, 3> kTaus{cd(0.0, 1.0), cd(0.3, 1.1), cd(0.5, 0.9)};

inline DivisorClass random_class(const Torus& E, Rng& rng, long long lo = -5, long long hi = 5) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return DivisorClass{lo + static_cast<long long>(rng.next() % span), E.random_point(rng)};
}

inline long long random_int(Rng& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace bgdisc::testing
