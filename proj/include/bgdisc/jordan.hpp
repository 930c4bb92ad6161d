#pragma once

// Exact upper bounds for the Jordan constant of Aut(Q), dim Q = d = 2n - 2.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "bgdisc/error.hpp"

namespace bgdisc {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(unsigned long long k) {
  BigInt r = 1;
  for (unsigned long long i = 2; i <= k; ++i) r *= i;
  return r;
}

inline BigInt pow2(unsigned long long k) { return BigInt(1) << static_cast<unsigned>(k); }

/// |O_d(Z)| = 2^d d!, the bound on the finite part of Aut(F) for d = 2 dim F.
inline BigInt gamma_bound(long long d) {
  if (d < 2 || d % 2 != 0) throw Error(ErrorKind::InvalidArgument, "gamma_bound needs an even d >= 2");
  return pow2(static_cast<unsigned long long>(d)) * factorial(static_cast<unsigned long long>(d));
}

inline constexpr long long kOrthogonalBoundMinDim = 10;

inline std::string validity_note(long long d) {
  if (d > kOrthogonalBoundMinDim)
    return "d = " + std::to_string(d) + " > 10: the orthogonal-group order bound applies";
  return "d = " + std::to_string(d) +
         " <= 10: the orthogonal-group order bound is only established for d > 10; value reported with this caveat";
}

struct BoundReport {
  long long n = 0;
  long long d = 0;
  BigInt gamma;
  BigInt jordan;
  BigInt jordan_d_form;  // 4^d (d!)^2 [(d/2 + 1)^2]!
  bool forms_agree = false;
  std::string validity_note;
};

/// 2^{4n-4} [(2n-2)!]^2 (n^2)! = |Gamma|^2 |S_{n^2}|.
inline BigInt jordan_upper_bound(long long n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "jordan_upper_bound needs n >= 2");
  const auto un = static_cast<unsigned long long>(n);
  const BigInt f = factorial(2 * un - 2);
  return pow2(4 * un - 4) * f * f * factorial(un * un);
}

inline BigInt jordan_bound_d_form(long long d) {
  const auto ud = static_cast<unsigned long long>(d);
  const BigInt f = factorial(ud);
  const unsigned long long h = ud / 2 + 1;
  return pow2(2 * ud) * f * f * factorial(h * h);
}

inline BoundReport bound_report(long long n) {
  BoundReport r;
  r.n = n;
  r.jordan = jordan_upper_bound(n);
  r.d = 2 * n - 2;
  r.gamma = gamma_bound(r.d);
  r.jordan_d_form = jordan_bound_d_form(r.d);
  r.forms_agree = r.jordan == r.jordan_d_form &&
                  r.jordan == r.gamma * r.gamma * factorial(static_cast<unsigned long long>(n * n));
  r.validity_note = validity_note(r.d);
  return r;
}

}  // namespace bgdisc
