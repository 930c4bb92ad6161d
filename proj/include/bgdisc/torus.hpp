#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bgdisc/error.hpp"

namespace bgdisc {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Seeded random source with platform-independent conversions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one draw per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  cd complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// A point of E = C/(Z + tau Z), stored by its lattice coordinates
/// z = a + b*tau with 0 <= a, b < 1.
struct TorusPoint {
  double a = 0.0;
  double b = 0.0;
};

/// The elliptic curve E = C/(Z + tau Z) together with the distance threshold
/// used to decide equality of points.
class Torus {
 public:
  static constexpr double kMinImagTau = 0.1;
  static constexpr double kDefaultTolerance = 1e-9;

  explicit Torus(cd tau = cd(0.0, 1.0), double tolerance = kDefaultTolerance)
      : tau_(tau), tolerance_(tolerance) {
    if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
      throw Error(ErrorKind::NonFinite, "tau must be finite");
    if (tau.imag() < kMinImagTau)
      throw Error(ErrorKind::InvalidArgument,
                  "Im(tau) must be at least 0.1 for a well-conditioned theta series");
    if (!(tolerance > 0.0) || tolerance >= std::min(1.0, tau.imag()) / 4.0)
      throw Error(ErrorKind::InvalidArgument,
                  "tolerance must lie in (0, min(1, Im tau)/4)");
  }

  cd tau() const { return tau_; }
  double tolerance() const { return tolerance_; }

  cd to_complex(TorusPoint p) const { return p.a + p.b * tau_; }

  TorusPoint from_lattice(double a, double b) const { return wrap(a, b); }

  TorusPoint reduce(cd z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::NonFinite, "cannot reduce a non-finite point");
    const double b = z.imag() / tau_.imag();
    const double a = z.real() - b * tau_.real();
    return wrap(a, b);
  }

  TorusPoint add(TorusPoint p, TorusPoint q) const { return wrap(p.a + q.a, p.b + q.b); }
  TorusPoint neg(TorusPoint p) const { return wrap(-p.a, -p.b); }
  TorusPoint sub(TorusPoint p, TorusPoint q) const { return wrap(p.a - q.a, p.b - q.b); }

  TorusPoint mul_int(long long m, TorusPoint p) const {
    // fractional parts first so that large m does not lose the low bits
    const double md = static_cast<double>(m);
    return wrap(frac_mul(md, p.a), frac_mul(md, p.b));
  }

  /// Complex distance from p - q to the nearest lattice point.
  double distance(TorusPoint p, TorusPoint q) const {
    double da = p.a - q.a;
    double db = p.b - q.b;
    da -= std::round(da);
    db -= std::round(db);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        best = std::min(best, std::abs(cd(da + i) + (db + j) * tau_));
    return best;
  }

  bool equal(TorusPoint p, TorusPoint q) const { return distance(p, q) < tolerance_; }
  bool is_zero(TorusPoint p) const { return equal(p, TorusPoint{}); }

  /// E[n] = {(a + b tau)/n : 0 <= a, b < n}, a-major order.
  std::vector<TorusPoint> torsion_points(int n) const {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be positive");
    std::vector<TorusPoint> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out.push_back(TorusPoint{static_cast<double>(a) / n, static_cast<double>(b) / n});
    return out;
  }

  /// All x with m*x = s: the coset x0 + E[|m|], sorted lexicographically by (a, b).
  std::vector<TorusPoint> solve_scaled(long long m, TorusPoint s) const {
    if (m == 0) throw Error(ErrorKind::InvalidArgument, "solve_scaled needs m != 0");
    const long long am = m < 0 ? -m : m;
    const double sa = m < 0 ? -s.a : s.a;
    const double sb = m < 0 ? -s.b : s.b;
    std::vector<TorusPoint> out;
    out.reserve(static_cast<std::size_t>(am * am));
    for (long long i = 0; i < am; ++i)
      for (long long j = 0; j < am; ++j)
        out.push_back(wrap((sa + static_cast<double>(i)) / static_cast<double>(am),
                           (sb + static_cast<double>(j)) / static_cast<double>(am)));
    std::sort(out.begin(), out.end(), [](TorusPoint x, TorusPoint y) {
      return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    return out;
  }

  TorusPoint random_point(Rng& rng) const { return wrap(rng.uniform(), rng.uniform()); }

 private:
  static double wrap1(double v) {
    double f = v - std::floor(v);
    // values that round up to 1 are the lattice point 0
    if (f >= 1.0 - 1e-13) f = 0.0;
    return f;
  }
  static TorusPoint wrap(double a, double b) { return TorusPoint{wrap1(a), wrap1(b)}; }

  static double frac_mul(double m, double v) {
    const double p = m * v;
    return p - std::floor(p);
  }

  cd tau_;
  double tolerance_;
};

/// Line bundle class on E: degree and Abel-Jacobi sum of any representing divisor.
struct DivisorClass {
  long long degree = 0;
  TorusPoint aj{};
};

struct DivisorTerm {
  long long coefficient = 0;
  TorusPoint point{};
};

/// Class of sum coefficient_i [point_i].
inline DivisorClass class_of(const Torus& E, const std::vector<DivisorTerm>& divisor) {
  DivisorClass c;
  for (const auto& t : divisor) {
    c.degree += t.coefficient;
    c.aj = E.add(c.aj, E.mul_int(t.coefficient, t.point));
  }
  return c;
}

inline DivisorClass tensor(const Torus& E, const DivisorClass& x, const DivisorClass& y) {
  return DivisorClass{x.degree + y.degree, E.add(x.aj, y.aj)};
}

inline DivisorClass dual(const Torus& E, const DivisorClass& x) {
  return DivisorClass{-x.degree, E.neg(x.aj)};
}

inline bool is_trivial(const Torus& E, const DivisorClass& x) {
  return x.degree == 0 && E.is_zero(x.aj);
}

inline bool isomorphic(const Torus& E, const DivisorClass& x, const DivisorClass& y) {
  return x.degree == y.degree && E.equal(x.aj, y.aj);
}

}  // namespace bgdisc
