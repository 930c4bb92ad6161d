#pragma once

// Verdicts for fibers of S^n/F over curves Z in E^n, where Z is the image of
// E under a tuple of affine endomorphisms x -> m x + t.

#include <cstdlib>
#include <string>
#include <vector>

#include "bgdisc/error.hpp"
#include "bgdisc/torus.hpp"

namespace bgdisc {

/// x -> m*x + t; m = 0 is a constant map.
struct AffineEndo {
  long long m = 1;
  TorusPoint t{};

  long long mapping_degree() const { return m * m; }
};

/// (f o g)(x) = f(g(x)).
inline AffineEndo compose(const Torus& E, const AffineEndo& f, const AffineEndo& g) {
  return AffineEndo{f.m * g.m, E.add(E.mul_int(f.m, g.t), f.t)};
}

struct CurveInProduct {
  std::vector<AffineEndo> components;

  int n() const { return static_cast<int>(components.size()); }

  bool all_constant() const {
    for (const auto& c : components)
      if (c.m != 0) return false;
    return true;
  }

  // an |m| = 1 component makes the image an embedded copy of E
  bool smooth_guard() const {
    for (const auto& c : components)
      if (c.m == 1 || c.m == -1) return true;
    return false;
  }
};

/// f^*L. A point q pulls back to the |m|^2 solutions of m x = q - t, whose
/// sum is m (q - t).
inline DivisorClass pullback_class(const Torus& E, const AffineEndo& f, const DivisorClass& L) {
  if (f.m == 0) throw Error(ErrorKind::InvalidArgument, "pullback by a constant map");
  const TorusPoint shifted = E.sub(L.aj, E.mul_int(L.degree, f.t));
  return DivisorClass{f.m * f.m * L.degree, E.mul_int(f.m, shifted)};
}

/// Brute-force pullback of sum a_i [q_i]: sum of all preimages.
inline DivisorClass pullback_by_preimages(const Torus& E, const AffineEndo& f,
                                          const std::vector<DivisorTerm>& divisor) {
  if (f.m == 0) throw Error(ErrorKind::InvalidArgument, "pullback by a constant map");
  std::vector<DivisorTerm> pulled;
  for (const auto& term : divisor)
    for (const auto& x : E.solve_scaled(f.m, E.sub(term.point, f.t)))
      pulled.push_back(DivisorTerm{term.coefficient, x});
  return class_of(E, pulled);
}

/// [L_i (x) L_1^v for i = 2..n].
inline std::vector<DivisorClass> kodaira_reduce(const Torus& E, const std::vector<DivisorClass>& classes) {
  if (classes.size() < 2) throw Error(ErrorKind::InvalidArgument, "kodaira_reduce needs at least two classes");
  std::vector<DivisorClass> out;
  const DivisorClass base_dual = dual(E, classes.front());
  for (std::size_t i = 1; i < classes.size(); ++i) out.push_back(tensor(E, classes[i], base_dual));
  return out;
}

/// A point p with deg(L) p = aj(L), so L ~ deg(L) [p].
inline TorusPoint support_point(const Torus& E, const DivisorClass& L) {
  if (L.degree == 0) throw Error(ErrorKind::InvalidArgument, "degree-0 class has no support point");
  return E.solve_scaled(L.degree, L.aj).front();
}

/// Components (x + x1, -x - x2): the antidiagonal translated by (x1, -x2).
inline CurveInProduct antidiagonal(TorusPoint x1, TorusPoint x2, const Torus& E) {
  return CurveInProduct{{AffineEndo{1, x1}, AffineEndo{-1, E.neg(x2)}}};
}

inline CurveInProduct diagonal(int n) { return CurveInProduct{std::vector<AffineEndo>(static_cast<std::size_t>(n))}; }

enum class VerdictCase { FiberSubvariety, NonKahlerN1, Kahler, Algebraic };

inline std::string to_string(VerdictCase c) {
  switch (c) {
    case VerdictCase::FiberSubvariety: return "FiberSubvariety";
    case VerdictCase::NonKahlerN1: return "NonKahlerN1";
    case VerdictCase::Kahler: return "Kahler";
    case VerdictCase::Algebraic: return "Algebraic";
  }
  return "?";
}

struct PullbackComparison {
  int i = 0;
  int j = 0;
  double distance = 0.0;  // torus distance between Abel-Jacobi points
  bool isomorphic = false;
};

struct Verdict {
  VerdictCase verdict = VerdictCase::FiberSubvariety;
  std::string q_level_note;
  std::string extension_note;  // non-empty when the input lies outside the smooth-curve setting
  std::vector<long long> degrees;
  std::vector<DivisorClass> pullbacks;
  std::vector<DivisorClass> reduced;
  std::vector<PullbackComparison> comparisons;
};

inline constexpr double kAmbiguityFactor = 10.0;

inline std::string q_level_note(VerdictCase c) {
  switch (c) {
    case VerdictCase::NonKahlerN1: return "on Q: the image is in class N_1";
    case VerdictCase::Kahler:
    case VerdictCase::Algebraic:
      return "on Q: the image is Moishezon when X is not contained in the exceptional divisor "
             "(containment not checked)";
    case VerdictCase::FiberSubvariety: return "on Q: a subvariety of a single fiber";
  }
  return "";
}

inline Verdict classify(const Torus& E, const CurveInProduct& Z, const DivisorClass& L) {
  if (L.degree == 0) throw Error(ErrorKind::InvalidArgument, "L must have nonzero degree");
  if (Z.components.empty()) throw Error(ErrorKind::InvalidArgument, "curve has no components");
  Verdict v;
  for (const auto& c : Z.components) v.degrees.push_back(c.mapping_degree());
  if (Z.all_constant()) {
    v.verdict = VerdictCase::FiberSubvariety;
    v.q_level_note = q_level_note(v.verdict);
    return v;
  }
  if (!Z.smooth_guard())
    throw Error(ErrorKind::InvalidArgument, "curve needs a component with m = +1 or -1");
  bool mixed_constant = false;
  bool mismatch = false;
  for (std::size_t i = 0; i < v.degrees.size(); ++i) {
    if (v.degrees[i] == 0) mixed_constant = true;
    if (v.degrees[i] != v.degrees.front()) mismatch = true;
  }
  if (mismatch) {
    v.verdict = VerdictCase::NonKahlerN1;
    v.q_level_note = q_level_note(v.verdict);
    if (mixed_constant)
      v.extension_note = "a constant component counts as projection degree 0; the image is not a smooth curve of the product";
    return v;
  }
  for (const auto& c : Z.components) v.pullbacks.push_back(pullback_class(E, c, L));
  if (v.pullbacks.size() >= 2) v.reduced = kodaira_reduce(E, v.pullbacks);
  bool all_iso = true;
  const double tol = E.tolerance();
  for (std::size_t i = 0; i < v.pullbacks.size(); ++i)
    for (std::size_t j = i + 1; j < v.pullbacks.size(); ++j) {
      PullbackComparison cmp;
      cmp.i = static_cast<int>(i);
      cmp.j = static_cast<int>(j);
      cmp.distance = E.distance(v.pullbacks[i].aj, v.pullbacks[j].aj);
      if (cmp.distance >= tol && cmp.distance < kAmbiguityFactor * tol)
        throw Error(ErrorKind::Indeterminate, "pullbacks " + std::to_string(i) + " and " + std::to_string(j) +
                                                  " are within the ambiguous band of the torus tolerance");
      cmp.isomorphic = cmp.distance < tol;
      all_iso = all_iso && cmp.isomorphic;
      v.comparisons.push_back(cmp);
    }
  v.verdict = all_iso ? VerdictCase::Algebraic : VerdictCase::Kahler;
  v.q_level_note = q_level_note(v.verdict);
  return v;
}

/// Subvarieties of dimension >= 2 always project onto some E x E.
inline Verdict classify_high_dim(int dimension) {
  if (dimension < 2) throw Error(ErrorKind::InvalidArgument, "use classify for curves");
  Verdict v;
  v.verdict = VerdictCase::NonKahlerN1;
  v.q_level_note = q_level_note(v.verdict);
  return v;
}

}  // namespace bgdisc
