#include <gtest/gtest.h>

#include <algorithm>

#include "bgdisc/classifier.hpp"
#include "support.hpp"

using namespace bgdisc;
using bgdisc::testing::kTaus;
using bgdisc::testing::random_class;
using bgdisc::testing::random_int;

namespace {

AffineEndo random_endo(const Torus& E, Rng& rng, long long max_m = 4) {
  long long m = 0;
  while (m == 0) m = random_int(rng, -max_m, max_m);
  return AffineEndo{m, E.random_point(rng)};
}

// a divisor with the given class: (deg - 1)[0] + [aj]
std::vector<DivisorTerm> representative(const DivisorClass& L) {
  return {{L.degree - 1, TorusPoint{}}, {1, L.aj}};
}

}  // namespace

TEST(Pullback, Examples) {
  const Torus E(cd(0.3, 1.1));
  const DivisorClass L{3, TorusPoint{0.2, 0.9}};
  EXPECT_TRUE(isomorphic(E, pullback_class(E, AffineEndo{1, {}}, L), L));

  const TorusPoint p{0.15, 0.35}, x{0.6, 0.25};
  const long long N = 4;
  const DivisorClass deg0 = class_of(E, {{N, p}, {-N, TorusPoint{}}});
  const DivisorClass moved = pullback_class(E, AffineEndo{1, x}, deg0);
  EXPECT_EQ(moved.degree, 0);
  EXPECT_TRUE(E.equal(moved.aj, E.mul_int(N, p)));

  const TorusPoint q{0.71, 0.43};
  const DivisorClass doubled = pullback_class(E, AffineEndo{2, {}}, DivisorClass{1, q});
  EXPECT_EQ(doubled.degree, 4);
  EXPECT_TRUE(E.equal(doubled.aj, E.mul_int(2, q)));

  EXPECT_THROW(pullback_class(E, AffineEndo{0, {}}, L), Error);
}

TEST(Pullback, ClosedFormMatchesPreimageOracle) {
  Rng rng(31);
  for (cd tau : kTaus) {
    const Torus E(tau);
    for (long long m = -4; m <= 4; ++m) {
      if (m == 0) continue;
      for (int i = 0; i < 100; ++i) {
        const AffineEndo f{m, E.random_point(rng)};
        const DivisorClass L = random_class(E, rng);
        const DivisorClass fast = pullback_class(E, f, L);
        const DivisorClass slow = pullback_by_preimages(E, f, representative(L));
        EXPECT_TRUE(isomorphic(E, fast, slow)) << "m = " << m;
      }
    }
  }
}

TEST(Pullback, IsMonoidal) {
  Rng rng(32);
  const Torus E(cd(0.5, 0.9));
  for (int i = 0; i < 500; ++i) {
    const AffineEndo f = random_endo(E, rng);
    const DivisorClass a = random_class(E, rng), b = random_class(E, rng);
    EXPECT_TRUE(isomorphic(E, pullback_class(E, f, tensor(E, a, b)),
                           tensor(E, pullback_class(E, f, a), pullback_class(E, f, b))));
    EXPECT_TRUE(is_trivial(E, pullback_class(E, f, DivisorClass{})));
  }
}

TEST(Pullback, IsFunctorial) {
  Rng rng(33);
  const Torus E(cd(0.0, 1.0));
  for (int i = 0; i < 300; ++i) {
    const AffineEndo f = random_endo(E, rng, 3), g = random_endo(E, rng, 3);
    const DivisorClass L = random_class(E, rng);
    EXPECT_TRUE(isomorphic(E, pullback_class(E, compose(E, f, g), L),
                           pullback_class(E, g, pullback_class(E, f, L))));
  }
}

TEST(KodairaReduce, Examples) {
  const Torus E(cd(0.3, 1.1));
  const DivisorClass L{5, TorusPoint{0.3, 0.3}};
  for (const auto& r : kodaira_reduce(E, {L, L, L, L})) EXPECT_TRUE(is_trivial(E, r));
  const DivisorClass T{0, TorusPoint{0.25, 0.6}};
  const auto out = kodaira_reduce(E, {L, tensor(E, L, T)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(isomorphic(E, out[0], T));
  Rng rng(34);
  for (int i = 0; i < 100; ++i) {
    std::vector<DivisorClass> cs;
    for (int k = 0; k < 4; ++k) cs.push_back(random_class(E, rng));
    const auto red = kodaira_reduce(E, cs);
    for (std::size_t k = 0; k < red.size(); ++k) EXPECT_EQ(red[k].degree, cs[k + 1].degree - cs[0].degree);
  }
  EXPECT_THROW(kodaira_reduce(E, {L}), Error);
}

TEST(Classify, DiagonalIsAlgebraic) {
  Rng rng(35);
  for (cd tau : kTaus) {
    const Torus E(tau);
    for (int n = 2; n <= 6; ++n)
      for (int i = 0; i < 20; ++i) {
        DivisorClass L = random_class(E, rng);
        if (L.degree == 0) L.degree = 1;
        EXPECT_EQ(classify(E, diagonal(n), L).verdict, VerdictCase::Algebraic);
      }
  }
}

TEST(Classify, DegreeMismatchIsN1) {
  const Torus E;
  const DivisorClass L{2, TorusPoint{0.1, 0.1}};
  const Verdict v = classify(E, CurveInProduct{{AffineEndo{1, {}}, AffineEndo{2, {}}}}, L);
  EXPECT_EQ(v.verdict, VerdictCase::NonKahlerN1);
  EXPECT_EQ(v.degrees, (std::vector<long long>{1, 4}));
  EXPECT_EQ(v.q_level_note, q_level_note(VerdictCase::NonKahlerN1));
}

TEST(Classify, MixedConstantIsFlaggedN1) {
  const Torus E;
  const Verdict v = classify(E, CurveInProduct{{AffineEndo{1, {}}, AffineEndo{0, {0.3, 0.3}}}}, DivisorClass{1, {}});
  EXPECT_EQ(v.verdict, VerdictCase::NonKahlerN1);
  EXPECT_FALSE(v.extension_note.empty());
}

TEST(Classify, ConstantCurveIsFiberSubvariety) {
  const Torus E;
  const Verdict v = classify(E, CurveInProduct{{AffineEndo{0, {0.1, 0.2}}, AffineEndo{0, {}}}}, DivisorClass{2, {}});
  EXPECT_EQ(v.verdict, VerdictCase::FiberSubvariety);
}

TEST(Classify, Antidiagonal) {
  Rng rng(36);
  for (cd tau : kTaus) {
    const Torus E(tau);
    for (int i = 0; i < 50; ++i) {
      const long long N = random_int(rng, 1, 6);
      const TorusPoint p = E.random_point(rng);
      const DivisorClass L{N, E.mul_int(N, p)};
      const TorusPoint x2 = E.random_point(rng);
      const TorusPoint x1 = E.add(x2, E.mul_int(2, p));
      EXPECT_EQ(classify(E, antidiagonal(x1, x2, E), L).verdict, VerdictCase::Algebraic);
      const TorusPoint generic = E.random_point(rng);
      // skip shifts that happen to satisfy N (2p - x1 + x2) = 0
      const DivisorClass diff = class_of(E, {{N, E.sub(E.mul_int(2, p), generic)}, {N, x2}});
      if (E.distance(diff.aj, TorusPoint{}) < 1e-6) continue;
      EXPECT_EQ(classify(E, antidiagonal(generic, x2, E), L).verdict, VerdictCase::Kahler);
    }
  }
}

TEST(Classify, SupportPointRecoversClass) {
  Rng rng(37);
  const Torus E(cd(0.3, 1.1));
  for (int i = 0; i < 100; ++i) {
    DivisorClass L = random_class(E, rng);
    if (L.degree == 0) continue;
    const TorusPoint p = support_point(E, L);
    EXPECT_TRUE(isomorphic(E, class_of(E, {{L.degree, p}}), L));
  }
}

TEST(Classify, InvariantUnderPermutationAndReparametrization) {
  Rng rng(38);
  for (cd tau : kTaus) {
    const Torus E(tau);
    for (int i = 0; i < 200; ++i) {
      const int n = static_cast<int>(random_int(rng, 2, 5));
      CurveInProduct Z;
      Z.components.push_back(AffineEndo{rng.next() % 2 ? 1 : -1, E.random_point(rng)});
      for (int k = 1; k < n; ++k) {
        // equal-degree curves half the time so Kahler and Algebraic both occur
        const long long m = (rng.next() % 2) ? (rng.next() % 2 ? 1 : -1) : random_int(rng, -3, 3);
        Z.components.push_back(AffineEndo{m, E.random_point(rng)});
      }
      DivisorClass L = random_class(E, rng);
      if (L.degree == 0) L.degree = 2;
      const VerdictCase v = classify(E, Z, L).verdict;

      CurveInProduct permuted = Z;
      std::reverse(permuted.components.begin(), permuted.components.end());
      std::rotate(permuted.components.begin(), permuted.components.begin() + 1, permuted.components.end());
      EXPECT_EQ(classify(E, permuted, L).verdict, v);

      const AffineEndo s{1, E.random_point(rng)};
      CurveInProduct moved;
      for (const auto& c : Z.components) moved.components.push_back(compose(E, c, s));
      EXPECT_EQ(classify(E, moved, L).verdict, v);

      // ambient translation by y with deg(L) y = 0 preserves every pullback comparison
      const auto tors = E.torsion_points(static_cast<int>(L.degree < 0 ? -L.degree : L.degree));
      const TorusPoint y = tors[rng.next() % tors.size()];
      CurveInProduct shifted = Z;
      for (auto& c : shifted.components) c.t = E.add(c.t, y);
      EXPECT_EQ(classify(E, shifted, L).verdict, v);

      const DivisorClass twisted = tensor(E, L, DivisorClass{0, TorusPoint{}});
      EXPECT_EQ(classify(E, Z, twisted).verdict, v);
    }
  }
}

TEST(Classify, AmbientTranslationOfEqualScaleCurves) {
  Rng rng(39);
  const Torus E(cd(0.5, 0.9));
  for (int i = 0; i < 200; ++i) {
    const long long m = rng.next() % 2 ? 1 : -1;
    CurveInProduct Z;
    for (int k = 0; k < 3; ++k) Z.components.push_back(AffineEndo{m, E.random_point(rng)});
    const DivisorClass L{random_int(rng, 1, 5), E.random_point(rng)};
    const VerdictCase v = classify(E, Z, L).verdict;
    const TorusPoint y = E.random_point(rng);
    for (auto& c : Z.components) c.t = E.add(c.t, y);
    EXPECT_EQ(classify(E, Z, L).verdict, v);
  }
}

TEST(Classify, Errors) {
  const Torus E;
  EXPECT_THROW(classify(E, diagonal(2), DivisorClass{0, {}}), Error);
  EXPECT_THROW(classify(E, CurveInProduct{{AffineEndo{2, {}}, AffineEndo{2, {}}}}, DivisorClass{1, {}}), Error);
  EXPECT_THROW(classify_high_dim(1), Error);
  EXPECT_EQ(classify_high_dim(2).verdict, VerdictCase::NonKahlerN1);
  EXPECT_EQ(classify_high_dim(7).verdict, VerdictCase::NonKahlerN1);
}

TEST(Classify, AmbiguousBandIsSurfaced) {
  const Torus E(cd(0.0, 1.0), 1e-9);
  const DivisorClass L{1, TorusPoint{}};
  const CurveInProduct Z{{AffineEndo{1, {}}, AffineEndo{1, TorusPoint{3e-9, 0.0}}}};
  try {
    classify(E, Z, L);
    FAIL() << "expected an indeterminate comparison";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Indeterminate);
  }
}
