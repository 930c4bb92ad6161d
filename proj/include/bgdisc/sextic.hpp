#pragma once

// The dual curve of the plane cubic (n = 3): an implicit form fitted to
// sampled tangent lines, its singular points and their local type.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bgdisc/discriminant.hpp"
#include "bgdisc/error.hpp"
#include "bgdisc/theta.hpp"

namespace bgdisc {

/// Homogeneous polynomial in three variables.
struct TernaryForm {
  int degree = 0;
  std::vector<std::array<int, 3>> exponents;
  Eigen::VectorXcd coeffs;

  static std::vector<std::array<int, 3>> monomials(int d) {
    std::vector<std::array<int, 3>> out;
    for (int i = d; i >= 0; --i)
      for (int j = d - i; j >= 0; --j) out.push_back({i, j, d - i - j});
    return out;
  }

  static Eigen::VectorXcd monomial_row(const Eigen::Vector3cd& X, const std::vector<std::array<int, 3>>& mons) {
    Eigen::VectorXcd r(static_cast<Eigen::Index>(mons.size()));
    for (std::size_t m = 0; m < mons.size(); ++m) {
      cd v(1.0);
      for (int c = 0; c < 3; ++c)
        for (int e = 0; e < mons[m][static_cast<std::size_t>(c)]; ++e) v *= X(c);
      r(static_cast<Eigen::Index>(m)) = v;
    }
    return r;
  }

  // partial derivative of the monomial by the multi-index `by`
  cd eval_partial(const Eigen::Vector3cd& X, std::array<int, 3> by) const {
    cd total(0.0);
    for (std::size_t m = 0; m < exponents.size(); ++m) {
      cd term = coeffs(static_cast<Eigen::Index>(m));
      for (int c = 0; c < 3; ++c) {
        const int e = exponents[m][static_cast<std::size_t>(c)];
        const int d = by[static_cast<std::size_t>(c)];
        if (d > e) {
          term = 0.0;
          break;
        }
        for (int t = 0; t < d; ++t) term *= static_cast<double>(e - t);
        for (int t = 0; t < e - d; ++t) term *= X(c);
      }
      total += term;
    }
    return total;
  }

  cd operator()(const Eigen::Vector3cd& X) const { return eval_partial(X, {0, 0, 0}); }

  Eigen::Vector3cd gradient(const Eigen::Vector3cd& X) const {
    return {eval_partial(X, {1, 0, 0}), eval_partial(X, {0, 1, 0}), eval_partial(X, {0, 0, 1})};
  }

  Eigen::Matrix3cd hessian(const Eigen::Vector3cd& X) const {
    Eigen::Matrix3cd Hs;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        std::array<int, 3> by{0, 0, 0};
        ++by[static_cast<std::size_t>(i)];
        ++by[static_cast<std::size_t>(j)];
        Hs(i, j) = eval_partial(X, by);
      }
    return Hs;
  }

  // |F(X)| relative to |coeffs| |monomials(X)|
  double relative_value(const Eigen::Vector3cd& X) const {
    const Eigen::VectorXcd row = monomial_row(X, exponents);
    return std::abs((row.transpose() * coeffs)(0)) / (row.norm() * coeffs.norm());
  }
};

struct FormFit {
  TernaryForm form;
  double train_residual = 0.0;    // RMS relative value on fitting samples
  double holdout_residual = 0.0;  // max relative value on held-out samples
};

/// Least-squares vanishing form of the given degree with unit coefficient norm.
inline FormFit fit_vanishing_form(const std::vector<Hyperplane>& train,
                                  const std::vector<Hyperplane>& holdout, int degree) {
  FormFit fit;
  fit.form.degree = degree;
  fit.form.exponents = TernaryForm::monomials(degree);
  const auto nm = static_cast<Eigen::Index>(fit.form.exponents.size());
  if (static_cast<Eigen::Index>(train.size()) < nm)
    throw Error(ErrorKind::InvalidArgument, "not enough samples for the requested degree");
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(train.size()), nm);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Eigen::VectorXcd row = TernaryForm::monomial_row(train[i].coords, fit.form.exponents);
    A.row(static_cast<Eigen::Index>(i)) = row.normalized().transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  fit.form.coeffs = svd.matrixV().col(nm - 1);
  fit.train_residual = svd.singularValues()(nm - 1) / std::sqrt(static_cast<double>(train.size()));
  for (const auto& H : holdout)
    fit.holdout_residual = std::max(fit.holdout_residual, fit.form.relative_value(H.coords));
  return fit;
}

struct SingularPoint {
  Hyperplane point;
  double value_residual = 0.0;     // relative |F|
  double gradient_residual = 0.0;  // |grad F| / (|coeffs| * degree)
  double hessian_ratio = 1.0;      // sigma_2 / sigma_1 of the affine Hessian
  int branches = 0;                // local branches, by monodromy
  bool cusp = false;
  double match_distance = 1.0;     // distance to the nearest top-stratum point
};

namespace detail {

struct Chart {
  int fixed = 0;
  int u = 1;
  int v = 2;
};

inline Chart chart_for(const Eigen::Vector3cd& X) {
  Eigen::Index c = 0;
  X.cwiseAbs().maxCoeff(&c);
  Chart ch;
  ch.fixed = static_cast<int>(c);
  ch.u = (ch.fixed + 1) % 3;
  ch.v = (ch.fixed + 2) % 3;
  return ch;
}

inline Eigen::Vector3cd lift(const Chart& ch, cd u, cd v) {
  Eigen::Vector3cd X;
  X(ch.fixed) = 1.0;
  X(ch.u) = u;
  X(ch.v) = v;
  return X;
}

// Newton / least squares on (f_u, f_v) = 0 in an affine chart.
inline bool polish_singular(const TernaryForm& F, Eigen::Vector3cd& X) {
  const Chart ch = chart_for(X);
  X /= X(ch.fixed);
  Eigen::Vector2cd z(X(ch.u), X(ch.v));
  auto residual = [&](const Eigen::Vector2cd& w) {
    const Eigen::Vector3cd g = F.gradient(lift(ch, w(0), w(1)));
    return Eigen::Vector2cd(g(ch.u), g(ch.v));
  };
  Eigen::Vector2cd r = residual(z);
  for (int it = 0; it < 200; ++it) {
    if (r.norm() == 0.0) break;
    const Eigen::Matrix3cd Hs = F.hessian(lift(ch, z(0), z(1)));
    Eigen::Matrix2cd Jm;
    Jm << Hs(ch.u, ch.u), Hs(ch.u, ch.v), Hs(ch.v, ch.u), Hs(ch.v, ch.v);
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix2cd> cod(Jm);
    cod.setThreshold(1e-10);
    Eigen::Vector2cd step = cod.solve(r);
    if (!step.allFinite()) return false;
    // damped: the Hessian is nearly singular at a cusp
    bool improved = false;
    for (int h = 0; h < 30 && !improved; ++h, step *= 0.5) {
      const Eigen::Vector2cd r_new = residual(z - step);
      if (r_new.norm() < r.norm()) {
        z -= step;
        r = r_new;
        improved = true;
      }
    }
    if (!improved || z.norm() > 1e3) break;
    if (step.norm() < 1e-15 * (1.0 + z.norm())) break;
  }
  if (z.norm() > 1e3) return false;
  X = lift(ch, z(0), z(1));
  return true;
}

// Roots of v -> f(P + u d1 + v d2), degree <= deg, by interpolation at
// roots of unity and a companion matrix.
inline std::vector<cd> slice_roots(const TernaryForm& F, const Eigen::Vector3cd& P,
                                   const Eigen::Vector3cd& d1, const Eigen::Vector3cd& d2, cd u,
                                   double radius) {
  const int d = F.degree;
  const int N = d + 1;
  std::vector<cd> vals(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j)
    vals[static_cast<std::size_t>(j)] = F(P + u * d1 + radius * std::polar(1.0, 2.0 * kPi * j / N) * d2);
  std::vector<cd> c(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) {
    cd acc(0.0);
    for (int j = 0; j < N; ++j) acc += vals[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * j * m / N);
    c[static_cast<std::size_t>(m)] = acc / static_cast<double>(N);
  }
  int top = d;
  const double cmax = std::abs(*std::max_element(c.begin(), c.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); }));
  while (top > 0 && std::abs(c[static_cast<std::size_t>(top)]) < 1e-13 * cmax) --top;
  std::vector<cd> roots;
  if (top == 0) return roots;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(top, top);
  for (int i = 1; i < top; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < top; ++i) C(i, top - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(top)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(C, false);
  for (int i = 0; i < top; ++i) roots.push_back(radius * ces.eigenvalues()(i));
  return roots;
}

// Number of local branches of F = 0 at the singular point P (chart coords),
// from the monodromy of the two small roots over a loop around u = 0.
inline int local_branches(const TernaryForm& F, const Eigen::Vector3cd& P, const Eigen::Vector3cd& d1,
                          const Eigen::Vector3cd& d2, double eps) {
  auto two_smallest = [](std::vector<cd> r) {
    std::sort(r.begin(), r.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); });
    return std::pair<cd, cd>{r[0], r[1]};
  };
  std::vector<cd> start = slice_roots(F, P, d1, d2, eps, 1.0);
  if (start.size() < 2) return 0;
  auto [r1, r2] = two_smallest(start);
  const cd s1 = r1, s2 = r2;
  constexpr int kSteps = 720;
  for (int s = 1; s <= kSteps; ++s) {
    const cd u = eps * std::polar(1.0, 2.0 * kPi * s / kSteps);
    const std::vector<cd> roots = slice_roots(F, P, d1, d2, u, 1.0);
    auto nearest = [&](cd x) {
      cd best = roots.front();
      for (cd r : roots)
        if (std::abs(r - x) < std::abs(best - x)) best = r;
      return best;
    };
    const cd n1 = nearest(r1), n2 = nearest(r2);
    if (n1 == n2) return 0;
    r1 = n1;
    r2 = n2;
  }
  const double sep = std::abs(s1 - s2);
  if (std::abs(r1 - s2) < 0.1 * sep && std::abs(r2 - s1) < 0.1 * sep) return 1;
  if (std::abs(r1 - s1) < 0.1 * sep && std::abs(r2 - s2) < 0.1 * sep) return 2;
  return 0;
}

}  // namespace detail

/// Local type of the singular point X of F = 0: Hessian rank and branch count.
inline SingularPoint classify_singular_point(const TernaryForm& F, Eigen::Vector3cd X) {
  SingularPoint sp;
  const detail::Chart ch = detail::chart_for(X);
  X /= X(ch.fixed);
  sp.point = Hyperplane::from(X);
  sp.value_residual = F.relative_value(X);
  const Eigen::VectorXcd row = TernaryForm::monomial_row(X, F.exponents);
  sp.gradient_residual = F.gradient(X).norm() / (F.coeffs.norm() * row.norm() * F.degree);
  const Eigen::Matrix3cd Hs = F.hessian(X);
  Eigen::Matrix2cd h;
  h << Hs(ch.u, ch.u), Hs(ch.u, ch.v), Hs(ch.v, ch.u), Hs(ch.v, ch.v);
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(h, Eigen::ComputeFullV);
  sp.hessian_ratio = svd.singularValues()(1) / svd.singularValues()(0);
  // d1 spans the kernel of the Hessian (the tangent cone for a cusp)
  Eigen::Vector3cd d1 = Eigen::Vector3cd::Zero(), d2 = Eigen::Vector3cd::Zero();
  d1(ch.u) = svd.matrixV()(0, 1);
  d1(ch.v) = svd.matrixV()(1, 1);
  d2(ch.u) = svd.matrixV()(0, 0);
  d2(ch.v) = svd.matrixV()(1, 0);
  sp.branches = detail::local_branches(F, X, d1, d2, 1e-3);
  sp.cusp = sp.hessian_ratio < 1e-3 && sp.branches == 1;
  return sp;
}

struct DualSexticReport {
  FormFit sextic;
  FormFit quintic;
  std::vector<SingularPoint> singular;  // seeded at the top stratum
  int search_singular_count = 0;        // distinct singular points from random starts
  int cusps = 0;
  double max_match_distance = 0.0;
  std::vector<Hyperplane> top;
  std::vector<Hyperplane> samples;
};

inline constexpr int kSexticTrainSamples = 120;
inline constexpr int kSexticHoldoutSamples = 40;

/// Points of D sampled through the double-point parametrization.
inline std::vector<Hyperplane> sample_discriminant(const ThetaBasis& B, int count, Rng& rng) {
  std::vector<Hyperplane> out;
  const Torus& E = B.torus();
  while (static_cast<int>(out.size()) < count) {
    std::vector<TorusPoint> xs;
    for (int i = 0; i < B.n() - 2; ++i) xs.push_back(E.random_point(rng));
    const int branch = static_cast<int>(rng.next() % 4);
    try {
      out.push_back(sample_D_tilde(xs, branch, B));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
    }
  }
  return out;
}

inline DualSexticReport dual_sextic(const ThetaBasis& B, std::uint64_t seed = 2024) {
  if (B.n() != 3) throw Error(ErrorKind::InvalidArgument, "the dual sextic needs n = 3");
  Rng rng(seed);
  DualSexticReport rep;
  const std::vector<Hyperplane> train = sample_discriminant(B, kSexticTrainSamples, rng);
  const std::vector<Hyperplane> holdout = sample_discriminant(B, kSexticHoldoutSamples, rng);
  rep.samples = train;
  rep.sextic = fit_vanishing_form(train, holdout, 6);
  rep.quintic = fit_vanishing_form(train, holdout, 5);
  if (rep.sextic.holdout_residual > 1e-7)
    throw Error(ErrorKind::FitFailure, "degree-6 form does not vanish on held-out samples");
  const TernaryForm& F = rep.sextic.form;

  // seeded at the osculating hyperplanes of the nine flexes
  const Torus& E = B.torus();
  for (const auto& t : E.torsion_points(3)) rep.top.push_back(osculating_hyperplane(t, B).H);
  for (const auto& seed_point : rep.top) {
    Eigen::Vector3cd X = seed_point.coords;
    if (!detail::polish_singular(F, X)) continue;
    SingularPoint sp = classify_singular_point(F, X);
    if (sp.value_residual > 1e-6) continue;
    bool fresh = true;
    for (const auto& s : rep.singular)
      if (s.point.distance(sp.point) < 1e-6) fresh = false;
    if (!fresh) continue;
    for (const auto& t : rep.top) sp.match_distance = std::min(sp.match_distance, sp.point.distance(t));
    rep.singular.push_back(sp);
  }
  if (rep.singular.size() < 9)
    throw Error(ErrorKind::FitFailure, "fewer than nine singular points found from the seeds");
  for (const auto& s : rep.singular) {
    if (s.cusp) ++rep.cusps;
    rep.max_match_distance = std::max(rep.max_match_distance, s.match_distance);
  }

  // unseeded search for any further singular point
  std::vector<Hyperplane> found;
  for (int trial = 0; trial < 400; ++trial) {
    Eigen::Vector3cd X;
    for (int c = 0; c < 3; ++c) X(c) = rng.complex_normal();
    if (!detail::polish_singular(F, X)) continue;
    const Eigen::VectorXcd row = TernaryForm::monomial_row(X, F.exponents);
    const double g = F.gradient(X).norm() / (F.coeffs.norm() * row.norm() * F.degree);
    if (F.relative_value(X) > 1e-9 || g > 1e-7) continue;
    const Hyperplane h = Hyperplane::from(X);
    bool fresh = true;
    for (const auto& f : found)
      if (f.distance(h) < 1e-5) fresh = false;
    if (fresh) found.push_back(h);
  }
  rep.search_singular_count = static_cast<int>(found.size());
  return rep;
}

/// SVG of the part of F = 0 near the real plane X0 = 1 with the cusps marked.
inline std::string sextic_svg(const DualSexticReport& rep, double extent = 3.0, int pixels = 400) {
  const TernaryForm& F = rep.sextic.form;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
     << "\" viewBox=\"0 0 " << pixels << ' ' << pixels << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double h = 2.0 * extent / pixels;
  auto to_px = [&](double x) { return (x + extent) / h; };
  for (int i = 0; i < pixels; ++i)
    for (int j = 0; j < pixels; ++j) {
      const double x = -extent + (i + 0.5) * h, y = extent - (j + 0.5) * h;
      const Eigen::Vector3cd X(1.0, x, y);
      const Eigen::Vector3cd g = F.gradient(X);
      const double slope = std::hypot(std::abs(g(1)), std::abs(g(2)));
      if (slope > 0.0 && std::abs(F(X)) / slope < 0.75 * h)
        os << "<rect x=\"" << i << "\" y=\"" << j << "\" width=\"1\" height=\"1\" fill=\"black\"/>\n";
    }
  for (const auto& s : rep.singular) {
    const Eigen::VectorXcd& c = s.point.coords;
    if (std::abs(c(0)) < 1e-12) continue;
    const cd x = c(1) / c(0), y = c(2) / c(0);
    os << "<circle cx=\"" << to_px(x.real()) << "\" cy=\"" << pixels - to_px(y.real())
       << "\" r=\"4\" fill=\"none\" stroke=\"" << (s.cusp ? "red" : "blue") << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bgdisc
