#pragma once

// Hyperplane sections of the elliptic normal curve E in P^{n-1} and the
// discriminant D of tangent hyperplanes in the dual space.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bgdisc/error.hpp"
#include "bgdisc/theta.hpp"
#include "bgdisc/torus.hpp"
#include "bgdisc/zeros.hpp"

namespace bgdisc {

inline constexpr double kClusteringTol = 1e-6;

struct SectionZero {
  TorusPoint point;
  cd z;                   // complex representative near the raw roots
  int multiplicity = 1;
  double jet_error = 0.0; // relative size of the lower jets at z
};

struct SectionZeros {
  std::vector<SectionZero> zeros;
  std::vector<cd> roots;  // raw roots, one per unit of multiplicity
  double residual = 0.0;
  TorusPoint abel_sum{};
  double abel_error = 0.0;
  bool indeterminate = false;

  int total_multiplicity() const {
    int s = 0;
    for (const auto& z : zeros) s += z.multiplicity;
    return s;
  }
};

/// Multiplicity pattern k1 >= k2 >= ... >= kl of a divisor of degree n.
struct FiberPartition {
  std::vector<int> parts;

  static FiberPartition from(std::vector<int> p) {
    std::sort(p.begin(), p.end(), std::greater<>());
    return FiberPartition{std::move(p)};
  }

  int total() const { return std::accumulate(parts.begin(), parts.end(), 0); }
  int distinct() const { return static_cast<int>(parts.size()); }
  bool abelian() const {
    return std::all_of(parts.begin(), parts.end(), [](int k) { return k == 1; });
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "+" : "") << parts[i];
    return os.str();
  }

  // F^[k1] x F^[k2] x ... x F^[kl]
  std::string fiber_type() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? " x " : "") << "F^[" << parts[i] << "]";
    return os.str();
  }

  bool operator==(const FiberPartition&) const = default;
};

namespace detail {

// max_{j<k} |sum_m H_m theta_m^{(j)}(z)| / (|H| |theta^{(j)}(z)|)
inline double jet_error(const Eigen::VectorXcd& H, cd z, int k, const ThetaBasis& B) {
  const Eigen::MatrixXcd J = B.jets(z, k);
  double worst = 0.0;
  for (int j = 0; j < k; ++j) {
    const double denom = H.norm() * J.row(j).norm();
    worst = std::max(worst, std::abs((J.row(j) * H)(0)) / denom);
  }
  return worst;
}

// Representative of w closest to the complex number ref.
inline cd nearest_lift(cd w, cd ref, const Torus& E) {
  const TorusPoint d = E.reduce(w - ref);
  cd best = ref + E.to_complex(d);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const cd cand = ref + E.to_complex(d) + static_cast<double>(i) + static_cast<double>(j) * E.tau();
      if (std::abs(cand - ref) < std::abs(best - ref)) best = cand;
    }
  return best;
}

struct GroupState {
  std::vector<SectionZero> out;
  bool indeterminate = false;
};

// Roots within `link` of each other are candidates for one multiple zero. A
// candidate of size k is accepted when the section's jets of order < k vanish
// at its centroid to within tol; otherwise it is split at its longest
// spanning-tree edge. Coincidence is decided on the jets because a k-fold zero
// of a perturbed section splits by roughly (perturbation)^{1/k}.
inline void resolve_group(const std::vector<cd>& pts, const Eigen::VectorXcd& H,
                          const ThetaBasis& B, double tol, GroupState& st) {
  const Torus& E = B.torus();
  const int k = static_cast<int>(pts.size());
  cd center(0.0);
  for (cd p : pts) center += p;
  center /= static_cast<double>(k);
  double spread = 0.0;
  for (cd p : pts) spread = std::max(spread, std::abs(p - center));
  // a k-fold zero of g is a simple zero of g^{(k-1)}
  cd refined = center;
  for (int it = 0; it < 30; ++it) {
    const Eigen::MatrixXcd J = B.jets(refined, k + 1);
    const cd num = (J.row(k - 1) * H)(0), den = (J.row(k) * H)(0);
    if (den == cd(0.0)) break;
    const cd step = num / den;
    refined -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(refined))) break;
  }
  if (std::isfinite(refined.real()) && std::isfinite(refined.imag()) &&
      std::abs(refined - center) <= 2.0 * spread + 1e-12)
    center = refined;
  const double err = jet_error(H, center, k, B);
  if (k == 1 || err < 10.0 * tol) {
    if (k > 1 && err >= tol) st.indeterminate = true;
    st.out.push_back(SectionZero{E.reduce(center), center, k, err});
    return;
  }
  // Prim's tree on the group; cut the longest edge
  std::vector<int> parent(static_cast<std::size_t>(k), -1);
  std::vector<double> best(static_cast<std::size_t>(k), 1e300);
  std::vector<bool> in(static_cast<std::size_t>(k), false);
  best[0] = 0.0;
  double longest = -1.0;
  int cut = -1;
  for (int it = 0; it < k; ++it) {
    int u = -1;
    for (int v = 0; v < k; ++v)
      if (!in[static_cast<std::size_t>(v)] && (u < 0 || best[static_cast<std::size_t>(v)] < best[static_cast<std::size_t>(u)])) u = v;
    in[static_cast<std::size_t>(u)] = true;
    if (parent[static_cast<std::size_t>(u)] >= 0 && best[static_cast<std::size_t>(u)] > longest) {
      longest = best[static_cast<std::size_t>(u)];
      cut = u;
    }
    for (int v = 0; v < k; ++v) {
      const double d = std::abs(pts[static_cast<std::size_t>(u)] - pts[static_cast<std::size_t>(v)]);
      if (!in[static_cast<std::size_t>(v)] && d < best[static_cast<std::size_t>(v)]) {
        best[static_cast<std::size_t>(v)] = d;
        parent[static_cast<std::size_t>(v)] = u;
      }
    }
  }
  // subtree hanging below `cut` versus the rest
  std::vector<bool> below(static_cast<std::size_t>(k), false);
  for (int v = 0; v < k; ++v) {
    int w = v;
    while (w >= 0 && w != cut) w = parent[static_cast<std::size_t>(w)];
    below[static_cast<std::size_t>(v)] = (w == cut);
  }
  std::vector<cd> left, right;
  for (int v = 0; v < k; ++v) (below[static_cast<std::size_t>(v)] ? left : right).push_back(pts[static_cast<std::size_t>(v)]);
  resolve_group(left, H, B, tol, st);
  resolve_group(right, H, B, tol, st);
}

}  // namespace detail

/// Groups raw roots of the section H into zeros with multiplicity.
inline SectionZeros group_section_zeros(const Eigen::VectorXcd& H, const ZeroSet& zs,
                                        const ThetaBasis& B, double tol = kClusteringTol) {
  const Torus& E = B.torus();
  SectionZeros out;
  out.residual = zs.residual;
  for (const auto& r : zs.roots) {
    out.roots.push_back(r.z);
    out.abel_sum = E.add(out.abel_sum, E.reduce(r.z));
  }
  out.abel_error = E.distance(out.abel_sum, TorusPoint{});

  // single-linkage candidates on the torus
  const double link = 0.05 * std::min(1.0, E.tau().imag());
  const std::size_t m = out.roots.size();
  std::vector<int> label(m);
  std::iota(label.begin(), label.end(), 0);
  auto find = [&](int i) {
    while (label[static_cast<std::size_t>(i)] != i) i = label[static_cast<std::size_t>(i)];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (E.distance(E.reduce(out.roots[i]), E.reduce(out.roots[j])) < link)
        label[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));

  detail::GroupState st;
  std::vector<bool> done(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (done[i]) continue;
    const int root = find(static_cast<int>(i));
    std::vector<cd> pts;
    for (std::size_t j = i; j < m; ++j)
      if (!done[j] && find(static_cast<int>(j)) == root) {
        pts.push_back(pts.empty() ? out.roots[j] : detail::nearest_lift(out.roots[j], pts.front(), E));
        done[j] = true;
      }
    detail::resolve_group(pts, H, B, tol, st);
  }
  std::sort(st.out.begin(), st.out.end(), [](const SectionZero& x, const SectionZero& y) {
    if (x.multiplicity != y.multiplicity) return x.multiplicity > y.multiplicity;
    return x.point.a != y.point.a ? x.point.a < y.point.a : x.point.b < y.point.b;
  });
  out.zeros = std::move(st.out);
  out.indeterminate = st.indeterminate;
  return out;
}

/// rho(H) = {x_1, ..., x_n}: the intersection of the hyperplane with E.
inline SectionZeros hyperplane_section(const Hyperplane& H, const ThetaBasis& B,
                                       double tol = kClusteringTol, const ZeroOptions& opt = {}) {
  const ZeroSet zs = section_roots(H.coords, B, opt);
  SectionZeros out = group_section_zeros(H.coords, zs, B, tol);
  if (out.total_multiplicity() != B.n())
    throw Error(ErrorKind::Truncation, "section zeros do not add up to n");
  return out;
}

enum class Membership { Outside, Inside, Indeterminate };

inline std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::Outside: return "outside";
    case Membership::Inside: return "inside";
    case Membership::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct DiscriminantTest {
  Membership status = Membership::Outside;
  FiberPartition partition;
  SectionZeros section;

  bool member() const { return status == Membership::Inside; }
};

/// H lies in D iff some zero of its section is repeated.
inline DiscriminantTest in_discriminant(const Hyperplane& H, const ThetaBasis& B,
                                        double clustering_tol = kClusteringTol) {
  DiscriminantTest t;
  t.section = hyperplane_section(H, B, clustering_tol);
  std::vector<int> parts;
  for (const auto& z : t.section.zeros) parts.push_back(z.multiplicity);
  t.partition = FiberPartition::from(std::move(parts));
  if (t.section.indeterminate)
    t.status = Membership::Indeterminate;
  else
    t.status = t.partition.abelian() ? Membership::Outside : Membership::Inside;
  return t;
}

struct FiberReport {
  FiberPartition partition;
  bool abelian = true;
  std::string fiber_type;  // V_y
  std::string verdict;
};

inline FiberReport fiber_report(const Hyperplane& H, const ThetaBasis& B,
                                double clustering_tol = kClusteringTol) {
  const DiscriminantTest t = in_discriminant(H, B, clustering_tol);
  if (t.status == Membership::Indeterminate)
    throw Error(ErrorKind::Indeterminate, "zero clustering is ambiguous at this tolerance");
  FiberReport r;
  r.partition = t.partition;
  r.abelian = t.partition.abelian();
  r.fiber_type = t.partition.fiber_type();
  const int n = B.n();
  if (r.abelian) {
    r.verdict = "abelian: W_y = F^" + std::to_string(n) + ", W_y/F = F^" + std::to_string(n - 1);
  } else {
    std::ostringstream os;
    os << "non-abelian: ";
    for (std::size_t i = 0; i < t.partition.parts.size(); ++i)
      os << (i ? " x " : "") << "P^" << t.partition.parts[i] - 1;
    os << "-bundle over F^" << t.partition.distinct()
       << "; W_y and W_y/F not birational to abelian varieties";
    r.verdict = os.str();
  }
  return r;
}

/// Hyperplane cutting E in {-x, -x, x_1, ..., x_{n-2}} where x is the
/// branch-th solution of 2x = x_1 + ... + x_{n-2}.
inline Hyperplane sample_D_tilde(const std::vector<TorusPoint>& xs, int branch, const ThetaBasis& B) {
  const int n = B.n();
  const Torus& E = B.torus();
  if (static_cast<int>(xs.size()) != n - 2)
    throw Error(ErrorKind::InvalidArgument, "need n-2 auxiliary points");
  if (branch < 0 || branch > 3) throw Error(ErrorKind::InvalidArgument, "branch must be 0..3");
  TorusPoint s{};
  for (const auto& p : xs) s = E.add(s, p);
  const TorusPoint x = E.solve_scaled(2, s)[static_cast<std::size_t>(branch)];
  const TorusPoint mx = E.neg(x);
  TorusPoint abel = E.mul_int(2, mx);
  for (const auto& p : xs) abel = E.add(abel, p);
  if (!E.is_zero(abel)) throw Error(ErrorKind::Degenerate, "divisor does not sum to zero");

  Eigen::MatrixXcd C(n, n);
  const Eigen::MatrixXcd Jx = B.jets(E.to_complex(mx), 2);
  C.row(0) = Jx.row(0).normalized();
  C.row(1) = Jx.row(1).normalized();
  for (int i = 0; i < n - 2; ++i)
    C.row(i + 2) = B.jets(E.to_complex(xs[static_cast<std::size_t>(i)]), 1).row(0).normalized();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(n - 2) < 1e-7 * sv(0))
    throw Error(ErrorKind::Degenerate, "divisor does not determine a unique hyperplane");
  return Hyperplane::from(svd.matrixV().col(n - 1));
}

// --- probes along pencils ---------------------------------------------------

namespace detail {

inline Eigen::VectorXcd random_coords(int n, Rng& rng) {
  Eigen::VectorXcd v(n);
  for (int k = 0; k < n; ++k) v(k) = rng.complex_normal();
  return v.normalized();
}

// Chordal distance between [p0 : p1] and [q0 : q1].
inline double chordal(cd p0, cd p1, cd q0, cd q1) {
  return std::abs(p0 * q1 - p1 * q0) /
         (std::sqrt(std::norm(p0) + std::norm(p1)) * std::sqrt(std::norm(q0) + std::norm(q1)));
}

struct PencilCrossings {
  std::vector<std::pair<cd, cd>> values;  // [g0 : g1] at each cluster
  std::vector<int> sizes;                 // ramification points per value
  double residual = 0.0;
};

// Ramification of x -> [g0(x) : g1(x)] and the pencil members tangent to E.
// The Wronskian g0 g1' - g1 g0' is a theta function of level 2n.
inline PencilCrossings pencil_crossings(const Eigen::VectorXcd& H0, const Eigen::VectorXcd& H1,
                                        const ThetaBasis& B, double tol) {
  auto w = [&](cd x) {
    const Eigen::MatrixXcd J = B.jets(x, 3);
    const cd g0 = (J.row(0) * H0)(0), g1 = (J.row(0) * H1)(0);
    const cd d0 = (J.row(1) * H0)(0), d1 = (J.row(1) * H1)(0);
    const cd e0 = (J.row(2) * H0)(0), e1 = (J.row(2) * H1)(0);
    return std::pair<cd, cd>{g0 * d1 - g1 * d0, g0 * e1 - g1 * e0};
  };
  const ZeroSet zs = find_zeros(B.torus(), w, 2 * B.n());
  PencilCrossings pc;
  pc.residual = zs.residual;
  for (const auto& r : zs.roots) {
    const Eigen::VectorXcd v = B.values(r.z);
    const cd a = (v.transpose() * H0)(0), b = (v.transpose() * H1)(0);
    bool merged = false;
    for (std::size_t i = 0; i < pc.values.size(); ++i) {
      if (chordal(a, b, pc.values[i].first, pc.values[i].second) < tol) {
        ++pc.sizes[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      pc.values.emplace_back(a, b);
      pc.sizes.push_back(1);
    }
  }
  return pc;
}

// U = H0 ∩ H1 misses E iff g1 is nonzero at every zero of g0.
inline bool pencil_misses_curve(const Eigen::VectorXcd& H0, const Eigen::VectorXcd& H1,
                                const ThetaBasis& B) {
  const SectionZeros z0 = group_section_zeros(H0, section_roots(H0, B), B);
  for (const auto& z : z0.zeros) {
    const Eigen::VectorXcd v = B.values(z.z);
    const double rel = std::abs((v.transpose() * H1)(0)) / (v.norm() * H1.norm());
    if (rel < 1e-6) return false;
  }
  return true;
}

}  // namespace detail

inline constexpr int kMaxProbeAttempts = 25;
inline constexpr double kPencilTol = 1e-6;

struct DegreeProbe {
  int count = 0;     // distinct tangent hyperplanes on a generic line of P(W^v)
  int attempts = 0;  // pencils drawn, including rejected ones
  double residual = 0.0;
};

/// deg D, measured as the number of tangent hyperplanes in a generic pencil,
/// i.e. the number of ramification points of a generic projection E -> P^1.
inline DegreeProbe discriminant_degree_probe(const ThetaBasis& B, std::uint64_t seed) {
  Rng rng(seed);
  const int n = B.n();
  for (int attempt = 1; attempt <= kMaxProbeAttempts; ++attempt) {
    const Eigen::VectorXcd H0 = detail::random_coords(n, rng);
    const Eigen::VectorXcd H1 = detail::random_coords(n, rng);
    if (!detail::pencil_misses_curve(H0, H1, B)) continue;
    const auto pc = detail::pencil_crossings(H0, H1, B, kPencilTol);
    // a repeated value means the line meets the bad set Z
    if (std::any_of(pc.sizes.begin(), pc.sizes.end(), [](int s) { return s != 1; })) continue;
    return DegreeProbe{static_cast<int>(pc.values.size()), attempt, pc.residual};
  }
  throw Error(ErrorKind::Resample, "no generic pencil found within the attempt budget");
}

struct MultiplicityProbe {
  int multiplicity = 0;   // m = 2n + 1 - |l ∩ D|
  int intersections = 0;  // |l ∩ D|
  int tangency_order = 0; // ramification points absorbed by H0 itself
  int attempts = 0;
};

/// Multiplicity of H0 on D from the number of points in which a random line
/// through H0 meets D.
inline MultiplicityProbe multiplicity_probe(const Hyperplane& H0, const ThetaBasis& B,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const int n = B.n();
  const Eigen::VectorXcd h0 = H0.coords.normalized();
  for (int attempt = 1; attempt <= kMaxProbeAttempts; ++attempt) {
    const Eigen::VectorXcd h1 = detail::random_coords(n, rng);
    if (!detail::pencil_misses_curve(h0, h1, B)) continue;
    const auto pc = detail::pencil_crossings(h0, h1, B, kPencilTol);
    int at_h0 = -1;
    bool generic = true;
    for (std::size_t i = 0; i < pc.values.size(); ++i) {
      const bool is_h0 = detail::chordal(pc.values[i].first, pc.values[i].second, 0.0, 1.0) < kPencilTol;
      if (is_h0)
        at_h0 = static_cast<int>(i);
      else if (pc.sizes[i] != 1)
        generic = false;
    }
    if (at_h0 < 0)
      throw Error(ErrorKind::InvalidArgument, "hyperplane is not tangent to E (not in D)");
    if (!generic) continue;
    MultiplicityProbe out;
    out.intersections = static_cast<int>(pc.values.size());
    out.multiplicity = 2 * n + 1 - out.intersections;
    out.tangency_order = pc.sizes[static_cast<std::size_t>(at_h0)];
    out.attempts = attempt;
    return out;
  }
  throw Error(ErrorKind::Resample, "no generic line through the point within the attempt budget");
}

struct StratumReport {
  int n = 0;
  std::vector<TorusPoint> torsion;  // x with H_{x,...,x}
  std::vector<Hyperplane> points;
  std::vector<int> multiplicities;
  int distinct = 0;
  int span_rank = 0;
  std::vector<double> singular_values;
};

inline int numerical_rank(const Eigen::MatrixXcd& M, double rel_tol, std::vector<double>* sv_out = nullptr) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv_out) sv_out->push_back(sv(i));
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

/// Z_{n-1}: the osculating hyperplanes H_{x,...,x}, x in E[n].
inline StratumReport top_stratum(const ThetaBasis& B, std::uint64_t seed = 101) {
  const int n = B.n();
  const Torus& E = B.torus();
  StratumReport r;
  r.n = n;
  r.torsion = E.torsion_points(n);
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(r.torsion.size()), n);
  for (std::size_t i = 0; i < r.torsion.size(); ++i) {
    const Hyperplane H = osculating_hyperplane(r.torsion[i], B).H;
    r.points.push_back(H);
    r.multiplicities.push_back(multiplicity_probe(H, B, seed + i).multiplicity);
    rows.row(static_cast<Eigen::Index>(i)) = H.coords.transpose();
  }
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    bool fresh = true;
    for (std::size_t j = 0; j < i; ++j)
      if (r.points[i].distance(r.points[j]) < 1e-6) fresh = false;
    if (fresh) ++r.distinct;
  }
  r.span_rank = numerical_rank(rows, 1e-8, &r.singular_values);
  return r;
}

}  // namespace bgdisc
