#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "bgdisc/error.hpp"
#include "bgdisc/torus.hpp"
#include "bgdisc/zeros.hpp"

namespace bgdisc {

inline constexpr std::uint64_t kCalibrationSeed = 0xC0FFEEULL;

namespace detail {

// Unit norm, first coordinate above the noise floor made real-positive.
inline Eigen::VectorXcd normalize_projective(Eigen::VectorXcd v) {
  const double nrm = v.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw Error(ErrorKind::Degenerate, "projective coordinates are all zero");
  v /= nrm;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

// Sine of the angle between the lines: |v - <u, v> u| for unit u, v. Taken
// from the orthogonal component, which stays accurate for nearly equal lines.
inline double line_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd a = u.normalized(), b = v.normalized();
  return std::min(1.0, (b - a.dot(b) * a).norm());
}

}  // namespace detail

/// A point of P(W), the projective space of the embedding.
struct ProjPoint {
  Eigen::VectorXcd coords;

  static ProjPoint from(Eigen::VectorXcd v) { return {detail::normalize_projective(std::move(v))}; }
  double distance(const ProjPoint& o) const { return detail::line_distance(coords, o.coords); }
};

/// A point of the dual space P(W^v); the section sum_k coords[k] * theta_k.
struct Hyperplane {
  Eigen::VectorXcd coords;

  static Hyperplane from(Eigen::VectorXcd v) { return {detail::normalize_projective(std::move(v))}; }
  double distance(const Hyperplane& o) const { return detail::line_distance(coords, o.coords); }

  cd pairing(const ProjPoint& p) const { return (coords.array() * p.coords.array()).sum(); }
  bool contains(const ProjPoint& p, double tol) const { return std::abs(pairing(p)) < tol; }
};

/// Basis theta_0..theta_{n-1} of H^0(E, O(n x0)): theta functions with
/// characteristics k/n at modulus n*tau, shifted by s0/n.
class ThetaBasis {
 public:
  static int auto_truncation(int n, const Torus& E) {
    // smallest T with exp(-pi Im(tau) n T^2) < 1e-18
    const double need = 18.0 * std::log(10.0) / (kPi * E.tau().imag() * n);
    return std::max(1, static_cast<int>(std::ceil(std::sqrt(need))));
  }

  ThetaBasis(int n, Torus E, int truncation = 0, TorusPoint s0 = {})
      : n_(n), E_(E), truncation_(truncation), s0_(s0) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "embedding degree must be at least 3");
    if (truncation_ < 0) throw Error(ErrorKind::InvalidArgument, "truncation must be positive");
    if (truncation_ == 0) truncation_ = auto_truncation(n, E_);
    shift_ = E_.to_complex(s0_) / static_cast<double>(n_);
  }

  int n() const { return n_; }
  const Torus& torus() const { return E_; }
  int truncation() const { return truncation_; }
  TorusPoint offset() const { return s0_; }

  ThetaBasis with_offset(TorusPoint s0) const { return ThetaBasis(n_, E_, truncation_, s0); }

  /// Derivatives d^j theta_k / dx^j for j < orders, row j, column k, all
  /// multiplied by rho(x) = exp(-pi n (Im y)^2 / Im tau), y = x - s0/n.
  Eigen::MatrixXcd jets(cd x, int orders) const {
    const cd y = x - shift_;
    const cd tau = E_.tau();
    const double it = tau.imag();
    const double n = n_;
    const double center = -y.imag() / it;
    const double log_rho = -kPi * n * y.imag() * y.imag() / it;
    const cd I(0.0, 1.0);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(orders, n_);
    for (int k = 0; k < n_; ++k) {
      const double c = static_cast<double>(k) / n;
      const long mc = std::lround(center - c);
      for (long m = mc - truncation_ - 1; m <= mc + truncation_ + 1; ++m) {
        const double a = static_cast<double>(m) + c;
        const cd term = std::exp(kPi * I * tau * n * a * a + 2.0 * kPi * I * n * a * y + log_rho);
        const cd d = 2.0 * kPi * I * n * a;
        cd dp(1.0);
        for (int j = 0; j < orders; ++j) {
          J(j, k) += dp * term;
          dp *= d;
        }
      }
    }
    return J;
  }

  Eigen::VectorXcd values(cd x) const { return jets(x, 1).row(0).transpose(); }

  /// theta_k(x) exactly as the defining series (no rho factor).
  cd theta(int k, cd x) const {
    if (k < 0 || k >= n_) throw Error(ErrorKind::InvalidArgument, "theta index out of range");
    const cd y = x - shift_;
    const double log_rho = -kPi * n_ * y.imag() * y.imag() / E_.tau().imag();
    return jets(x, 1)(0, k) * std::exp(-log_rho);
  }

  /// (g, g') for g = sum_k H_k theta_k, rho-scaled.
  std::pair<cd, cd> section(const Eigen::VectorXcd& H, cd x) const {
    const Eigen::MatrixXcd J = jets(x, 2);
    return {(J.row(0) * H)(0), (J.row(1) * H)(0)};
  }

 private:
  int n_;
  Torus E_;
  int truncation_;
  TorusPoint s0_;
  cd shift_;
};

inline cd theta_basis_eval(int k, TorusPoint x, const ThetaBasis& B) {
  return B.theta(k, B.torus().to_complex(x));
}

inline ProjPoint embed(TorusPoint x, const ThetaBasis& B) {
  const Eigen::VectorXcd v = B.values(B.torus().to_complex(x));
  if (v.norm() < 1e-12)
    throw Error(ErrorKind::Truncation, "theta coordinates vanish simultaneously");
  return ProjPoint::from(v);
}

inline ProjPoint embed(cd x, const ThetaBasis& B) {
  const Eigen::VectorXcd v = B.values(x);
  if (v.norm() < 1e-12)
    throw Error(ErrorKind::Truncation, "theta coordinates vanish simultaneously");
  return ProjPoint::from(v);
}

/// Raw zeros of the section H, before any grouping into multiplicities.
inline ZeroSet section_roots(const Eigen::VectorXcd& H, const ThetaBasis& B,
                             const ZeroOptions& opt = {}) {
  if (H.size() != B.n() || H.norm() == 0.0)
    throw Error(ErrorKind::InvalidArgument, "hyperplane must have n nonzero coordinates");
  auto f = [&](cd x) { return B.section(H, x); };
  return find_zeros(B.torus(), f, B.n(), opt);
}

/// Offset s0 making every hyperplane section sum to 0 in E. Computed from the
/// zeros of one seeded random section of the unshifted basis.
inline TorusPoint calibrate_offset(const ThetaBasis& B, std::uint64_t seed = kCalibrationSeed) {
  const ThetaBasis raw = B.with_offset(TorusPoint{});
  Rng rng(seed);
  Eigen::VectorXcd H(B.n());
  for (int k = 0; k < B.n(); ++k) H(k) = rng.complex_normal();
  const ZeroSet zs = section_roots(H, raw);
  cd sum(0.0);
  for (const auto& r : zs.roots) sum += r.z;
  return B.torus().reduce(-sum);
}

inline ThetaBasis calibrated_basis(int n, const Torus& E, int truncation = 0,
                                   std::uint64_t seed = kCalibrationSeed) {
  const ThetaBasis raw(n, E, truncation);
  return raw.with_offset(calibrate_offset(raw, seed));
}

// --- Heisenberg group -------------------------------------------------------

struct HeisenbergPair {
  Eigen::MatrixXcd A;  // diag(1, zeta, ..., zeta^{n-1})
  Eigen::MatrixXcd B;  // (B v)_k = v_{k-1}
};

inline HeisenbergPair heisenberg_generators(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "Heisenberg generators need n >= 2");
  HeisenbergPair g{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
  for (int k = 0; k < n; ++k) {
    g.A(k, k) = std::polar(1.0, 2.0 * kPi * k / n);
    g.B(k, (k + n - 1) % n) = 1.0;
  }
  return g;
}

/// Dimension of {X : X M = M X for every M in gens}.
inline int commutant_dimension(const std::vector<Eigen::MatrixXcd>& gens) {
  const Eigen::Index n = gens.front().rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd S(static_cast<Eigen::Index>(gens.size()) * n * n, n * n);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const Eigen::MatrixXcd& M = gens[g];
    // vec(M X - X M) = (I (x) M - M^T (x) I) vec(X), column-major vec
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        S.block(static_cast<Eigen::Index>(g) * n * n + i * n, j * n, n, n) =
            (i == j ? M : Eigen::MatrixXcd::Zero(n, n)) - M(j, i) * I;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  return static_cast<int>(n * n) - rank;
}

/// Matrix word A^i B^{-j} realizing translation by xi = (i + j tau)/n on the
/// embedded curve: embed(x + xi) ~ M embed(x).
inline Eigen::MatrixXcd translation_matrix(int i, int j, int n) {
  const HeisenbergPair g = heisenberg_generators(n);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n);
  const int ii = ((i % n) + n) % n;
  const int jj = ((j % n) + n) % n;
  for (int t = 0; t < ii; ++t) M = g.A * M;
  const Eigen::MatrixXcd Binv = g.B.adjoint();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(n, n);
  for (int t = 0; t < jj; ++t) W = Binv * W;
  return M * W;
}

struct TorsionIndex {
  int i = 0;
  int j = 0;
};

inline TorsionIndex torsion_index(TorusPoint xi, int n, const Torus& E) {
  if (!E.is_zero(E.mul_int(n, xi)))
    throw Error(ErrorKind::InvalidArgument, "translation point is not n-torsion");
  const int i = static_cast<int>(std::lround(xi.a * n)) % n;
  const int j = static_cast<int>(std::lround(xi.b * n)) % n;
  return {i, j};
}

struct TranslationCheck {
  TorsionIndex word;
  double residual = 0.0;
  cd scalar{1.0, 0.0};  // ratio observed at the first sample; not contracted
};

inline TranslationCheck verify_translation_action(TorusPoint xi, const ThetaBasis& B,
                                                  int samples = 50, std::uint64_t seed = 17) {
  const Torus& E = B.torus();
  TranslationCheck out;
  out.word = torsion_index(xi, B.n(), E);
  const Eigen::MatrixXcd M = translation_matrix(out.word.i, out.word.j, B.n());
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const TorusPoint x = E.random_point(rng);
    const Eigen::VectorXcd lhs = B.values(E.to_complex(E.add(x, xi)));
    const Eigen::VectorXcd rhs = M * B.values(E.to_complex(x));
    out.residual = std::max(out.residual, detail::line_distance(lhs, rhs));
    if (s == 0) {
      Eigen::Index k = 0;
      rhs.cwiseAbs().maxCoeff(&k);
      out.scalar = lhs(k) / rhs(k);
    }
  }
  return out;
}

// --- Osculating hyperplanes -------------------------------------------------

inline constexpr double kOsculatingThreshold = 1e-9;

struct OsculatingResult {
  Hyperplane H;
  double conditioning = 0.0;  // sigma_min / sigma_max of the row-normalized jet matrix
};

inline double osculating_conditioning(cd x, const ThetaBasis& B, Eigen::VectorXcd* kernel) {
  Eigen::MatrixXcd J = B.jets(x, B.n());
  for (Eigen::Index j = 0; j < J.rows(); ++j) J.row(j).normalize();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // J H = 0 with H the dual coordinates: the last right singular vector
  if (kernel) *kernel = svd.matrixV().col(J.cols() - 1);
  return sv(sv.size() - 1) / sv(0);
}

/// Hyperplane meeting E only at x, with multiplicity n. Exists iff n x = 0 in
/// E for a calibrated basis.
inline OsculatingResult osculating_hyperplane(TorusPoint x, const ThetaBasis& B) {
  Eigen::VectorXcd v;
  const double cond = osculating_conditioning(B.torus().to_complex(x), B, &v);
  if (cond > kOsculatingThreshold)
    throw Error(ErrorKind::NotOsculating,
                "no hyperplane meets E with full multiplicity at this point");
  return {Hyperplane::from(v), cond};
}

}  // namespace bgdisc
