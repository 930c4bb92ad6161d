#pragma once

// Zeros of entire functions on a fundamental parallelogram of E, located by
// argument-principle subdivision.
//
// The callable f(x) returns (value, derivative) at x, both multiplied by the
// same positive real factor. Quasi-periodic theta sections are passed with the
// factor that makes their modulus doubly periodic, so one zero threshold fits
// the whole parallelogram.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "bgdisc/error.hpp"
#include "bgdisc/torus.hpp"

namespace bgdisc {

struct ZeroOptions {
  double min_box = 2e-3;      // lattice side below which clusters are resolved by moments
  double hit_dist = 1e-10;    // |f/f'| below this on a contour counts as a zero on it
  int max_retries = 12;
  int max_newton = 40;
  int circle_points = 96;
  std::uint64_t seed = 0x5eed;
};

struct Root {
  cd z;             // complex representative, not reduced
  int cluster = 0;  // roots resolved together share an id
  int cluster_size = 1;
};

struct ZeroSet {
  std::vector<Root> roots;
  double residual = 0.0;  // max relative |f| over the roots
  double scale = 0.0;     // typical |f| on the domain boundary
};

namespace detail {

struct Box {
  double a0, a1, b0, b1;
  int count;
};

template <class F>
class ZeroFinder {
 public:
  ZeroFinder(const Torus& E, F& f, int expected, const ZeroOptions& opt)
      : E_(E), f_(f), expected_(expected), opt_(opt), rng_(opt.seed) {}

  ZeroSet run() {
    for (int attempt = 0; attempt < opt_.max_retries; ++attempt) {
      origin_ = -0.1 * rng_.uniform() - 0.1 * rng_.uniform() * E_.tau();
      roots_.clear();
      next_cluster_ = 0;
      scale_ = boundary_scale();
      bool hit = false;
      const int total = count({0.0, 1.0, 0.0, 1.0, 0}, hit);
      if (hit) continue;
      if (total != expected_) {
        last_total_ = total;
        continue;
      }
      if (!process({0.0, 1.0, 0.0, 1.0, total})) continue;
      if (static_cast<int>(roots_.size()) != expected_) continue;
      ZeroSet out;
      out.roots = roots_;
      out.scale = scale_;
      for (const auto& r : roots_)
        out.residual = std::max(out.residual, std::abs(f_(r.z).first) / scale_);
      return out;
    }
    if (last_total_ >= 0 && last_total_ != expected_)
      throw Error(ErrorKind::Truncation,
                  "winding number " + std::to_string(last_total_) + " differs from expected " +
                      std::to_string(expected_));
    throw Error(ErrorKind::RootIsolation, "zero isolation failed after retries");
  }

 private:
  cd point(double a, double b) const { return origin_ + a + b * E_.tau(); }

  // |f/f'| estimates the distance to the nearest zero, for any multiplicity
  bool near_zero(const std::pair<cd, cd>& v) const {
    return std::abs(v.first) == 0.0 || std::abs(v.first) < opt_.hit_dist * std::abs(v.second);
  }

  double boundary_scale() {
    double s = 0.0;
    constexpr int kN = 64;
    for (int i = 0; i < kN; ++i) {
      const double t = static_cast<double>(i) / kN;
      s = std::max({s, std::abs(f_(point(t, 0.0)).first), std::abs(f_(point(0.0, t)).first),
                    std::abs(f_(point(t, 0.5)).first), std::abs(f_(point(0.5, t)).first)});
    }
    return s > 0.0 ? s : 1.0;
  }

  // Accumulated change of arg f along the segment [p, q].
  double segment_arg(cd p, std::pair<cd, cd> fp, cd q, std::pair<cd, cd> fq, int depth,
                     bool& hit) {
    if (hit) return 0.0;
    const double d = std::arg(fq.first / fp.first);
    const double len = std::abs(q - p);
    const double rate =
        std::max(std::abs(fp.second / fp.first), std::abs(fq.second / fq.first)) * len;
    if ((std::abs(d) < 0.4 && rate < 0.4) || depth > 48) {
      if (depth > 48) hit = true;
      return d;
    }
    const cd m = 0.5 * (p + q);
    const auto fm = f_(m);
    if (near_zero(fm)) {
      hit = true;
      return 0.0;
    }
    return segment_arg(p, fp, m, fm, depth + 1, hit) + segment_arg(m, fm, q, fq, depth + 1, hit);
  }

  double edge_arg(cd p, cd q, bool& hit) {
    constexpr int kSamples = 8;
    double total = 0.0;
    cd prev = p;
    auto fprev = f_(p);
    if (near_zero(fprev)) {
      hit = true;
      return 0.0;
    }
    for (int i = 1; i <= kSamples; ++i) {
      const cd cur = p + (q - p) * (static_cast<double>(i) / kSamples);
      const auto fcur = f_(cur);
      if (near_zero(fcur)) {
        hit = true;
        return 0.0;
      }
      total += segment_arg(prev, fprev, cur, fcur, 0, hit);
      if (hit) return 0.0;
      prev = cur;
      fprev = fcur;
    }
    return total;
  }

  int count(const Box& b, bool& hit) {
    const cd c00 = point(b.a0, b.b0), c10 = point(b.a1, b.b0);
    const cd c11 = point(b.a1, b.b1), c01 = point(b.a0, b.b1);
    const double w = edge_arg(c00, c10, hit) + edge_arg(c10, c11, hit) +
                     edge_arg(c11, c01, hit) + edge_arg(c01, c00, hit);
    if (hit) return -1;
    const double turns = w / (2.0 * kPi);
    if (std::abs(turns - std::round(turns)) > 0.1) {
      hit = true;
      return -1;
    }
    return static_cast<int>(std::lround(turns));
  }

  bool newton(cd& z, const Box& b) {
    for (int it = 0; it < opt_.max_newton; ++it) {
      const auto v = f_(z);
      if (v.second == cd(0.0)) return false;
      const cd step = v.first / v.second;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    // inside the parallelogram, in lattice coordinates
    const cd rel = z - origin_;
    const double bb = rel.imag() / E_.tau().imag();
    const double aa = rel.real() - bb * E_.tau().real();
    constexpr double kMargin = 1e-12;
    if (aa < b.a0 - kMargin || aa > b.a1 + kMargin || bb < b.b0 - kMargin || bb > b.b1 + kMargin)
      return false;
    return std::abs(f_(z).first) < 1e-8 * scale_;
  }

  bool resolve_cluster(const Box& b) {
    const cd center = point(0.5 * (b.a0 + b.a1), 0.5 * (b.b0 + b.b1));
    double radius = 0.0;
    for (cd c : {point(b.a0, b.b0), point(b.a1, b.b0), point(b.a1, b.b1), point(b.a0, b.b1)})
      radius = std::max(radius, std::abs(c - center));
    radius *= 1.15;
    const int k = b.count;
    const int N = opt_.circle_points;
    std::vector<cd> moments(static_cast<std::size_t>(k) + 1, cd(0.0));
    for (int j = 0; j < N; ++j) {
      const cd u = std::polar(1.0, 2.0 * kPi * j / N);
      const cd z = center + radius * u;
      const auto v = f_(z);
      if (near_zero(v)) return false;
      const cd w = v.second / v.first * (z - center) / static_cast<double>(N);
      cd up(1.0);
      for (int p = 0; p <= k; ++p) {
        moments[static_cast<std::size_t>(p)] += up * w;
        up *= u;
      }
    }
    if (std::abs(moments[0] - static_cast<double>(k)) > 0.05) return false;
    // Newton identities: power sums -> elementary symmetric functions
    std::vector<cd> e(static_cast<std::size_t>(k) + 1, cd(0.0));
    e[0] = 1.0;
    for (int m = 1; m <= k; ++m) {
      cd acc(0.0);
      for (int i = 1; i <= m; ++i) {
        const double sign = (i % 2 == 1) ? 1.0 : -1.0;
        acc += sign * e[static_cast<std::size_t>(m - i)] * moments[static_cast<std::size_t>(i)];
      }
      e[static_cast<std::size_t>(m)] = acc / static_cast<double>(m);
    }
    std::vector<cd> local;
    if (k == 1) {
      local.push_back(e[1]);
    } else {
      // monic u^k - e1 u^{k-1} + e2 u^{k-2} - ...; companion matrix
      Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(k, k);
      for (int i = 1; i < k; ++i) C(i, i - 1) = 1.0;
      for (int i = 0; i < k; ++i) {
        const int deg = k - 1 - i;  // coefficient of u^deg is (-1)^{k-deg} e_{k-deg}
        const int idx = k - deg;
        const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
        C(deg, k - 1) = -sign * e[static_cast<std::size_t>(idx)];
      }
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(C, false);
      for (int i = 0; i < k; ++i) local.push_back(ces.eigenvalues()(i));
    }
    const int id = next_cluster_++;
    for (std::size_t i = 0; i < local.size(); ++i) {
      cd z = center + radius * local[i];
      double sep = 2.0;
      for (std::size_t j = 0; j < local.size(); ++j)
        if (j != i) sep = std::min(sep, std::abs(local[i] - local[j]));
      if (sep > 0.05) {
        cd polished = z;
        for (int it = 0; it < 6; ++it) {
          const auto v = f_(polished);
          if (v.second == cd(0.0)) break;
          polished -= v.first / v.second;
        }
        if (std::abs(polished - z) < 0.02 * radius * sep) z = polished;
      }
      roots_.push_back(Root{z, id, k});
    }
    return true;
  }

  bool process(const Box& root_box) {
    std::vector<Box> stack{root_box};
    while (!stack.empty()) {
      const Box b = stack.back();
      stack.pop_back();
      if (b.count <= 0) continue;
      const double side = std::max(b.a1 - b.a0, b.b1 - b.b0);
      if (b.count == 1 && side < 0.26) {
        cd z = point(0.5 * (b.a0 + b.a1), 0.5 * (b.b0 + b.b1));
        if (newton(z, b)) {
          roots_.push_back(Root{z, next_cluster_++, 1});
          continue;
        }
      }
      if (side < opt_.min_box) {
        if (resolve_cluster(b)) continue;
        if (side < 1e-9) return false;
      }
      bool split = false;
      for (int attempt = 0; attempt < opt_.max_retries && !split; ++attempt) {
        const double sa = 0.5 + (attempt == 0 ? 0.0137 : rng_.uniform(-0.1, 0.1));
        const double sb = 0.5 + (attempt == 0 ? -0.0071 : rng_.uniform(-0.1, 0.1));
        const double am = b.a0 + sa * (b.a1 - b.a0);
        const double bm = b.b0 + sb * (b.b1 - b.b0);
        Box kids[4] = {{b.a0, am, b.b0, bm, 0},
                       {am, b.a1, b.b0, bm, 0},
                       {b.a0, am, bm, b.b1, 0},
                       {am, b.a1, bm, b.b1, 0}};
        bool hit = false;
        int sum = 0;
        for (auto& kid : kids) {
          kid.count = count(kid, hit);
          if (hit) break;
          sum += kid.count;
        }
        if (hit || sum != b.count) continue;
        for (const auto& kid : kids) stack.push_back(kid);
        split = true;
      }
      if (!split) return false;
    }
    return true;
  }

  const Torus& E_;
  F& f_;
  int expected_;
  ZeroOptions opt_;
  Rng rng_;
  cd origin_{};
  double scale_ = 1.0;
  int next_cluster_ = 0;
  int last_total_ = -1;
  std::vector<Root> roots_;
};

}  // namespace detail

/// Zeros (with multiplicity) of f inside a fundamental parallelogram of E.
/// `expected` is the winding number the quasi-periodicity of f forces.
template <class F>
ZeroSet find_zeros(const Torus& E, F&& f, int expected, const ZeroOptions& opt = {}) {
  detail::ZeroFinder<std::remove_reference_t<F>> finder(E, f, expected, opt);
  return finder.run();
}

}  // namespace bgdisc
