// SPDX-License-Identifier: Apache-2.0
//
// Real orthonormal spherical harmonics on the sphere: Legendre polynomials,
// normalized associated Legendre functions, pointwise harmonic evaluation,
// coefficient synthesis, and upward (exterior) continuation between shells.
//
// Conventions (fixed for the whole library):
//  * Harmonics are real, fully normalized, Condon-Shortley-free:
//      integral over the unit sphere of Y_{n,j} * Y_{m,i} = delta_nm delta_ji.
//  * Order index j = 1..2n+1 maps to trigonometric orders as
//      j = 1      ->  m = 0
//      j = 2m     ->  cos(m phi) term,  m = 1..n
//      j = 2m+1   ->  sin(m phi) term,  m = 1..n
//  * A coefficient set anchored at radius s represents the exterior harmonic
//    function u with u(x) = sum c_{n,j} (s/|x|)^(n+1) (1/s) Y_{n,j}(x/|x|),
//    i.e. the {(1/s) Y_{n,j}} orthonormal basis of L2 on the sphere of
//    radius s, so the Euclidean norm of the coefficients equals the L2 norm.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace capharm {

inline constexpr double four_pi = 4.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

// Point on the unit sphere, stored Cartesian.
struct UnitDirection {
  double x = 0.0, y = 0.0, z = 1.0;

  static UnitDirection from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
  }

  // Normalizes an arbitrary nonzero vector.
  static UnitDirection from_vector(double vx, double vy, double vz) {
    const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
    if (!(n > 0.0) || !std::isfinite(n))
      throw std::domain_error("UnitDirection: zero or non-finite vector");
    return {vx / n, vy / n, vz / n};
  }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double cos_theta() const { return z; }
  double theta() const { return std::acos(std::clamp(z, -1.0, 1.0)); }
  double phi() const {
    double p = std::atan2(y, x);
    if (p < 0.0) p += 2.0 * std::numbers::pi;
    return p;
  }
  double dot(const UnitDirection& o) const { return x * o.x + y * o.y + z * o.z; }
};

// ---------------------------------------------------------------------------
// Legendre polynomials and normalized associated functions
// ---------------------------------------------------------------------------

// Legendre polynomial P_n(t), P_n(1) = 1, by the three-term recurrence.
inline double legendre_p(int n, double t) {
  if (n < 0) throw std::domain_error("legendre_p: negative degree");
  if (std::abs(t) > 1.0 + 1e-12)
    throw std::domain_error("legendre_p: |t| > 1, t = " + std::to_string(t));
  t = std::clamp(t, -1.0, 1.0);
  if (n == 0) return 1.0;
  double pm1 = 1.0, p = t;
  for (int k = 2; k <= n; ++k) {
    const double pn = ((2.0 * k - 1.0) * t * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pn;
  }
  return p;
}

namespace detail {

// Scaled associated Legendre value
//   K(n,m;t) = sqrt((2n+1)/(4 pi) * (n-m)!/(n+m)!) * P_nm(t),   no CS phase,
// computed by the normalized forward-column recurrence (stable to n ~ 10^3).
// Y_{n,1} = K(n,0);  Y_{n,2m} = sqrt2 K(n,m) cos(m phi);  2m+1 -> sin.
inline void scaled_assoc_column(int m, int degree, double t, double* out) {
  // out[i] = K(m+i, m; t), i = 0..degree-m
  const double s = std::sqrt(std::max(0.0, (1.0 - t) * (1.0 + t)));
  double kmm = 1.0 / std::sqrt(four_pi);
  for (int mu = 1; mu <= m; ++mu)
    kmm *= std::sqrt((2.0 * mu + 1.0) / (2.0 * mu)) * s;
  out[0] = kmm;
  if (degree == m) return;
  out[1] = std::sqrt(2.0 * m + 3.0) * t * kmm;
  for (int n = m + 2; n <= degree; ++n) {
    const double f = (2.0 * n + 1.0) / ((double)(n - m) * (n + m));
    const double a = std::sqrt(f * (2.0 * n - 1.0));
    const double b = std::sqrt(f * (n - m - 1.0) * (n + m - 1.0) / (2.0 * n - 3.0));
    out[n - m] = a * t * out[n - m - 1] - b * out[n - m - 2];
  }
}

}  // namespace detail

// Packed table of K(n,m) values at one t, m-major so each recurrence column
// is contiguous. Reusable buffer: compute() does not shrink capacity.
class AssocLegendreTable {
 public:
  void compute(int degree, double t) {
    if (degree < 0) throw std::domain_error("AssocLegendreTable: negative degree");
    degree_ = degree;
    val_.resize(size(degree));
    for (int m = 0; m <= degree; ++m)
      detail::scaled_assoc_column(m, degree, t, val_.data() + offset(m));
  }

  int degree() const { return degree_; }
  double operator()(int n, int m) const { return val_[offset(m) + (n - m)]; }
  const double* column(int m) const { return val_.data() + offset(m); }

  static std::size_t size(int degree) {
    return static_cast<std::size_t>(degree + 1) * (degree + 2) / 2;
  }

 private:
  std::size_t offset(int m) const {
    return static_cast<std::size_t>(m) * (2 * degree_ + 3 - m) / 2;
  }
  int degree_ = -1;
  std::vector<double> val_;
};

// ---------------------------------------------------------------------------
// Harmonic evaluation
// ---------------------------------------------------------------------------

inline void check_order_index(int n, int j) {
  if (n < 0 || j < 1 || j > 2 * n + 1)
    throw std::invalid_argument("harmonic order index out of range: n = " +
                                std::to_string(n) + ", j = " + std::to_string(j));
}

// Trig order of the j-th harmonic of a degree, and whether it is a sine term.
inline int order_of(int j) { return j / 2; }
inline bool is_sine(int j) { return j > 1 && (j % 2 == 1); }
inline int index_of_order(int m, bool sine) { return m == 0 ? 1 : (sine ? 2 * m + 1 : 2 * m); }

// Real fully normalized spherical harmonic Y_{n,j} at a unit direction.
inline double spherical_harmonic(int n, int j, const UnitDirection& dir) {
  check_order_index(n, j);
  const int m = order_of(j);
  std::vector<double> col(static_cast<std::size_t>(n - m + 1));
  detail::scaled_assoc_column(m, n, dir.cos_theta(), col.data());
  const double k = col[n - m];
  if (m == 0) return k;
  const double arg = m * dir.phi();
  return std::numbers::sqrt2 * k * (is_sine(j) ? std::sin(arg) : std::cos(arg));
}

// ---------------------------------------------------------------------------
// Coefficient sets
// ---------------------------------------------------------------------------

class SphCoeffs {
 public:
  SphCoeffs(int degree_max, double anchor_radius)
      : degree_max_(degree_max),
        anchor_radius_(anchor_radius),
        c_(static_cast<std::size_t>(degree_max + 1) * (degree_max + 1), 0.0) {
    if (degree_max < 0) throw std::invalid_argument("SphCoeffs: negative degree");
    if (!(anchor_radius > 0.0)) throw std::invalid_argument("SphCoeffs: anchor radius must be positive");
  }

  int degree_max() const { return degree_max_; }
  double anchor_radius() const { return anchor_radius_; }

  double at(int n, int j) const { return c_[index(n, j)]; }
  double& at(int n, int j) { return c_[index(n, j)]; }

  const std::vector<double>& raw() const { return c_; }
  std::vector<double>& raw() { return c_; }

  // Euclidean coefficient norm = L2 norm on the anchor sphere (Parseval).
  double coeff_norm() const {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return std::sqrt(s);
  }

  std::size_t index(int n, int j) const {
    check_order_index(n, j);
    if (n > degree_max_) throw std::invalid_argument("SphCoeffs: degree beyond degree_max");
    return static_cast<std::size_t>(n) * n + (j - 1);
  }

 private:
  int degree_max_;
  double anchor_radius_;
  std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// Synthesis and continuation
// ---------------------------------------------------------------------------

namespace detail {

// Radial factors f_n = (s/rho)^(n+1) / s for evaluation at radius rho.
inline std::vector<double> radial_factors(double anchor, double eval_radius, int degree) {
  if (eval_radius < anchor * (1.0 - 1e-12))
    throw std::invalid_argument("synthesize: evaluation radius below anchor radius");
  std::vector<double> f(static_cast<std::size_t>(degree + 1));
  const double ratio = anchor / eval_radius;
  double cur = 1.0 / eval_radius;  // (s/rho)^1 / s
  for (int n = 0; n <= degree; ++n) {
    f[n] = cur;
    cur *= ratio;
  }
  return f;
}

}  // namespace detail

// Evaluate the exterior harmonic extension at eval_radius * dir for each dir.
inline std::vector<double> synthesize(const SphCoeffs& c,
                                      const std::vector<UnitDirection>& dirs,
                                      double eval_radius) {
  const int L = c.degree_max();
  const auto f = detail::radial_factors(c.anchor_radius(), eval_radius, L);
  std::vector<double> out(dirs.size(), 0.0);
  AssocLegendreTable tab;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const UnitDirection& d = dirs[i];
    tab.compute(L, d.cos_theta());
    const double phi = d.phi();
    double acc = 0.0;
    for (int n = 0; n <= L; ++n) acc += c.at(n, 1) * tab(n, 0) * f[n];
    for (int m = 1; m <= L; ++m) {
      const double cm = std::cos(m * phi), sm = std::sin(m * phi);
      double am = 0.0, bm = 0.0;
      for (int n = m; n <= L; ++n) {
        const double k = tab(n, m);
        am += c.at(n, 2 * m) * k * f[n];
        bm += c.at(n, 2 * m + 1) * k * f[n];
      }
      acc += std::numbers::sqrt2 * (am * cm + bm * sm);
    }
    out[i] = acc;
  }
  return out;
}

inline double synthesize_at(const SphCoeffs& c, const UnitDirection& dir, double eval_radius) {
  return synthesize(c, {dir}, eval_radius)[0];
}

// Re-anchor the same exterior harmonic function at a larger radius R:
// coefficients pick up the damping (s/R)^n.
inline SphCoeffs upward_continue(const SphCoeffs& c, double target_radius) {
  const double s = c.anchor_radius();
  if (target_radius < s * (1.0 - 1e-12))
    throw std::invalid_argument("upward_continue: target radius below anchor radius");
  SphCoeffs out(c.degree_max(), target_radius);
  const double ratio = s / target_radius;
  double damp = 1.0;
  for (int n = 0; n <= c.degree_max(); ++n) {
    for (int j = 1; j <= 2 * n + 1; ++j) out.at(n, j) = c.at(n, j) * damp;
    damp *= ratio;
  }
  return out;
}

}  // namespace capharm
