// SPDX-License-Identifier: Apache-2.0
//
// Positive-weight quadrature rules on the full sphere and on spherical caps
// with prescribed polynomial exactness. All generated rules are products of
// a colatitude rule in t = cos(theta) with equispaced longitudes; the flat
// node list is ordered colatitude-major (theta ascending, i.e. from the cap
// center / north pole outward), longitude-minor with phi_k = 2 pi k / n_phi.
#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capharm/csv.hpp"
#include "capharm/errors.hpp"
#include "capharm/sphharm.hpp"

namespace capharm {

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

// Spherical cap around the north pole: { x on the sphere of radius r :
// 1 - x.(0,0,1)/|x| < rho }. rho = 2 is the degenerate full-sphere cap
// (empty complement), used by the kernel localization term.
struct CapGeometry {
  double radius = 1.0;
  double rho = 1.0;

  CapGeometry(double radius_km, double rho_) : radius(radius_km), rho(rho_) {
    if (!(radius > 0.0)) throw config_error("CapGeometry: radius must be positive");
    if (!(rho > 0.0) || rho > 2.0) throw config_error("CapGeometry: rho must be in (0, 2]");
  }

  double t_min() const { return 1.0 - rho; }
  double area() const { return 2.0 * std::numbers::pi * radius * radius * rho; }
};

enum class RuleDomain { full_sphere, cap };
enum class SphereGridStyle { equiangular, gauss_legendre };

inline SphereGridStyle sphere_style_from_string(const std::string& s) {
  if (s == "equiangular") return SphereGridStyle::equiangular;
  if (s == "gauss_legendre") return SphereGridStyle::gauss_legendre;
  throw config_error("unknown sphere grid style: " + s);
}

inline std::string to_string(SphereGridStyle s) {
  return s == SphereGridStyle::equiangular ? "equiangular" : "gauss_legendre";
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

struct QuadratureRule {
  RuleDomain domain = RuleDomain::full_sphere;
  double radius = 1.0;                 // sphere radius (km); cap radius for caps
  std::optional<CapGeometry> cap;      // set when domain == cap
  int exactness_degree = 0;

  // flat nodes, length M = t_nodes.size() * n_phi, index = q * n_phi + k
  std::vector<double> theta, phi, weight;

  // product structure: t_nodes descending in t (theta ascending); t_weights
  // carry the radius^2 surface factor; flat weight = t_weight * phi_weight.
  std::vector<double> t_nodes, t_weights;
  int n_phi = 0;
  double phi_weight = 0.0;

  std::size_t size() const { return weight.size(); }

  double surface_area() const {
    return domain == RuleDomain::cap ? cap->area()
                                     : 4.0 * std::numbers::pi * radius * radius;
  }

  double weight_sum() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
  }
};

using RulePtr = std::shared_ptr<const QuadratureRule>;

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], nodes ascending. Newton iteration
// on the three-term recurrence; fine up to a few thousand nodes.
struct GaussLegendre {
  std::vector<double> nodes, weights;
};

inline GaussLegendre gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussLegendre out;
  out.nodes.resize(q);
  out.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    // descending initial guesses; stored ascending below
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double pm1 = 1.0, p = x;
      for (int k = 2; k <= q; ++k) {
        const double pn = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
        pm1 = p;
        p = pn;
      }
      dp = q * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // one clean evaluation of the derivative at the converged node
    {
      double pm1 = 1.0, p = x;
      for (int k = 2; k <= q; ++k) {
        const double pn = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
        pm1 = p;
        p = pn;
      }
      dp = q * (x * p - pm1) / (x * x - 1.0);
    }
    out.nodes[q - 1 - i] = x;
    out.weights[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return out;
}

// Colatitude weights for the offset equiangular grid theta_j =
// pi (2j+1) / (4B), j = 0..2B-1: the closed-form sine-sum weights, exact for
// polynomials in cos(theta) of degree <= 2B-1, all positive.
inline std::vector<double> equiangular_t_weights(int bandwidth) {
  const int rings = 2 * bandwidth;
  std::vector<double> w(rings);
  for (int j = 0; j < rings; ++j) {
    const double theta = std::numbers::pi * (2.0 * j + 1.0) / (2.0 * rings);
    double s = 0.0;
    for (int k = 0; k < bandwidth; ++k)
      s += std::sin((2.0 * k + 1.0) * theta) / (2.0 * k + 1.0);
    w[j] = (2.0 / bandwidth) * std::sin(theta) * s;
  }
  return w;
}

inline void fill_flat_nodes(QuadratureRule& rule) {
  const std::size_t nt = rule.t_nodes.size();
  const std::size_t np = static_cast<std::size_t>(rule.n_phi);
  rule.theta.resize(nt * np);
  rule.phi.resize(nt * np);
  rule.weight.resize(nt * np);
  for (std::size_t q = 0; q < nt; ++q) {
    const double th = std::acos(std::clamp(rule.t_nodes[q], -1.0, 1.0));
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t i = q * np + k;
      rule.theta[i] = th;
      rule.phi[i] = 2.0 * std::numbers::pi * k / rule.n_phi;
      rule.weight[i] = rule.t_weights[q] * rule.phi_weight;
    }
  }
}

}  // namespace detail

// Full-sphere rule of polynomial exactness 2B-1 on the sphere of radius R.
inline RulePtr full_sphere_rule(int bandwidth, double radius,
                                SphereGridStyle style = SphereGridStyle::equiangular) {
  if (bandwidth < 1) throw config_error("full_sphere_rule: bandwidth must be >= 1");
  if (!(radius > 0.0)) throw config_error("full_sphere_rule: radius must be positive");
  auto rule = std::make_shared<QuadratureRule>();
  rule->domain = RuleDomain::full_sphere;
  rule->radius = radius;
  rule->exactness_degree = 2 * bandwidth - 1;
  rule->n_phi = 2 * bandwidth;
  rule->phi_weight = 2.0 * std::numbers::pi / rule->n_phi;
  const double r2 = radius * radius;
  if (style == SphereGridStyle::equiangular) {
    const auto tw = detail::equiangular_t_weights(bandwidth);
    const int rings = 2 * bandwidth;
    rule->t_nodes.resize(rings);
    rule->t_weights.resize(rings);
    for (int j = 0; j < rings; ++j) {
      const double theta = std::numbers::pi * (2.0 * j + 1.0) / (2.0 * rings);
      rule->t_nodes[j] = std::cos(theta);  // theta ascending -> t descending
      rule->t_weights[j] = tw[j] * r2;
    }
  } else {
    const auto gl = detail::gauss_legendre(bandwidth);
    rule->t_nodes.resize(bandwidth);
    rule->t_weights.resize(bandwidth);
    for (int i = 0; i < bandwidth; ++i) {  // reverse: descending t
      rule->t_nodes[i] = gl.nodes[bandwidth - 1 - i];
      rule->t_weights[i] = gl.weights[bandwidth - 1 - i] * r2;
    }
  }
  detail::fill_flat_nodes(*rule);
  return rule;
}

// Cap rule of polynomial exactness d: ceil((d+1)/2) Gauss-Legendre nodes in
// t on [t_min, 1] times d+1 equispaced longitudes. Longitude sums cancel or
// exactly integrate all trigonometric orders <= d, and the surviving
// t-integrand of a product of harmonics with degree sum <= d is a polynomial
// of degree <= d, so products Y_{n,j} Y_{m,i} with n+m <= d integrate exactly.
inline RulePtr cap_rule(const CapGeometry& cap, int exactness) {
  if (exactness < 0) throw config_error("cap_rule: exactness must be >= 0");
  auto rule = std::make_shared<QuadratureRule>();
  rule->domain = RuleDomain::cap;
  rule->radius = cap.radius;
  rule->cap = cap;
  rule->exactness_degree = exactness;
  rule->n_phi = exactness + 1;
  rule->phi_weight = 2.0 * std::numbers::pi / rule->n_phi;
  const int q = (exactness + 2) / 2;  // ceil((d+1)/2)
  const auto gl = detail::gauss_legendre(q);
  const double c = (1.0 + cap.t_min()) / 2.0;
  const double h = (1.0 - cap.t_min()) / 2.0;
  const double r2 = cap.radius * cap.radius;
  rule->t_nodes.resize(q);
  rule->t_weights.resize(q);
  for (int i = 0; i < q; ++i) {  // ascending gl -> descending t
    rule->t_nodes[i] = c + h * gl.nodes[q - 1 - i];
    rule->t_weights[i] = gl.weights[q - 1 - i] * h * r2;
  }
  detail::fill_flat_nodes(*rule);
  return rule;
}

inline UnitDirection rule_direction(const QuadratureRule& rule, std::size_t i) {
  return UnitDirection::from_angles(rule.theta[i], rule.phi[i]);
}

// ---------------------------------------------------------------------------
// Exactness certification
// ---------------------------------------------------------------------------

namespace detail {

// Longitude Gram of the scaled trig factors (1, sqrt2 cos m phi,
// sqrt2 sin m phi) under an equispaced longitude sum; aliasing of a
// too-coarse longitude count shows up here.
struct TrigGram {
  int max_order = 0;
  std::vector<double> cc, cs, sc, ss;  // (max_order+1)^2 each, row-major

  double get(int m1, bool s1, int m2, bool s2) const {
    const std::size_t i = static_cast<std::size_t>(m1) * (max_order + 1) + m2;
    return s1 ? (s2 ? ss[i] : sc[i]) : (s2 ? cs[i] : cc[i]);
  }
};

inline TrigGram trig_gram(const QuadratureRule& rule, int max_order) {
  TrigGram g;
  g.max_order = max_order;
  const std::size_t dim = static_cast<std::size_t>(max_order + 1) * (max_order + 1);
  g.cc.assign(dim, 0.0);
  g.cs.assign(dim, 0.0);
  g.sc.assign(dim, 0.0);
  g.ss.assign(dim, 0.0);
  std::vector<double> cosv(static_cast<std::size_t>(max_order + 1));
  std::vector<double> sinv(static_cast<std::size_t>(max_order + 1));
  for (int k = 0; k < rule.n_phi; ++k) {
    const double ph = 2.0 * std::numbers::pi * k / rule.n_phi;
    for (int m = 0; m <= max_order; ++m) {
      const double scale = m == 0 ? 1.0 : std::numbers::sqrt2;
      cosv[m] = scale * std::cos(m * ph);
      sinv[m] = scale * std::sin(m * ph);
    }
    for (int m1 = 0; m1 <= max_order; ++m1) {
      for (int m2 = 0; m2 <= max_order; ++m2) {
        const std::size_t i = static_cast<std::size_t>(m1) * (max_order + 1) + m2;
        g.cc[i] += rule.phi_weight * cosv[m1] * cosv[m2];
        g.cs[i] += rule.phi_weight * cosv[m1] * sinv[m2];
        g.sc[i] += rule.phi_weight * sinv[m1] * cosv[m2];
        g.ss[i] += rule.phi_weight * sinv[m1] * sinv[m2];
      }
    }
  }
  return g;
}

// K(n,m) values for all n <= L at every colatitude node: K[q] is a packed
// AssocLegendreTable-style array. The weights used below fold in 1/radius^2
// so Grams refer to the L2-orthonormal basis (1/radius) Y.
inline std::vector<std::vector<double>> legendre_node_tables(const QuadratureRule& rule, int L) {
  std::vector<std::vector<double>> tabs(rule.t_nodes.size());
  AssocLegendreTable tab;
  for (std::size_t q = 0; q < rule.t_nodes.size(); ++q) {
    tab.compute(L, rule.t_nodes[q]);
    tabs[q].assign(tab.column(0), tab.column(0) + AssocLegendreTable::size(L));
  }
  return tabs;
}

inline std::size_t packed_offset(int L, int m) {
  return static_cast<std::size_t>(m) * (2 * L + 3 - m) / 2;
}

}  // namespace detail

// Maximum absolute defect, over all harmonic basis pairs of degree <= L,
// between the rule's discrete Gram (of the orthonormal basis (1/radius) Y)
// and the Gram from a same-family reference rule of exactness 4L. Zero up to
// rounding certifies the discrete inner product on V_L (the cond on the
// discretization); a positive value quantifies its violation.
inline double check_exactness(const QuadratureRule& rule, int L) {
  if (L < 0) throw std::invalid_argument("check_exactness: negative degree");
  RulePtr oracle;
  if (rule.domain == RuleDomain::cap) {
    oracle = cap_rule(*rule.cap, 4 * L);
  } else {
    // bandwidth 2L+1 gives exactness 4L+1 >= 4L
    oracle = full_sphere_rule(2 * L + 1, rule.radius, SphereGridStyle::gauss_legendre);
  }

  const auto lg1 = detail::trig_gram(rule, L);
  const auto lg2 = detail::trig_gram(*oracle, L);
  const auto k1 = detail::legendre_node_tables(rule, L);
  const auto k2 = detail::legendre_node_tables(*oracle, L);
  const double inv_r2 = 1.0 / (rule.radius * rule.radius);

  const std::size_t rows = AssocLegendreTable::size(L);
  double defect = 0.0;
  // strip over m1 to bound memory: t-Grams T[(n,m1),(m,m2)] for this m1
  std::vector<double> t1, t2;
  for (int m1 = 0; m1 <= L; ++m1) {
    const std::size_t off1 = detail::packed_offset(L, m1);
    const std::size_t rows1 = static_cast<std::size_t>(L - m1 + 1);
    t1.assign(rows1 * rows, 0.0);
    t2.assign(rows1 * rows, 0.0);
    for (std::size_t q = 0; q < k1.size(); ++q) {
      const double w = rule.t_weights[q] * inv_r2;
      const double* kq = k1[q].data();
      for (std::size_t a = 0; a < rows1; ++a) {
        const double ka = w * kq[off1 + a];
        double* row = t1.data() + a * rows;
        for (std::size_t b = 0; b < rows; ++b) row[b] += ka * kq[b];
      }
    }
    for (std::size_t q = 0; q < k2.size(); ++q) {
      const double w = oracle->t_weights[q] * inv_r2;
      const double* kq = k2[q].data();
      for (std::size_t a = 0; a < rows1; ++a) {
        const double ka = w * kq[off1 + a];
        double* row = t2.data() + a * rows;
        for (std::size_t b = 0; b < rows; ++b) row[b] += ka * kq[b];
      }
    }
    for (std::size_t a = 0; a < rows1; ++a) {
      for (int m2 = 0; m2 <= L; ++m2) {
        const std::size_t off2 = detail::packed_offset(L, m2);
        const std::size_t rows2 = static_cast<std::size_t>(L - m2 + 1);
        for (std::size_t b = 0; b < rows2; ++b) {
          const double ta = t1[a * rows + off2 + b];
          const double tb = t2[a * rows + off2 + b];
          // all sigma combinations sharing this t-factor
          for (int s1 = 0; s1 < (m1 == 0 ? 1 : 2); ++s1) {
            for (int s2 = 0; s2 < (m2 == 0 ? 1 : 2); ++s2) {
              const double d = std::abs(ta * lg1.get(m1, s1, m2, s2) -
                                        tb * lg2.get(m1, s1, m2, s2));
              if (d > defect) defect = d;
            }
          }
        }
      }
    }
  }
  return defect;
}

// Full-sphere sanity: max | Gram - I | over the basis of degree <= L.
inline double gram_identity_defect(const QuadratureRule& rule, int L) {
  if (rule.domain != RuleDomain::full_sphere)
    throw std::invalid_argument("gram_identity_defect: full-sphere rules only");
  const auto lg = detail::trig_gram(rule, L);
  const auto kt = detail::legendre_node_tables(rule, L);
  const double inv_r2 = 1.0 / (rule.radius * rule.radius);
  const std::size_t rows = AssocLegendreTable::size(L);
  double defect = 0.0;
  std::vector<double> t;
  for (int m1 = 0; m1 <= L; ++m1) {
    const std::size_t off1 = detail::packed_offset(L, m1);
    const std::size_t rows1 = static_cast<std::size_t>(L - m1 + 1);
    t.assign(rows1 * rows, 0.0);
    for (std::size_t q = 0; q < kt.size(); ++q) {
      const double w = rule.t_weights[q] * inv_r2;
      const double* kq = kt[q].data();
      for (std::size_t a = 0; a < rows1; ++a) {
        const double ka = w * kq[off1 + a];
        double* row = t.data() + a * rows;
        for (std::size_t b = 0; b < rows; ++b) row[b] += ka * kq[b];
      }
    }
    for (std::size_t a = 0; a < rows1; ++a) {
      const int n1 = m1 + static_cast<int>(a);
      for (int m2 = 0; m2 <= L; ++m2) {
        const std::size_t off2 = detail::packed_offset(L, m2);
        const std::size_t rows2 = static_cast<std::size_t>(L - m2 + 1);
        for (std::size_t b = 0; b < rows2; ++b) {
          const int n2 = m2 + static_cast<int>(b);
          const double tv = t[a * rows + off2 + b];
          for (int s1 = 0; s1 < (m1 == 0 ? 1 : 2); ++s1) {
            for (int s2 = 0; s2 < (m2 == 0 ? 1 : 2); ++s2) {
              const double expected =
                  (n1 == n2 && m1 == m2 && s1 == s2) ? 1.0 : 0.0;
              const double d = std::abs(tv * lg.get(m1, s1, m2, s2) - expected);
              if (d > defect) defect = d;
            }
          }
        }
      }
    }
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline void export_rule_csv(const QuadratureRule& rule, const std::string& path) {
  auto out = open_output(path);
  out << "theta,phi,weight\n";
  for (std::size_t i = 0; i < rule.size(); ++i)
    out << format_g17(rule.theta[i]) << ',' << format_g17(rule.phi[i]) << ','
        << format_g17(rule.weight[i]) << '\n';
}

}  // namespace capharm
