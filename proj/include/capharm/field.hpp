// SPDX-License-Identifier: Apache-2.0
//
// Discrete fields: samples of a function at the nodes of a quadrature rule
// (the discretization operator), the weighted discrete inner product, exact
// relative-level Gaussian noise, and harmonic analysis moments on a rule.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capharm/csv.hpp"
#include "capharm/errors.hpp"
#include "capharm/quadrature.hpp"
#include "capharm/rng.hpp"
#include "capharm/sphharm.hpp"

namespace capharm {

struct DiscreteField {
  RulePtr rule;
  std::vector<double> values;
};

struct NoiseSpec {
  double epsilon_rel = 0.0;  // target relative perturbation in the weighted norm
  std::uint64_t seed = 0;    // gaussian-iid per node
};

inline void require_same_rule(const DiscreteField& a, const DiscreteField& b) {
  if (a.rule.get() != b.rule.get())
    throw std::runtime_error("discrete fields live on different quadrature rules");
}

// Weighted inner product sum_i w_i v_i w2_i; equals the L2 inner product on
// the rule's domain for integrands the rule integrates exactly.
inline double discrete_inner(const DiscreteField& v, const DiscreteField& w) {
  require_same_rule(v, w);
  const auto& wt = v.rule->weight;
  double s = 0.0;
  for (std::size_t i = 0; i < wt.size(); ++i) s += wt[i] * v.values[i] * w.values[i];
  return s;
}

inline double weighted_norm(const DiscreteField& v) {
  return std::sqrt(std::max(0.0, discrete_inner(v, v)));
}

namespace detail {

// cos(m phi_k), sin(m phi_k) tables for a rule's longitudes, m = 0..L.
struct TrigTable {
  int max_order = 0, n_phi = 0;
  std::vector<double> c, s;  // index k * (max_order+1) + m
  double cosv(int k, int m) const { return c[static_cast<std::size_t>(k) * (max_order + 1) + m]; }
  double sinv(int k, int m) const { return s[static_cast<std::size_t>(k) * (max_order + 1) + m]; }
};

inline TrigTable trig_table(const QuadratureRule& rule, int max_order) {
  TrigTable t;
  t.max_order = max_order;
  t.n_phi = rule.n_phi;
  t.c.resize(static_cast<std::size_t>(rule.n_phi) * (max_order + 1));
  t.s.resize(t.c.size());
  for (int k = 0; k < rule.n_phi; ++k) {
    const double ph = 2.0 * std::numbers::pi * k / rule.n_phi;
    for (int m = 0; m <= max_order; ++m) {
      t.c[static_cast<std::size_t>(k) * (max_order + 1) + m] = std::cos(m * ph);
      t.s[static_cast<std::size_t>(k) * (max_order + 1) + m] = std::sin(m * ph);
    }
  }
  return t;
}

}  // namespace detail

// Pointwise evaluation of the (upward-continued) expansion at every rule
// node: the discretization operator for cap rules. Uses the product grid:
// one Legendre table per colatitude ring, then the longitude trig sum.
inline DiscreteField sample(const SphCoeffs& c, RulePtr rule) {
  const int L = c.degree_max();
  const auto f = detail::radial_factors(c.anchor_radius(), rule->radius, L);
  const auto trig = detail::trig_table(*rule, L);
  DiscreteField out{rule, std::vector<double>(rule->size(), 0.0)};
  AssocLegendreTable tab;
  std::vector<double> am(static_cast<std::size_t>(L + 1));
  std::vector<double> bm(static_cast<std::size_t>(L + 1));
  for (std::size_t q = 0; q < rule->t_nodes.size(); ++q) {
    tab.compute(L, rule->t_nodes[q]);
    for (int m = 0; m <= L; ++m) {
      double a = 0.0, b = 0.0;
      for (int n = m; n <= L; ++n) {
        const double k = tab(n, m) * f[n];
        if (m == 0) {
          a += c.at(n, 1) * k;
        } else {
          a += c.at(n, 2 * m) * k;
          b += c.at(n, 2 * m + 1) * k;
        }
      }
      const double scale = m == 0 ? 1.0 : std::numbers::sqrt2;
      am[m] = scale * a;
      bm[m] = scale * b;
    }
    for (int k = 0; k < rule->n_phi; ++k) {
      double v = am[0];
      for (int m = 1; m <= L; ++m) v += am[m] * trig.cosv(k, m) + bm[m] * trig.sinv(k, m);
      out.values[q * rule->n_phi + k] = v;
    }
  }
  return out;
}

// Adds iid Gaussian node noise rescaled so the relative perturbation in the
// weighted discrete norm is exactly epsilon_rel.
inline DiscreteField add_noise(const DiscreteField& f, const NoiseSpec& spec) {
  if (spec.epsilon_rel < 0.0) throw std::invalid_argument("add_noise: negative noise level");
  if (spec.epsilon_rel == 0.0) return f;
  const double fn = weighted_norm(f);
  if (!(fn > 0.0)) throw std::domain_error("add_noise: zero-norm field with positive noise level");
  GaussianStream g(spec.seed);
  DiscreteField xi{f.rule, std::vector<double>(f.values.size())};
  for (auto& v : xi.values) v = g.next();
  const double xn = weighted_norm(xi);
  if (!(xn > 0.0)) throw numerical_error("add_noise: degenerate noise draw");
  const double scale = spec.epsilon_rel * fn / xn;
  DiscreteField out{f.rule, f.values};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += scale * xi.values[i];
  return out;
}

// || approx - truth || / || truth || in the weighted discrete norm; equals
// the relative L2 error on the domain whenever both fields lie in a space
// the rule integrates exactly.
inline double relative_error(const DiscreteField& approx, const DiscreteField& truth) {
  require_same_rule(approx, truth);
  const double tn = weighted_norm(truth);
  if (!(tn > 0.0)) throw std::domain_error("relative_error: zero-norm truth");
  double s = 0.0;
  const auto& wt = truth.rule->weight;
  for (std::size_t i = 0; i < wt.size(); ++i) {
    const double d = approx.values[i] - truth.values[i];
    s += wt[i] * d * d;
  }
  return std::sqrt(std::max(0.0, s)) / tn;
}

// Analysis moments b_{n,j} = sum_i w_i (1/rho) Y_{n,j}(x_i) f_i for n <= L,
// returned anchored at the rule radius rho. On a full-sphere rule of
// sufficient exactness these are the Fourier coefficients of the sampled
// expansion; on cap rules they are the cap-localized moments.
inline SphCoeffs analysis_moments(const DiscreteField& f, int degree_max) {
  const QuadratureRule& rule = *f.rule;
  const int L = degree_max;
  SphCoeffs out(L, rule.radius);
  const auto trig = detail::trig_table(rule, L);
  const std::size_t nt = rule.t_nodes.size();
  // longitude transform: F^c_m(q), F^s_m(q)
  std::vector<double> fc(nt * (L + 1), 0.0), fs(nt * (L + 1), 0.0);
  for (std::size_t q = 0; q < nt; ++q) {
    for (int k = 0; k < rule.n_phi; ++k) {
      const double v = rule.phi_weight * f.values[q * rule.n_phi + k];
      for (int m = 0; m <= L; ++m) {
        fc[q * (L + 1) + m] += v * trig.cosv(k, m);
        fs[q * (L + 1) + m] += v * trig.sinv(k, m);
      }
    }
  }
  const double inv_r = 1.0 / rule.radius;
  AssocLegendreTable tab;
  for (std::size_t q = 0; q < nt; ++q) {
    tab.compute(L, rule.t_nodes[q]);
    const double tw = rule.t_weights[q] * inv_r;
    for (int m = 0; m <= L; ++m) {
      const double scale = (m == 0 ? 1.0 : std::numbers::sqrt2) * tw;
      for (int n = m; n <= L; ++n) {
        const double k = scale * tab(n, m);
        if (m == 0) {
          out.at(n, 1) += k * fc[q * (L + 1)];
        } else {
          out.at(n, 2 * m) += k * fc[q * (L + 1) + m];
          out.at(n, 2 * m + 1) += k * fs[q * (L + 1) + m];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void export_field_csv(const DiscreteField& f, const std::string& path) {
  auto out = open_output(path);
  out << "index,value\n";
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out << i << ',' << format_g17(f.values[i]) << '\n';
}

inline DiscreteField import_field_csv(RulePtr rule, const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_fields(line)[0] != "index")
    throw data_error("field CSV missing header: " + path);
  DiscreteField f{rule, std::vector<double>(rule->size(), 0.0)};
  std::size_t count = 0;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw data_error(path + ":" + std::to_string(lineno) + ": expected 'index,value'");
    const long idx = parse_long(fields[0], path + ":" + std::to_string(lineno));
    if (idx < 0 || static_cast<std::size_t>(idx) >= f.values.size())
      throw data_error(path + ":" + std::to_string(lineno) + ": node index out of range");
    f.values[static_cast<std::size_t>(idx)] =
        parse_double(fields[1], path + ":" + std::to_string(lineno));
    ++count;
  }
  if (count != f.values.size())
    throw data_error(path + ": row count does not match rule size");
  return f;
}

}  // namespace capharm
