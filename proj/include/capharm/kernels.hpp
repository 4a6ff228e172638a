// SPDX-License-Identifier: Apache-2.0
//
// Candidate reconstructions from combined satellite-shell and ground-cap
// data. A candidate is defined by zonal kernels whose degree symbols
// minimize a quadratic functional weighing fidelity on both shells, the
// amplification of continued satellite noise, and the leakage of the ground
// kernel outside the cap. Application to sampled data is a pair of
// quadrature sums; an algebraically identical separated path goes through
// analysis moments and is what large runs use.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "capharm/csv.hpp"
#include "capharm/errors.hpp"
#include "capharm/field.hpp"
#include "capharm/quadrature.hpp"
#include "capharm/sphharm.hpp"

namespace capharm {

struct CandidateParams {
  double alpha = 1.0;        // satellite-fidelity weight, > 0
  double alpha_tilde = 1.0;  // ground-fidelity weight, > 0
  double beta = 0.0;         // continuation-amplification penalty, >= 0
  int deg_sat = 0;           // satellite kernel truncation degree
  int deg_ground = 0;        // ground kernel truncation degree, >= deg_sat
  double r = 1.0;            // ground sphere radius (km)
  double R = 2.0;            // satellite sphere radius (km)
  CapGeometry cap{1.0, 1.0};

  void validate() const {
    if (!(alpha > 0.0) || !(alpha_tilde > 0.0))
      throw config_error("CandidateParams: alpha and alpha_tilde must be positive");
    if (beta < 0.0) throw config_error("CandidateParams: beta must be nonnegative");
    if (deg_sat < 0 || deg_ground < deg_sat)
      throw config_error("CandidateParams: need 0 <= deg_sat <= deg_ground");
    if (!(r > 0.0) || !(R > r)) throw config_error("CandidateParams: need 0 < r < R");
    if (std::abs(cap.radius - r) > 1e-9 * r)
      throw config_error("CandidateParams: cap radius must equal r");
  }
};

// Degree symbols of one candidate's kernels. psi_tilde is derived:
// psi_tilde[n] = phi_tilde[n] - phi[n] (r/R)^n for n <= deg_sat, else
// phi_tilde[n].
struct KernelSymbols {
  std::vector<double> phi;        // 0..deg_sat
  std::vector<double> phi_tilde;  // 0..deg_ground
  std::vector<double> psi_tilde;  // 0..deg_ground

  int deg_sat() const { return static_cast<int>(phi.size()) - 1; }
  int deg_ground() const { return static_cast<int>(phi_tilde.size()) - 1; }

  static KernelSymbols make(std::vector<double> phi_in, std::vector<double> phi_tilde_in,
                            double r, double R) {
    KernelSymbols s;
    s.phi = std::move(phi_in);
    s.phi_tilde = std::move(phi_tilde_in);
    s.psi_tilde = s.phi_tilde;
    const double ratio = r / R;
    double damp = 1.0;
    for (std::size_t n = 0; n < s.phi.size(); ++n) {
      s.psi_tilde[n] -= s.phi[n] * damp;
      damp *= ratio;
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// The quadratic functional
// ---------------------------------------------------------------------------

// Gram of the complement-localization term: with the zonal ground kernel
// anchored at the cap center, its squared L2 norm over the sphere minus the
// cap is psi^T G psi with
//   G_{nm} = (2n+1)(2m+1) / (8 pi r^2) * integral_{-1}^{t_min} P_n P_m dt.
inline Eigen::MatrixXd localization_gram(int deg, const CapGeometry& cap) {
  if (deg < 0) throw std::invalid_argument("localization_gram: negative degree");
  const int dim = deg + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  const double t_min = cap.t_min();
  if (t_min <= -1.0) return g;  // rho = 2: empty complement
  const auto gl = detail::gauss_legendre(dim);  // exact to degree 2 deg + 1
  const double center = (t_min - 1.0) / 2.0, half = (t_min + 1.0) / 2.0;
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (int q = 0; q < dim; ++q) {
    const double tq = center + half * gl.nodes[q];
    const double wq = gl.weights[q] * half;
    p[0] = 1.0;
    if (dim > 1) p[1] = tq;
    for (int n = 2; n <= deg; ++n)
      p[n] = ((2.0 * n - 1.0) * tq * p[n - 1] - (n - 1.0) * p[n - 2]) / n;
    for (int n = 0; n <= deg; ++n)
      for (int m = 0; m <= deg; ++m) g(n, m) += wq * p[n] * p[m];
  }
  const double pref = 1.0 / (8.0 * std::numbers::pi * cap.radius * cap.radius);
  for (int n = 0; n <= deg; ++n)
    for (int m = 0; m <= deg; ++m) g(n, m) *= pref * (2.0 * n + 1.0) * (2.0 * m + 1.0);
  return g;
}

inline std::vector<double> continuation_damping(int deg, double r, double R) {
  std::vector<double> s(static_cast<std::size_t>(deg + 1));
  const double ratio = r / R;
  double cur = 1.0;
  for (int n = 0; n <= deg; ++n) {
    s[n] = cur;
    cur *= ratio;
  }
  return s;
}

// Value of the functional at given symbols (direct evaluation from the
// definition; used as the oracle for gradient and minimality tests).
inline double functional_value(const CandidateParams& p, const Eigen::MatrixXd& g,
                               const std::vector<double>& phi,
                               const std::vector<double>& phi_tilde) {
  const int nd = p.deg_sat, md = p.deg_ground;
  if (static_cast<int>(phi.size()) != nd + 1 || static_cast<int>(phi_tilde.size()) != md + 1)
    throw std::invalid_argument("functional_value: symbol sizes do not match params");
  const auto s = continuation_damping(nd, p.r, p.R);
  double f = 0.0;
  for (int n = 0; n <= md; ++n) {
    const double d = 1.0 - phi_tilde[n];
    f += p.alpha_tilde * d * d;
  }
  for (int n = 0; n <= nd; ++n) {
    const double d = 1.0 - phi[n] * s[n];
    f += p.alpha * d * d + p.beta * phi[n] * phi[n];
  }
  Eigen::VectorXd psi(md + 1);
  for (int n = 0; n <= md; ++n)
    psi(n) = phi_tilde[n] - (n <= nd ? phi[n] * s[n] : 0.0);
  f += psi.dot(g * psi);
  return f;
}

// Unique minimizer of the functional: one symmetric positive-definite solve
// over the stacked unknowns [phi, phi_tilde].
inline KernelSymbols solve_symbols(const CandidateParams& p, const Eigen::MatrixXd& g) {
  p.validate();
  const int nd = p.deg_sat, md = p.deg_ground;
  if (g.rows() != md + 1 || g.cols() != md + 1)
    throw std::invalid_argument("solve_symbols: localization Gram has wrong size");
  const int dim = nd + md + 2;
  const auto s = continuation_damping(nd, p.r, p.R);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (int n = 0; n <= nd; ++n) {
    a(n, n) = p.alpha * s[n] * s[n] + p.beta;
    b(n) = p.alpha * s[n];
  }
  for (int n = 0; n <= md; ++n) {
    a(nd + 1 + n, nd + 1 + n) = p.alpha_tilde;
    b(nd + 1 + n) = p.alpha_tilde;
  }
  // localization term psi^T G psi, psi_n = phi_tilde_n - s_n phi_n (n <= nd)
  for (int n = 0; n <= md; ++n) {
    for (int m = 0; m <= md; ++m) {
      const double gnm = g(n, m);
      if (gnm == 0.0) continue;
      a(nd + 1 + n, nd + 1 + m) += gnm;
      if (m <= nd) a(nd + 1 + n, m) -= gnm * s[m];
      if (n <= nd) a(n, nd + 1 + m) -= gnm * s[n];
      if (n <= nd && m <= nd) a(n, m) += gnm * s[n] * s[m];
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw numerical_error("solve_symbols: factorization failed");
  Eigen::VectorXd v = ldlt.solve(b);
  if (!v.allFinite())
    throw numerical_error("solve_symbols: non-finite solution (ill-conditioned parameters)");
  const double resid = (a * v - b).lpNorm<Eigen::Infinity>();
  const double scale = a.lpNorm<Eigen::Infinity>() * v.lpNorm<Eigen::Infinity>() +
                       b.lpNorm<Eigen::Infinity>();
  if (resid > 1e-8 * scale)
    throw numerical_error("solve_symbols: residual " + std::to_string(resid) +
                          " exceeds tolerance (ill-conditioned parameters)");

  std::vector<double> phi(v.data(), v.data() + nd + 1);
  std::vector<double> phi_tilde(v.data() + nd + 1, v.data() + dim);
  return KernelSymbols::make(std::move(phi), std::move(phi_tilde), p.r, p.R);
}

inline KernelSymbols solve_symbols(const CandidateParams& p) {
  return solve_symbols(p, localization_gram(p.deg_ground, p.cap));
}

// ---------------------------------------------------------------------------
// Candidate application
// ---------------------------------------------------------------------------

enum class ApplyPath { automatic, direct, kernel_matrix, separated };

// Exact coefficient representation of a candidate (basis (1/r) Y at anchor
// r): the quadrature sums defining the candidate collapse, through the
// addition theorem, to symbol-weighted analysis moments of the data.
inline SphCoeffs candidate_coefficients(const KernelSymbols& sym, const DiscreteField& f2,
                                        const DiscreteField& f1) {
  const int nd = sym.deg_sat(), md = sym.deg_ground();
  if (f2.rule->domain != RuleDomain::full_sphere)
    throw std::runtime_error("apply_candidate: satellite data must live on a full-sphere rule");
  if (f1.rule->domain != RuleDomain::cap)
    throw std::runtime_error("apply_candidate: ground data must live on a cap rule");
  const SphCoeffs sat = analysis_moments(f2, nd);
  const SphCoeffs gnd = analysis_moments(f1, md);
  SphCoeffs out(md, f1.rule->radius);
  for (int n = 0; n <= md; ++n)
    for (int j = 1; j <= 2 * n + 1; ++j) {
      double v = sym.psi_tilde[n] * gnd.at(n, j);
      if (n <= nd) v += sym.phi[n] * sat.at(n, j);
      out.at(n, j) = v;
    }
  return out;
}

namespace detail {

// sum_n coef[n] (2n+1) P_n(dot) by the running Legendre recurrence.
inline double zonal_series(const std::vector<double>& coef, double dot) {
  double acc = coef[0];
  if (coef.size() == 1) return acc;
  double pm1 = 1.0, p = dot;
  acc += coef[1] * 3.0 * p;
  for (std::size_t n = 2; n < coef.size(); ++n) {
    const double pn = ((2.0 * n - 1.0) * dot * p - (n - 1.0) * pm1) / n;
    pm1 = p;
    p = pn;
    acc += coef[n] * (2.0 * n + 1.0) * pn;
  }
  return acc;
}

inline DiscreteField apply_direct(const KernelSymbols& sym, const DiscreteField& f2,
                                  const DiscreteField& f1, RulePtr eval_rule,
                                  bool precompute_matrix) {
  const double r = f1.rule->radius, bigR = f2.rule->radius;
  std::vector<double> sat_coef(sym.phi.size());
  for (std::size_t n = 0; n < sym.phi.size(); ++n)
    sat_coef[n] = sym.phi[n] / (four_pi * r * bigR);
  std::vector<double> gnd_coef(sym.psi_tilde.size());
  for (std::size_t n = 0; n < sym.psi_tilde.size(); ++n)
    gnd_coef[n] = sym.psi_tilde[n] / (four_pi * r * r);

  std::vector<UnitDirection> sat_dirs(f2.rule->size());
  for (std::size_t i = 0; i < sat_dirs.size(); ++i) sat_dirs[i] = rule_direction(*f2.rule, i);
  std::vector<UnitDirection> gnd_dirs(f1.rule->size());
  for (std::size_t i = 0; i < gnd_dirs.size(); ++i) gnd_dirs[i] = rule_direction(*f1.rule, i);

  DiscreteField out{eval_rule, std::vector<double>(eval_rule->size(), 0.0)};
  std::vector<double> row;  // kernel matrix row when precomputing
  for (std::size_t e = 0; e < eval_rule->size(); ++e) {
    const UnitDirection xe = rule_direction(*eval_rule, e);
    double acc = 0.0;
    if (precompute_matrix) {
      row.resize(sat_dirs.size());
      for (std::size_t i = 0; i < sat_dirs.size(); ++i)
        row[i] = zonal_series(sat_coef, xe.dot(sat_dirs[i]));
      for (std::size_t i = 0; i < sat_dirs.size(); ++i)
        acc += f2.rule->weight[i] * row[i] * f2.values[i];
      row.resize(gnd_dirs.size());
      for (std::size_t i = 0; i < gnd_dirs.size(); ++i)
        row[i] = zonal_series(gnd_coef, xe.dot(gnd_dirs[i]));
      for (std::size_t i = 0; i < gnd_dirs.size(); ++i)
        acc += f1.rule->weight[i] * row[i] * f1.values[i];
    } else {
      for (std::size_t i = 0; i < sat_dirs.size(); ++i)
        acc += f2.rule->weight[i] * zonal_series(sat_coef, xe.dot(sat_dirs[i])) * f2.values[i];
      for (std::size_t i = 0; i < gnd_dirs.size(); ++i)
        acc += f1.rule->weight[i] * zonal_series(gnd_coef, xe.dot(gnd_dirs[i])) * f1.values[i];
    }
    out.values[e] = acc;
  }
  return out;
}

}  // namespace detail

// Evaluate one candidate at the nodes of eval_rule (a cap rule at the ground
// radius). The separated path equals the direct quadrature sums identically
// up to floating-point reassociation.
inline DiscreteField apply_candidate(const KernelSymbols& sym, const DiscreteField& f2,
                                     const DiscreteField& f1, RulePtr eval_rule,
                                     ApplyPath path = ApplyPath::automatic) {
  if (f2.rule->domain != RuleDomain::full_sphere)
    throw std::runtime_error("apply_candidate: satellite data must live on a full-sphere rule");
  if (f1.rule->domain != RuleDomain::cap)
    throw std::runtime_error("apply_candidate: ground data must live on a cap rule");
  if (eval_rule->domain != RuleDomain::cap)
    throw std::runtime_error("apply_candidate: evaluation rule must be a cap rule");
  if (std::abs(eval_rule->radius - f1.rule->radius) > 1e-9 * f1.rule->radius)
    throw std::runtime_error("apply_candidate: evaluation rule radius differs from ground radius");
  if (!(f2.rule->radius > f1.rule->radius))
    throw std::runtime_error("apply_candidate: satellite radius must exceed ground radius");

  switch (path) {
    case ApplyPath::direct:
      return detail::apply_direct(sym, f2, f1, eval_rule, false);
    case ApplyPath::kernel_matrix:
      return detail::apply_direct(sym, f2, f1, eval_rule, true);
    case ApplyPath::separated:
    case ApplyPath::automatic:
      return sample(candidate_coefficients(sym, f2, f1), eval_rule);
  }
  throw std::logic_error("apply_candidate: unknown path");
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline void export_symbols_csv(const KernelSymbols& sym, const std::string& path) {
  auto out = open_output(path);
  out << "n,phi,phi_tilde,psi_tilde\n";
  for (int n = 0; n <= sym.deg_ground(); ++n) {
    out << n << ',' << format_g17(n <= sym.deg_sat() ? sym.phi[n] : 0.0) << ','
        << format_g17(sym.phi_tilde[n]) << ',' << format_g17(sym.psi_tilde[n]) << '\n';
  }
}

}  // namespace capharm
