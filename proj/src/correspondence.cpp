#include "dlcorr/correspondence.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlcorr {

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

double rel_diff(Complex a, Complex b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// phi2 restricted to the system pair (x1, p1) as a 1-dof polynomial.
PolyObservable system_only_poly(const AffineConstraint& phi, const PhaseLayout& layout2) {
  if (std::abs(phi.coeffs[layout2.q_index(1)]) > 0.0 ||
      std::abs(phi.coeffs[layout2.p_index(1)]) > 0.0)
    throw std::invalid_argument("classical_lhs_operator: phi2 must involve system variables only");
  const PhaseLayout layout1 = PhaseLayout::make(1);
  PolyObservable p = PolyObservable::constant(layout1, phi.constant);
  p += phi.coeffs[layout2.q_index(0)] * PolyObservable::variable(layout1, layout1.q_index(0));
  p += phi.coeffs[layout2.p_index(0)] * PolyObservable::variable(layout1, layout1.p_index(0));
  return p;
}

} // namespace

PolyObservable model_hamiltonian(const ModelParams& params) {
  const PhaseLayout layout = PhaseLayout::make(2);
  const auto x1 = PolyObservable::variable(layout, layout.q_index(0));
  const auto x2 = PolyObservable::variable(layout, layout.q_index(1));
  const auto p1 = PolyObservable::variable(layout, layout.p_index(0));
  const auto p2 = PolyObservable::variable(layout, layout.p_index(1));
  return 0.5 * (p1 * p1) + 0.5 * params.k1 * (x1 * x1) + 0.5 * (p2 * p2) +
         0.5 * params.k2 * (x2 * x2) - params.kprime * (x1 * x2);
}

double eta_of(double alpha, double beta, const ModelParams& params) {
  return alpha * alpha + (params.k1 - params.kprime * params.kprime / params.k2) * beta * beta;
}

CoefficientSolution solve_coefficients(const ModelParams& params) {
  params.validate();
  const LimitReport limit = dissipation_limit(params);
  if (!(limit.gamma11_limit > 0.0))
    throw std::domain_error("solve_coefficients: gamma11 = 0 (zero coupling or sinc node), "
                            "coefficient equations degenerate");

  CoefficientSolution sol;
  const double w0 = params.omega0();
  sol.beta = 1.0;
  sol.gamma_coeff = 0.0;
  sol.delta = params.kprime / params.k2 * sol.beta;
  sol.z = (params.kprime * params.kprime - params.k1 * params.k2) / params.k2;
  sol.gamma11 = limit.gamma11_limit;
  const double half = 0.5 * w0 * params.tau;
  sol.c0 = w0 * sol.gamma11 * std::cos(half) * std::cos(half);
  sol.c1 = sol.gamma11 * std::sin(half) * std::sin(half) / w0;

  const double c7_lhs = -0.5 * sol.gamma11 * std::sin(w0 * params.tau);
  auto push_pair = [&](double radicand, const char* source) {
    for (double sign : {+1.0, -1.0}) {
      AlphaCandidate cand;
      cand.source = source;
      cand.radicand = radicand;
      cand.real = std::isfinite(radicand) && radicand >= 0.0;
      if (cand.real) {
        cand.alpha = sign * std::sqrt(radicand) * sol.beta;
        cand.eta = eta_of(cand.alpha, sol.beta, params);
        const double r5_rhs = sol.z * sol.z * sol.beta * sol.beta / cand.eta;
        const double r6_rhs = cand.alpha * cand.alpha / cand.eta;
        const double r7_rhs = sol.z * cand.alpha * sol.beta / cand.eta;
        cand.r5 = rel_diff(sol.c0, r5_rhs);
        cand.r6 = rel_diff(sol.c1, r6_rhs);
        cand.r7 = rel_diff(c7_lhs, r7_rhs);
      }
      sol.candidates.push_back(cand);
    }
  };

  // alpha^2 = z (1 + z/c0) beta^2 from the x1^2 equation,
  // alpha^2 = z c1/(c1 - 1) beta^2 from the p1^2 equation.
  push_pair(sol.c0 != 0.0 ? sol.z * (1.0 + sol.z / sol.c0)
                          : -std::numeric_limits<double>::infinity(),
            "c5");
  push_pair(sol.c1 != 1.0 ? sol.z * sol.c1 / (sol.c1 - 1.0)
                          : -std::numeric_limits<double>::infinity(),
            "c6");

  double best_score = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < sol.candidates.size(); ++k) {
    const auto& c = sol.candidates[k];
    if (!c.real) continue;
    const double score = c.r5 + c.r6 + c.r7;
    if (score < best_score) {
      best_score = score;
      sol.best = static_cast<int>(k);
    }
  }
  return sol;
}

std::pair<AffineConstraint, AffineConstraint> build_constraints(double alpha, double beta,
                                                                const ModelParams& params) {
  params.validate();
  if (!std::isfinite(alpha)) throw std::invalid_argument("build_constraints: alpha not finite");
  const PhaseLayout layout = PhaseLayout::make(2);
  VectorXd c1v = VectorXd::Zero(4);
  c1v[layout.q_index(0)] = alpha;
  c1v[layout.p_index(0)] = beta;
  c1v[layout.p_index(1)] = params.kprime / params.k2 * beta;
  AffineConstraint phi1(c1v, 0.0);

  VectorXd c2v = VectorXd::Zero(4);
  c2v[layout.q_index(0)] = (params.k1 - params.kprime * params.kprime / params.k2) * beta;
  c2v[layout.p_index(0)] = -alpha;
  AffineConstraint phi2(c2v, 0.0);

  // The consistency chain on phi1 must regenerate phi2 up to normalization.
  const ConstraintSystem cs = consistency_chain(model_hamiltonian(params), {phi1});
  if (cs.secondaries.size() != 1)
    throw std::logic_error("build_constraints: chain did not produce one secondary");
  const VectorXd& sec = cs.secondaries[0].coeffs;
  const double cosine = sec.dot(phi2.coeffs) / (sec.norm() * phi2.coeffs.norm());
  if (std::abs(std::abs(cosine) - 1.0) > 1e-9)
    throw std::logic_error("build_constraints: chain secondary is not parallel to phi2");
  return {phi1, phi2};
}

ClassicalLhs classical_lhs_operator(const AffineConstraint& phi1, const AffineConstraint& phi2,
                                    double eta, const ModelParams& params, int weak_dims) {
  params.validate();
  if (eta == 0.0) throw std::invalid_argument("classical_lhs_operator: eta = 0");
  const PhaseLayout layout2 = PhaseLayout::make(2);

  ClassicalLhs out;
  const PolyObservable phi2_sys = system_only_poly(phi2, layout2);
  out.reduced = weyl_quantize(phi2_sys * phi2_sys, params.system_spec()) / eta;

  // Dropped piece of D^{ab} chi_b phi_a: the cross term carrying phi1. It is
  // weakly zero classically; quantized it is measured, not assumed away.
  const PolyObservable h_c = model_hamiltonian(params);
  const PolyObservable phi1_poly = phi1.to_poly(layout2);
  const PolyObservable phi2_poly = phi2.to_poly(layout2);
  const double c12 = poisson_bracket(phi1_poly, phi2_poly).constant_term();
  MatrixXd c(2, 2);
  c << 0.0, c12, -c12, 0.0;
  const MatrixXd d = c.inverse();
  const PolyObservable chi2 = poisson_bracket(phi2_poly, h_c);

  FockSpec weak_spec{{weak_dims, weak_dims}, {params.omega0(), params.omega_bath()}};
  const MatrixXc chi2_op = weyl_quantize(chi2, weak_spec);
  const MatrixXc phi1_op = weyl_quantize(phi1_poly, weak_spec);
  const MatrixXc weak = d(0, 1) * (chi2_op * phi1_op);
  Eigen::JacobiSVD<MatrixXc> svd(weak);
  out.weak_term_norm = svd.singularValues().maxCoeff();

  double low = 0.0;
  const int levels = std::min(3, weak_dims);
  for (int i1 = 0; i1 < levels; ++i1)
    for (int i2 = 0; i2 < levels; ++i2)
      for (int j1 = 0; j1 < levels; ++j1)
        for (int j2 = 0; j2 < levels; ++j2)
          low = std::max(low, std::abs(weak(i1 * weak_dims + i2, j1 * weak_dims + j2)));
  out.weak_term_low_block = low;
  return out;
}

MatrixXc quantum_rhs_operator(const DissipationMatrix& gamma, const FockSpec& system_spec) {
  gamma.validate();
  system_spec.validate();
  if (system_spec.n_modes() != 1)
    throw std::invalid_argument("quantum_rhs_operator: expected the single system mode");
  const LadderOps ops = ladder_ops(system_spec, 0);
  if (gamma.basis.size() != 2 || max_abs(gamma.basis[0] - ops.a) > 1e-12 ||
      max_abs(gamma.basis[1] - ops.a_dag) > 1e-12)
    throw std::invalid_argument("quantum_rhs_operator: basis is not (a, a^dag)");
  MatrixXc out = MatrixXc::Zero(ops.a.rows(), ops.a.cols());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out += 0.5 * gamma.gamma(a, b) * (gamma.basis[b].adjoint() * gamma.basis[a]);
  return out;
}

DissipationMatrix synthetic_gamma(double alpha, double beta, const ModelParams& params) {
  params.validate();
  const double w0 = params.omega0();
  const double z = (params.kprime * params.kprime - params.k1 * params.k2) / params.k2;
  const double eta = eta_of(alpha, beta, params);
  const double r1 = z * z * beta * beta / eta;
  const double r2 = alpha * alpha / eta;
  const double r3 = z * alpha * beta / eta;

  DissipationMatrix diss;
  diss.gamma.resize(2, 2);
  diss.gamma(0, 0) = r1 / w0 + w0 * r2;
  diss.gamma(1, 1) = diss.gamma(0, 0);
  diss.gamma(0, 1) = Complex(r1 / w0 - w0 * r2, -2.0 * r3);
  diss.gamma(1, 0) = std::conj(diss.gamma(0, 1));
  const LadderOps ops = ladder_ops(params.system_spec(), 0);
  diss.basis = {ops.a, ops.a_dag};
  diss.validate();
  return diss;
}

DissipationMatrix limit_dissipation(const ModelParams& params) {
  const LimitReport limit = dissipation_limit(params);
  const double g = limit.gamma11_limit;
  DissipationMatrix diss;
  diss.gamma.resize(2, 2);
  diss.gamma(0, 0) = g;
  diss.gamma(1, 1) = g;
  diss.gamma(0, 1) = g * std::exp(kImag * params.omega0() * params.tau);
  diss.gamma(1, 0) = std::conj(diss.gamma(0, 1));
  const LadderOps ops = ladder_ops(params.system_spec(), 0);
  diss.basis = {ops.a, ops.a_dag};
  return diss;
}

double c_identity_residual(const ModelParams& params) {
  const CoefficientSolution sol = solve_coefficients(params);
  const double w0 = params.omega0();
  const double c7_lhs = -0.5 * sol.gamma11 * std::sin(w0 * params.tau);
  const double lhs_side = rel_diff(sol.c0 * sol.c1, c7_lhs * c7_lhs);

  // Constraint side at any real candidate: (z^2 b^2 / eta)(a^2 / eta) vs
  // (z a b / eta)^2, parameter-independent algebra again.
  double rhs_side = 0.0;
  for (const auto& cand : sol.candidates) {
    if (!cand.real) continue;
    const double r1 = sol.z * sol.z * sol.beta * sol.beta / cand.eta;
    const double r2 = cand.alpha * cand.alpha / cand.eta;
    const double r3 = sol.z * cand.alpha * sol.beta / cand.eta;
    rhs_side = std::max(rhs_side, rel_diff(r1 * r2, r3 * r3));
  }
  return std::max(lhs_side, rhs_side);
}

LindbladConstraintIdentity lindblad_constraint_identity(const DissipationMatrix& gamma,
                                                        const AffineConstraint& phi2,
                                                        double eta, const ModelParams& params,
                                                        int exclude) {
  const double g11 = gamma.gamma(0, 0).real();
  if (!(g11 > 0.0))
    throw std::invalid_argument("lindblad_constraint_identity: gamma11 must be positive");

  const LindbladForm form = to_lindblad_form(gamma);
  const MatrixXc& l1 = form.jump_ops[0];
  const MatrixXc lhs = l1 * l1.adjoint();

  const PolyObservable phi2_sys = system_only_poly(phi2, PhaseLayout::make(2));
  const MatrixXc phi2_sq = weyl_quantize(phi2_sys * phi2_sys, params.system_spec());

  const auto idx = interior_indices(params.system_spec(), exclude);
  const MatrixXc lhs_i = restrict_to(lhs, idx);
  const MatrixXc half_i = restrict_to((phi2_sq / (2.0 * g11 * eta)).eval(), idx);
  const MatrixXc full_i = restrict_to((phi2_sq / (g11 * eta)).eval(), idx);
  const double scale = std::max(lhs_i.norm(), 1e-300);

  LindbladConstraintIdentity out;
  out.residual_half_factor = (lhs_i - half_i).norm() / scale;
  out.residual_full_factor = (lhs_i - full_i).norm() / scale;
  out.preferred = out.residual_full_factor <= out.residual_half_factor
                      ? "1/(gamma11 eta)"
                      : "1/(2 gamma11 eta)";
  return out;
}

CorrespondenceReport verify(const ModelParams& params, const VerifyOptions& opts) {
  params.validate();
  CorrespondenceReport rep;
  rep.params = params;
  rep.synthetic = opts.synthetic;

  ModelParams op_params = params;
  op_params.n_sys = opts.n_sys;

  const LimitReport limit = dissipation_limit(params);
  rep.gamma_limit_mismatch = limit.mismatch_rel;

  if (params.kprime == 0.0) {
    rep.degenerate = true;
    rep.note = "zero coupling: gamma11 = 0, coefficient equations degenerate";
    return rep;
  }

  try {
    rep.solution = solve_coefficients(params);
  } catch (const std::domain_error& e) {
    if (!opts.synthetic) {
      rep.degenerate = true;
      rep.note = e.what();
      return rep;
    }
    rep.note = e.what();
  }

  double alpha = 0.0;
  if (opts.synthetic) {
    alpha = opts.synthetic_alpha;
    rep.chosen = -1;
  } else {
    rep.chosen = opts.candidate >= 0 ? opts.candidate : rep.solution.best;
    if (rep.chosen < 0 || rep.chosen >= static_cast<int>(rep.solution.candidates.size()) ||
        !rep.solution.candidates[rep.chosen].real) {
      rep.degenerate = true;
      rep.note = "no real alpha candidate available";
      return rep;
    }
    alpha = rep.solution.candidates[rep.chosen].alpha;
  }
  const double beta = 1.0;
  rep.alpha_used = alpha;
  rep.eta_used = eta_of(alpha, beta, params);

  const DissipationMatrix gamma =
      opts.synthetic ? synthetic_gamma(alpha, beta, op_params) : limit_dissipation(op_params);

  // Coefficient equations c1..c4 with the gamma in use.
  const double w0 = params.omega0();
  const double z = (params.kprime * params.kprime - params.k1 * params.k2) / params.k2;
  const Complex g11 = gamma.gamma(0, 0), g22 = gamma.gamma(1, 1);
  const Complex g12 = gamma.gamma(0, 1), g21 = gamma.gamma(1, 0);
  const Complex lhs1 = 0.25 * w0 * (g11 + g22 + g12 + g21);
  const Complex lhs2 = 0.25 / w0 * (g11 + g22 - g12 - g21);
  const Complex lhs3 = 0.25 * kImag * (g11 - g22 + g12 - g21);
  const Complex lhs4 = 0.25 * kImag * (-g11 + g22 + g12 - g21);
  const double rhs1 = z * z * beta * beta / rep.eta_used;
  const double rhs2 = alpha * alpha / rep.eta_used;
  const double rhs34 = z * alpha * beta / rep.eta_used;
  rep.c_residual[0] = rel_diff(lhs1, Complex(rhs1));
  rep.c_residual[1] = rel_diff(lhs2, Complex(rhs2));
  rep.c_residual[2] = rel_diff(lhs3, Complex(rhs34));
  rep.c_residual[3] = rel_diff(lhs4, Complex(rhs34));

  // Reduced equations c5..c7 use the limit-form value.
  if (rep.solution.gamma11 > 0.0) {
    const double half = 0.5 * w0 * params.tau;
    const double c5_lhs = w0 * rep.solution.gamma11 * std::cos(half) * std::cos(half);
    const double c6_lhs = rep.solution.gamma11 * std::sin(half) * std::sin(half) / w0;
    const double c7_lhs = -0.5 * rep.solution.gamma11 * std::sin(w0 * params.tau);
    rep.c5_residual = rel_diff(c5_lhs, rhs1);
    rep.c6_residual = rel_diff(c6_lhs, rhs2);
    rep.c7_residual = rel_diff(c7_lhs, rhs34);
    rep.c5c6_minus_c7sq = rel_diff(c5_lhs * c6_lhs, c7_lhs * c7_lhs);
  }

  const auto [phi1, phi2] = build_constraints(alpha, beta, op_params);
  const ClassicalLhs lhs = classical_lhs_operator(phi1, phi2, rep.eta_used, op_params,
                                                  opts.weak_dims);
  const MatrixXc rhs = quantum_rhs_operator(gamma, op_params.system_spec());
  const auto idx = interior_indices(op_params.system_spec(), opts.interior_exclude);
  const MatrixXc gap = restrict_to(lhs.reduced, idx) - restrict_to(rhs, idx);
  rep.operator_gap_rel = gap.norm() / std::max(restrict_to(rhs, idx).norm(), 1e-300);
  rep.weak_term_norm = lhs.weak_term_norm;
  rep.weak_term_low_block = lhs.weak_term_low_block;

  rep.lind_dissi = lindblad_constraint_identity(gamma, phi2, rep.eta_used, op_params,
                                                opts.interior_exclude);
  return rep;
}

} // namespace dlcorr
