#include "dlcorr/coarse_grain.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace dlcorr {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

} // namespace

double ModelParams::bose_occupation() const {
  return 1.0 / std::expm1(inv_temp * omega_bath());
}

void ModelParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0))
    throw std::invalid_argument("ModelParams: spring constants must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("ModelParams: tau must be positive");
  if (!(inv_temp > 0.0)) throw std::invalid_argument("ModelParams: inv_temp must be positive");
  if (!(kprime * kprime < k1 * k2))
    throw std::invalid_argument("ModelParams: |k'| must stay below sqrt(k1 k2)");
  if (n_sys < 2 || n_bath < 2)
    throw std::invalid_argument("ModelParams: truncations must be >= 2");
}

Complex gamma_sinc(double omega, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("gamma_sinc: tau must be positive");
  const double half = 0.5 * omega * tau;
  return std::exp(kImag * half) * sinc(half);
}

Complex gamma_integral(const ExpSum& p, const ExpSum& q, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("gamma_integral: t must be positive");
  Complex out = 0.0;
  for (const auto& [pa, pf] : p)
    for (const auto& [qa, qf] : q) out += pa * qa * gamma_sinc(pf + qf, t);
  return out;
}

MatrixXc model_gamma_entries(const ModelParams& params) {
  params.validate();
  const double w0 = params.omega0();
  const double wb = params.omega_bath();
  const double n = params.bose_occupation();
  const double np1 = 1.0 + n;
  const double coth = 1.0 + 2.0 * n;
  const double st = params.tau * params.kappa() * params.kappa();
  const double s_plus = sinc(0.5 * (w0 + wb) * params.tau);
  const double s_minus = sinc(0.5 * (w0 - wb) * params.tau);

  MatrixXc gamma(2, 2);
  gamma(0, 0) = st * (np1 * s_plus * s_plus + n * s_minus * s_minus);
  gamma(1, 1) = st * (np1 * s_minus * s_minus + n * s_plus * s_plus);
  gamma(0, 1) = st * s_plus * s_minus * coth * std::exp(kImag * w0 * params.tau);
  gamma(1, 0) = std::conj(gamma(0, 1));
  return gamma;
}

DissipationMatrix dissipation_matrix_model(const ModelParams& params) {
  DissipationMatrix diss;
  diss.gamma = model_gamma_entries(params);
  const LadderOps sys = ladder_ops(params.system_spec(), 0);
  diss.basis = {sys.a, sys.a_dag};
  const double scale = std::max(1.0, max_abs(diss.gamma));
  const double me = diss.min_eig();
  if (me < -1e-8 * scale)
    std::cerr << "dissipation_matrix_model: gamma min eigenvalue " << me
              << " below PSD tolerance (model-regime warning)\n";
  return diss;
}

LimitReport dissipation_limit(const ModelParams& params) {
  params.validate();
  const double w0 = params.omega0();
  const double wb = params.omega_bath();
  const double coth = 1.0 + 2.0 * params.bose_occupation();
  const double s = sinc(0.5 * wb * params.tau);
  LimitReport rep;
  rep.gamma11_limit = params.tau * params.kappa() * params.kappa() * coth * s * s;

  const MatrixXc gamma = model_gamma_entries(params);
  const double g11 = gamma(0, 0).real();
  const double g22 = gamma(1, 1).real();
  rep.mismatch_rel = g11 != 0.0 ? std::abs(g11 - g22) / g11 : 0.0;
  rep.limit_vs_full_rel = g11 != 0.0 ? std::abs(rep.gamma11_limit - g11) / g11 : 0.0;

  rep.tau_bath = 1.0 / wb;
  rep.tau_unitary = 1.0 / w0;
  rep.tau = params.tau;
  rep.tau_relax = rep.gamma11_limit > 0.0 ? 1.0 / (2.0 * rep.gamma11_limit)
                                          : std::numeric_limits<double>::infinity();
  rep.bath_faster_than_unitary = 10.0 * rep.tau_bath <= rep.tau_unitary;
  rep.coarse_grain_ordering = rep.tau_bath < params.tau && params.tau < rep.tau_relax;
  return rep;
}

double KrausSet::completeness_residual() const {
  MatrixXc sum = MatrixXc::Zero(system_dim, system_dim);
  for (const auto& k : ops) sum += k.adjoint() * k;
  return max_abs(sum - MatrixXc::Identity(system_dim, system_dim));
}

KrausSet kraus_from_unitary(const MatrixXc& u_total, const MatrixXc& bath_state,
                            const FockSpec& total_spec) {
  total_spec.validate();
  if (total_spec.n_modes() != 2)
    throw std::invalid_argument("kraus_from_unitary: expected system x bath (two modes)");
  const int ns = total_spec.dims[0];
  const int nb = total_spec.dims[1];
  if (u_total.rows() != ns * static_cast<long>(nb) || u_total.cols() != u_total.rows())
    throw std::invalid_argument("kraus_from_unitary: unitary does not match the spec");
  if (unitarity_residual(u_total) > tol::unitary)
    throw std::invalid_argument("kraus_from_unitary: operator is not unitary");
  if (bath_state.rows() != nb || bath_state.cols() != nb)
    throw std::invalid_argument("kraus_from_unitary: bath state dimension mismatch");

  // Diagonal bath states keep the Fock labels; otherwise use the eigenbasis
  // ordered by descending weight.
  MatrixXc bath_vecs;
  VectorXd weights(nb);
  MatrixXc offdiag = bath_state;
  offdiag.diagonal().setZero();
  if (max_abs(offdiag) <= 1e-14 * std::max(1.0, max_abs(bath_state))) {
    bath_vecs = MatrixXc::Identity(nb, nb);
    for (int m = 0; m < nb; ++m) weights[m] = bath_state(m, m).real();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(bath_state);
    bath_vecs.resize(nb, nb);
    for (int m = 0; m < nb; ++m) {
      weights[m] = es.eigenvalues()[nb - 1 - m];
      bath_vecs.col(m) = es.eigenvectors().col(nb - 1 - m);
    }
  }

  // Rotate so <l| and |m> are bath eigenvectors: V^dag_bath U V_bath blocks.
  MatrixXc u = u_total;
  if (!bath_vecs.isIdentity(0.0)) {
    const MatrixXc v = kron(MatrixXc::Identity(ns, ns), bath_vecs);
    u = v.adjoint() * u_total * v;
  }

  KrausSet set;
  set.system_dim = ns;
  set.weights = weights;
  for (int l = 0; l < nb; ++l) {
    for (int m = 0; m < nb; ++m) {
      if (!(weights[m] > 0.0)) continue;
      MatrixXc k(ns, ns);
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) k(i, j) = u(i * nb + l, j * nb + m);
      k *= std::sqrt(weights[m]);
      set.ops.push_back(std::move(k));
      set.labels.emplace_back(l, m);
    }
  }
  return set;
}

MatrixXc osr_apply(const KrausSet& kraus, const MatrixXc& rho_s) {
  if (rho_s.rows() != kraus.system_dim || rho_s.cols() != kraus.system_dim)
    throw std::invalid_argument("osr_apply: state does not match the Kraus system dimension");
  MatrixXc out = MatrixXc::Zero(rho_s.rows(), rho_s.cols());
  for (const auto& k : kraus.ops) out += k * rho_s * k.adjoint();
  return out;
}

namespace {

void require_orthonormal(const std::vector<MatrixXc>& basis, long dim) {
  if (static_cast<long>(basis.size()) != dim * dim)
    throw std::invalid_argument("chi_from_kraus: basis does not span the operator space");
  for (size_t a = 0; a < basis.size(); ++a) {
    for (size_t b = a; b < basis.size(); ++b) {
      const Complex g = (basis[a].conjugate().cwiseProduct(basis[b])).sum();
      const double expect = a == b ? 1.0 : 0.0;
      if (std::abs(g - expect) > 1e-10)
        throw std::invalid_argument("chi_from_kraus: basis is not orthonormal");
    }
  }
}

} // namespace

MatrixXc kraus_coefficients(const KrausSet& kraus, const std::vector<MatrixXc>& basis) {
  require_orthonormal(basis, kraus.system_dim);
  MatrixXc b(kraus.ops.size(), basis.size());
  for (size_t i = 0; i < kraus.ops.size(); ++i)
    for (size_t a = 0; a < basis.size(); ++a)
      b(i, a) = (basis[a].conjugate().cwiseProduct(kraus.ops[i])).sum();
  return b;
}

ChiMatrix chi_from_kraus(const KrausSet& kraus, const std::vector<MatrixXc>& basis,
                         double time) {
  const MatrixXc b = kraus_coefficients(kraus, basis);
  ChiMatrix chi;
  chi.time = time;
  chi.chi = b.transpose() * b.conjugate(); // chi_ab = sum_i b_ia conj(b_ib)
  return chi;
}

FirstOrderKraus first_order_kraus(const ModelParams& params, double t,
                                  double weak_threshold) {
  params.validate();
  if (!(t > 0.0)) throw std::invalid_argument("first_order_kraus: t must be positive");
  const int ns = params.n_sys;
  const int nb = params.n_bath;
  const double w0 = params.omega0();
  const double wb = params.omega_bath();
  const double kappa = params.kappa();

  const MatrixXc bath_thermal = thermal_state(params.bath_spec(), 0, params.inv_temp);
  const MatrixXc a_sys = lowering_matrix(ns);
  const MatrixXc b_bath = lowering_matrix(nb);
  const MatrixXc b_dag = b_bath.adjoint();

  // Interaction picture: a(t) = a e^{-i w0 t}, b(t) = b e^{-i wB t}.
  const std::array<MatrixXc, 2> sys_ops = {a_sys, a_sys.adjoint()};
  const std::array<double, 2> sys_freq = {-w0, w0};

  FirstOrderKraus out;
  out.coupling_ratio = std::abs(kappa) / w0;
  out.weak_coupling_ok = out.coupling_ratio < weak_threshold;
  for (int l = 0; l < nb; ++l) {
    for (int m = 0; m < nb; ++m) {
      const double pm = bath_thermal(m, m).real();
      if (!(pm > 0.0)) continue;
      MatrixXc k = MatrixXc::Zero(ns, ns);
      if (l == m) k = MatrixXc::Identity(ns, ns);
      for (int s = 0; s < 2; ++s) {
        const Complex bath_elem = b_bath(l, m) * gamma_sinc(sys_freq[s] - wb, t) +
                                  b_dag(l, m) * gamma_sinc(sys_freq[s] + wb, t);
        k += -kImag * t * kappa * bath_elem * sys_ops[s];
      }
      k *= std::sqrt(pm);
      out.ops.push_back(std::move(k));
      out.labels.emplace_back(l, m);
    }
  }

  KrausSet as_set;
  as_set.ops = out.ops;
  as_set.labels = out.labels;
  as_set.system_dim = ns;
  out.b = kraus_coefficients(as_set, hs_basis(ns));
  return out;
}

MatrixXc lamb_shift(const VectorXc& chi_dot_col, const std::vector<MatrixXc>& basis) {
  if (chi_dot_col.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("lamb_shift: column length does not match basis");
  if (basis.empty()) throw std::invalid_argument("lamb_shift: empty basis");
  const auto dim = basis[0].rows();
  MatrixXc h = MatrixXc::Zero(dim, dim);
  for (size_t a = 0; a < basis.size(); ++a) {
    h += 0.5 * kImag *
         (chi_dot_col[static_cast<Eigen::Index>(a)] * basis[a] -
          std::conj(chi_dot_col[static_cast<Eigen::Index>(a)]) * basis[a].adjoint());
  }
  return h;
}

VectorXc model_chi0_column(const ModelParams& params, Complex b_mean) {
  params.validate();
  const double w0 = params.omega0();
  const double wb = params.omega_bath();
  const std::array<double, 2> sys_freq = {-w0, w0}; // for (a, a^dag)
  VectorXc col(2);
  for (int s = 0; s < 2; ++s) {
    col[s] = -kImag * params.kappa() *
             (b_mean * gamma_sinc(sys_freq[s] - wb, params.tau) +
              std::conj(b_mean) * gamma_sinc(sys_freq[s] + wb, params.tau));
  }
  return col;
}

ExactReducedDynamics::ExactReducedDynamics(const ModelParams& params)
    : params_(params), total_(params.total_spec()) {
  params_.validate();
  const int ns = params_.n_sys;
  const int nb = params_.n_bath;
  const double w0 = params_.omega0();
  const double wb = params_.omega_bath();

  MatrixXc h_sys1 = MatrixXc::Zero(ns, ns);
  for (int m = 0; m < ns; ++m) h_sys1(m, m) = w0 * (m + 0.5);
  MatrixXc h_bath1 = MatrixXc::Zero(nb, nb);
  for (int m = 0; m < nb; ++m) h_bath1(m, m) = wb * (m + 0.5);
  h_sys_ = h_sys1;
  h_bath_ = h_bath1;

  const MatrixXc a = lowering_matrix(ns);
  const MatrixXc b = lowering_matrix(nb);
  h_int_ = params_.kappa() * kron(a + a.adjoint(), b + b.adjoint());
  h_total_ = kron(h_sys1, MatrixXc::Identity(nb, nb)) +
             kron(MatrixXc::Identity(ns, ns), h_bath1) + h_int_;

  prop_ = std::make_unique<HermitianPropagator>(h_total_);
  prop_sys_ = std::make_unique<HermitianPropagator>(h_sys1);
  prop_bath_ = std::make_unique<HermitianPropagator>(h_bath1);
  bath_thermal_ = thermal_state(params_.bath_spec(), 0, params_.inv_temp);
}

MatrixXc ExactReducedDynamics::u0(double t) const {
  return kron(prop_sys_->at(t), prop_bath_->at(t));
}

MatrixXc ExactReducedDynamics::total_state(const MatrixXc& rho_s0, double t) const {
  const MatrixXc u = prop_->at(t);
  return u * kron(rho_s0, bath_thermal_) * u.adjoint();
}

std::pair<double, double> ExactReducedDynamics::top_level_population(const MatrixXc& rho_s0,
                                                                     double t) const {
  const MatrixXc rho = total_state(rho_s0, t);
  const int ns = params_.n_sys;
  const int nb = params_.n_bath;
  double pop_sys = 0.0, pop_bath = 0.0;
  for (int bi = 0; bi < nb; ++bi) pop_sys += rho((ns - 1) * nb + bi, (ns - 1) * nb + bi).real();
  for (int ai = 0; ai < ns; ++ai) pop_bath += rho(ai * nb + (nb - 1), ai * nb + (nb - 1)).real();
  return {pop_sys, pop_bath};
}

MatrixXc ExactReducedDynamics::reduced_state(const MatrixXc& rho_s0, double t,
                                             bool check_truncation) const {
  validate_density(rho_s0);
  if (rho_s0.rows() != params_.n_sys)
    throw std::invalid_argument("reduced_state: system state dimension mismatch");
  if (check_truncation) {
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const auto [ps, pb] = top_level_population(rho_s0, frac * t);
      if (ps > 1e-6 || pb > 1e-6) {
        std::ostringstream os;
        os << "reduced_state: top-level population (system " << ps << ", bath " << pb
           << ") exceeds 1e-6 at t = " << frac * t
           << "; increase n_sys/n_bath (currently " << params_.n_sys << ", " << params_.n_bath
           << ")";
        throw TruncationError(os.str());
      }
    }
  }
  return partial_trace(total_state(rho_s0, t), total_, {0});
}

MatrixXc ExactReducedDynamics::interaction_state(const MatrixXc& rho_s0, double t) const {
  const MatrixXc us = prop_sys_->at(t);
  return us.adjoint() * reduced_state(rho_s0, t, false) * us;
}

MatrixXc ExactReducedDynamics::interaction_state_derivative(const MatrixXc& rho_s0, double t,
                                                            double dt_fd) const {
  const MatrixXc plus = interaction_state(rho_s0, t + dt_fd);
  const MatrixXc minus = interaction_state(rho_s0, t - dt_fd);
  return (plus - minus) / (2.0 * dt_fd);
}

KrausSet ExactReducedDynamics::interaction_kraus(double t) const {
  return kraus_from_unitary(u0(t).adjoint() * prop_->at(t), bath_thermal_, total_);
}

KrausSet ExactReducedDynamics::schrodinger_kraus(double t) const {
  return kraus_from_unitary(prop_->at(t), bath_thermal_, total_);
}

MatrixXc exact_reduced_dynamics(const ModelParams& params, const MatrixXc& rho_s0, double t) {
  return ExactReducedDynamics(params).reduced_state(rho_s0, t);
}

FixedBasisOsrReport validate_fixed_basis_osr(const ModelParams& params,
                                             const std::vector<double>& t_grid,
                                             const MatrixXc& rho_s0, double grid_spacing,
                                             const std::vector<MatrixXc>* rebased) {
  params.validate();
  if (t_grid.empty()) throw std::invalid_argument("validate_fixed_basis_osr: empty grid");
  if (!(grid_spacing > 0.0))
    throw std::invalid_argument("validate_fixed_basis_osr: spacing must be positive");
  const int ns = params.n_sys;
  const long d2 = static_cast<long>(ns) * ns;
  const std::vector<MatrixXc> basis = rebased ? *rebased : hs_basis(ns);
  if (static_cast<long>(basis.size()) != d2)
    throw std::invalid_argument("validate_fixed_basis_osr: basis size mismatch");

  ExactReducedDynamics dyn(params);
  const double sqrt_d = std::sqrt(static_cast<double>(ns));

  FixedBasisOsrReport rep;
  rep.grid_spacing = grid_spacing;
  rep.lhs_spacing = grid_spacing / 10.0;
  rep.max_residual = 0.0;

  auto chi_at = [&](double t) {
    return chi_from_kraus(dyn.interaction_kraus(t), basis, t).chi;
  };

  for (double t : t_grid) {
    const MatrixXc chi_dot =
        (chi_at(t + grid_spacing) - chi_at(t - grid_spacing)) / (2.0 * grid_spacing);

    // Rescale the identity row/column to the S_0 = I convention before
    // assembling the evolution identity.
    MatrixXc chi_dot_p = chi_dot;
    chi_dot_p.row(0) /= sqrt_d;
    chi_dot_p.col(0) /= sqrt_d;

    MatrixXc q_dot = MatrixXc::Zero(ns, ns);
    for (long b = 1; b < d2; ++b)
      q_dot += 0.5 * kImag *
               (chi_dot_p(b, 0) * basis[b] - chi_dot_p(0, b) * basis[b].adjoint());

    MatrixXc rhs = -kImag * (q_dot * rho_s0 - rho_s0 * q_dot);
    for (long a = 1; a < d2; ++a) {
      for (long b = 1; b < d2; ++b) {
        const Complex c = chi_dot_p(a, b);
        if (c == Complex(0.0)) continue;
        const MatrixXc gram = basis[b].adjoint() * basis[a];
        rhs += c * (basis[a] * rho_s0 * basis[b].adjoint() -
                    0.5 * (gram * rho_s0 + rho_s0 * gram));
      }
    }

    const MatrixXc lhs = dyn.interaction_state_derivative(rho_s0, t, rep.lhs_spacing);
    const double res = max_abs(lhs - rhs);
    rep.times.push_back(t);
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  return rep;
}

} // namespace dlcorr
