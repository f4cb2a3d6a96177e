#pragma once

#include "dlcorr/fock.hpp"
#include "dlcorr/lindblad.hpp"
#include "dlcorr/types.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace dlcorr {

// Thrown when the exact-dynamics truncation check fails.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coupled-oscillator model: system oscillator (k1) linearly coupled to one
// bath oscillator (k2) with strength k', coarse-graining time tau, bath
// inverse temperature inv_temp (named apart from the constraint coefficient
// beta).
struct ModelParams {
  double k1 = 1.0;
  double k2 = 1.0;
  double kprime = 0.0;
  double tau = 0.1;
  double inv_temp = 1.0;
  int n_sys = 12;
  int n_bath = 12;

  double omega0() const { return std::sqrt(k1); }
  double omega_bath() const { return std::sqrt(k2); }
  double kappa() const { return -kprime / (2.0 * std::sqrt(omega0() * omega_bath())); }
  double bose_occupation() const; // <b^dag b> at inv_temp
  FockSpec system_spec() const { return FockSpec::single(n_sys, omega0()); }
  FockSpec bath_spec() const { return FockSpec::single(n_bath, omega_bath()); }
  FockSpec total_spec() const { return {{n_sys, n_bath}, {omega0(), omega_bath()}}; }
  void validate() const;
};

// Windowed average of a phase factor: (1/tau) int_0^tau e^{iwt} dt
// = e^{i w tau / 2} sinc(w tau / 2); continuous at w = 0.
Complex gamma_sinc(double omega, double tau);

// Exponential-sum descriptor sum_j amp_j e^{i freq_j t}; closed under the
// averaged products below.
using ExpSum = std::vector<std::pair<Complex, double>>;

// (1/t) int_0^t p(t') q(t') dt' evaluated per term through gamma_sinc.
Complex gamma_integral(const ExpSum& p, const ExpSum& q, double t);

// The model's 2x2 dissipation matrix over the basis (a, a^dag): diagonal
// entries mix the two sinc^2 sidebands with Bose factors, off-diagonal
// entries carry coth(beta w_B / 2) e^{+-i w0 tau}.
DissipationMatrix dissipation_matrix_model(const ModelParams& params);
MatrixXc model_gamma_entries(const ModelParams& params);

struct LimitReport {
  double gamma11_limit;       // tau |kappa|^2 coth(inv_temp w_B / 2) sinc^2(w_B tau / 2)
  double mismatch_rel;        // |g11 - g22| / g11 from the full model
  double limit_vs_full_rel;   // |g11_limit - g11_full| / g11_full
  double tau_bath;            // 1 / w_B
  double tau_unitary;         // 1 / w0
  double tau;                 //
  double tau_relax;           // 1 / (2 g11_limit), relaxation scale
  bool bath_faster_than_unitary; // w_B >> w0 ordering holds
  bool coarse_grain_ordering;    // tau_bath < tau < tau_relax
};

// Limit-regime value of gamma11 plus regime diagnostics. Violations are
// reported, never enforced.
LimitReport dissipation_limit(const ModelParams& params);

struct KrausSet {
  std::vector<MatrixXc> ops;               // act on the system space
  std::vector<std::pair<int, int>> labels; // (l, m) bath matrix-element labels
  VectorXd weights;                        // p_m of the bath eigenstate m
  long system_dim = 0;

  double completeness_residual() const; // max |sum K^dag K - I|
};

// K_lm = sqrt(p_m) <l| U |m> over the bath eigenbasis of `bath_state`.
// Diagonal bath states keep the computational basis so that (l, m) label
// Fock levels directly.
KrausSet kraus_from_unitary(const MatrixXc& u_total, const MatrixXc& bath_state,
                            const FockSpec& total_spec);

MatrixXc osr_apply(const KrausSet& kraus, const MatrixXc& rho_s);

struct ChiMatrix {
  MatrixXc chi; // d_S^2 x d_S^2 over the orthonormal hs_basis
  double time = 0.0;
};

// chi_ab = sum_i b_ia conj(b_ib) with b_ia = Tr(S_a^dag K_i).
ChiMatrix chi_from_kraus(const KrausSet& kraus, const std::vector<MatrixXc>& basis,
                         double time = 0.0);
MatrixXc kraus_coefficients(const KrausSet& kraus, const std::vector<MatrixXc>& basis);

struct FirstOrderKraus {
  std::vector<MatrixXc> ops; // K^(0) + K^(1), interaction picture
  std::vector<std::pair<int, int>> labels;
  MatrixXc b;                // coefficients in the orthonormal hs_basis
  double coupling_ratio;     // |kappa| / w0
  bool weak_coupling_ok;
};

// First-order Dyson expansion of the interaction-picture Kraus operators for
// the oscillator model with a thermal bath.
FirstOrderKraus first_order_kraus(const ModelParams& params, double t,
                                  double weak_threshold = 0.1);

// H_LS = (i/2) sum_a (c_a S_a - conj(c_a) S_a^dag); hermitian by construction.
MatrixXc lamb_shift(const VectorXc& chi_dot_col, const std::vector<MatrixXc>& basis);

// <chi_dot_{a,0}> column over the basis (a, a^dag) for a bath with first
// moment <b> = b_mean (zero for any thermal state).
VectorXc model_chi0_column(const ModelParams& params, Complex b_mean);

// Exact reduced dynamics of the coupled model: propagate rho_s x thermal bath
// under the full Hamiltonian and trace the bath out. The eigendecomposition
// is cached so many times are cheap.
class ExactReducedDynamics {
 public:
  explicit ExactReducedDynamics(const ModelParams& params);

  MatrixXc reduced_state(const MatrixXc& rho_s0, double t, bool check_truncation = true) const;
  MatrixXc interaction_state(const MatrixXc& rho_s0, double t) const; // U0^dag frame
  MatrixXc interaction_state_derivative(const MatrixXc& rho_s0, double t, double dt_fd) const;
  KrausSet interaction_kraus(double t) const; // from U0(t)^dag U(t)
  KrausSet schrodinger_kraus(double t) const;

  const MatrixXc& h_system() const { return h_sys_; }
  const MatrixXc& h_total() const { return h_total_; }
  const MatrixXc& bath_state() const { return bath_thermal_; }
  const ModelParams& params() const { return params_; }

  // Highest-level populations (per mode) of the evolved total state.
  std::pair<double, double> top_level_population(const MatrixXc& rho_s0, double t) const;

 private:
  MatrixXc total_state(const MatrixXc& rho_s0, double t) const;
  MatrixXc u0(double t) const;

  ModelParams params_;
  FockSpec total_;
  MatrixXc h_sys_, h_bath_, h_int_, h_total_;
  std::unique_ptr<HermitianPropagator> prop_;
  std::unique_ptr<HermitianPropagator> prop_sys_, prop_bath_;
  MatrixXc bath_thermal_;
};

MatrixXc exact_reduced_dynamics(const ModelParams& params, const MatrixXc& rho_s0, double t);

struct FixedBasisOsrReport {
  double max_residual;   // worst per-entry residual of the evolution identity
  double grid_spacing;   // finite-difference step for chi and Q
  double lhs_spacing;    // finer step used for the state derivative
  std::vector<double> times;
  std::vector<double> residuals;
};

// Checks the fixed-basis evolution identity: the derivative of the reduced
// state equals -i[Qdot, rho_s(0)] + sum chi_dot_ab (S_a rho S_b^dag
// - 1/2 {S_b^dag S_a, rho}) with Q built from the chi_{a0} column. Evaluated
// in the interaction picture with central differences on the grid.
FixedBasisOsrReport validate_fixed_basis_osr(const ModelParams& params,
                                             const std::vector<double>& t_grid,
                                             const MatrixXc& rho_s0,
                                             double grid_spacing = 1e-3,
                                             const std::vector<MatrixXc>* rebased = nullptr);

} // namespace dlcorr
