#pragma once

#include "dlcorr/coarse_grain.hpp"
#include "dlcorr/constraints.hpp"

#include <string>
#include <vector>

namespace dlcorr {

// One closed-form alpha candidate (sign x originating equation) with the
// residuals of the reduced coefficient equations evaluated at it.
struct AlphaCandidate {
  double alpha = 0.0;
  bool real = false;
  double radicand = 0.0;
  std::string source; // "c5" or "c6"
  double eta = 0.0;
  double r5 = 0.0, r6 = 0.0, r7 = 0.0; // relative residuals
};

// Constraint coefficients inferred from the limit-regime dissipation data:
// beta = 1 by convention, gamma = 0 and delta = (k'/k2) beta forced by the
// operator comparison, alpha overdetermined by two closed forms.
struct CoefficientSolution {
  double beta = 1.0;
  double gamma_coeff = 0.0;
  double delta = 0.0;   // (k'/k2) * beta
  double z = 0.0;       // (k'^2 - k1 k2)/k2
  double gamma11 = 0.0; // limit-form value
  double c0 = 0.0;      // w0 gamma11 cos^2(w0 tau / 2)
  double c1 = 0.0;      // gamma11 sin^2(w0 tau / 2) / w0
  std::vector<AlphaCandidate> candidates;
  int best = -1; // min summed residual among real candidates
};

CoefficientSolution solve_coefficients(const ModelParams& params);

double eta_of(double alpha, double beta, const ModelParams& params);

// Constraints phi1 = alpha x1 + beta (p1 + (k'/k2) p2) and
// phi2 = (k1 - k'^2/k2) beta x1 - alpha p1; cross-checked against the
// consistency chain (the secondary it produces is parallel to phi2).
std::pair<AffineConstraint, AffineConstraint> build_constraints(double alpha, double beta,
                                                                const ModelParams& params);

// Coupled-oscillator Hamiltonian as a phase-space polynomial (2 dof).
PolyObservable model_hamiltonian(const ModelParams& params);

struct ClassicalLhs {
  MatrixXc reduced;           // (1/eta) weyl(phi2^2) on the system space
  double weak_term_norm;      // spectral norm of the dropped term with phi1
  double weak_term_low_block; // max |element| among the 3 lowest levels per mode
};

ClassicalLhs classical_lhs_operator(const AffineConstraint& phi1, const AffineConstraint& phi2,
                                    double eta, const ModelParams& params, int weak_dims = 8);

// 1/2 sum_ab gamma_ab S_b^dag S_a over the (a, a^dag) basis.
MatrixXc quantum_rhs_operator(const DissipationMatrix& gamma, const FockSpec& system_spec);

// gamma constructed so the four coefficient equations hold exactly for the
// given (alpha, beta); rank one, eigenvalues (2 gamma11, 0).
DissipationMatrix synthetic_gamma(double alpha, double beta, const ModelParams& params);

// Limit-regime gamma: equal diagonal, off-diagonal gamma11 e^{+-i w0 tau}.
DissipationMatrix limit_dissipation(const ModelParams& params);

// Relative residual of the algebraic identity c5 * c6 = c7^2 (checked on
// both the dissipation side and the constraint side).
double c_identity_residual(const ModelParams& params);

struct LindbladConstraintIdentity {
  double residual_half_factor; // phi2^2 / (2 gamma11 eta)
  double residual_full_factor; // phi2^2 / (gamma11 eta)
  std::string preferred;       // which convention fits
};

LindbladConstraintIdentity lindblad_constraint_identity(const DissipationMatrix& gamma,
                                                        const AffineConstraint& phi2,
                                                        double eta, const ModelParams& params,
                                                        int exclude = 2);

struct CorrespondenceReport {
  ModelParams params;
  bool synthetic = false;
  bool degenerate = false;
  std::string note;

  double c_residual[4] = {0, 0, 0, 0}; // c1..c4, relative
  double c5_residual = 0.0, c6_residual = 0.0, c7_residual = 0.0;
  double c5c6_minus_c7sq = 0.0;
  double gamma_limit_mismatch = 0.0; // |g11 - g22|/g11, full model
  double operator_gap_rel = 0.0;     // interior-block Frobenius gap
  double weak_term_norm = 0.0;
  double weak_term_low_block = 0.0;
  LindbladConstraintIdentity lind_dissi{0.0, 0.0, ""};

  CoefficientSolution solution;
  int chosen = -1;
  double alpha_used = 0.0;
  double eta_used = 0.0;
};

struct VerifyOptions {
  bool synthetic = false;
  double synthetic_alpha = 0.8;
  int candidate = -1; // -1 selects the best-residual candidate
  int n_sys = 16;
  int interior_exclude = 2;
  int weak_dims = 8;
};

// Assembles the dissipation data, solves for the constraint coefficients,
// builds both sides of the correspondence as operators on the system space
// and reports every residual. Failures are residuals, not errors.
CorrespondenceReport verify(const ModelParams& params, const VerifyOptions& opts = {});

} // namespace dlcorr
