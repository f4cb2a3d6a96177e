#pragma once

#include "dlcorr/types.hpp"

#include <vector>

namespace dlcorr {

// Dissipation matrix gamma_ab over a fixed operator basis {S_a} (identity
// excluded). Must be hermitian and positive semi-definite within tolerance.
struct DissipationMatrix {
  MatrixXc gamma;
  std::vector<MatrixXc> basis;
  double herm_tol = tol::hermitian;
  double psd_tol = -tol::gamma_psd; // magnitude of the allowed negative dip

  double min_eig() const;
  void validate() const;
};

// L[rho] = -i [H_S + H_LS, rho]
//          + sum_ab gamma_ab (S_a rho S_b^dag - 1/2 {S_b^dag S_a, rho}).
class GksGenerator {
 public:
  GksGenerator(MatrixXc h_s, MatrixXc h_ls, DissipationMatrix dissipation);

  MatrixXc apply(const MatrixXc& rho) const;
  const MatrixXc& h_total() const { return h_total_; }
  const DissipationMatrix& dissipation() const { return diss_; }

 private:
  MatrixXc h_total_;
  DissipationMatrix diss_;
  MatrixXc gram_; // sum_ab gamma_ab S_b^dag S_a, assembled once
};

GksGenerator build_generator(const MatrixXc& h_s, const MatrixXc& h_ls,
                             DissipationMatrix dissipation);

// Diagonal form: u^dag gamma u = diag(rates), L_c = sum_a S_a u_ac.
// Rates are sorted descending; dips inside the PSD tolerance band clip to
// zero, and zero-rate jump operators are kept but skipped during evolution.
struct LindbladForm {
  VectorXd rates;
  std::vector<MatrixXc> jump_ops;
  MatrixXc u;

  MatrixXc apply_dissipator(const MatrixXc& rho) const;
};

LindbladForm to_lindblad_form(const DissipationMatrix& gamma);

struct InvariantReport {
  Complex trace;
  double hermiticity;
  double min_eigenvalue;
  double purity;
};

InvariantReport monitor_invariants(const MatrixXc& rho);

// Hard abort limits for evolve_master; breaches throw with a diagnostic.
struct MonitorLimits {
  double trace_drift = 1e-6;
  double hermiticity = 1e-8;
  double min_eigenvalue = -1e-5;
};

struct MasterTrajectory {
  std::vector<double> times;
  std::vector<MatrixXc> states;
  std::vector<InvariantReport> monitors;
  // dt * ||H|| resolution guideline (< 0.1), reported but never enforced.
  double dt_hamiltonian_product = 0.0;
  bool dt_guideline_ok = true;
};

// Fixed-step RK4 on the generator; one sample every `sample_every` steps
// (the initial state is always sample 0).
MasterTrajectory evolve_master(const GksGenerator& gen, const MatrixXc& rho0,
                               double t_final, double dt, int sample_every = 1,
                               const MonitorLimits& limits = {});

} // namespace dlcorr
