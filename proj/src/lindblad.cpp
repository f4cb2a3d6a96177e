#include "dlcorr/lindblad.hpp"

#include "dlcorr/fock.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace dlcorr {

double DissipationMatrix::min_eig() const {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (gamma + gamma.adjoint()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DissipationMatrix::validate() const {
  if (gamma.rows() != gamma.cols())
    throw std::invalid_argument("DissipationMatrix: gamma not square");
  if (static_cast<Eigen::Index>(basis.size()) != gamma.rows())
    throw std::invalid_argument("DissipationMatrix: basis size does not match gamma");
  for (const auto& s : basis)
    if (s.rows() != basis[0].rows() || s.cols() != basis[0].cols())
      throw std::invalid_argument("DissipationMatrix: basis operators differ in shape");
  const double scale = std::max(1.0, max_abs(gamma));
  if (hermiticity_residual(gamma) > herm_tol * scale)
    throw std::invalid_argument("DissipationMatrix: gamma not hermitian within tolerance");
  const double me = min_eig();
  if (me < -psd_tol * scale) {
    std::ostringstream os;
    os << "DissipationMatrix: gamma not positive semi-definite (min eigenvalue " << me << ")";
    throw std::invalid_argument(os.str());
  }
}

GksGenerator::GksGenerator(MatrixXc h_s, MatrixXc h_ls, DissipationMatrix dissipation)
    : diss_(std::move(dissipation)) {
  if (h_ls.size() == 0) h_ls = MatrixXc::Zero(h_s.rows(), h_s.cols());
  if (h_s.rows() != h_s.cols() || h_ls.rows() != h_s.rows() || h_ls.cols() != h_s.cols())
    throw std::invalid_argument("GksGenerator: Hamiltonian shapes inconsistent");
  diss_.validate();
  if (!diss_.basis.empty() && diss_.basis[0].rows() != h_s.rows())
    throw std::invalid_argument("GksGenerator: basis operators do not match the Hamiltonian");
  h_total_ = h_s + h_ls;
  if (hermiticity_residual(h_total_) > tol::hermitian * std::max(1.0, max_abs(h_total_)))
    throw std::invalid_argument("GksGenerator: H_S + H_LS is not hermitian");

  const auto n = static_cast<Eigen::Index>(diss_.basis.size());
  gram_ = MatrixXc::Zero(h_s.rows(), h_s.cols());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      gram_ += diss_.gamma(a, b) * (diss_.basis[b].adjoint() * diss_.basis[a]);
}

MatrixXc GksGenerator::apply(const MatrixXc& rho) const {
  MatrixXc out = -kImag * (h_total_ * rho - rho * h_total_);
  const auto n = static_cast<Eigen::Index>(diss_.basis.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const Complex g = diss_.gamma(a, b);
      if (g == Complex(0.0)) continue;
      out += g * (diss_.basis[a] * rho * diss_.basis[b].adjoint());
    }
  }
  out -= 0.5 * (gram_ * rho + rho * gram_);
  return out;
}

GksGenerator build_generator(const MatrixXc& h_s, const MatrixXc& h_ls,
                             DissipationMatrix dissipation) {
  return GksGenerator(h_s, h_ls, std::move(dissipation));
}

LindbladForm to_lindblad_form(const DissipationMatrix& gamma) {
  gamma.validate();
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (gamma.gamma + gamma.gamma.adjoint()));
  const auto n = gamma.gamma.rows();

  LindbladForm form;
  form.rates.resize(n);
  form.u.resize(n, n);
  // Descending order so the dominant channel comes first.
  for (Eigen::Index k = 0; k < n; ++k) {
    form.rates[k] = es.eigenvalues()[n - 1 - k];
    form.u.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  // Dips inside the PSD tolerance band are numerical noise and clip to zero;
  // anything lower already failed validate().
  for (Eigen::Index k = 0; k < n; ++k) {
    if (form.rates[k] < 0.0 && form.rates[k] >= -gamma.psd_tol) form.rates[k] = 0.0;
    if (form.rates[k] < 0.0)
      throw std::invalid_argument("to_lindblad_form: negative rate beyond clip tolerance");
  }
  const auto dim = gamma.basis.empty() ? 0 : gamma.basis[0].rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    MatrixXc l = MatrixXc::Zero(dim, dim);
    for (Eigen::Index a = 0; a < n; ++a) l += gamma.basis[a] * form.u(a, c);
    form.jump_ops.push_back(std::move(l));
  }
  return form;
}

MatrixXc LindbladForm::apply_dissipator(const MatrixXc& rho) const {
  MatrixXc out = MatrixXc::Zero(rho.rows(), rho.cols());
  for (size_t c = 0; c < jump_ops.size(); ++c) {
    if (rates[static_cast<Eigen::Index>(c)] == 0.0) continue;
    const MatrixXc& l = jump_ops[c];
    const MatrixXc ll = l.adjoint() * l;
    out += rates[static_cast<Eigen::Index>(c)] *
           (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
  }
  return out;
}

InvariantReport monitor_invariants(const MatrixXc& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("monitor_invariants: not square");
  InvariantReport rep;
  rep.trace = rho.trace();
  rep.hermiticity = hermiticity_residual(rho);
  rep.min_eigenvalue = min_eigenvalue(0.5 * (rho + rho.adjoint()));
  rep.purity = purity(rho);
  return rep;
}

MasterTrajectory evolve_master(const GksGenerator& gen, const MatrixXc& rho0,
                               double t_final, double dt, int sample_every,
                               const MonitorLimits& limits) {
  validate_density(rho0);
  if (dt <= 0.0 || t_final < 0.0 || sample_every < 1)
    throw std::invalid_argument("evolve_master: invalid time grid");

  const int n_steps = static_cast<int>(std::llround(t_final / dt));
  MasterTrajectory traj;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(gen.h_total(), Eigen::EigenvaluesOnly);
    const double h_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    traj.dt_hamiltonian_product = dt * h_norm;
    traj.dt_guideline_ok = traj.dt_hamiltonian_product < 0.1;
  }

  auto record = [&](double t, const MatrixXc& rho) {
    InvariantReport rep = monitor_invariants(rho);
    if (std::abs(rep.trace - Complex(1.0)) > limits.trace_drift ||
        rep.hermiticity > limits.hermiticity || rep.min_eigenvalue < limits.min_eigenvalue) {
      std::ostringstream os;
      os << "evolve_master: monitor breach at t = " << t << " (trace " << rep.trace
         << ", hermiticity " << rep.hermiticity << ", min eigenvalue " << rep.min_eigenvalue
         << ")";
      throw std::runtime_error(os.str());
    }
    traj.times.push_back(t);
    traj.states.push_back(rho);
    traj.monitors.push_back(rep);
  };

  MatrixXc rho = rho0;
  record(0.0, rho);
  for (int k = 1; k <= n_steps; ++k) {
    const MatrixXc k1 = gen.apply(rho);
    const MatrixXc k2 = gen.apply(rho + 0.5 * dt * k1);
    const MatrixXc k3 = gen.apply(rho + 0.5 * dt * k2);
    const MatrixXc k4 = gen.apply(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (k % sample_every == 0 || k == n_steps) record(k * dt, rho);
  }
  return traj;
}

} // namespace dlcorr
