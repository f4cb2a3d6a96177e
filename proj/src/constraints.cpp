#include "dlcorr/constraints.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dlcorr {

namespace {

constexpr int kMaxChainRounds = 64;

VectorXd stack_affine(const AffineConstraint& c) {
  VectorXd v(c.coeffs.size() + 1);
  v << c.coeffs, c.constant;
  return v;
}

AffineConstraint unstack_affine(const VectorXd& v) {
  return AffineConstraint(v.head(v.size() - 1), v[v.size() - 1]);
}

// Least-squares projection residual of `v` against the span of `basis` columns.
VectorXd span_residual(const MatrixXd& basis, const VectorXd& v) {
  if (basis.cols() == 0) return v;
  VectorXd coeffs = basis.completeOrthogonalDecomposition().solve(v);
  return v - basis * coeffs;
}

double constant_0(const PolyObservable& p, const char* what) {
  if (p.degree() > 0)
    throw std::logic_error(std::string(what) + ": expected a constant bracket");
  return p.constant_term();
}

} // namespace

AffineConstraint::AffineConstraint(VectorXd coeffs_in, double constant_in)
    : coeffs(std::move(coeffs_in)), constant(constant_in) {
  if (coeffs.size() == 0 || (coeffs.isZero(0.0) && constant == 0.0))
    throw std::invalid_argument("AffineConstraint: identically zero");
}

AffineConstraint AffineConstraint::from_poly(const PolyObservable& poly) {
  if (poly.degree() > 1)
    throw std::invalid_argument("AffineConstraint: polynomial has degree > 1");
  return AffineConstraint(poly.linear_coefficients(), poly.constant_term());
}

PolyObservable AffineConstraint::to_poly(const PhaseLayout& layout) const {
  if (coeffs.size() != layout.dim())
    throw std::invalid_argument("AffineConstraint: coefficient length does not match layout");
  PolyObservable p = PolyObservable::constant(layout, constant);
  for (int v = 0; v < layout.dim(); ++v) {
    if (coeffs[v] != 0.0) p += coeffs[v] * PolyObservable::variable(layout, v);
  }
  return p;
}

std::vector<AffineConstraint> ConstraintSystem::all() const {
  std::vector<AffineConstraint> out = primaries;
  out.insert(out.end(), secondaries.begin(), secondaries.end());
  return out;
}

std::vector<AffineConstraint> derive_primary_constraints(const MatrixXd& mass_matrix,
                                                         const VectorXd& linear_terms,
                                                         const MatrixXd& position_coupling) {
  const auto n = mass_matrix.rows();
  if (mass_matrix.cols() != n) throw std::invalid_argument("derive_primary_constraints: W not square");
  if (max_abs(mass_matrix - mass_matrix.transpose()) > 1e-12 * std::max(1.0, max_abs(mass_matrix)))
    throw std::invalid_argument("derive_primary_constraints: W not symmetric");
  VectorXd a0 = linear_terms.size() == 0 ? VectorXd::Zero(n) : linear_terms;
  MatrixXd aq = position_coupling.size() == 0 ? MatrixXd::Zero(n, n) : position_coupling;
  if (a0.size() != n || aq.rows() != n || aq.cols() != n)
    throw std::invalid_argument("derive_primary_constraints: velocity-term shapes do not match W");

  Eigen::JacobiSVD<MatrixXd> svd(mass_matrix, Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tol::rank_rel * std::max(sv[0], 1e-300) : 0.0;

  // p = W qdot + a0 + A q, so each null direction n of W pins n.(p - a0 - A q).
  std::vector<AffineConstraint> out;
  for (int k = 0; k < sv.size(); ++k) {
    if (sv[k] > cutoff) continue;
    VectorXd dir = svd.matrixV().col(k);
    VectorXd coeffs = VectorXd::Zero(2 * n);
    coeffs.head(n) = -aq.transpose() * dir;
    coeffs.tail(n) = dir;
    out.emplace_back(coeffs, -dir.dot(a0));
  }
  return out;
}

ConstraintSystem consistency_chain(const PolyObservable& h_c,
                                   const std::vector<AffineConstraint>& primaries) {
  const PhaseLayout& layout = h_c.layout();
  if (h_c.degree() > 2)
    throw std::invalid_argument("consistency_chain: Hamiltonian degree > 2 unsupported");
  const int dim1 = layout.dim() + 1;
  const int n_primary = static_cast<int>(primaries.size());

  ConstraintSystem cs;
  cs.layout = layout;
  cs.primaries = primaries;
  for (const auto& c : primaries) {
    if (c.coeffs.size() != layout.dim())
      throw std::invalid_argument("consistency_chain: constraint does not match layout");
    if (c.coeffs.isZero(0.0))
      throw InconsistentDynamics("consistency_chain: primary constraint is a nonzero constant");
  }

  std::vector<AffineConstraint> constraints = primaries;
  MatrixXd multiplier_rows(n_primary, dim1);
  multiplier_rows.setZero();

  for (int round = 0;; ++round) {
    if (round > kMaxChainRounds)
      throw std::logic_error("consistency_chain: did not close (internal error)");
    const int n_total = static_cast<int>(constraints.size());
    if (n_total == 0) break;

    std::vector<PolyObservable> phi_polys;
    phi_polys.reserve(n_total);
    for (const auto& c : constraints) phi_polys.push_back(c.to_poly(layout));

    // chi_n = {phi_n, H_c} and the multiplier coupling A_nm = {phi_n, phi_m}.
    MatrixXd chi(n_total, dim1);
    MatrixXd coupling(n_total, n_primary);
    for (int n = 0; n < n_total; ++n) {
      PolyObservable bracket = poisson_bracket(phi_polys[n], h_c);
      if (bracket.degree() > 1)
        throw std::logic_error("consistency_chain: non-affine consistency expression");
      chi.row(n).head(layout.dim()) = bracket.linear_coefficients();
      chi(n, dim1 - 1) = bracket.constant_term();
      for (int m = 0; m < n_primary; ++m)
        coupling(n, m) = constant_0(poisson_bracket(phi_polys[n], phi_polys[m]),
                                    "consistency_chain");
    }

    // Dirac's case (b) first: absorb what the multipliers can (minimum-norm
    // least squares), then test the leftovers for weak zero (a) or promote
    // them to new constraints (c).
    MatrixXd lambda(n_primary, dim1);
    if (n_primary > 0)
      lambda = coupling.completeOrthogonalDecomposition().pseudoInverse() * (-chi);
    else
      lambda.resize(0, dim1);

    MatrixXd span(dim1, n_total);
    for (int n = 0; n < n_total; ++n) span.col(n) = stack_affine(constraints[n]);

    std::vector<AffineConstraint> fresh;
    for (int n = 0; n < n_total; ++n) {
      VectorXd residual = chi.row(n).transpose();
      if (n_primary > 0) residual += (coupling.row(n) * lambda).transpose();
      const double scale = std::max(1.0, chi.row(n).norm());
      if (residual.norm() <= tol::span_residual * scale) continue;

      MatrixXd span_now(dim1, span.cols() + static_cast<int>(fresh.size()));
      span_now.leftCols(span.cols()) = span;
      for (size_t f = 0; f < fresh.size(); ++f)
        span_now.col(span.cols() + static_cast<int>(f)) = stack_affine(fresh[f]);
      VectorXd leftover = span_residual(span_now, residual);
      if (leftover.norm() <= tol::span_residual * scale) continue;

      if (leftover.head(layout.dim()).norm() <= tol::span_residual * scale) {
        std::ostringstream os;
        os << "consistency_chain: inconsistent dynamics, constraint chain forces "
           << leftover[dim1 - 1] << " ~ 0";
        throw InconsistentDynamics(os.str());
      }
      fresh.push_back(unstack_affine(residual));
    }

    if (fresh.empty()) {
      multiplier_rows = lambda;
      break;
    }
    constraints.insert(constraints.end(), fresh.begin(), fresh.end());
  }

  cs.secondaries.assign(constraints.begin() + n_primary, constraints.end());

  // Undetermined multipliers live in the null space of the coupling matrix.
  const int n_total = cs.total();
  std::vector<PolyObservable> phi_polys;
  for (const auto& c : constraints) phi_polys.push_back(c.to_poly(layout));
  if (n_primary > 0 && n_total > 0) {
    MatrixXd coupling(n_total, n_primary);
    for (int n = 0; n < n_total; ++n)
      for (int m = 0; m < n_primary; ++m)
        coupling(n, m) = constant_0(poisson_bracket(phi_polys[n], phi_polys[m]),
                                    "consistency_chain");
    Eigen::JacobiSVD<MatrixXd> svd(coupling, Eigen::ComputeFullV);
    const double cutoff =
        svd.singularValues().size() > 0
            ? tol::rank_rel * std::max(svd.singularValues()[0], 1e-300)
            : 0.0;
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()[k] > cutoff) ++rank;
    for (int m = 0; m < n_primary; ++m) {
      bool undetermined = false;
      for (int k = rank; k < n_primary; ++k)
        if (std::abs(svd.matrixV()(m, k)) > tol::rank_rel) undetermined = true;
      if (undetermined) {
        cs.multipliers.emplace_back(std::nullopt);
      } else {
        PolyObservable lam = PolyObservable::constant(layout, multiplier_rows(m, dim1 - 1));
        for (int v = 0; v < layout.dim(); ++v)
          if (multiplier_rows(m, v) != 0.0)
            lam += multiplier_rows(m, v) * PolyObservable::variable(layout, v);
        cs.multipliers.emplace_back(std::move(lam));
      }
    }
  }

  // Bracket matrix, classification, and the inverse on the second-class block.
  cs.c_matrix.resize(n_total, n_total);
  for (int i = 0; i < n_total; ++i)
    for (int j = 0; j < n_total; ++j)
      cs.c_matrix(i, j) = constant_0(poisson_bracket(phi_polys[i], phi_polys[j]),
                                     "consistency_chain");

  cs.d_matrix = MatrixXd::Zero(n_total, n_total);
  cs.null_basis.resize(n_total, 0);
  if (n_total > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(cs.c_matrix, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double cutoff = tol::rank_rel * std::max(smax, 1e-300);
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
      if (sv[k] > cutoff) ++rank;

    cs.null_basis.resize(n_total, n_total - rank);
    for (int k = rank; k < n_total; ++k) cs.null_basis.col(k - rank) = svd.matrixV().col(k);

    // Antisymmetric matrices attain their rank on a principal submatrix;
    // grow the second-class index set two at a time.
    std::vector<int> selected;
    while (static_cast<int>(selected.size()) < rank) {
      int best_i = -1, best_j = -1;
      double best_sigma = -1.0;
      for (int i = 0; i < n_total; ++i) {
        if (std::count(selected.begin(), selected.end(), i)) continue;
        for (int j = i + 1; j < n_total; ++j) {
          if (std::count(selected.begin(), selected.end(), j)) continue;
          std::vector<int> trial = selected;
          trial.push_back(i);
          trial.push_back(j);
          MatrixXd sub(trial.size(), trial.size());
          for (size_t r = 0; r < trial.size(); ++r)
            for (size_t c = 0; c < trial.size(); ++c) sub(r, c) = cs.c_matrix(trial[r], trial[c]);
          Eigen::JacobiSVD<MatrixXd> sub_svd(sub);
          const double sigma_min = sub_svd.singularValues().minCoeff();
          if (sigma_min > best_sigma) {
            best_sigma = sigma_min;
            best_i = i;
            best_j = j;
          }
        }
      }
      if (best_i < 0 || best_sigma <= cutoff)
        throw std::logic_error("consistency_chain: second-class block selection failed");
      selected.push_back(best_i);
      selected.push_back(best_j);
    }
    std::sort(selected.begin(), selected.end());
    cs.second_class_idx = selected;
    for (int i = 0; i < n_total; ++i)
      if (!std::count(selected.begin(), selected.end(), i)) cs.first_class_idx.push_back(i);

    if (!selected.empty()) {
      const int q = static_cast<int>(selected.size());
      MatrixXd block(q, q);
      for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) block(r, c) = cs.c_matrix(selected[r], selected[c]);
      MatrixXd inv = block.inverse();
      for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) cs.d_matrix(selected[r], selected[c]) = inv(r, c);
    }
  }
  return cs;
}

PolyObservable dirac_bracket(const PolyObservable& a, const PolyObservable& b,
                             const ConstraintSystem& cs) {
  if (!(a.layout() == b.layout()) || !(a.layout() == cs.layout))
    throw std::invalid_argument("dirac_bracket: phase-space layouts differ");
  if (!cs.all_second_class())
    throw std::invalid_argument(
        "dirac_bracket: first-class constraints present; supply gauge-fixing conditions as "
        "additional constraints first");

  PolyObservable out = poisson_bracket(a, b);
  if (cs.second_class_idx.empty()) return out;

  const auto& idx = cs.second_class_idx;
  const int q = static_cast<int>(idx.size());
  MatrixXd block(q, q);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) block(r, c) = cs.c_matrix(idx[r], idx[c]);
  Eigen::JacobiSVD<MatrixXd> svd(block);
  const double sigma_min = svd.singularValues().minCoeff();
  const double sigma_max = svd.singularValues().maxCoeff();
  if (sigma_min <= 0.0 || sigma_max / sigma_min > tol::condition_limit)
    throw std::runtime_error("dirac_bracket: constraint bracket matrix is singular");

  const auto constraints = cs.all();
  std::vector<PolyObservable> left, right;
  left.reserve(q);
  right.reserve(q);
  for (int r = 0; r < q; ++r) {
    PolyObservable phi = constraints[idx[r]].to_poly(cs.layout);
    left.push_back(poisson_bracket(a, phi));
    right.push_back(poisson_bracket(phi, b));
  }

  double magnitude = 0.0;
  for (const auto& [mono, coeff] : out.terms()) magnitude = std::max(magnitude, std::abs(coeff));
  PolyObservable correction(cs.layout);
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      const double d = cs.d_matrix(idx[r], idx[c]);
      if (d == 0.0) continue;
      correction += d * (left[r] * right[c]);
      double lm = 0.0, rm = 0.0;
      for (const auto& [mono, coeff] : left[r].terms()) lm = std::max(lm, std::abs(coeff));
      for (const auto& [mono, coeff] : right[c].terms()) rm = std::max(rm, std::abs(coeff));
      magnitude += std::abs(d) * lm * rm;
    }
  }
  out -= correction;
  // Cancellations in the correction sum leave roundoff-sized debris; dropping
  // it makes strong annihilation an exact zero polynomial.
  return out.pruned(1e-12 * magnitude);
}

Trajectory evolve_constrained(const VectorXd& initial, const PolyObservable& h_c,
                              const ConstraintSystem& cs, double t_final, double dt) {
  const PhaseLayout& layout = h_c.layout();
  if (initial.size() != layout.dim())
    throw std::invalid_argument("evolve_constrained: initial point dimension mismatch");
  if (dt <= 0.0 || t_final < 0.0)
    throw std::invalid_argument("evolve_constrained: invalid time grid");

  const auto constraints = cs.all();
  for (const auto& c : constraints) {
    if (std::abs(c.eval(initial)) > tol::constraint_surface * std::max(1.0, c.norm()))
      throw std::invalid_argument(
          "evolve_constrained: initial point is off the constraint surface");
  }

  // The Dirac flow of a quadratic Hamiltonian with affine constraints is the
  // affine field zdot = F z + g.
  const int d = layout.dim();
  MatrixXd field(d, d);
  VectorXd offset(d);
  for (int i = 0; i < d; ++i) {
    PolyObservable zi = PolyObservable::variable(layout, i);
    PolyObservable rate = constraints.empty() ? poisson_bracket(zi, h_c)
                                              : dirac_bracket(zi, h_c, cs);
    if (rate.degree() > 1)
      throw std::logic_error("evolve_constrained: nonlinear Dirac flow (internal error)");
    field.row(i) = rate.linear_coefficients().transpose();
    offset[i] = rate.constant_term();
  }

  const int n_steps = static_cast<int>(std::llround(t_final / dt));
  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.states.resize(n_steps + 1, d);
  traj.constraint_residual.resize(n_steps + 1);

  auto rhs = [&](const VectorXd& z) -> VectorXd { return field * z + offset; };
  auto record = [&](int k, double t, const VectorXd& z) {
    traj.times[k] = t;
    traj.states.row(k) = z.transpose();
    double res = 0.0;
    for (const auto& c : constraints) res = std::max(res, std::abs(c.eval(z)));
    traj.constraint_residual[k] = res;
  };

  VectorXd z = initial;
  record(0, 0.0, z);
  for (int k = 1; k <= n_steps; ++k) {
    const VectorXd k1 = rhs(z);
    const VectorXd k2 = rhs(z + 0.5 * dt * k1);
    const VectorXd k3 = rhs(z + 0.5 * dt * k2);
    const VectorXd k4 = rhs(z + dt * k3);
    z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(k, k * dt, z);
  }
  return traj;
}

BlockDiagonalD block_diagonalize(const MatrixXd& d_matrix) {
  const auto n = d_matrix.rows();
  if (d_matrix.cols() != n) throw std::invalid_argument("block_diagonalize: matrix not square");
  const double scale = std::max(1.0, max_abs(d_matrix));
  if (antisymmetry_residual(d_matrix) > tol::antisymmetry * scale)
    throw std::invalid_argument("block_diagonalize: matrix not antisymmetric");

  BlockDiagonalD out;
  out.o_matrix = MatrixXd::Identity(n, n);
  out.block_matrix = MatrixXd::Zero(n, n);
  if (n == 0) return out;

  Eigen::RealSchur<MatrixXd> schur(d_matrix);
  out.o_matrix = schur.matrixU();
  const MatrixXd& t = schur.matrixT();

  const double pair_cut = tol::rank_rel * scale;
  for (Eigen::Index k = 0; k < n;) {
    if (k + 1 < n && std::abs(t(k + 1, k)) > pair_cut) {
      const double b = 0.5 * (t(k, k + 1) - t(k + 1, k));
      out.block_matrix(k, k + 1) = b;
      out.block_matrix(k + 1, k) = -b;
      out.blocks.push_back(b);
      k += 2;
    } else {
      k += 1;
    }
  }

  const MatrixXd recon = out.o_matrix.transpose() * d_matrix * out.o_matrix;
  if (max_abs(recon - out.block_matrix) > tol::block_reconstruct * scale)
    throw std::runtime_error("block_diagonalize: reconstruction residual too large");
  return out;
}

} // namespace dlcorr
