#pragma once

#include "dlcorr/phase_poly.hpp"

#include <optional>
#include <vector>

namespace dlcorr {

// Thrown when the consistency chain forces a nonzero constant weakly to zero.
class InconsistentDynamics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Affine function coeffs . z + constant of the phase-space variables.
struct AffineConstraint {
  VectorXd coeffs;
  double constant = 0.0;

  AffineConstraint(VectorXd coeffs_in, double constant_in);
  static AffineConstraint from_poly(const PolyObservable& poly);

  PolyObservable to_poly(const PhaseLayout& layout) const;
  double eval(const VectorXd& z) const { return coeffs.dot(z) + constant; }
  double norm() const { return std::sqrt(coeffs.squaredNorm() + constant * constant); }
};

struct ConstraintSystem {
  PhaseLayout layout;
  std::vector<AffineConstraint> primaries;
  std::vector<AffineConstraint> secondaries;
  // Solved Lagrange multiplier per primary; nullopt marks an undetermined one.
  std::vector<std::optional<PolyObservable>> multipliers;
  MatrixXd c_matrix;                // {phi_a, phi_b} over all constraints
  MatrixXd d_matrix;                // inverse of C on the second-class block, zero elsewhere
  std::vector<int> first_class_idx;
  std::vector<int> second_class_idx;
  MatrixXd null_basis;              // columns span null(C); first-class combinations

  int total() const { return static_cast<int>(primaries.size() + secondaries.size()); }
  std::vector<AffineConstraint> all() const;
  bool all_second_class() const { return first_class_idx.empty(); }
};

// Primary constraints of a Lagrangian L = 1/2 qdot^T W qdot + qdot^T (a0 + A q) - V(q):
// one affine constraint n^T p - n^T a0 - n^T A q per null direction n of W.
std::vector<AffineConstraint> derive_primary_constraints(const MatrixXd& mass_matrix,
                                                         const VectorXd& linear_terms,
                                                         const MatrixXd& position_coupling = MatrixXd());

// Dirac's consistency algorithm for a quadratic Hamiltonian and affine
// constraints. Iterates the three-way case split (identity / multiplier
// solved / new constraint) until closure, then classifies and inverts the
// bracket matrix on the second-class block. The sign convention is
// chi_b = {phi_b, H_c}; a secondary constraint is appended as the raw
// consistency expression.
ConstraintSystem consistency_chain(const PolyObservable& h_c,
                                   const std::vector<AffineConstraint>& primaries);

// {a, b} - {a, phi_al} D_{al,be} {phi_be, b} on the second-class block.
PolyObservable dirac_bracket(const PolyObservable& a, const PolyObservable& b,
                             const ConstraintSystem& cs);

struct Trajectory {
  std::vector<double> times;
  MatrixXd states;               // one sample per row
  VectorXd constraint_residual;  // max_a |phi_a(z)| per sample
};

// Fixed-step RK4 integration of zdot_i = {z_i, H_c}* (a linear field for
// quadratic H and affine constraints). Constraint drift is recorded, not
// projected away.
Trajectory evolve_constrained(const VectorXd& initial, const PolyObservable& h_c,
                              const ConstraintSystem& cs, double t_final, double dt);

struct BlockDiagonalD {
  MatrixXd o_matrix;           // orthogonal
  MatrixXd block_matrix;       // O^T D O, 2x2 antisymmetric blocks plus zeros
  std::vector<double> blocks;  // b_k with block [[0, b_k], [-b_k, 0]]
};

// Real Schur decomposition of an antisymmetric matrix into 2x2 blocks.
BlockDiagonalD block_diagonalize(const MatrixXd& d_matrix);

} // namespace dlcorr
