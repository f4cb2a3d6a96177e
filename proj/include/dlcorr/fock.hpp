#pragma once

#include "dlcorr/phase_poly.hpp"
#include "dlcorr/types.hpp"

#include <vector>

namespace dlcorr {

// Stack of truncated bosonic modes (hbar = 1, unit mass). Mode 0 is the
// system; the bath mode, when present, comes second. Tensor-product indices
// run row-major over the modes: I = i_0 * N_1 + i_1 for two modes.
struct FockSpec {
  std::vector<int> dims;
  std::vector<double> frequencies;

  static FockSpec single(int dim, double omega) { return {{dim}, {omega}}; }

  int n_modes() const { return static_cast<int>(dims.size()); }
  long total_dim() const;
  void validate() const;
};

struct LadderOps {
  MatrixXc a;
  MatrixXc a_dag;
  MatrixXc x; // (a + a^dag) / sqrt(2 w)
  MatrixXc p; // i sqrt(w/2) (a^dag - a)
};

// Truncated lowering operator on a single mode, a[m-1, m] = sqrt(m).
MatrixXc lowering_matrix(int dim);

// Ladder and quadrature operators of one mode, embedded in the full tensor
// product with identities on the other modes.
LadderOps ladder_ops(const FockSpec& spec, int mode);

MatrixXc kron(const MatrixXc& a, const MatrixXc& b);
MatrixXc tensor(const std::vector<MatrixXc>& per_mode_ops);
MatrixXc embed(const FockSpec& spec, int mode, const MatrixXc& op);

// Trace over every mode not listed in `keep`; preserves the trace exactly.
MatrixXc partial_trace(const MatrixXc& rho, const FockSpec& spec,
                       const std::vector<int>& keep);

// Thermal state on one mode of the spec (diagonal Gibbs weights renormalized
// over the kept levels). inv_temp = +infinity selects the ground state.
// Throws when the discarded tail weight exceeds the tolerance.
MatrixXc thermal_state(const FockSpec& spec, int mode, double inv_temp,
                       double tail_tol = tol::thermal_tail);
double thermal_tail_weight(int dim, double beta_omega);

// U = exp(-i H t) for hermitian H, via eigendecomposition.
MatrixXc propagate(const MatrixXc& h, double t);

// Same, with the eigendecomposition cached across evaluation times.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const MatrixXc& h);
  MatrixXc at(double t) const;
  const VectorXd& eigenvalues() const { return vals_; }

 private:
  MatrixXc vecs_;
  VectorXd vals_;
};

// Weyl (symmetric-ordered) quantization of a degree <= 2 phase-space
// polynomial: q_k -> x_k, p_k -> p_k, mixed conjugate products symmetrized.
MatrixXc weyl_quantize(const PolyObservable& poly, const FockSpec& spec);

// Hilbert-Schmidt orthonormal operator basis with S_0 = I/sqrt(dim), then the
// traceless diagonal ladder, then the symmetric/antisymmetric pair for each
// j < k.
std::vector<MatrixXc> hs_basis(int dim);

// Interior block: drop the top `exclude` levels of every mode, where the
// truncated ladder algebra is exact.
std::vector<long> interior_indices(const FockSpec& spec, int exclude);
MatrixXc restrict_to(const MatrixXc& m, const std::vector<long>& idx);
double interior_fnorm(const MatrixXc& m, const FockSpec& spec, int exclude = 2);

// Diagnostics on operators and states.
double min_eigenvalue(const MatrixXc& hermitian);
double purity(const MatrixXc& rho);
double trace_distance(const MatrixXc& rho1, const MatrixXc& rho2);
void validate_density(const MatrixXc& rho, double herm_tol = tol::hermitian,
                      double trace_tol = tol::density_trace,
                      double min_eig_tol = tol::density_min_eig);
MatrixXc random_density(int dim, unsigned seed);

} // namespace dlcorr
