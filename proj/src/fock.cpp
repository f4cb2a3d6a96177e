#include "dlcorr/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dlcorr {

long FockSpec::total_dim() const {
  long d = 1;
  for (int n : dims) d *= n;
  return d;
}

void FockSpec::validate() const {
  if (dims.empty()) throw std::invalid_argument("FockSpec: no modes");
  if (dims.size() != frequencies.size())
    throw std::invalid_argument("FockSpec: dims/frequencies size mismatch");
  for (int n : dims)
    if (n < 2) throw std::invalid_argument("FockSpec: every truncation must be >= 2");
  for (double w : frequencies)
    if (!(w > 0.0)) throw std::invalid_argument("FockSpec: frequencies must be positive");
}

MatrixXc lowering_matrix(int dim) {
  if (dim < 2) throw std::invalid_argument("lowering_matrix: dim must be >= 2");
  MatrixXc a = MatrixXc::Zero(dim, dim);
  for (int m = 1; m < dim; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
  MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatrixXc tensor(const std::vector<MatrixXc>& per_mode_ops) {
  if (per_mode_ops.empty()) throw std::invalid_argument("tensor: no factors");
  MatrixXc out = per_mode_ops[0];
  for (size_t k = 1; k < per_mode_ops.size(); ++k) out = kron(out, per_mode_ops[k]);
  return out;
}

MatrixXc embed(const FockSpec& spec, int mode, const MatrixXc& op) {
  spec.validate();
  if (mode < 0 || mode >= spec.n_modes()) throw std::invalid_argument("embed: bad mode index");
  if (op.rows() != spec.dims[mode] || op.cols() != spec.dims[mode])
    throw std::invalid_argument("embed: operator does not match the mode dimension");
  std::vector<MatrixXc> factors;
  factors.reserve(spec.dims.size());
  for (int k = 0; k < spec.n_modes(); ++k)
    factors.push_back(k == mode ? op : MatrixXc::Identity(spec.dims[k], spec.dims[k]));
  return tensor(factors);
}

LadderOps ladder_ops(const FockSpec& spec, int mode) {
  spec.validate();
  if (mode < 0 || mode >= spec.n_modes())
    throw std::invalid_argument("ladder_ops: bad mode index");
  const double w = spec.frequencies[mode];
  const MatrixXc a1 = lowering_matrix(spec.dims[mode]);
  LadderOps ops;
  ops.a = embed(spec, mode, a1);
  ops.a_dag = ops.a.adjoint();
  ops.x = (ops.a + ops.a_dag) / std::sqrt(2.0 * w);
  ops.p = kImag * std::sqrt(w / 2.0) * (ops.a_dag - ops.a);
  return ops;
}

namespace {

std::vector<long> mode_strides(const FockSpec& spec) {
  std::vector<long> stride(spec.dims.size());
  long s = 1;
  for (int k = spec.n_modes() - 1; k >= 0; --k) {
    stride[k] = s;
    s *= spec.dims[k];
  }
  return stride;
}

} // namespace

MatrixXc partial_trace(const MatrixXc& rho, const FockSpec& spec,
                       const std::vector<int>& keep) {
  spec.validate();
  if (rho.rows() != spec.total_dim() || rho.cols() != spec.total_dim())
    throw std::invalid_argument("partial_trace: state does not match the spec dimension");
  for (int k : keep)
    if (k < 0 || k >= spec.n_modes()) throw std::invalid_argument("partial_trace: bad mode");

  const auto stride = mode_strides(spec);
  std::vector<int> traced;
  long keep_dim = 1, trace_dim = 1;
  for (int k = 0; k < spec.n_modes(); ++k) {
    if (std::count(keep.begin(), keep.end(), k)) {
      keep_dim *= spec.dims[k];
    } else {
      traced.push_back(k);
      trace_dim *= spec.dims[k];
    }
  }

  // Row-major enumeration of the kept and traced sub-indices.
  auto expand = [&](long compact, const std::vector<int>& modes) {
    long full = 0;
    for (int k = static_cast<int>(modes.size()) - 1; k >= 0; --k) {
      const int m = modes[k];
      full += (compact % spec.dims[m]) * stride[m];
      compact /= spec.dims[m];
    }
    return full;
  };
  std::vector<int> kept_sorted;
  for (int k = 0; k < spec.n_modes(); ++k)
    if (std::count(keep.begin(), keep.end(), k)) kept_sorted.push_back(k);

  MatrixXc out = MatrixXc::Zero(keep_dim, keep_dim);
  for (long i = 0; i < keep_dim; ++i) {
    const long base_i = expand(i, kept_sorted);
    for (long j = 0; j < keep_dim; ++j) {
      const long base_j = expand(j, kept_sorted);
      Complex sum = 0.0;
      for (long b = 0; b < trace_dim; ++b) {
        const long off = expand(b, traced);
        sum += rho(base_i + off, base_j + off);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

double thermal_tail_weight(int dim, double beta_omega) {
  // Untruncated Gibbs weights p_m = (1 - e^-bw) e^-bw m; tail beyond dim-1.
  return std::exp(-beta_omega * dim);
}

MatrixXc thermal_state(const FockSpec& spec, int mode, double inv_temp, double tail_tol) {
  spec.validate();
  if (mode < 0 || mode >= spec.n_modes())
    throw std::invalid_argument("thermal_state: bad mode index");
  const int n = spec.dims[mode];
  MatrixXc rho = MatrixXc::Zero(n, n);
  if (std::isinf(inv_temp) && inv_temp > 0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  if (!(inv_temp > 0.0))
    throw std::invalid_argument("thermal_state: inv_temp must be positive (or +inf for T = 0)");
  const double bw = inv_temp * spec.frequencies[mode];
  if (thermal_tail_weight(n, bw) > tail_tol)
    throw std::invalid_argument(
        "thermal_state: truncated tail weight exceeds tolerance; increase the mode dimension");
  double norm = 0.0;
  for (int m = 0; m < n; ++m) norm += std::exp(-bw * m);
  for (int m = 0; m < n; ++m) rho(m, m) = std::exp(-bw * m) / norm;
  return rho;
}

HermitianPropagator::HermitianPropagator(const MatrixXc& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("propagate: matrix not square");
  if (hermiticity_residual(h) > tol::hermitian * std::max(1.0, max_abs(h)))
    throw std::invalid_argument("propagate: Hamiltonian is not hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  vecs_ = es.eigenvectors();
  vals_ = es.eigenvalues();
}

MatrixXc HermitianPropagator::at(double t) const {
  VectorXc phases(vals_.size());
  for (Eigen::Index k = 0; k < vals_.size(); ++k)
    phases[k] = std::exp(-kImag * vals_[k] * t);
  MatrixXc u = vecs_ * phases.asDiagonal() * vecs_.adjoint();
  if (unitarity_residual(u) > tol::unitary)
    throw std::runtime_error("propagate: unitary deviation beyond tolerance");
  return u;
}

MatrixXc propagate(const MatrixXc& h, double t) { return HermitianPropagator(h).at(t); }

MatrixXc weyl_quantize(const PolyObservable& poly, const FockSpec& spec) {
  spec.validate();
  const PhaseLayout& layout = poly.layout();
  if (layout.n_dof != spec.n_modes())
    throw std::invalid_argument("weyl_quantize: layout modes do not match the spec");
  if (poly.degree() > 2)
    throw std::invalid_argument("weyl_quantize: polynomial degree > 2 unsupported");

  const long dim = spec.total_dim();
  std::vector<MatrixXc> var_ops(layout.dim());
  for (int k = 0; k < layout.n_dof; ++k) {
    LadderOps ops = ladder_ops(spec, k);
    var_ops[layout.q_index(k)] = std::move(ops.x);
    var_ops[layout.p_index(k)] = std::move(ops.p);
  }

  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (const auto& [mono, coeff] : poly.terms()) {
    std::vector<int> vars;
    for (int v = 0; v < layout.dim(); ++v)
      for (int e = 0; e < mono[v]; ++e) vars.push_back(v);
    switch (vars.size()) {
      case 0:
        out += coeff * MatrixXc::Identity(dim, dim);
        break;
      case 1:
        out += coeff * var_ops[vars[0]];
        break;
      case 2: {
        const MatrixXc& u = var_ops[vars[0]];
        const MatrixXc& v = var_ops[vars[1]];
        out += (0.5 * coeff) * (u * v + v * u);
        break;
      }
      default:
        throw std::logic_error("weyl_quantize: unreachable");
    }
  }
  return out;
}

std::vector<MatrixXc> hs_basis(int dim) {
  if (dim < 2) throw std::invalid_argument("hs_basis: dim must be >= 2");
  std::vector<MatrixXc> basis;
  basis.reserve(static_cast<size_t>(dim) * dim);
  basis.push_back(MatrixXc::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
  for (int l = 1; l < dim; ++l) {
    MatrixXc d = MatrixXc::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) d(j, j) = norm;
    d(l, l) = -l * norm;
    basis.push_back(std::move(d));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      MatrixXc sym = MatrixXc::Zero(dim, dim);
      sym(j, k) = r;
      sym(k, j) = r;
      basis.push_back(std::move(sym));
      MatrixXc asym = MatrixXc::Zero(dim, dim);
      asym(j, k) = kImag * r;
      asym(k, j) = -kImag * r;
      basis.push_back(std::move(asym));
    }
  }
  return basis;
}

std::vector<long> interior_indices(const FockSpec& spec, int exclude) {
  spec.validate();
  if (exclude < 0) throw std::invalid_argument("interior_indices: exclude must be >= 0");
  for (int n : spec.dims)
    if (n - exclude < 1)
      throw std::invalid_argument("interior_indices: exclusion empties a mode");
  const auto stride = mode_strides(spec);
  std::vector<long> idx;
  const long total = spec.total_dim();
  for (long i = 0; i < total; ++i) {
    long rem = i;
    bool keep = true;
    for (int k = 0; k < spec.n_modes(); ++k) {
      const int level = static_cast<int>(rem / stride[k]);
      rem %= stride[k];
      if (level >= spec.dims[k] - exclude) {
        keep = false;
        break;
      }
    }
    if (keep) idx.push_back(i);
  }
  return idx;
}

MatrixXc restrict_to(const MatrixXc& m, const std::vector<long>& idx) {
  MatrixXc out(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

double interior_fnorm(const MatrixXc& m, const FockSpec& spec, int exclude) {
  return restrict_to(m, interior_indices(spec, exclude)).norm();
}

double min_eigenvalue(const MatrixXc& hermitian) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double purity(const MatrixXc& rho) { return (rho * rho).trace().real(); }

double trace_distance(const MatrixXc& rho1, const MatrixXc& rho2) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho1 - rho2, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

void validate_density(const MatrixXc& rho, double herm_tol, double trace_tol,
                      double min_eig_tol) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density: not square");
  if (hermiticity_residual(rho) > herm_tol)
    throw std::invalid_argument("density: not hermitian within tolerance");
  if (std::abs(rho.trace() - Complex(1.0)) > trace_tol)
    throw std::invalid_argument("density: trace differs from 1 beyond tolerance");
  if (min_eigenvalue(rho) < min_eig_tol)
    throw std::invalid_argument("density: negative eigenvalue beyond tolerance");
}

MatrixXc random_density(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXc g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(dist(gen), dist(gen));
  MatrixXc rho = g * g.adjoint();
  rho /= rho.trace();
  return rho;
}

} // namespace dlcorr
