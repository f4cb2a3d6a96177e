#pragma once

#include "dlcorr/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace dlcorr {

// Phase-space layout: n_dof canonical pairs. Variable k in [0, n_dof) is the
// coordinate q_{k+1}, variable n_dof + k is the conjugate momentum p_{k+1};
// all coordinates come before all momenta.
struct PhaseLayout {
  int n_dof = 0;
  std::vector<std::string> names;

  static PhaseLayout make(int n_dof);

  int dim() const { return 2 * n_dof; }
  int q_index(int k) const { return k; }
  int p_index(int k) const { return n_dof + k; }

  bool operator==(const PhaseLayout&) const = default;
};

// Sparse real polynomial over the phase-space variables. Carrier for
// Hamiltonians, constraints and brackets; no zero-coefficient terms are
// stored, so exact cancellation leaves the zero polynomial.
class PolyObservable {
 public:
  using Monomial = std::vector<int>; // exponent per variable, length 2*n_dof

  explicit PolyObservable(PhaseLayout layout) : layout_(std::move(layout)) {}

  static PolyObservable constant(const PhaseLayout& layout, double value);
  static PolyObservable variable(const PhaseLayout& layout, int var_index);

  const PhaseLayout& layout() const { return layout_; }
  const std::map<Monomial, double>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coefficient(const Monomial& mono) const;
  void add_term(const Monomial& mono, double coeff);

  double eval(const VectorXd& z) const;
  PolyObservable derivative(int var_index) const;

  // Degree <= 1 accessors: f(z) = linear_coefficients() . z + constant_term().
  VectorXd linear_coefficients() const;
  double constant_term() const;

  // Drop terms with |coeff| <= eps (cleanup after float cancellations).
  PolyObservable pruned(double eps) const;

  double coeff_norm() const;
  std::string str() const;

  PolyObservable& operator+=(const PolyObservable& rhs);
  PolyObservable& operator-=(const PolyObservable& rhs);
  PolyObservable& operator*=(double s);

  friend PolyObservable operator+(PolyObservable a, const PolyObservable& b) { return a += b; }
  friend PolyObservable operator-(PolyObservable a, const PolyObservable& b) { return a -= b; }
  friend PolyObservable operator*(PolyObservable a, double s) { return a *= s; }
  friend PolyObservable operator*(double s, PolyObservable a) { return a *= s; }
  friend PolyObservable operator-(PolyObservable a) { return a *= -1.0; }
  friend PolyObservable operator*(const PolyObservable& a, const PolyObservable& b);

 private:
  void require_same_layout(const PolyObservable& other) const;

  PhaseLayout layout_;
  std::map<Monomial, double> terms_;
};

// Canonical Poisson bracket sum_k (da/dq_k db/dp_k - da/dp_k db/dq_k),
// exact in the coefficients.
PolyObservable poisson_bracket(const PolyObservable& a, const PolyObservable& b);

} // namespace dlcorr
