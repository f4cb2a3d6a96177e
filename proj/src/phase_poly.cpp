#include "dlcorr/phase_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dlcorr {

PhaseLayout PhaseLayout::make(int n_dof) {
  if (n_dof < 1) throw std::invalid_argument("PhaseLayout: n_dof must be >= 1");
  PhaseLayout layout;
  layout.n_dof = n_dof;
  layout.names.reserve(2 * n_dof);
  for (int k = 0; k < n_dof; ++k) layout.names.push_back("x" + std::to_string(k + 1));
  for (int k = 0; k < n_dof; ++k) layout.names.push_back("p" + std::to_string(k + 1));
  return layout;
}

PolyObservable PolyObservable::constant(const PhaseLayout& layout, double value) {
  PolyObservable p(layout);
  p.add_term(Monomial(layout.dim(), 0), value);
  return p;
}

PolyObservable PolyObservable::variable(const PhaseLayout& layout, int var_index) {
  if (var_index < 0 || var_index >= layout.dim())
    throw std::invalid_argument("PolyObservable: variable index out of range");
  PolyObservable p(layout);
  Monomial mono(layout.dim(), 0);
  mono[var_index] = 1;
  p.add_term(mono, 1.0);
  return p;
}

int PolyObservable::degree() const {
  int deg = 0;
  for (const auto& [mono, coeff] : terms_)
    deg = std::max(deg, std::accumulate(mono.begin(), mono.end(), 0));
  return deg;
}

double PolyObservable::coefficient(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? 0.0 : it->second;
}

void PolyObservable::add_term(const Monomial& mono, double coeff) {
  if (static_cast<int>(mono.size()) != layout_.dim())
    throw std::invalid_argument("PolyObservable: monomial length does not match layout");
  auto it = terms_.find(mono);
  if (it == terms_.end()) {
    if (coeff != 0.0) terms_.emplace(mono, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == 0.0) terms_.erase(it);
}

double PolyObservable::eval(const VectorXd& z) const {
  if (z.size() != layout_.dim())
    throw std::invalid_argument("PolyObservable: point dimension does not match layout");
  double value = 0.0;
  for (const auto& [mono, coeff] : terms_) {
    double term = coeff;
    for (int v = 0; v < layout_.dim(); ++v)
      for (int e = 0; e < mono[v]; ++e) term *= z[v];
    value += term;
  }
  return value;
}

PolyObservable PolyObservable::derivative(int var_index) const {
  if (var_index < 0 || var_index >= layout_.dim())
    throw std::invalid_argument("PolyObservable: derivative index out of range");
  PolyObservable out(layout_);
  for (const auto& [mono, coeff] : terms_) {
    if (mono[var_index] == 0) continue;
    Monomial m = mono;
    double c = coeff * m[var_index];
    m[var_index] -= 1;
    out.add_term(m, c);
  }
  return out;
}

VectorXd PolyObservable::linear_coefficients() const {
  if (degree() > 1)
    throw std::invalid_argument("PolyObservable: linear_coefficients requires degree <= 1");
  VectorXd c = VectorXd::Zero(layout_.dim());
  for (const auto& [mono, coeff] : terms_) {
    for (int v = 0; v < layout_.dim(); ++v)
      if (mono[v] == 1) c[v] = coeff;
  }
  return c;
}

double PolyObservable::constant_term() const {
  return coefficient(Monomial(layout_.dim(), 0));
}

PolyObservable PolyObservable::pruned(double eps) const {
  PolyObservable out(layout_);
  for (const auto& [mono, coeff] : terms_)
    if (std::abs(coeff) > eps) out.add_term(mono, coeff);
  return out;
}

double PolyObservable::coeff_norm() const {
  double s = 0.0;
  for (const auto& [mono, coeff] : terms_) s += coeff * coeff;
  return std::sqrt(s);
}

std::string PolyObservable::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : terms_) {
    if (!first) os << (coeff < 0 ? " - " : " + ");
    else if (coeff < 0) os << "-";
    first = false;
    const double a = std::abs(coeff);
    bool printed = false;
    if (a != 1.0 || std::all_of(mono.begin(), mono.end(), [](int e) { return e == 0; })) {
      os << a;
      printed = true;
    }
    for (int v = 0; v < layout_.dim(); ++v) {
      if (mono[v] == 0) continue;
      if (printed) os << "*";
      os << layout_.names[v];
      if (mono[v] > 1) os << "^" << mono[v];
      printed = true;
    }
  }
  return os.str();
}

void PolyObservable::require_same_layout(const PolyObservable& other) const {
  if (!(layout_ == other.layout_))
    throw std::invalid_argument("PolyObservable: phase-space layouts differ");
}

PolyObservable& PolyObservable::operator+=(const PolyObservable& rhs) {
  require_same_layout(rhs);
  for (const auto& [mono, coeff] : rhs.terms_) add_term(mono, coeff);
  return *this;
}

PolyObservable& PolyObservable::operator-=(const PolyObservable& rhs) {
  require_same_layout(rhs);
  for (const auto& [mono, coeff] : rhs.terms_) add_term(mono, -coeff);
  return *this;
}

PolyObservable& PolyObservable::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [mono, coeff] : terms_) coeff *= s;
  return *this;
}

PolyObservable operator*(const PolyObservable& a, const PolyObservable& b) {
  a.require_same_layout(b);
  PolyObservable out(a.layout_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      PolyObservable::Monomial m(ma.size());
      for (size_t v = 0; v < ma.size(); ++v) m[v] = ma[v] + mb[v];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

PolyObservable poisson_bracket(const PolyObservable& a, const PolyObservable& b) {
  if (!(a.layout() == b.layout()))
    throw std::invalid_argument("poisson_bracket: phase-space layouts differ");
  const PhaseLayout& layout = a.layout();
  PolyObservable out(layout);
  for (int k = 0; k < layout.n_dof; ++k) {
    const int q = layout.q_index(k);
    const int p = layout.p_index(k);
    out += a.derivative(q) * b.derivative(p);
    out -= a.derivative(p) * b.derivative(q);
  }
  return out;
}

} // namespace dlcorr
