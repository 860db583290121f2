#include "rqla/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rqla/errors.hpp"

namespace rqla {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

// v <- exp(i angle P) v = cos v + i sin P v
void apply_rotation(const PauliString& p, double c, double s, cplx* v, std::size_t dim) {
  const std::uint64_t x = p.x(), z = p.z();
  const cplx is_ph = cplx(0.0, s) * i_pow(p.y_count());
  if (x == 0) {
    const cplx plus = c + is_ph, minus = c - is_ph;
    for (std::size_t j = 0; j < dim; ++j) v[j] *= parity(j & z) ? minus : plus;
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & top) continue;
    const std::size_t k = j ^ x;
    const cplx vj = v[j], vk = v[k];
    // (P v)[j] = ph s(k) v[k], (P v)[k] = ph s(j) v[j]
    v[j] = c * vj + (parity(k & z) ? -is_ph : is_ph) * vk;
    v[k] = c * vk + (parity(j & z) ? -is_ph : is_ph) * vj;
  }
}

void check_unit(cplx phase) {
  if (std::abs(std::abs(phase) - 1.0) > 1e-9) throw ValidationError("gate string phase is not unit modulus");
}

}  // namespace

std::uint64_t shot_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

void GateString::append_pauli(const PhasedPauli& p) {
  if (p.string.size() != n_) throw DimensionError("gate width mismatch");
  phase_ *= p.phase_value();
  if (p.string.is_identity()) return;
  // merge with a trailing Pauli element to keep the string short
  if (!elements_.empty() && elements_.back().kind == GateElement::Kind::pauli) {
    // (P_new)(P_old) as operators
    PhasedPauli prod = multiply(p.string, elements_.back().string);
    phase_ *= prod.phase_value();
    if (prod.string.is_identity())
      elements_.pop_back();
    else
      elements_.back().string = prod.string;
    return;
  }
  elements_.push_back({GateElement::Kind::pauli, 0.0, 1.0, 0.0, p.string});
}

void GateString::append_rotation(double angle, const PauliString& axis) {
  if (!std::isfinite(angle)) throw ValidationError("non-finite rotation angle");
  append_rotation(angle, std::cos(angle), std::sin(angle), axis);
}

void GateString::append_rotation(double angle, double cos_a, double sin_a, const PauliString& axis) {
  if (axis.size() != n_) throw DimensionError("gate width mismatch");
  if (angle == 0.0) return;
  if (axis.is_identity()) {
    phase_ *= cplx(cos_a, sin_a);
    return;
  }
  elements_.push_back({GateElement::Kind::rotation, angle, cos_a, sin_a, axis});
}

void GateString::append(const GateString& later) {
  if (later.n_ != n_) throw DimensionError("gate width mismatch");
  phase_ *= later.phase_;
  for (const auto& e : later.elements_) {
    if (e.kind == GateElement::Kind::pauli)
      append_pauli({0, e.string});
    else
      elements_.push_back(e);
  }
}

GateString GateString::adjoint() const {
  GateString g(n_);
  g.phase_ = std::conj(phase_);
  g.elements_.reserve(elements_.size());
  for (auto it = elements_.rbegin(); it != elements_.rend(); ++it) {
    GateElement e = *it;
    e.angle = -e.angle;
    e.sin_a = -e.sin_a;
    g.elements_.push_back(e);
  }
  return g;
}

void GateString::apply(cplx* v, std::size_t dim) const {
  check_unit(phase_);
  for (const auto& e : elements_) {
    if (e.kind == GateElement::Kind::pauli)
      apply_pauli(e.string, cplx(1.0, 0.0), v, dim);
    else
      apply_rotation(e.string, e.cos_a, e.sin_a, v, dim);
  }
  if (phase_ != cplx(1.0, 0.0))
    for (std::size_t j = 0; j < dim; ++j) v[j] *= phase_;
}

void GateString::apply(StateVector& v) const {
  if (v.size() != (std::size_t{1} << n_)) throw DimensionError("state length does not match gate width");
  apply(v.data(), v.size());
}

Matrix GateString::dense() const {
  const std::size_t dim = std::size_t{1} << n_;
  Matrix m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    StateVector col = basis_state(dim, c);
    apply(col);
    for (std::size_t r = 0; r < dim; ++r) m(r, c) = col[r];
  }
  return m;
}

std::size_t GateString::rotation_count() const {
  return std::count_if(elements_.begin(), elements_.end(),
                       [](const GateElement& e) { return e.kind == GateElement::Kind::rotation; });
}

std::size_t GateString::pauli_count() const { return elements_.size() - rotation_count(); }

StatePrep StatePrep::basis(std::size_t n, std::uint64_t index, std::size_t depth) {
  if (n == 0 || n > kMaxQubits) throw DimensionError("qubit count out of range");
  if (n < 64 && index >= (std::uint64_t{1} << n)) throw DimensionError("basis index out of range");
  StatePrep p;
  p.n_ = n;
  p.kind_ = Kind::basis;
  p.index_ = index;
  p.depth_ = depth;
  return p;
}

StatePrep StatePrep::gates(std::size_t n, std::vector<PrepGate> gates, std::size_t depth) {
  if (n == 0 || n > kMaxQubits) throw DimensionError("qubit count out of range");
  for (const auto& g : gates) {
    if (g.q0 >= n || g.q1 >= n) throw DimensionError("prep gate qubit out of range");
    if (g.kind == PrepGate::Kind::cnot && g.q0 == g.q1) throw ValidationError("CNOT control equals target");
    if ((g.kind == PrepGate::Kind::pauli || g.kind == PrepGate::Kind::rotation) && g.pauli.string.size() != n)
      throw DimensionError("prep Pauli width mismatch");
  }
  StatePrep p;
  p.n_ = n;
  p.kind_ = Kind::gates;
  p.gates_ = std::move(gates);
  p.depth_ = depth ? depth : p.gates_.size();
  return p;
}

StatePrep StatePrep::dense(std::size_t n, StateVector amplitudes, std::size_t depth) {
  if (n == 0 || n > 30) throw DimensionError("qubit count out of range for a dense prep");
  if (amplitudes.size() != (std::size_t{1} << n)) throw DimensionError("amplitude count is not 2^n");
  if (std::abs(norm(amplitudes) - 1.0) > 1e-10) throw ValidationError("dense prep is not normalized");
  StatePrep p;
  p.n_ = n;
  p.kind_ = Kind::dense;
  p.amplitudes_ = std::move(amplitudes);
  p.depth_ = depth;
  return p;
}

bool StatePrep::is_clifford() const {
  if (kind_ == Kind::basis) return true;
  if (kind_ == Kind::dense) return false;
  return std::none_of(gates_.begin(), gates_.end(),
                      [](const PrepGate& g) { return g.kind == PrepGate::Kind::rotation; });
}

void apply_prep_gate(const PrepGate& g, std::size_t n, StateVector& v) {
  const std::size_t dim = v.size();
  const std::uint64_t b0 = std::uint64_t{1} << (n - 1 - g.q0);
  switch (g.kind) {
    case PrepGate::Kind::h: {
      const double r = 1.0 / std::sqrt(2.0);
      for (std::size_t j = 0; j < dim; ++j) {
        if (j & b0) continue;
        const cplx a = v[j], b = v[j | b0];
        v[j] = r * (a + b);
        v[j | b0] = r * (a - b);
      }
      break;
    }
    case PrepGate::Kind::s:
      for (std::size_t j = 0; j < dim; ++j)
        if (j & b0) v[j] *= cplx(0.0, 1.0);
      break;
    case PrepGate::Kind::cnot: {
      const std::uint64_t b1 = std::uint64_t{1} << (n - 1 - g.q1);
      for (std::size_t j = 0; j < dim; ++j)
        if ((j & b0) && !(j & b1)) std::swap(v[j], v[j | b1]);
      break;
    }
    case PrepGate::Kind::pauli:
      apply_pauli(g.pauli.string, g.pauli.phase_value(), v.data(), dim);
      break;
    case PrepGate::Kind::rotation:
      apply_rotation(g.pauli.string, std::cos(g.angle), std::sin(g.angle), v.data(), dim);
      break;
  }
}

StateVector StatePrep::prepare() const {
  const std::size_t dim = std::size_t{1} << n_;
  switch (kind_) {
    case Kind::basis:
      return basis_state(dim, index_);
    case Kind::dense:
      return amplitudes_;
    case Kind::gates: {
      StateVector v = basis_state(dim, 0);
      for (const auto& g : gates_) apply_prep_gate(g, n_, v);
      return v;
    }
  }
  return {};
}

Observable::Observable(PauliOperator o) : op(std::move(o)), one_norm(op.weight()) {
  double acc = 0.0;
  for (const auto& t : op.terms()) {
    acc += std::abs(t.coeff);
    cumulative.push_back(acc / one_norm);
  }
  if (!cumulative.empty()) cumulative.back() = 1.0;
}

std::size_t Observable::draw(Rng& rng) const {
  if (cumulative.empty()) throw ValidationError("empty observable");
  const double u = uniform01(rng);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

// Both routines below run the ancilla circuit on the full (n+1)-qubit register,
// ancilla as the leading qubit: block [0, dim) is ancilla 0, [dim, 2 dim) ancilla 1.
double hadamard_test_probability(const StateVector& psi, const StateVector& phi, const GateString& u, Part part) {
  const std::size_t dim = psi.size();
  if (phi.size() != dim || dim != (std::size_t{1} << u.num_qubits()))
    throw DimensionError("Hadamard test branch mismatch");
  const double h = 1.0 / std::sqrt(2.0);
  // H on the ancilla, U_phi / U_psi on the two branches, controlled-u
  StateVector reg(2 * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    reg[i] = h * phi[i];
    reg[dim + i] = h * psi[i];
  }
  u.apply(reg.data() + dim, dim);
  if (part == Part::imaginary)
    for (std::size_t i = dim; i < 2 * dim; ++i) reg[i] *= cplx(0.0, -1.0);  // S^dag
  double p0 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) p0 += std::norm(h * (reg[i] + reg[dim + i]));
  return std::clamp(p0, 0.0, 1.0);
}

int hadamard_test_shot(const StatePrep& psi, const StatePrep& phi, const GateString& u, Part part, Rng& rng) {
  if (psi.num_qubits() != u.num_qubits() || phi.num_qubits() != u.num_qubits())
    throw DimensionError("Hadamard test width mismatch");
  const double p = hadamard_test_probability(psi.prepare(), phi.prepare(), u, part);
  return uniform01(rng) < p ? 1 : -1;
}

double lcu_pair_probability(const StateVector& rho, const GateString& u, const GateString& v, const PauliString& p) {
  const std::size_t dim = rho.size();
  if (dim != (std::size_t{1} << p.size()) || u.num_qubits() != p.size() || v.num_qubits() != p.size())
    throw DimensionError("LCU pair width mismatch");
  const double h = 1.0 / std::sqrt(2.0);
  // |+> ancilla, anticontrolled-v, controlled-u
  StateVector reg(2 * dim);
  for (std::size_t i = 0; i < dim; ++i) reg[i] = reg[dim + i] = h * rho[i];
  v.apply(reg.data(), dim);
  u.apply(reg.data() + dim, dim);
  // <X (x) P>: P on both blocks, X swaps them
  StateVector w(reg.begin() + dim, reg.end());
  w.insert(w.end(), reg.begin(), reg.begin() + dim);
  apply_pauli(p, cplx(1.0, 0.0), w.data(), dim);
  apply_pauli(p, cplx(1.0, 0.0), w.data() + dim, dim);
  return std::clamp(0.5 * (1.0 + inner(reg, w).real()), 0.0, 1.0);
}

LcuOutcome lcu_pair_shot(const StatePrep& rho, const GateString& u, const GateString& v, const Observable& obs,
                         Rng& rng) {
  if (obs.op.empty()) throw ValidationError("empty observable");
  if (rho.num_qubits() != u.num_qubits() || v.num_qubits() != u.num_qubits() || obs.op.num_qubits() != u.num_qubits())
    throw DimensionError("LCU pair width mismatch");
  const std::size_t k = obs.draw(rng);
  const double p = lcu_pair_probability(rho.prepare(), u, v, obs.op.terms()[k].string);
  return {uniform01(rng) < p ? 1 : -1, k};
}

}  // namespace rqla
