#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "rqla/linalg.hpp"
#include "rqla/pauli.hpp"

namespace rqla {

// SplitMix64 stream. Every shot seeds its own stream, and mt19937_64 spends
// ~3 us per seeding; this one is a single word.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed = 0) : s_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t s_;
};

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::uint64_t shot_seed(std::uint64_t master, std::uint64_t index);

struct GateElement {
  enum class Kind : std::uint8_t { pauli, rotation };
  Kind kind;
  double angle;  // rotation only: exp(i angle P)
  double cos_a, sin_a;
  PauliString string;
};

// U = phase * E_{m-1} ... E_1 E_0, elements stored in application order.
class GateString {
 public:
  GateString() = default;
  explicit GateString(std::size_t n) : n_(n) {}

  std::size_t num_qubits() const { return n_; }
  cplx phase() const { return phase_; }
  const std::vector<GateElement>& elements() const { return elements_; }

  void multiply_phase(cplx c) { phase_ *= c; }
  // Back to the identity, keeping the allocation.
  void clear() {
    phase_ = 1.0;
    elements_.clear();
  }
  void reset(std::size_t n) {
    n_ = n;
    clear();
  }
  void append_pauli(const PhasedPauli& p);
  void append_rotation(double angle, const PauliString& axis);
  // cos and sin of angle already known (hot sampling loops)
  void append_rotation(double angle, double cos_a, double sin_a, const PauliString& axis);
  // this <- later * this
  void append(const GateString& later);

  GateString adjoint() const;
  void apply(StateVector& v) const;
  void apply(cplx* v, std::size_t dim) const;
  Matrix dense() const;

  std::size_t rotation_count() const;
  std::size_t pauli_count() const;

 private:
  std::size_t n_ = 0;
  cplx phase_{1.0, 0.0};
  std::vector<GateElement> elements_;
};

struct PrepGate {
  enum class Kind : std::uint8_t { h, s, cnot, pauli, rotation };
  Kind kind;
  std::size_t q0 = 0, q1 = 0;
  PhasedPauli pauli{};
  double angle = 0.0;
};

class StatePrep {
 public:
  enum class Kind { basis, gates, dense };

  static StatePrep basis(std::size_t n, std::uint64_t index, std::size_t depth = 0);
  static StatePrep gates(std::size_t n, std::vector<PrepGate> gates, std::size_t depth = 0);
  static StatePrep dense(std::size_t n, StateVector amplitudes, std::size_t depth = 0);

  std::size_t num_qubits() const { return n_; }
  Kind kind() const { return kind_; }
  std::size_t reported_depth() const { return depth_; }
  std::uint64_t index() const { return index_; }
  const std::vector<PrepGate>& gate_list() const { return gates_; }
  bool is_clifford() const;

  StateVector prepare() const;

 private:
  std::size_t n_ = 0;
  Kind kind_ = Kind::basis;
  std::size_t depth_ = 0;
  std::uint64_t index_ = 0;
  std::vector<PrepGate> gates_;
  StateVector amplitudes_;
};

void apply_prep_gate(const PrepGate& g, std::size_t n, StateVector& v);

struct Observable {
  explicit Observable(PauliOperator op);
  PauliOperator op;
  double one_norm;
  std::vector<double> cumulative;  // term-sampling table

  std::size_t draw(Rng& rng) const;
};

enum class Part { real, imaginary };

// Probability of +1 on the ancilla of the Hadamard test with branches
// |0>phi + |1>(u psi); phi, psi are the prepared vectors.
double hadamard_test_probability(const StateVector& psi, const StateVector& phi, const GateString& u, Part part);
int hadamard_test_shot(const StatePrep& psi, const StatePrep& phi, const GateString& u, Part part, Rng& rng);

struct LcuOutcome {
  int outcome;
  std::size_t pauli_index;
};
// Probability of +1 for X (x) P_k after controlled-u / anticontrolled-v on rho.
double lcu_pair_probability(const StateVector& rho, const GateString& u, const GateString& v, const PauliString& p);
LcuOutcome lcu_pair_shot(const StatePrep& rho, const GateString& u, const GateString& v, const Observable& obs,
                         Rng& rng);

}  // namespace rqla
