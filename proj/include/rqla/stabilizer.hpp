#pragma once

#include <cstdint>
#include <vector>

#include "rqla/pauli.hpp"
#include "rqla/statevector.hpp"

namespace rqla {

// Aaronson-Gottesman tableau: rows 0..n-1 destabilizers, n..2n-1 stabilizers,
// row 2n scratch. Each row is packed x bits | z bits | sign.
class Tableau {
 public:
  explicit Tableau(std::size_t n);  // |0...0>

  std::size_t num_qubits() const { return n_; }

  void h(std::size_t q);
  void s(std::size_t q);
  void sdg(std::size_t q);
  void x(std::size_t q);
  void y(std::size_t q);
  void z(std::size_t q);
  void cnot(std::size_t c, std::size_t t);
  void cz(std::size_t a, std::size_t b);
  void cy(std::size_t c, std::size_t t);
  void pauli(const PauliString& p);
  // Controlled-P with control c; P must not act on c.
  void controlled_pauli(std::size_t c, const PauliString& p);
  void apply(const PrepGate& g);  // rotations rejected

  int measure_z(std::size_t q, Rng& rng);
  // +1/-1 when deterministic, 0 otherwise.
  int peek_z(std::size_t q) const;
  // Expectation of a Pauli string (sign included): +1, -1 or 0.
  int expectation(const PauliString& p) const;

  // Row-level check that stabilizers commute and destabilizer pairs anticommute as required.
  bool is_valid() const;

  std::uint64_t elementary_gates() const { return gates_; }
  std::uint64_t row_updates() const { return row_updates_; }

 private:
  bool xbit(std::size_t row, std::size_t q) const { return (xs_[row * w_ + q / 64] >> (q % 64)) & 1; }
  bool zbit(std::size_t row, std::size_t q) const { return (zs_[row * w_ + q / 64] >> (q % 64)) & 1; }
  void rowsum(std::size_t h, std::size_t i);
  void rowcopy(std::size_t dst, std::size_t src);
  void check(std::size_t q) const;
  // Each single- or two-qubit gate touches one bit column in every row.
  template <class F>
  void each_row(F&& f) {
    for (std::size_t row = 0; row < 2 * n_; ++row) f(row);
    ++gates_;
    row_updates_ += 2 * n_;
  }
  int row_sum_phase(std::size_t h, std::size_t i) const;

  std::size_t n_, w_;
  std::vector<std::uint64_t> xs_, zs_;
  std::vector<std::uint8_t> r_;
  std::uint64_t gates_ = 0, row_updates_ = 0;
};

}  // namespace rqla
