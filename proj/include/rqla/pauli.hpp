#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rqla/linalg.hpp"

namespace rqla {

inline constexpr std::size_t kMaxQubits = 63;
inline constexpr double kDedupTol = 1e-12;

// Qubit k is the k-th character of the axes string and the most significant
// bit of a basis index: it lives at bit (n-1-k) of both masks. Y = i X Z.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);
  PauliString(std::size_t n, std::uint64_t x, std::uint64_t z);

  static PauliString parse(std::string_view axes);

  std::size_t size() const { return n_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t z() const { return z_; }

  char axis(std::size_t qubit) const;
  void set_axis(std::size_t qubit, char a);
  std::string str() const;

  bool is_identity() const { return (x_ | z_) == 0; }
  int weight() const;
  int y_count() const;
  bool commutes_with(const PauliString& o) const;

  // Concatenation: this acts on the leading qubits.
  PauliString tensor(const PauliString& o) const;

  Matrix dense() const;

  bool operator==(const PauliString& o) const = default;
  // canonical order: (z, x) lexicographic, then size
  std::strong_ordering operator<=>(const PauliString& o) const {
    if (auto c = z_ <=> o.z_; c != 0) return c;
    if (auto c = x_ <=> o.x_; c != 0) return c;
    return n_ <=> o.n_;
  }

 private:
  std::uint32_t n_ = 0;
  std::uint64_t x_ = 0, z_ = 0;
};

// i^phase * string
struct PhasedPauli {
  int phase = 0;
  PauliString string;

  cplx phase_value() const;
  bool operator==(const PhasedPauli&) const = default;
};

cplx i_pow(int k);
PhasedPauli multiply(const PauliString& p, const PauliString& q);
PhasedPauli multiply(const PhasedPauli& p, const PhasedPauli& q);

// In-place v <- i^phase P v.
void apply_pauli(const PauliString& p, int phase, StateVector& v);
// Same, on a 2^n block starting at offset (used for ancilla branches).
void apply_pauli(const PauliString& p, cplx factor, cplx* v, std::size_t dim);

class PauliOperator {
 public:
  struct Term {
    PauliString string;
    double coeff;
  };

  PauliOperator() = default;
  explicit PauliOperator(std::size_t n) : n_(n) {}
  // Duplicate strings are summed; |coeff| <= kDedupTol dropped.
  PauliOperator(std::size_t n, std::vector<Term> terms);

  std::size_t num_qubits() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  double weight() const;                // lambda
  std::size_t sparsity() const { return terms_.size(); }  // L
  bool empty() const { return terms_.empty(); }
  double coefficient(const PauliString& s) const;

  Matrix dense() const;
  PauliOperator conj() const;
  PauliOperator scaled(double s) const;
  // Places this operator on qubits [offset, offset+n) of a total-qubit register.
  PauliOperator embed(std::size_t total, std::size_t offset) const;
  PauliOperator plus_identity(double c) const;

  friend PauliOperator operator+(const PauliOperator& a, const PauliOperator& b);
  friend PauliOperator operator-(const PauliOperator& a, const PauliOperator& b);

 private:
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

PauliOperator decompose_dense(const Matrix& m, double tol = kDedupTol);
// A = X (x) H1 - Y (x) H2 on n+1 qubits, new qubit first. Top-right block is H1 + i H2.
PauliOperator hermitian_embed(const PauliOperator& h1, const PauliOperator& h2);
PauliOperator tensor(const PauliOperator& a, const PauliOperator& b);

StateVector apply_to_state(const PauliOperator& op, const StateVector& v);
StateVector apply_to_state(const PhasedPauli& p, const StateVector& v);

// Text format: "<coeff> <axes>" per line, '#' comments. Duplicates rejected.
PauliOperator parse_pauli_text(std::string_view text);
std::string format_pauli_text(const PauliOperator& op);
PauliOperator read_pauli_file(const std::string& path);

}  // namespace rqla
