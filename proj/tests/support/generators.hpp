#pragma once

// Hand-rolled random instances for property tests. Everything is driven by a
// caller-provided Rng so failures replay from the seed.
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rqla/linalg.hpp"
#include "rqla/pauli.hpp"
#include "rqla/statevector.hpp"

namespace rqla::gen {

inline std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline PauliString pauli_string(Rng& rng, std::size_t n, bool allow_identity = true) {
  for (;;) {
    const std::uint64_t mask = n == 64 ? ~0ULL : (std::uint64_t{1} << n) - 1;
    PauliString p(n, rng() & mask, rng() & mask);
    if (allow_identity || !p.is_identity()) return p;
  }
}

// L distinct non-identity strings with coefficients in +-[0.1, 1], rescaled to weight lambda if given.
// L is clamped to the 4^n - 1 strings that exist.
inline PauliOperator pauli_operator(Rng& rng, std::size_t n, std::size_t L, double lambda = 0.0) {
  if (n < 8) L = std::min(L, (std::size_t{1} << (2 * n)) - 1);
  std::vector<PauliOperator::Term> terms;
  while (terms.size() < L) {
    const PauliString p = pauli_string(rng, n, false);
    bool dup = false;
    for (const auto& t : terms) dup = dup || t.string == p;
    if (dup) continue;
    const double mag = uniform(rng, 0.1, 1.0);
    terms.push_back({p, (rng() & 1) ? mag : -mag});
  }
  if (lambda > 0.0) {
    double w = 0.0;
    for (const auto& t : terms) w += std::abs(t.coeff);
    for (auto& t : terms) t.coeff *= lambda / w;
  }
  return PauliOperator(n, terms);
}

inline StateVector state(Rng& rng, std::size_t n) {
  StateVector v(std::size_t{1} << n);
  for (auto& a : v) a = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  const double nv = norm(v);
  for (auto& a : v) a /= nv;
  return v;
}

inline Matrix hermitian(Rng& rng, std::size_t dim) {
  Matrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = uniform(rng, -1, 1);
    for (std::size_t j = i + 1; j < dim; ++j) {
      m(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

// Clifford gate list over H, S, CNOT and signed Paulis.
inline std::vector<PrepGate> clifford_gates(Rng& rng, std::size_t n, std::size_t depth) {
  std::vector<PrepGate> gates;
  for (std::size_t k = 0; k < depth; ++k) {
    PrepGate g{};
    const std::size_t kind = below(rng, n > 1 ? 4 : 3);
    g.q0 = g.q1 = below(rng, n);
    if (kind == 0) {
      g.kind = PrepGate::Kind::h;
    } else if (kind == 1) {
      g.kind = PrepGate::Kind::s;
    } else if (kind == 2) {
      g.kind = PrepGate::Kind::pauli;
      g.pauli = {static_cast<int>(2 * below(rng, 2)), pauli_string(rng, n)};
    } else {
      g.kind = PrepGate::Kind::cnot;
      while (g.q1 == g.q0) g.q1 = below(rng, n);
    }
    gates.push_back(g);
  }
  return gates;
}

inline GateString gate_string(Rng& rng, std::size_t n, std::size_t length) {
  GateString g(n);
  for (std::size_t k = 0; k < length; ++k) {
    if (rng() & 1)
      g.append_rotation(uniform(rng, -std::numbers::pi, std::numbers::pi), pauli_string(rng, n));
    else
      g.append_pauli({static_cast<int>(below(rng, 4)), pauli_string(rng, n)});
  }
  g.multiply_phase(std::exp(cplx(0.0, uniform(rng, -3, 3))));
  return g;
}

}  // namespace rqla::gen
