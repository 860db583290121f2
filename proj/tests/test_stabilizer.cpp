#include <doctest.h>

#include <cmath>
#include <map>

#include "rqla/stabilizer.hpp"
#include "support/generators.hpp"

using namespace rqla;

namespace {

Tableau run(std::size_t n, const std::vector<PrepGate>& gates) {
  Tableau t(n);
  for (const auto& g : gates) t.apply(g);
  return t;
}

double qubit_one_probability(const StateVector& v, std::size_t n, std::size_t q) {
  double p = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((i >> (n - 1 - q)) & 1) p += std::norm(v[i]);
  return p;
}

}  // namespace

TEST_CASE("H twice returns to |0>") {
  Tableau t(1);
  t.h(0);
  t.h(0);
  CHECK(t.peek_z(0) == 1);
  Rng rng(0);
  CHECK(t.measure_z(0, rng) == 1);
}

TEST_CASE("Bell pair has ZZ = +1") {
  Tableau t(2);
  t.h(0);
  t.cnot(0, 1);
  CHECK(t.expectation(PauliString::parse("ZZ")) == 1);
  CHECK(t.expectation(PauliString::parse("XX")) == 1);
  CHECK(t.expectation(PauliString::parse("YY")) == -1);
  CHECK(t.expectation(PauliString::parse("ZI")) == 0);
  CHECK(t.is_valid());
}

TEST_CASE("GHZ parity XXX is +1") {
  Tableau t(3);
  t.h(0);
  t.cnot(0, 1);
  t.cnot(1, 2);
  CHECK(t.expectation(PauliString::parse("XXX")) == 1);
}

TEST_CASE("|+> measures +-1 evenly") {
  const int shots = 10000;
  Rng rng(77);
  int plus = 0;
  for (int s = 0; s < shots; ++s) {
    Tableau t(1);
    t.h(0);
    plus += t.measure_z(0, rng) == 1;
  }
  const double chi2 = std::pow(plus - shots / 2.0, 2) / (shots / 2.0) * 2.0;
  CHECK(chi2 < 10.83);  // 1 dof, p = 0.001
}

TEST_CASE("single-qubit Z marginals match the statevector") {
  Rng rng(123);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 3;
    const auto gates = gen::clifford_gates(rng, n, 20);
    const Tableau t = run(n, gates);
    CHECK(t.is_valid());
    const StateVector v = StatePrep::gates(n, gates).prepare();
    for (std::size_t q = 0; q < n; ++q) {
      const double p1 = qubit_one_probability(v, n, q);
      const int peek = t.peek_z(q);
      const double tableau_p1 = peek == 0 ? 0.5 : (peek == 1 ? 0.0 : 1.0);
      CHECK(std::abs(p1 - tableau_p1) < 1e-10);
    }
  }
}

TEST_CASE("Pauli expectations match the statevector") {
  Rng rng(5150);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + gen::below(rng, 4);
    const auto gates = gen::clifford_gates(rng, n, 30);
    const Tableau t = run(n, gates);
    const StateVector v = StatePrep::gates(n, gates).prepare();
    const PauliString p = gen::pauli_string(rng, n);
    const double exact = inner(v, apply_to_state(PhasedPauli{0, p}, v)).real();
    CHECK(std::abs(exact - t.expectation(p)) < 1e-10);
  }
}

TEST_CASE("controlled Pauli and extra gates match the statevector") {
  Rng rng(404);
  for (int c = 0; c < 40; ++c) {
    const std::size_t n = 3;
    auto gates = gen::clifford_gates(rng, n, 10);
    Tableau t = run(n, gates);
    StateVector v = StatePrep::gates(n, gates).prepare();
    // controlled-P with control 0 on qubits 1..2
    PauliString p = gen::pauli_string(rng, n);
    p.set_axis(0, 'I');
    t.controlled_pauli(0, p);
    StateVector w = v;
    apply_to_state(PhasedPauli{0, p}, v).swap(w);
    for (std::size_t i = 4; i < 8; ++i) v[i] = w[i];
    t.sdg(1);
    t.cz(1, 2);
    t.cy(2, 0);
    // the same three gates densely
    auto apply_dense = [&](const Matrix& m) { v = m * v; };
    const Matrix I2 = Matrix::identity(2);
    const Matrix sdg = Matrix::from_rows({{1, 0}, {0, cplx(0, -1)}});
    apply_dense(kron(kron(I2, sdg), I2));
    Matrix cz = Matrix::identity(8);
    for (std::size_t i = 0; i < 8; ++i)
      if ((i & 2) && (i & 1)) cz(i, i) = -1;
    apply_dense(cz);
    Matrix cy(8, 8);
    const Matrix y0 = kron(PauliString::parse("Y").dense(), Matrix::identity(4));
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) cy(i, j) = (j & 1) ? y0(i, j) : (i == j ? cplx(1) : cplx(0));
    apply_dense(cy);
    CHECK(t.is_valid());
    for (int k = 0; k < 10; ++k) {
      const PauliString q = gen::pauli_string(rng, n);
      const double exact = inner(v, apply_to_state(PhasedPauli{0, q}, v)).real();
      CHECK(std::abs(exact - t.expectation(q)) < 1e-10);
    }
  }
}

TEST_CASE("gate cost is O(n) row updates") {
  for (std::size_t n : {4u, 16u, 64u, 100u}) {
    Tableau t(n);
    t.h(0);
    t.cnot(0, n - 1);
    t.s(1);
    CHECK(t.elementary_gates() == 3);
    CHECK(t.row_updates() == 3 * 2 * n);
  }
}

TEST_CASE("rotations are rejected") {
  Tableau t(1);
  PrepGate g{};
  g.kind = PrepGate::Kind::rotation;
  g.pauli = {0, PauliString::parse("Z")};
  g.angle = 0.1;
  CHECK_THROWS(t.apply(g));
}
