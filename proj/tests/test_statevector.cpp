#include <doctest.h>

#include <cmath>

#include "rqla/errors.hpp"
#include "rqla/oracle.hpp"
#include "rqla/statevector.hpp"
#include "support/generators.hpp"

using namespace rqla;

namespace {

double mean_shots(int shots, const std::function<int(Rng&)>& f, std::uint64_t seed) {
  long sum = 0;
  for (int s = 0; s < shots; ++s) {
    Rng rng(shot_seed(seed, s));
    sum += f(rng);
  }
  return static_cast<double>(sum) / shots;
}

// 5 sigma for a +-1 variable
double five_sigma(double mean, int shots) { return 5.0 * std::sqrt(std::max(1e-12, 1 - mean * mean) / shots) + 1e-12; }

}  // namespace

TEST_CASE("rotation element is cos + i sin P") {
  GateString g(1);
  g.append_rotation(0.37, PauliString::parse("Y"));
  const Matrix expect = cplx(std::cos(0.37)) * Matrix::identity(2) + cplx(0, std::sin(0.37)) * PauliString::parse("Y").dense();
  CHECK(frobenius_distance(g.dense(), expect) < 1e-14);
}

TEST_CASE("gate strings are unitary and compose in application order") {
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + gen::below(rng, 3);
    const GateString a = gen::gate_string(rng, n, 6), b = gen::gate_string(rng, n, 4);
    const Matrix da = a.dense();
    CHECK(frobenius_distance(da * da.adjoint(), Matrix::identity(da.rows())) < 1e-12);
    GateString ab = a;
    ab.append(b);
    CHECK(frobenius_distance(ab.dense(), b.dense() * da) < 1e-12);
    CHECK(frobenius_distance(a.adjoint().dense(), da.adjoint()) < 1e-12);
    StateVector v = gen::state(rng, n);
    const StateVector expect = da * v;
    a.apply(v);
    double err = 0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - expect[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("state preparations are normalized") {
  Rng rng(8);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 1 + gen::below(rng, 4);
    auto gates = gen::clifford_gates(rng, n, 20);
    PrepGate rot{};
    rot.kind = PrepGate::Kind::rotation;
    rot.pauli = {0, gen::pauli_string(rng, n)};
    rot.angle = 0.3;
    gates.push_back(rot);
    const auto prep = StatePrep::gates(n, gates);
    CHECK(std::abs(norm(prep.prepare()) - 1.0) < 1e-10);
    CHECK_FALSE(prep.is_clifford());
    CHECK(StatePrep::gates(n, gen::clifford_gates(rng, n, 5)).is_clifford());
  }
  CHECK_THROWS_AS(StatePrep::dense(1, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(StatePrep::basis(2, 4), DimensionError);
}

TEST_CASE("Hadamard test trivial examples") {
  const auto zero = StatePrep::basis(1, 0);
  const GateString id(1);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) CHECK(hadamard_test_shot(zero, zero, id, Part::real, rng) == 1);
  const StateVector z0 = zero.prepare();
  CHECK(hadamard_test_probability(z0, z0, id, Part::imaginary) == doctest::Approx(0.5));
}

TEST_CASE("Hadamard test on exp(i theta Z)") {
  const double theta = 0.7;
  GateString u(1);
  u.append_rotation(theta, PauliString::parse("Z"));
  const auto zero = StatePrep::basis(1, 0);
  const int shots = 100000;
  const double re = mean_shots(shots, [&](Rng& r) { return hadamard_test_shot(zero, zero, u, Part::real, r); }, 3);
  const double im = mean_shots(shots, [&](Rng& r) { return hadamard_test_shot(zero, zero, u, Part::imaginary, r); }, 4);
  CHECK(std::abs(re - std::cos(theta)) < five_sigma(std::cos(theta), shots));
  CHECK(std::abs(im - std::sin(theta)) < five_sigma(std::sin(theta), shots));
}

TEST_CASE("Hadamard test probability equals the overlap formula") {
  Rng rng(9);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + gen::below(rng, 3);
    const StateVector psi = gen::state(rng, n), phi = gen::state(rng, n);
    const GateString u = gen::gate_string(rng, n, 5);
    const cplx ov = inner(phi, u.dense() * psi);
    CHECK(2 * hadamard_test_probability(psi, phi, u, Part::real) - 1 == doctest::Approx(ov.real()).epsilon(1e-12));
    CHECK(2 * hadamard_test_probability(psi, phi, u, Part::imaginary) - 1 ==
          doctest::Approx(ov.imag()).epsilon(1e-12));
  }
}

TEST_CASE("LCU pair examples") {
  const auto zero = StatePrep::basis(1, 0);
  const Observable z(parse_pauli_text("1 Z"));
  const GateString id(1);
  GateString x(1);
  x.append_pauli({0, PauliString::parse("X")});
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    CHECK(lcu_pair_shot(zero, id, id, z, rng).outcome == 1);
    CHECK(lcu_pair_shot(zero, x, x, z, rng).outcome == -1);
  }
}

TEST_CASE("LCU pair mean is the symmetrized sandwich") {
  Rng rng(31);
  const Observable zi(parse_pauli_text("1 ZI"));
  for (int k = 0; k < 3; ++k) {
    const auto prep = StatePrep::gates(2, gen::clifford_gates(rng, 2, 8));
    const StateVector psi = prep.prepare();
    const GateString u = gen::gate_string(rng, 2, 5), v = gen::gate_string(rng, 2, 5);
    const Matrix o = zi.op.dense();
    const double expect = (inner(psi, u.dense().adjoint() * (o * (v.dense() * psi)))).real();
    CHECK(2 * lcu_pair_probability(psi, u, v, PauliString::parse("ZI")) - 1 == doctest::Approx(expect).epsilon(1e-12));
    const int shots = 100000;
    const double m = mean_shots(shots, [&](Rng& r) { return lcu_pair_shot(prep, u, v, zi, r).outcome; }, 40 + k);
    CHECK(std::abs(m - expect) < five_sigma(expect, shots));
  }
}

TEST_CASE("observable draws follow |o_k| / ||o||_1") {
  const Observable o(parse_pauli_text("0.75 Z\n-0.25 X"));
  CHECK(o.one_norm == doctest::Approx(1.0));
  CHECK(o.one_norm >= oracle::operator_norm(o.op.dense()) - 1e-12);
  // terms are kept in canonical order, so look up where Z landed
  const auto& terms = o.op.terms();
  const std::size_t zi = terms[0].string == PauliString::parse("Z") ? 0 : 1;
  Rng rng(6);
  int first = 0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) first += o.draw(rng) == zi;
  CHECK(std::abs(first / double(n) - 0.75) < 5 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("non-unit phase is rejected") {
  GateString g(1);
  g.multiply_phase(2.0);
  const StateVector v{1.0, 0.0};
  CHECK_THROWS_AS(hadamard_test_probability(v, v, g, Part::real), ValidationError);
}
