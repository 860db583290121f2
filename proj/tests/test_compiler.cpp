#include <doctest.h>

#include <cmath>

#include "rqla/compiler.hpp"
#include "rqla/oracle.hpp"
#include "support/enumerate.hpp"
#include "support/generators.hpp"

using namespace rqla;

namespace {

double op_norm(const Matrix& m) { return oracle::operator_norm(m); }

}  // namespace

TEST_CASE("tau = 0 segment is the identity") {
  const auto seg = build_segment(0.0);
  REQUIRE(seg.gamma_n.size() == 1);
  CHECK(seg.gamma_n[0] == 1.0);
  CHECK(seg.theta_n[0] == 0.0);
  CHECK(seg.total_gamma == 1.0);
}

TEST_CASE("segment weight stays below exp(tau^2)") {
  CHECK(build_segment(1.0).total_gamma <= std::exp(1.0));
  for (double tau : {0.1, 0.5, 1.0, 1.7, 2.0}) CHECK(build_segment(tau).total_gamma <= std::exp(tau * tau));
}

TEST_CASE("segment weights follow the closed form") {
  const double tau = 0.8;
  const auto seg = build_segment(tau);
  double fact = 1.0;
  for (std::size_t m = 0; m < seg.gamma_n.size(); ++m) {
    const double n = 2.0 * m;
    if (m > 0) fact *= (n - 1) * n;
    const double g = std::pow(tau, n) / fact * std::sqrt(1 + tau * tau / ((n + 1) * (n + 1)));
    CHECK(seg.gamma_n[m] == doctest::Approx(g).epsilon(1e-12));
    CHECK(seg.theta_n[m] == doctest::Approx(std::atan(tau / (n + 1))).epsilon(1e-12));
  }
}

TEST_CASE("choose_r examples") {
  CHECK(choose_r(1, 1, 1) == 1);
  CHECK(choose_r(2, 3, 1) == 36);
  CHECK(choose_r(1, 2, 2) == 8);
  CHECK(choose_r(1, 0, 1) == 1);
  const CompiledExponential ce(parse_pauli_text("1 Z"), 2.0, choose_r(1, 2, 2));
  CHECK(ce.total_weight() <= std::exp(0.5));
}

TEST_CASE("0.7 Z at t = 1.3 with r = 4 enumerates to expm") {
  const auto op = parse_pauli_text("0.7 Z");
  const CompiledExponential ce(op, 1.3, 4);
  CHECK(op_norm(enumerate::compiled_expectation(ce) - oracle::expm(op.dense(), 1.3)) < 1e-8);
}

TEST_CASE("enumeration matches expm on random operators") {
  Rng rng(2024);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + gen::below(rng, 2);
    const std::size_t L = 1 + gen::below(rng, 4);
    const double lambda = gen::uniform(rng, 0.2, 1.5);
    const auto op = gen::pauli_operator(rng, n, L, lambda);
    const double t = gen::uniform(rng, -2.0, 2.0) / op.weight();
    const std::size_t r = 1 + gen::below(rng, 4);
    const CompiledExponential ce(op, t, r);
    const double err = op_norm(enumerate::compiled_expectation(ce) - oracle::expm(op.dense(), t));
    CHECK(err <= 10 * kDefaultTailTol * ce.total_weight() + 1e-13);
    CHECK(ce.total_weight() <= std::exp(op.weight() * op.weight() * t * t / r));
  }
}

TEST_CASE("weight bound over many random draws") {
  Rng rng(99);
  for (int k = 0; k < 1000; ++k) {
    const double lambda = gen::uniform(rng, 0.01, 3.0), t = gen::uniform(rng, -3, 3);
    const std::size_t r = 1 + gen::below(rng, 10);
    const auto seg = build_segment(lambda * std::abs(t) / r);
    CHECK(std::pow(seg.total_gamma, r) <= std::exp(lambda * lambda * t * t / r) * (1 + 1e-12));
  }
}

TEST_CASE("sampled strings have r rotations and at most max-order Paulis per segment") {
  Rng rng(7);
  const auto op = gen::pauli_operator(rng, 2, 4, 1.0);
  const CompiledExponential ce(op, 1.5, 3);
  for (int k = 0; k < 2000; ++k) {
    const GateString g = ce.sample(rng);
    CHECK(g.rotation_count() == 3);
    CHECK(g.pauli_count() <= 3);
    CHECK(std::abs(std::abs(g.phase()) - 1.0) < 1e-12);
  }
}

TEST_CASE("single Z term: empirical mean of <0|U|0> tracks exp(i a t)") {
  const double a = 0.6, t = 1.1;
  const CompiledExponential ce(parse_pauli_text("0.6 Z"), t, 2);
  Rng rng(55);
  const int shots = 100000;
  cplx sum = 0;
  for (int s = 0; s < shots; ++s) {
    const GateString g = ce.sample(rng);
    for (const auto& e : g.elements()) CHECK_FALSE(e.string.x());
    sum += g.dense()(0, 0);
  }
  const cplx mean = ce.total_weight() * sum / double(shots);
  const double sigma = ce.total_weight() / std::sqrt(double(shots));
  CHECK(std::abs(mean - std::exp(cplx(0, a * t))) < 5 * sigma * std::sqrt(2.0));
}

TEST_CASE("t = 0 gives the identity string") {
  const CompiledExponential ce(parse_pauli_text("0.5 X\n0.5 Z"), 0.0, 1);
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const GateString g = ce.sample(rng);
    CHECK(g.elements().empty());
    CHECK(g.phase() == cplx(1, 0));
  }
  CHECK(ce.total_weight() == 1.0);
}

TEST_CASE("lambda = t = r = 1 keeps the weight below e") {
  const CompiledExponential ce(parse_pauli_text("0.5 X\n-0.5 Z"), 1.0, 1);
  CHECK(ce.total_weight() <= std::exp(1.0));
}

TEST_CASE("sampled mean converges to the enumerated mean") {
  Rng rng(314);
  const auto op = gen::pauli_operator(rng, 2, 3, 1.0);
  const CompiledExponential ce(op, 1.2, 2);
  const Matrix exact = enumerate::compiled_expectation(ce);
  Matrix sum(4, 4);
  const int shots = 40000;
  GateString g(2);
  for (int s = 0; s < shots; ++s) {
    g.reset(2);
    ce.sample_into(g, rng);
    sum += g.dense();
  }
  sum *= cplx(ce.total_weight() / shots);
  // entrywise 6 sigma with |entries| <= gamma^r
  CHECK((sum - exact).max_abs() < 6 * ce.total_weight() / std::sqrt(double(shots)));
}
