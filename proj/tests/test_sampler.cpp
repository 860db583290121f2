#include <doctest.h>

#include <cmath>

#include "rqla/errors.hpp"
#include "rqla/oracle.hpp"
#include "rqla/sampler.hpp"
#include "support/enumerate.hpp"
#include "support/generators.hpp"

using namespace rqla;

namespace {

FourierSeries single_term(cplx alpha, double t) {
  FourierSeries s;
  s.terms = {{alpha, t}};
  s.domain = {{-1, 1}};
  s.function = "custom";
  return s;
}

FourierSeries three_terms() {
  FourierSeries s;
  s.terms = {{cplx(0.5, 0.2), 0.7}, {cplx(-0.3, 0.0), -1.1}, {cplx(0.1, -0.4), 0.4}};
  s.domain = {{-2, 2}};
  s.function = "custom";
  return s;
}

Matrix series_matrix(const FourierSeries& s, const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (const auto& t : s.terms) out += t.alpha * oracle::expm(a, t.t);
  return out;
}

const StatePrep kZero = StatePrep::basis(1, 0);
const StatePrep kPlus = StatePrep::dense(1, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});

}  // namespace

TEST_CASE("shot-count formulas") {
  CHECK(overlap_shots(1.0, 0.1, 0.05) == 1476);
  const auto p = plan(identity_series(), parse_pauli_text("1 Z"), 0.1, 0.05, Mode::overlap);
  CHECK(p.R == 1.0);
  CHECK(p.M == 1476);
  CHECK(observable_shots(1.0, 1.0, 0.1, 0.05) == 1476);
  CHECK(observable_shots(2.0, 1.0, 0.1, 0.05) == 5903);  // ceil(4 ln 40 * 400)
}

TEST_CASE("shot ceiling raises a planning error") {
  PlanOptions opt;
  opt.shot_ceiling = 100;
  CHECK_THROWS_AS(plan(identity_series(), parse_pauli_text("1 Z"), 0.1, 0.05, Mode::overlap, opt), PlanningError);
}

TEST_CASE("identity series has zero variance") {
  const auto p = plan(identity_series(), parse_pauli_text("0.3 X\n0.2 Z"), 0.1, 0.1, Mode::overlap);
  CHECK(p.R == 1.0);
  const auto rep = estimate_overlap(p, kZero, kZero, {.seed = 1, .threads = 1, .trace = true});
  // real part deterministic; the imaginary coin is fair
  CHECK(rep.mean.real() == 1.0);
  CHECK(std::abs(rep.mean.imag()) < 0.1);
  CHECK(rep.depth.max_rotations == 0);
  for (const auto& s : rep.trace) CHECK(s.rotations == 0);

  const auto po = plan(identity_series(), parse_pauli_text("1 Z"), 0.1, 0.1, Mode::observable);
  const auto obs = estimate_observable(po, kZero, Observable(parse_pauli_text("1 Z")), {.seed = 2});
  CHECK(obs.mean.real() == 1.0);
  const auto plus = estimate_observable(po, kPlus, Observable(parse_pauli_text("1 Z")), {.seed = 3});
  CHECK(std::abs(plus.mean.real()) < 0.1);
}

TEST_CASE("single exponential of Z") {
  const double t = 0.9;
  const auto p = plan(single_term(1.0, t), parse_pauli_text("1 Z"), 0.05, 1e-3, Mode::overlap, {.r_scale = 4});
  const auto rep = estimate_overlap(p, kZero, kZero, {.seed = 9});
  CHECK(std::abs(rep.mean - std::exp(cplx(0, t))) < 0.05);
}

TEST_CASE("inverse series on diag(1, 1/2)") {
  const auto A = parse_pauli_text("0.75 I\n0.25 Z");
  const auto s = build_inverse(2.0, 0.01);
  const auto p = plan(s, A, 0.05, 1e-3, Mode::overlap, {.r_scale = 4});
  CHECK(p.identity_shift == 0.75);
  const auto rep = estimate_overlap(p, kZero, kZero, {.seed = 4});
  CHECK(std::abs(rep.mean - 1.0) < 0.06);
}

TEST_CASE("gaussian R stays under 1.4 e") {
  const auto s = build_gaussian(1.0, 0.01);
  const auto p = plan(s, parse_pauli_text("0.6 X\n0.4 Z"), 0.1, 0.1, Mode::overlap);
  CHECK(p.R <= 1.4 * std::exp(1.0));
}

TEST_CASE("gaussian sandwich on one qubit") {
  const auto H = parse_pauli_text("0.6 X\n0.4 Z");
  const auto s = build_gaussian(1.0, 0.005);
  const auto p = plan(s, H, 0.1, 1e-3, Mode::observable, {.r_scale = 4});
  const Observable O(parse_pauli_text("1 Z"));
  const auto rep = estimate_observable(p, kPlus, O, {.seed = 12});
  const Matrix g = oracle::apply_function(H.dense(), [](double x) { return cplx(std::exp(-x * x / 2)); });
  const StateVector v = g * kPlus.prepare();
  const double exact = inner(v, O.op.dense() * v).real();
  CHECK(std::abs(rep.mean.real() - exact) < 0.1 + 0.02);
}

TEST_CASE("norm estimates") {
  const auto A = parse_pauli_text("0.75 I\n0.25 Z");
  {
    const auto p = plan(identity_series(), A, 0.1, 0.1, Mode::overlap);
    CHECK(estimate_norm_squared(p, kZero, 100, {.seed = 1}).mean.real() == 1.0);
  }
  {
    // eigenstate |1> of Z with E = -1, tau = 1
    const auto p = plan(build_gaussian(1.0, 1e-3), parse_pauli_text("1 Z"), 0.1, 0.1, Mode::overlap, {.r_scale = 4});
    const auto rep = estimate_norm_squared(p, StatePrep::basis(1, 1), 20000, {.seed = 2});
    CHECK(std::abs(rep.mean.real() - std::exp(-1.0)) < 6 * rep.std_error + 0.005);
  }
  {
    const auto p = plan(build_inverse(2.0, 0.01), A, 0.1, 0.1, Mode::overlap, {.r_scale = 4});
    const auto rep = estimate_norm_squared(p, StatePrep::basis(1, 1), 20000, {.seed = 3});
    CHECK(std::abs(rep.mean.real() - 4.0) < 6 * rep.std_error + 0.05);
  }
}

TEST_CASE("classical vector encoding") {
  const ClassicalVector b(1, {{0, 3.0}, {1, -4.0}});
  CHECK(b.l1() == 7.0);
  CHECK(b.l2() == 5.0);
  CHECK(b.probabilities()[0] == doctest::Approx(3.0 / 7));
  CHECK(b.probabilities()[1] == doctest::Approx(4.0 / 7));
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto d = b.draw(rng);
    CHECK(d.weight == doctest::Approx(d.index == 0 ? 1.4 : -1.4));  // ||b||_1 / ||b||_2
  }
  const ClassicalVector e0(2, {{0, 1.0}});
  CHECK(e0.weight() == 1.0);
  const InputState in(e0);
  StateVector v;
  double w = 0;
  in.draw(rng, v, w);
  CHECK(w == 1.0);
  CHECK(v[0] == cplx(1.0));
}

TEST_CASE("encoded |+> agrees with the explicit prep") {
  const auto H = parse_pauli_text("0.5 X\n0.3 Z");
  const auto s = single_term(1.0, 0.8);
  const ClassicalVector plus_vec(1, {{0, 1 / std::sqrt(2.0)}, {1, 1 / std::sqrt(2.0)}});
  const InputState enc(plus_vec);
  const auto pe = plan(s, H, 0.05, 1e-3, Mode::overlap, {.r_scale = 4, .prep_weight = enc.weight_bound()});
  const auto pp = plan(s, H, 0.05, 1e-3, Mode::overlap, {.r_scale = 4});
  const cplx a = estimate_overlap(pe, enc, kZero, {.seed = 5}).mean;
  const cplx b = estimate_overlap(pp, kPlus, kZero, {.seed = 6}).mean;
  CHECK(std::abs(a - b) < 0.1);
  const cplx exact = oracle::expm(H.dense(), 0.8)(0, 0) / std::sqrt(2.0) + oracle::expm(H.dense(), 0.8)(0, 1) / std::sqrt(2.0);
  CHECK(std::abs(a - exact) < 0.05);
}

TEST_CASE("enumerated estimator means are exact") {
  const auto A = parse_pauli_text("0.6 X\n-0.4 Z");  // L = 2
  const auto s = three_terms();
  const auto p = plan(s, A, 0.1, 0.1, Mode::overlap, {.r_scale = 1.0});
  Rng rng(8);
  const StateVector psi = gen::state(rng, 1), phi = gen::state(rng, 1);
  const Matrix sa = series_matrix(s, A.dense());
  const cplx exact = inner(phi, sa * psi);
  CHECK(std::abs(enumerate::overlap_expectation(p, psi, phi) - exact) < 1e-8);

  const Observable O(parse_pauli_text("0.7 Z\n0.2 X"));
  const auto po = plan(s, A, 0.1, 0.1, Mode::observable, {.one_norm = O.one_norm});
  const StateVector v = sa * psi;
  const double exact_obs = inner(v, O.op.dense() * v).real();
  CHECK(std::abs(enumerate::observable_expectation(po, psi, O) - exact_obs) < 1e-8);
}

TEST_CASE("replay is identical across thread counts") {
  const auto H = parse_pauli_text("0.5 XX\n0.3 ZI\n0.2 IY");
  const auto p = plan(build_gaussian(1.0, 0.01), H, 0.1, 0.1, Mode::observable, {.r_scale = 2});
  const Observable O(parse_pauli_text("1 ZZ\n0.5 XI"));
  const auto po = plan(build_gaussian(1.0, 0.01), H, 0.1, 0.1, Mode::observable,
                       {.r_scale = 2, .one_norm = O.one_norm, .shots = 9000});
  const auto rho = StatePrep::basis(2, 1);
  const auto a = estimate_observable(po, rho, O, {.seed = 77, .threads = 1, .trace = true});
  const auto b = estimate_observable(po, rho, O, {.seed = 77, .threads = 4, .trace = true});
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) CHECK(a.trace[k].z == b.trace[k].z);
  const auto c = estimate_observable(po, rho, O, {.seed = 78});
  CHECK(c.mean != a.mean);
  (void)p;
}

TEST_CASE("every shot respects its cap") {
  const auto H = parse_pauli_text("0.5 X\n0.5 Z");
  const auto p = plan(three_terms(), H, 0.1, 0.1, Mode::overlap, {.shots = 5000});
  const auto rep = estimate_overlap(p, kZero, kPlus, {.seed = 3, .trace = true});
  for (const auto& s : rep.trace) CHECK(std::abs(s.z) <= p.R * std::sqrt(2.0) + 1e-9);
  CHECK_THROWS(run_shots(10, [](Rng&, ShotRecord&) { return cplx(2.0); }, 1.0, {}));
}

TEST_CASE("Hoeffding audit on a small overlap instance") {
  const auto H = parse_pauli_text("0.7 Z\n0.3 X");
  const auto s = single_term(1.0, 0.6);
  const auto p = plan(s, H, 0.1, 0.1, Mode::overlap, {.r_scale = 4});
  const cplx exact = oracle::expm(H.dense(), 0.6)(0, 0);
  const int runs = 400;
  int fail = 0;
  for (int k = 0; k < runs; ++k)
    fail += std::abs(estimate_overlap(p, kZero, kZero, {.seed = 1000u + k}).mean - exact) > 0.1;
  const double bound = 0.1 + 3 * std::sqrt(0.1 * 0.9 / runs);
  CHECK(double(fail) / runs <= bound);
}

TEST_CASE("norm plan") {
  const auto p = plan(build_inverse(2.0, 0.01), parse_pauli_text("0.75 I\n0.25 Z"), 0.1, 0.1, Mode::overlap);
  const auto np = plan_norm(p, 1.0, 0.1, 0.1, 0.5, 1.0);
  CHECK(np.nu == doctest::Approx(0.05));
  CHECK(np.target == doctest::Approx(0.025));
  CHECK(np.M > 0);
  CHECK_THROWS_AS(plan_norm(p, 0.0, 0.1, 0.1, 0.5, 1.0), ValidationError);
}
