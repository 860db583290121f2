#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rqla/errors.hpp"
#include "rqla/fourier.hpp"
#include "rqla/oracle.hpp"
#include "rqla/problem_io.hpp"
#include "support/generators.hpp"

using namespace rqla;

namespace {

double recheck(const FourierSeries& s, const std::function<cplx(double)>& f) {
  const auto grid = verification_grid(s.domain, 100000);
  return sup_error(s, f, grid);
}

// Naive term-by-term sum, independent of SeriesEvaluator.
cplx naive(const FourierSeries& s, double x) {
  cplx acc = 0;
  for (const auto& t : s.terms) acc += t.alpha * std::exp(cplx(0, t.t * x));
  return acc;
}

}  // namespace

TEST_CASE("inverse series, b = 2, eps = 0.01") {
  const auto s = build_inverse(2.0, 0.01);
  const auto inv = [](double x) { return cplx(1.0 / x); };
  CHECK(s.achieved <= 0.01);
  CHECK(sup_error(s, inv, verification_grid(s.domain)) <= 0.01);
  CHECK(recheck(s, inv) <= 0.015);
  const double h1 = evaluate(s, 1.0).real();
  CHECK(h1 >= 0.99);
  CHECK(h1 <= 1.01);
  // odd
  for (double x : {0.5, 0.6, 0.77, 1.0}) CHECK(std::abs(evaluate(s, -x) + evaluate(s, x)) < 1e-12);
}

TEST_CASE("gaussian series") {
  const auto g1 = build_gaussian(1.0, 0.01);
  CHECK(std::abs(evaluate(g1, 0.0) - 1.0) <= 0.01);
  for (double eps : {0.1, 0.01, 1e-3, 1e-4}) CHECK(build_gaussian(1.0, eps).alpha() < 1.4);

  const auto s = build_gaussian(3.0, 1e-3);
  const auto f = [](double x) { return cplx(std::exp(-9.0 * x * x / 2.0)); };
  CHECK(sup_error(s, f, verification_grid(s.domain)) <= 1e-3);
  CHECK(recheck(s, f) <= 1.5e-3);
  CHECK(s.alpha() < 1.4);
}

TEST_CASE("exp series") {
  const auto flat = build_exp(0.0, {-1, 1}, 0.01);
  REQUIRE(flat.terms.size() == 1);
  CHECK(flat.terms[0].t == 0.0);
  CHECK(flat.terms[0].alpha == cplx(1.0));

  const auto s = build_exp(1.0, {-2, 2}, 0.01);
  const auto f = [](double x) { return cplx(std::exp(-0.5 * x)); };
  CHECK(std::abs(evaluate(s, 0.0) - 1.0) <= 0.01);
  CHECK(sup_error(s, f, verification_grid(s.domain)) <= 0.01);
  CHECK(recheck(s, f) <= 0.015);
  CHECK(s.alpha() <= 2 * std::exp(4.0) * std::exp(1.0));
}

TEST_CASE("evaluator agrees with the naive sum") {
  for (const auto& s : {build_inverse(3.0, 0.05), build_gaussian(2.0, 0.01), build_exp(0.7, {0, 3}, 0.01)}) {
    double err = 0;
    for (double x = -1.0; x <= 3.0; x += 0.0137) err = std::max(err, std::abs(evaluate(s, x) - naive(s, x)));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("operator-level transfer on dense instances") {
  Rng rng(12);
  const auto s = build_inverse(4.0, 0.02);
  for (int k = 0; k < 5; ++k) {
    // 2-qubit Hermitian with spectrum in [-1, -1/4] u [1/4, 1]
    const auto eig = oracle::eigh(gen::hermitian(rng, 4));
    Matrix d(4, 4);
    for (std::size_t i = 0; i < 4; ++i) d(i, i) = (i % 2 ? -1.0 : 1.0) * gen::uniform(rng, 0.25, 1.0);
    const Matrix a = eig.vectors * d * eig.vectors.adjoint();
    Matrix sa(4, 4);
    for (const auto& t : s.terms) sa += t.alpha * oracle::expm(a, t.t);
    CHECK(oracle::operator_norm(sa - oracle::inverse(a)) <= 0.02 + 1e-9);
  }
}

TEST_CASE("argument transforms") {
  const auto g = build_gaussian(1.0, 1e-3);
  const auto shifted = transform_argument(g, 0.5, 2.0);
  for (double x : {-1.0, 0.0, 0.5, 1.7}) CHECK(std::abs(evaluate(shifted, x) - evaluate(g, (x - 0.5) / 2.0)) < 1e-12);
  const auto scaled = scale_values(g, -3.0);
  CHECK(std::abs(evaluate(scaled, 0.3) + 3.0 * evaluate(g, 0.3)) < 1e-12);
  CHECK(scaled.eps == doctest::Approx(3.0 * g.eps));
  CHECK(evaluate(identity_series(), 123.0) == cplx(1.0));
}

TEST_CASE("invalid builder arguments") {
  CHECK_THROWS_AS(build_inverse(0.5, 0.01), ValidationError);
  CHECK_THROWS_AS(build_inverse(2.0, 0.0), ValidationError);
  CHECK_THROWS_AS(build_gaussian(-1.0, 0.01), ValidationError);
  CHECK_THROWS_AS(build_exp(1.0, {1, -1}, 0.01), ValidationError);
}

TEST_CASE("series JSONL round trip") {
  const auto s = build_gaussian(1.5, 1e-3);
  std::stringstream ss;
  io::write_series_jsonl(ss, s);
  const auto back = io::read_series_jsonl(ss);
  REQUIRE(back.terms.size() == s.terms.size());
  for (std::size_t k = 0; k < s.terms.size(); ++k) {
    CHECK(back.terms[k].alpha == s.terms[k].alpha);
    CHECK(back.terms[k].t == s.terms[k].t);
  }
  CHECK(back.eps == s.eps);
  CHECK(back.function == s.function);
}
