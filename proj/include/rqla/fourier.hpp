#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rqla/linalg.hpp"

namespace rqla {

struct FourierTerm {
  cplx alpha;
  double t;
};

struct Interval {
  double lo, hi;
};

// s(x) = sum_k alpha_k exp(i t_k x), certified to eps on the domain.
struct FourierSeries {
  std::vector<FourierTerm> terms;
  std::vector<Interval> domain;
  double eps = 0.0;            // certified bound
  double achieved = 0.0;       // measured sup error on the certification grid
  std::string function;        // "inverse", "gaussian", "exp", ...
  std::vector<std::string> warnings;

  double alpha() const;
  double t_max() const;
};

// Pairs +t/-t terms so each |t| costs one sincos; reusable across many points.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(const FourierSeries& s);
  cplx operator()(double x) const;
  std::vector<cplx> operator()(std::span<const double> xs) const;

 private:
  std::vector<double> t_, sum_re_, sum_im_, diff_re_, diff_im_;
  bool has_cos_ = false, has_sin_ = false;  // odd or even series skip half the work
};

cplx evaluate(const FourierSeries& s, double x);
std::vector<cplx> evaluate(const FourierSeries& s, std::span<const double> xs);

// Per component: points log-spaced in distance from each endpoint, plus both endpoints.
std::vector<double> verification_grid(const std::vector<Interval>& domain, std::size_t per_component = 10000);
double sup_error(const FourierSeries& s, const std::function<cplx(double)>& f, std::span<const double> grid);

FourierSeries build_inverse(double b, double eps);
FourierSeries build_gaussian(double tau, double eps);
FourierSeries build_exp(double beta, Interval spectral_interval, double eps);

FourierSeries identity_series();

// g(x) = s((x - x0) / scale): t -> t/scale, alpha -> alpha exp(-i t x0 / scale).
FourierSeries transform_argument(const FourierSeries& s, double x0, double scale);
// c * s(x); eps scales with |c|.
FourierSeries scale_values(const FourierSeries& s, double c);

}  // namespace rqla
