// Hot loop for series evaluation. Built with -O3 -ffast-math so the sin/cos
// calls vectorize through libmvec; certification needs ~1e9 of them.
#include <algorithm>
#include <cmath>

#include "rqla/fourier.hpp"

namespace rqla {

SeriesEvaluator::SeriesEvaluator(const FourierSeries& s) {
  std::vector<FourierTerm> terms = s.terms;
  std::sort(terms.begin(), terms.end(), [](const FourierTerm& a, const FourierTerm& b) {
    return std::abs(a.t) < std::abs(b.t) || (std::abs(a.t) == std::abs(b.t) && a.t > b.t);
  });
  for (const auto& term : terms) {
    const double at = std::abs(term.t);
    if (t_.empty() || t_.back() != at) {
      t_.push_back(at);
      sum_re_.push_back(0.0);
      sum_im_.push_back(0.0);
      diff_re_.push_back(0.0);
      diff_im_.push_back(0.0);
    }
    // A e^{i|t|x} + B e^{-i|t|x} = (A+B) cos + i (A-B) sin
    const double sgn = term.t >= 0 ? 1.0 : -1.0;
    sum_re_.back() += term.alpha.real();
    sum_im_.back() += term.alpha.imag();
    diff_re_.back() += sgn * term.alpha.real();
    diff_im_.back() += sgn * term.alpha.imag();
  }
  for (std::size_t k = 0; k < t_.size(); ++k) {
    has_cos_ = has_cos_ || sum_re_[k] != 0.0 || sum_im_[k] != 0.0;
    has_sin_ = has_sin_ || (t_[k] != 0.0 && (diff_re_[k] != 0.0 || diff_im_[k] != 0.0));
  }
}

namespace {

// sin and cos in separate loops: a fused sincos does not vectorize.
__attribute__((target_clones("avx2", "default"))) cplx paired_sum(const double* t, const double* sr, const double* si,
                                                                  const double* dr, const double* di, std::size_t n,
                                                                  double x, double* c, double* s, bool do_cos,
                                                                  bool do_sin) {
  double re = 0.0, im = 0.0;
  if (do_cos) {
    for (std::size_t k = 0; k < n; ++k) c[k] = std::cos(t[k] * x);
    for (std::size_t k = 0; k < n; ++k) {
      re += sr[k] * c[k];
      im += si[k] * c[k];
    }
  }
  if (do_sin) {
    for (std::size_t k = 0; k < n; ++k) s[k] = std::sin(t[k] * x);
    for (std::size_t k = 0; k < n; ++k) {
      re -= di[k] * s[k];
      im += dr[k] * s[k];
    }
  }
  return {re, im};
}

}  // namespace

cplx SeriesEvaluator::operator()(double x) const {
  std::vector<double> c(t_.size()), s(t_.size());
  return paired_sum(t_.data(), sum_re_.data(), sum_im_.data(), diff_re_.data(), diff_im_.data(), t_.size(), x,
                    c.data(), s.data(), has_cos_, has_sin_);
}

std::vector<cplx> SeriesEvaluator::operator()(std::span<const double> xs) const {
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

}  // namespace rqla
