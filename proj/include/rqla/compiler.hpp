#pragma once

#include <cstdint>
#include <vector>

#include "rqla/pauli.hpp"
#include "rqla/statevector.hpp"

namespace rqla {

inline constexpr double kDefaultTailTol = 1e-12;

// Mixture for one segment exp(i tau A/lambda), tau >= 0. Index m stands for n = 2m.
struct SegmentDistribution {
  double tau = 0.0;
  std::vector<double> gamma_n;
  std::vector<double> theta_n;
  std::vector<double> cos_n, sin_n;  // of theta_n
  double total_gamma = 1.0;         // sum of the kept gamma_n
  std::vector<double> cumulative;   // gamma_n / total_gamma, running

  std::size_t max_order() const { return 2 * (gamma_n.size() - 1); }
  // Returns the even order n.
  int draw(Rng& rng) const;
};

SegmentDistribution build_segment(double tau, double tail_tol = kDefaultTailTol);

std::size_t choose_r(double lambda, double t, double r_scale = 1.0);

// exp(i A t) as gamma^r times the mean of sampled gate strings.
class CompiledExponential {
 public:
  CompiledExponential(const PauliOperator& op, double t, std::size_t r, double tail_tol = kDefaultTailTol);

  const PauliOperator& op() const { return op_; }
  double t() const { return t_; }
  std::size_t r() const { return r_; }
  const SegmentDistribution& segment() const { return segment_; }
  double total_weight() const { return total_weight_; }
  double lambda() const { return lambda_; }

  GateString sample(Rng& rng) const;
  // Samples and appends to an existing string (saves an allocation per draw).
  void sample_into(GateString& g, Rng& rng) const;

  // Building blocks shared with the enumeration checks.
  std::size_t draw_term(Rng& rng) const;
  // acc * sgn(a_l) P_l
  PhasedPauli fold(const PhasedPauli& acc, std::size_t term) const;
  // i^n * product * exp(i s theta_n P_rot), with s = sgn(a_rot) sgn(t).
  void append_segment(GateString& g, int n, const PhasedPauli& product, std::size_t rot_term) const;
  double term_probability(std::size_t term) const { return probs_[term]; }

 private:
  PauliOperator op_;
  double t_, lambda_;
  std::size_t r_;
  SegmentDistribution segment_;
  double total_weight_;
  std::vector<double> probs_, cumulative_;
};

}  // namespace rqla
