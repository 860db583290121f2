#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rqla/compiler.hpp"
#include "rqla/fourier.hpp"
#include "rqla/pauli.hpp"
#include "rqla/statevector.hpp"

namespace rqla {

enum class Mode { overlap, observable };

inline constexpr std::uint64_t kDefaultShotCeiling = 2'000'000'000ULL;

std::uint64_t overlap_shots(double weight, double eps, double delta);
std::uint64_t observable_shots(double one_norm, double weight, double eps, double delta);

struct PlanOptions {
  double r_scale = 1.0;
  std::uint64_t shot_ceiling = kDefaultShotCeiling;
  double tail_tol = kDefaultTailTol;
  // Bound on the extra per-shot weight from statistically encoded inputs
  // (product of ||b||_1/m factors over encoded sides).
  double prep_weight = 1.0;
  double one_norm = 1.0;  // observable mode only
  std::optional<std::uint64_t> shots;  // override M (enumeration checks, tests)
};

struct SampledUnitary {
  GateString gates;
  std::size_t term;
};

// Sampling plan for s(A) = sum_k alpha_k exp(i t_k A). The identity part of A is
// folded into the coefficients; only the traceless part is compiled.
struct SamplingPlan {
  FourierSeries series;
  PauliOperator op;  // compiled (identity-free) operator
  double identity_shift = 0.0;
  std::vector<cplx> coeffs;  // alpha_k exp(i t_k shift)
  std::vector<std::size_t> r_vec;
  std::vector<std::shared_ptr<const CompiledExponential>> compiled;
  std::vector<double> term_weight;  // |alpha_k| gamma_k^{r_k}
  std::vector<double> cumulative;
  double R = 0.0;
  double eps = 0.0, delta = 0.0;
  Mode mode = Mode::overlap;
  double one_norm = 1.0;
  double prep_weight = 1.0;
  std::uint64_t M = 0;

  std::size_t num_qubits() const { return op.num_qubits(); }
  std::size_t draw_term(Rng& rng) const;
  // U_k sample with phase(alpha_k) folded in; E[gates] * R = s(A).
  SampledUnitary draw(Rng& rng) const;
  void draw_into(GateString& g, Rng& rng, std::size_t& term) const;
};

SamplingPlan plan(const FourierSeries& series, const PauliOperator& op, double eps, double delta, Mode mode,
                  const PlanOptions& options = {});

// Sparse real vector b encoded as E_i[sgn(b_i) (||b||_1/m) |i>] = b/m.
class ClassicalVector {
 public:
  ClassicalVector(std::size_t n_qubits, std::vector<std::pair<std::uint64_t, double>> entries,
                  std::optional<double> normalization = std::nullopt);

  std::size_t num_qubits() const { return n_; }
  const std::vector<std::pair<std::uint64_t, double>>& entries() const { return entries_; }
  double l1() const { return l1_; }
  double l2() const { return l2_; }
  double normalization() const { return m_; }
  std::size_t sparsity() const { return entries_.size(); }
  const std::vector<double>& probabilities() const { return probs_; }
  double weight() const { return l1_ / m_; }

  struct Draw {
    std::uint64_t index;
    double weight;  // signed ||b||_1/m
  };
  Draw draw(Rng& rng) const;
  StateVector dense() const;  // b / m

 private:
  std::size_t n_;
  std::vector<std::pair<std::uint64_t, double>> entries_;
  std::vector<double> probs_, cumulative_;
  double l1_ = 0.0, l2_ = 0.0, m_ = 1.0;
};

// Either a fixed preparation or a per-shot encoded vector.
class InputState {
 public:
  InputState(StatePrep prep);
  InputState(ClassicalVector vec);

  std::size_t num_qubits() const;
  bool encoded() const { return vec_.has_value(); }
  double weight_bound() const { return vec_ ? vec_->weight() : 1.0; }
  const StatePrep* prep() const { return prep_ ? &*prep_ : nullptr; }
  const ClassicalVector* vector() const { return vec_ ? &*vec_ : nullptr; }
  StateVector dense() const;  // the (possibly unnormalized) target vector

  // Per shot: a starting vector and its signed weight.
  void draw(Rng& rng, StateVector& out, double& weight) const;

 private:
  std::optional<StatePrep> prep_;
  std::optional<ClassicalVector> vec_;
  StateVector cached_;
};

struct ShotRecord {
  std::uint64_t shot_index = 0;
  std::vector<std::size_t> terms;
  std::size_t rotations = 0, paulis = 0;
  int o1 = 0, o2 = 0;
  long pauli_index = -1;
  cplx z{0.0, 0.0};
};

struct DepthStats {
  std::size_t max_rotations = 0;
  double mean_rotations = 0.0;
  double mean_paulis = 0.0;
};

struct EstimateReport {
  cplx mean{0.0, 0.0};
  std::uint64_t M = 0;
  double std_error = 0.0;
  double R = 0.0;  // weight used for the per-shot range
  double eps = 0.0, delta = 0.0;
  std::vector<std::size_t> r_vec;
  DepthStats depth;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string mode;
  std::vector<ShotRecord> trace;
};

struct RunOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool trace = false;
};

// Fills the record (terms, depth, outcomes) and returns z_j.
using ShotFunction = std::function<cplx(Rng&, ShotRecord&)>;

// Runs M independent shots in fixed blocks; the result is bit-identical for any
// thread count. Any |z_j| > z_cap (1e-9 slack) aborts.
EstimateReport run_shots(std::uint64_t M, const ShotFunction& shot, double z_cap, const RunOptions& options);

EstimateReport estimate_overlap(const SamplingPlan& plan, const InputState& psi, const InputState& phi,
                                const RunOptions& options);
EstimateReport estimate_observable(const SamplingPlan& plan, const InputState& rho, const Observable& obs,
                                   const RunOptions& options);

struct NormPlan {
  double nu = 0.0;          // allowed |Q - q^2|
  double target = 0.0;      // statistical share of nu
  double series_eps = 0.0;  // max ||s - f|| so that 3 q ||s - f|| fits the rest
  std::uint64_t M = 0;
};
// nu = 0.5 eps q_lb^2 / c, with c = one_norm (observable) or 1 (overlap).
// input_weight bounds the encoding weight of both sides together.
NormPlan plan_norm(const SamplingPlan& plan, double q_lower, double eps, double delta, double split, double c,
                   double input_weight = 1.0, std::uint64_t shot_ceiling = kDefaultShotCeiling);
// Hadamard test of U^dag U' on psi; real part only. Throws DegenerateNormalization on Q <= 0.
EstimateReport estimate_norm_squared(const SamplingPlan& plan, const InputState& psi, std::uint64_t M,
                                     const RunOptions& options);

}  // namespace rqla
