#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rqla/oracle.hpp"
#include "rqla/sampler.hpp"

namespace rqla {

struct AppOptions {
  double eps = 0.1;
  double delta = 0.1;
  double r_scale = 1.0;
  double split = 0.5;  // statistical share of each error budget
  std::uint64_t shot_ceiling = kDefaultShotCeiling;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool trace = false;
  double tail_tol = kDefaultTailTol;
};

struct AppReport {
  cplx estimate{0.0, 0.0};
  double eps = 0.0, delta = 0.0;
  double bound = 0.0;  // additive error the estimate meets w.p. >= (1-delta)^k
  EstimateReport core;
  std::optional<EstimateReport> norm;
  std::optional<double> q_estimate;
  std::vector<std::string> annotations;
  std::string series_function;
  double series_alpha = 0.0, series_t_max = 0.0, series_eps = 0.0;

  std::uint64_t total_shots() const { return core.M + (norm ? norm->M : 0); }
};

// ---- linear systems

struct LinearSystemProblem {
  PauliOperator A;  // Hermitian; see embed_linear_system for general B
  InputState b;
  double inv_norm_bound = 0.0;       // >= ||A^-1||
  std::optional<double> norm_bound;  // >= ||A||; Pauli weight when unset
  std::optional<double> q;           // given normalization, estimated when unset
  std::optional<double> q_lower;     // planning bound for an estimated q; ||b|| / norm_bound when unset
};

// B = H1 + i H2 as A = X (x) H1 - Y (x) H2; b -> |0>|b>, overlap partner psi -> |1>|psi>.
struct EmbeddedSystem {
  PauliOperator A;
  StatePrep b, psi;
};
EmbeddedSystem embed_linear_system(const PauliOperator& h1, const PauliOperator& h2, const StateVector& b,
                                   const StateVector& psi);

// <psi|A^-1|b>/q
AppReport solve_overlap(const LinearSystemProblem& p, const InputState& psi, const AppOptions& opt);
// <b|A^-1 O A^-1|b>/q^2
AppReport solve_observable(const LinearSystemProblem& p, const Observable& obs, const AppOptions& opt);

// ---- ground state

struct GroundStateProblem {
  PauliOperator H;
  double gap = 0.0;       // Delta <= E1 - E0
  StatePrep trial;
  double gamma = 0.0;     // lower bound on |<trial|E0>|
  double shift = 0.0;     // subtracted from H; ideally E0
  double shift_error = 0.0;  // bound on |E0 - shift|
  Observable O;
};

double ground_state_tau(double gap, double gamma, double one_norm, double eps);
AppReport ground_state_expectation(const GroundStateProblem& p, const AppOptions& opt);

// ---- Gibbs

struct GibbsProblem {
  PauliOperator H, H0;
  double beta = 0.0;
  Observable O;  // on the n system qubits
};

// W = H (x) 1 - 1 (x) H0^*
PauliOperator work_operator(const PauliOperator& H, const PauliOperator& H0);
AppReport gibbs_expectation(const GibbsProblem& p, const AppOptions& opt);

// ---- Green's functions

// Jordan-Wigner ladder operator for mode i as 1/2 (Z..Z X) +- i/2 (Z..Z Y), placed on qubits
// [offset, offset + modes) of a total-qubit register. Annihilator: +, creator: -.
struct PauliMixture {
  std::vector<PhasedPauli> terms;
  double weight = 1.0;  // l1 norm of the coefficients; terms drawn uniformly
  PhasedPauli draw(Rng& rng) const;
  Matrix dense() const;
};
PauliMixture jw_annihilator(std::size_t modes, std::size_t i, std::size_t total, std::size_t offset);
PauliMixture jw_creator(std::size_t modes, std::size_t i, std::size_t total, std::size_t offset);

struct GreensProblem {
  PauliOperator H;  // qubit Hamiltonian on the modes
  double omega = 0.0, eta = 0.0, E0 = 0.0;
  std::size_t i = 0, j = 0;
  oracle::Branch branch = oracle::Branch::particle;
  double gap = 0.0;
  StatePrep trial;
  double gamma = 0.0;
  std::optional<double> inv_norm_bound;  // >= ||Gamma^-1||, defaults to 1/eta
  std::optional<double> norm_bound;      // >= ||Y||, defaults to its Pauli weight
};

// Dilation of Gamma = H1 + i H2 with the top-right block equal to Gamma.
PauliOperator greens_dilation(const GreensProblem& p);
AppReport greens_function(const GreensProblem& p, const AppOptions& opt);

// ---- classical baselines on the stabilizer simulator

// <t|sum_k c_k A^k|s>. t must be s followed by Pauli gates (same Clifford prefix).
AppReport classical_poly_overlap(const PauliOperator& A, const std::vector<cplx>& coeffs, const StatePrep& s_prep,
                                 const StatePrep& t_prep, const AppOptions& opt);
std::uint64_t poly_shots(double weight, double eps, double delta);

struct PowerMethodProblem {
  PauliOperator H;  // negative spectrum
  std::size_t k = 1;
  StatePrep trial;  // Clifford
  Observable O;
  double gamma = 0.0;  // lower bound on |<trial|E0>|
  double e0 = 0.0;     // ground energy (or a bound with |E0| >= |e0|)
  double gap = 0.0;    // only used for the k recommendation
};

// <psi|H^k O H^k|psi> / ||H^k psi||^2
AppReport power_method_estimate(const PowerMethodProblem& p, const AppOptions& opt);

}  // namespace rqla
