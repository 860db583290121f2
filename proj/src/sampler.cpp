#include "rqla/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rqla/errors.hpp"

namespace rqla {

namespace {

constexpr std::uint64_t kBlock = 4096;

void check_eps_delta(double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

std::uint64_t hoeffding(double range, double eps, double delta) {
  const double m = std::ceil(4.0 * std::log(2.0 / delta) * (range / eps) * (range / eps));
  if (!std::isfinite(m) || m > 9.0e18) return UINT64_MAX;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

void check_ceiling(std::uint64_t M, std::uint64_t ceiling, const char* what) {
  if (M > ceiling)
    throw PlanningError(std::string(what) + ": required shots " + std::to_string(M) + " exceed ceiling " +
                            std::to_string(ceiling),
                        M);
}

cplx pairwise_sum(const cplx* z, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += z[i];
    return acc;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(z, h) + pairwise_sum(z + h, n - h);
}

double pairwise_sum(const double* z, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += z[i];
    return acc;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(z, h) + pairwise_sum(z + h, n - h);
}

int coin(double p_plus, Rng& rng) { return uniform01(rng) < std::clamp(p_plus, 0.0, 1.0) ? 1 : -1; }

// Per-thread scratch for the built-in shot kernels.
struct Scratch {
  StateVector a, b;
  GateString u, v;
};
Scratch& scratch(std::size_t n) {
  thread_local Scratch s;
  const std::size_t dim = std::size_t{1} << n;
  if (s.a.size() != dim) {
    s.a.assign(dim, 0.0);
    s.b.assign(dim, 0.0);
  }
  return s;
}

void record_depth(ShotRecord& rec, const GateString& g) {
  rec.rotations += g.rotation_count();
  rec.paulis += g.pauli_count();
}

}  // namespace

std::uint64_t overlap_shots(double weight, double eps, double delta) {
  check_eps_delta(eps, delta);
  return hoeffding(weight, eps, delta);
}

std::uint64_t observable_shots(double one_norm, double weight, double eps, double delta) {
  check_eps_delta(eps, delta);
  return hoeffding(one_norm * weight, eps, delta);
}

std::size_t SamplingPlan::draw_term(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

void SamplingPlan::draw_into(GateString& g, Rng& rng, std::size_t& term) const {
  term = draw_term(rng);
  compiled[term]->sample_into(g, rng);
  g.multiply_phase(coeffs[term] / std::abs(coeffs[term]));
}

SampledUnitary SamplingPlan::draw(Rng& rng) const {
  SampledUnitary out{GateString(num_qubits()), 0};
  draw_into(out.gates, rng, out.term);
  return out;
}

SamplingPlan plan(const FourierSeries& series, const PauliOperator& op, double eps, double delta, Mode mode,
                  const PlanOptions& options) {
  check_eps_delta(eps, delta);
  if (series.terms.empty()) throw ValidationError("empty Fourier series");
  if (!(options.r_scale >= 1.0) || !std::isfinite(options.r_scale)) throw ValidationError("r_scale must be >= 1");
  if (!(options.prep_weight >= 1.0 - 1e-12)) throw ValidationError("prep weight must be >= 1");
  if (mode == Mode::observable && !(options.one_norm > 0.0)) throw ValidationError("observable one-norm must be positive");
  if (op.num_qubits() == 0) throw DimensionError("operator has no qubits");

  SamplingPlan p;
  p.series = series;
  p.identity_shift = op.coefficient(PauliString(op.num_qubits()));
  p.op = op.plus_identity(-p.identity_shift);
  p.eps = eps;
  p.delta = delta;
  p.mode = mode;
  p.one_norm = mode == Mode::observable ? options.one_norm : 1.0;
  p.prep_weight = options.prep_weight;

  const double lambda = p.op.weight();
  double acc = 0.0;
  for (const auto& term : series.terms) {
    // exp(i t (A' + c)) = exp(i t c) exp(i t A')
    const cplx a = term.alpha * std::exp(cplx(0.0, term.t * p.identity_shift));
    const std::size_t r = choose_r(lambda, term.t, options.r_scale);
    auto c = std::make_shared<const CompiledExponential>(p.op, term.t, r, options.tail_tol);
    const double w = std::abs(a) * c->total_weight();
    p.coeffs.push_back(a);
    p.r_vec.push_back(r);
    p.compiled.push_back(std::move(c));
    p.term_weight.push_back(w);
    acc += w;
  }
  if (!(acc > 0.0)) throw ValidationError("Fourier series has zero weight");
  p.R = acc;
  double run = 0.0;
  for (double w : p.term_weight) {
    run += w / acc;
    p.cumulative.push_back(run);
  }
  p.cumulative.back() = 1.0;

  if (options.shots) {
    p.M = *options.shots;
  } else if (mode == Mode::overlap) {
    p.M = overlap_shots(p.R * p.prep_weight, eps, delta);
  } else {
    p.M = observable_shots(p.one_norm, p.R * p.R * p.prep_weight, eps, delta);
  }
  check_ceiling(p.M, options.shot_ceiling, "sampling plan");
  return p;
}

ClassicalVector::ClassicalVector(std::size_t n_qubits, std::vector<std::pair<std::uint64_t, double>> entries,
                                 std::optional<double> normalization)
    : n_(n_qubits) {
  if (n_ == 0 || n_ > kMaxQubits) throw DimensionError("vector qubit count out of range");
  std::sort(entries.begin(), entries.end());
  for (const auto& [i, v] : entries) {
    if (n_ < 64 && i >= (std::uint64_t{1} << n_)) throw DimensionError("vector index out of range");
    if (!std::isfinite(v)) throw ValidationError("vector entry is not finite");
    if (!entries_.empty() && entries_.back().first == i) throw ValidationError("duplicate vector index");
    if (v != 0.0) entries_.push_back({i, v});
  }
  for (const auto& e : entries_) {
    l1_ += std::abs(e.second);
    l2_ += e.second * e.second;
  }
  l2_ = std::sqrt(l2_);
  if (entries_.empty() || l1_ == 0.0) throw ValidationError("input vector is zero");
  m_ = normalization.value_or(l2_);
  if (!(m_ > 0.0) || !std::isfinite(m_)) throw ValidationError("vector normalization must be positive");
  double run = 0.0;
  for (const auto& e : entries_) {
    probs_.push_back(std::abs(e.second) / l1_);
    run += probs_.back();
    cumulative_.push_back(run);
  }
  cumulative_.back() = 1.0;
}

ClassicalVector::Draw ClassicalVector::draw(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), entries_.size() - 1);
  return {entries_[k].first, (entries_[k].second > 0 ? 1.0 : -1.0) * weight()};
}

StateVector ClassicalVector::dense() const {
  if (n_ > 24) throw DimensionError("dense vector too large");
  StateVector v(std::size_t{1} << n_, 0.0);
  for (const auto& [i, x] : entries_) v[i] = x / m_;
  return v;
}

InputState::InputState(StatePrep prep) : prep_(std::move(prep)) { cached_ = prep_->prepare(); }
InputState::InputState(ClassicalVector vec) : vec_(std::move(vec)) {}

std::size_t InputState::num_qubits() const { return prep_ ? prep_->num_qubits() : vec_->num_qubits(); }

StateVector InputState::dense() const { return prep_ ? cached_ : vec_->dense(); }

void InputState::draw(Rng& rng, StateVector& out, double& weight) const {
  if (prep_) {
    out.assign(cached_.begin(), cached_.end());
    weight = 1.0;
    return;
  }
  const auto d = vec_->draw(rng);
  out.assign(std::size_t{1} << vec_->num_qubits(), cplx(0.0, 0.0));
  out[d.index] = 1.0;
  weight = d.weight;
}

EstimateReport run_shots(std::uint64_t M, const ShotFunction& shot, double z_cap, const RunOptions& options) {
  if (M == 0) throw ValidationError("shot count must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t blocks = (M + kBlock - 1) / kBlock;

  struct BlockResult {
    cplx sum{0.0, 0.0};
    double sum_sq = 0.0;
    std::size_t max_rot = 0;
    double rot = 0.0, pauli = 0.0;
    std::vector<ShotRecord> trace;
  };
  std::vector<BlockResult> results(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const double cap = z_cap * (1.0 + 1e-9) + 1e-12;

  auto worker = [&] {
    std::vector<cplx> zs;
    std::vector<double> sq, rots, paulis;
    ShotRecord rec;
    try {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= blocks) return;
        {
          std::lock_guard lock(failure_mu);
          if (failure) return;
        }
        const std::uint64_t lo = b * kBlock, hi = std::min(M, lo + kBlock);
        zs.clear();
        sq.clear();
        rots.clear();
        paulis.clear();
        BlockResult& out = results[b];
        for (std::uint64_t j = lo; j < hi; ++j) {
          Rng rng(shot_seed(options.seed, j));
          rec.shot_index = j;
          rec.terms.clear();
          rec.rotations = rec.paulis = 0;
          rec.o1 = rec.o2 = 0;
          rec.pauli_index = -1;
          const cplx z = shot(rng, rec);
          rec.z = z;
          if (!(std::abs(z) <= cap))
            throw Error("shot " + std::to_string(j) + " weight " + std::to_string(std::abs(z)) + " exceeds cap " +
                        std::to_string(z_cap));
          zs.push_back(z);
          sq.push_back(std::norm(z));
          rots.push_back(static_cast<double>(rec.rotations));
          paulis.push_back(static_cast<double>(rec.paulis));
          out.max_rot = std::max(out.max_rot, rec.rotations);
          if (options.trace) out.trace.push_back(rec);
        }
        out.sum = pairwise_sum(zs.data(), zs.size());
        out.sum_sq = pairwise_sum(sq.data(), sq.size());
        out.rot = pairwise_sum(rots.data(), rots.size());
        out.pauli = pairwise_sum(paulis.data(), paulis.size());
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<cplx> sums;
  std::vector<double> sqs, rots, paulis;
  EstimateReport rep;
  for (auto& r : results) {
    sums.push_back(r.sum);
    sqs.push_back(r.sum_sq);
    rots.push_back(r.rot);
    paulis.push_back(r.pauli);
    rep.depth.max_rotations = std::max(rep.depth.max_rotations, r.max_rot);
    if (options.trace)
      for (auto& s : r.trace) rep.trace.push_back(std::move(s));
  }
  const double m = static_cast<double>(M);
  rep.M = M;
  rep.mean = pairwise_sum(sums.data(), sums.size()) / m;
  const double second = pairwise_sum(sqs.data(), sqs.size()) / m;
  const double var = M > 1 ? std::max(0.0, second - std::norm(rep.mean)) * m / (m - 1.0) : 0.0;
  rep.std_error = std::sqrt(var / m);
  rep.depth.mean_rotations = pairwise_sum(rots.data(), rots.size()) / m;
  rep.depth.mean_paulis = pairwise_sum(paulis.data(), paulis.size()) / m;
  rep.seed = options.seed;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

void check_inputs(const SamplingPlan& plan, double weight, std::initializer_list<const InputState*> inputs) {
  for (const auto* in : inputs)
    if (in->num_qubits() != plan.num_qubits()) throw DimensionError("input state width does not match operator");
  if (weight > plan.prep_weight * (1.0 + 1e-12))
    throw ValidationError("encoded inputs carry more weight than the plan allows; re-plan with prep_weight " +
                          std::to_string(weight));
}

EstimateReport finish(EstimateReport rep, const SamplingPlan& plan, double R, const char* mode) {
  rep.R = R;
  rep.eps = plan.eps;
  rep.delta = plan.delta;
  rep.r_vec = plan.r_vec;
  rep.mode = mode;
  return rep;
}

}  // namespace

EstimateReport estimate_overlap(const SamplingPlan& plan, const InputState& psi, const InputState& phi,
                                const RunOptions& options) {
  const double w = psi.weight_bound() * phi.weight_bound();
  check_inputs(plan, w, {&psi, &phi});
  const std::size_t n = plan.num_qubits();
  const double R = plan.R;
  auto shot = [&](Rng& rng, ShotRecord& rec) -> cplx {
    Scratch& s = scratch(n);
    double w1 = 1.0, w0 = 1.0;
    psi.draw(rng, s.a, w1);
    phi.draw(rng, s.b, w0);
    s.u.reset(n);
    std::size_t k = 0;
    plan.draw_into(s.u, rng, k);
    s.u.apply(s.a.data(), s.a.size());
    const cplx ov = inner(s.b, s.a);
    rec.terms.push_back(k);
    record_depth(rec, s.u);
    rec.o1 = coin(0.5 * (1.0 + ov.real()), rng);
    rec.o2 = coin(0.5 * (1.0 + ov.imag()), rng);
    return R * w1 * w0 * cplx(rec.o1, rec.o2);
  };
  auto rep = run_shots(plan.M, shot, R * w * std::sqrt(2.0), options);
  return finish(std::move(rep), plan, R * w, "overlap");
}

EstimateReport estimate_observable(const SamplingPlan& plan, const InputState& rho, const Observable& obs,
                                   const RunOptions& options) {
  if (obs.op.empty()) throw ValidationError("empty observable");
  if (obs.op.num_qubits() != plan.num_qubits()) throw DimensionError("observable width does not match operator");
  if (obs.one_norm > plan.one_norm * (1.0 + 1e-12))
    throw ValidationError("observable one-norm exceeds the planned one-norm");
  const double w = rho.weight_bound() * rho.weight_bound();
  check_inputs(plan, w, {&rho});
  const std::size_t n = plan.num_qubits();
  const double R = plan.R;
  auto shot = [&](Rng& rng, ShotRecord& rec) -> cplx {
    Scratch& s = scratch(n);
    double w1 = 1.0, w0 = 1.0;
    // independent index draws on the two branches: E[w0 w1 |i><j|] = |b><b| / m^2
    rho.draw(rng, s.a, w1);
    rho.draw(rng, s.b, w0);
    s.u.reset(n);
    s.v.reset(n);
    std::size_t ku = 0, kv = 0;
    plan.draw_into(s.u, rng, ku);
    plan.draw_into(s.v, rng, kv);
    s.u.apply(s.a.data(), s.a.size());
    s.v.apply(s.b.data(), s.b.size());
    const std::size_t k = obs.draw(rng);
    const auto& term = obs.op.terms()[k];
    apply_pauli(term.string, cplx(1.0, 0.0), s.a.data(), s.a.size());
    const double m = inner(s.b, s.a).real();
    rec.terms.push_back(ku);
    rec.terms.push_back(kv);
    record_depth(rec, s.u);
    record_depth(rec, s.v);
    rec.pauli_index = static_cast<long>(k);
    rec.o1 = coin(0.5 * (1.0 + m), rng);
    const double sgn = term.coeff > 0 ? 1.0 : -1.0;
    return R * R * w1 * w0 * sgn * obs.one_norm * rec.o1;
  };
  auto rep = run_shots(plan.M, shot, R * R * w * obs.one_norm, options);
  return finish(std::move(rep), plan, R * R * w, "observable");
}

NormPlan plan_norm(const SamplingPlan& plan, double q_lower, double eps, double delta, double split, double c,
                   double input_weight, std::uint64_t shot_ceiling) {
  check_eps_delta(eps, delta);
  if (!(q_lower > 0.0)) throw ValidationError("normalization lower bound must be positive");
  if (!(split > 0.0 && split < 1.0)) throw ValidationError("error split must lie in (0, 1)");
  if (!(c > 0.0)) throw ValidationError("normalization scale must be positive");
  NormPlan out;
  out.nu = 0.5 * eps * q_lower * q_lower / c;
  out.target = split * out.nu;
  // |<s psi|s psi> - <f psi|f psi>| <= 3 q ||s - f|| must stay inside the rest
  out.series_eps = (1.0 - split) * out.nu / (3.0 * q_lower);
  out.M = hoeffding(plan.R * plan.R * input_weight, out.target, delta);
  check_ceiling(out.M, shot_ceiling, "normalization plan");
  return out;
}

EstimateReport estimate_norm_squared(const SamplingPlan& plan, const InputState& psi, std::uint64_t M,
                                     const RunOptions& options) {
  const double w = psi.weight_bound() * psi.weight_bound();
  if (psi.num_qubits() != plan.num_qubits()) throw DimensionError("input state width does not match operator");
  const std::size_t n = plan.num_qubits();
  const double R = plan.R;
  auto shot = [&](Rng& rng, ShotRecord& rec) -> cplx {
    Scratch& s = scratch(n);
    double w1 = 1.0, w0 = 1.0;
    psi.draw(rng, s.a, w1);
    psi.draw(rng, s.b, w0);
    s.u.reset(n);
    s.v.reset(n);
    std::size_t ku = 0, kv = 0;
    plan.draw_into(s.u, rng, ku);
    plan.draw_into(s.v, rng, kv);
    // Re <psi|U^dag U'|psi> = Re <U psi|U' psi>
    s.u.apply(s.b.data(), s.b.size());
    s.v.apply(s.a.data(), s.a.size());
    const double m = inner(s.b, s.a).real();
    rec.terms.push_back(ku);
    rec.terms.push_back(kv);
    record_depth(rec, s.u);
    record_depth(rec, s.v);
    rec.o1 = coin(0.5 * (1.0 + m), rng);
    return R * R * w1 * w0 * static_cast<double>(rec.o1);
  };
  auto rep = run_shots(M, shot, R * R * w, options);
  rep = finish(std::move(rep), plan, R * R * w, "norm");
  if (!(rep.mean.real() > 0.0))
    throw DegenerateNormalization("normalization estimate Q = " + std::to_string(rep.mean.real()) +
                                      " is not positive; increase the normalization shot count",
                                  rep.mean.real());
  return rep;
}

}  // namespace rqla
