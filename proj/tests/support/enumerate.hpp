#pragma once

// Exact enumeration of the random compiler's sample space. Reuses the
// compiler's fold/append_segment building blocks but none of its sampling code,
// so the expectations here are computed without drawing anything.
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "rqla/compiler.hpp"
#include "rqla/sampler.hpp"

namespace rqla::enumerate {

struct Outcome {
  double p;
  GateString g;
};

using Key = std::tuple<int, std::uint64_t, std::uint64_t>;

inline Key key(const PhasedPauli& p) { return {((p.phase % 4) + 4) % 4, p.string.x(), p.string.z()}; }

// Every gate string one segment can produce, with its probability (not merged).
inline std::vector<Outcome> segment_outcomes(const CompiledExponential& ce) {
  const std::size_t n = ce.op().num_qubits();
  const std::size_t L = ce.op().sparsity();
  const auto& seg = ce.segment();
  std::vector<Outcome> out;
  if (L == 0 || seg.tau == 0.0) {
    out.push_back({1.0, GateString(n)});
    return out;
  }
  std::map<Key, double> dist{{key(PhasedPauli{0, PauliString(n)}), 1.0}};
  for (std::size_t m = 0; m < seg.gamma_n.size(); ++m) {
    if (m > 0) {
      // two more folds per step of m (n = 2m)
      for (int rep = 0; rep < 2; ++rep) {
        std::map<Key, double> next;
        for (const auto& [k, p] : dist) {
          const PhasedPauli acc{std::get<0>(k), PauliString(n, std::get<1>(k), std::get<2>(k))};
          for (std::size_t l = 0; l < L; ++l) next[key(ce.fold(acc, l))] += p * ce.term_probability(l);
        }
        dist = std::move(next);
      }
    }
    const double pm = seg.gamma_n[m] / seg.total_gamma;
    for (const auto& [k, p] : dist) {
      const PhasedPauli acc{std::get<0>(k), PauliString(n, std::get<1>(k), std::get<2>(k))};
      for (std::size_t rot = 0; rot < L; ++rot) {
        GateString g(n);
        ce.append_segment(g, static_cast<int>(2 * m), acc, rot);
        out.push_back({pm * p * ce.term_probability(rot), std::move(g)});
      }
    }
  }
  return out;
}

inline Matrix mean_dense(const std::vector<Outcome>& outs, std::size_t dim) {
  Matrix e(dim, dim);
  for (const auto& o : outs) e += cplx(o.p) * o.g.dense();
  return e;
}

inline Matrix power(const Matrix& m, std::size_t r) {
  Matrix out = Matrix::identity(m.rows());
  for (std::size_t k = 0; k < r; ++k) out = out * m;
  return out;
}

// gamma^r E[U], segments independent so E[U] = E[segment]^r.
inline Matrix compiled_expectation(const CompiledExponential& ce) {
  const std::size_t dim = std::size_t{1} << ce.op().num_qubits();
  return cplx(ce.total_weight()) * power(mean_dense(segment_outcomes(ce), dim), ce.r());
}

// Merge outcomes whose dense matrices agree to ~1e-13.
inline std::vector<Outcome> merge(std::vector<Outcome> outs) {
  std::map<std::vector<long long>, std::size_t> index;
  std::vector<Outcome> merged;
  for (auto& o : outs) {
    const Matrix d = o.g.dense();
    std::vector<long long> k;
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j) {
        k.push_back(std::llround(d(i, j).real() * 1e13));
        k.push_back(std::llround(d(i, j).imag() * 1e13));
      }
    auto [it, fresh] = index.emplace(std::move(k), merged.size());
    if (fresh)
      merged.push_back(std::move(o));
    else
      merged[it->second].p += o.p;
  }
  return merged;
}

// Joint outcomes of all r segments: each string is segment_r ... segment_1.
inline std::vector<Outcome> compiled_outcomes(const CompiledExponential& ce) {
  const auto seg = merge(segment_outcomes(ce));
  std::vector<Outcome> acc{{1.0, GateString(ce.op().num_qubits())}};
  for (std::size_t s = 0; s < ce.r(); ++s) {
    std::vector<Outcome> next;
    next.reserve(acc.size() * seg.size());
    for (const auto& a : acc)
      for (const auto& b : seg) {
        GateString g = a.g;
        g.append(b.g);
        next.push_back({a.p * b.p, std::move(g)});
      }
    acc = merge(std::move(next));
  }
  return acc;
}

// Outcomes of plan.draw(): term choice, phase(alpha_k) and the compiled string.
inline std::vector<Outcome> plan_outcomes(const SamplingPlan& plan) {
  std::vector<Outcome> out;
  for (std::size_t k = 0; k < plan.coeffs.size(); ++k) {
    const double pk = plan.term_weight[k] / plan.R;
    if (pk == 0.0) continue;
    const cplx ph = plan.coeffs[k] / std::abs(plan.coeffs[k]);
    for (auto& o : compiled_outcomes(*plan.compiled[k])) {
      o.g.multiply_phase(ph);
      out.push_back({pk * o.p, std::move(o.g)});
    }
  }
  return merge(std::move(out));
}

// Exact E[z] for the overlap estimator with fixed input states: each shot's
// coin means come from the Hadamard-test circuit probabilities.
inline cplx overlap_expectation(const SamplingPlan& plan, const StateVector& psi, const StateVector& phi) {
  cplx e = 0.0;
  for (const auto& o : plan_outcomes(plan)) {
    const double re = 2.0 * hadamard_test_probability(psi, phi, o.g, Part::real) - 1.0;
    const double im = 2.0 * hadamard_test_probability(psi, phi, o.g, Part::imaginary) - 1.0;
    e += o.p * cplx(re, im);
  }
  return plan.R * e;
}

// Exact E[z] for the observable estimator: independent U, V, the Pauli index
// drawn with |o_k|/||o||_1, outcome mean from the LCU pair circuit.
inline double observable_expectation(const SamplingPlan& plan, const StateVector& rho, const Observable& obs) {
  const auto outs = plan_outcomes(plan);
  const auto& terms = obs.op.terms();
  double e = 0.0;
  for (const auto& u : outs)
    for (const auto& v : outs)
      for (const auto& t : terms) {
        const double pk = std::abs(t.coeff) / obs.one_norm;
        const double mean = 2.0 * lcu_pair_probability(rho, u.g, v.g, t.string) - 1.0;
        e += u.p * v.p * pk * (t.coeff < 0 ? -1.0 : 1.0) * mean;
      }
  return plan.R * plan.R * obs.one_norm * e;
}

}  // namespace rqla::enumerate
