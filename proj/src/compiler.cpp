#include "rqla/compiler.hpp"

#include <algorithm>
#include <cmath>

#include "rqla/errors.hpp"

namespace rqla {

int SegmentDistribution::draw(Rng& rng) const {
  if (cumulative.size() == 1) return 0;
  const double u = uniform01(rng);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::size_t m = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
  return static_cast<int>(2 * m);
}

SegmentDistribution build_segment(double tau, double tail_tol) {
  if (!std::isfinite(tau)) throw ValidationError("segment tau is not finite");
  if (!(tail_tol > 0.0 && tail_tol <= 1e-6)) throw ValidationError("tail tolerance must lie in (0, 1e-6]");
  SegmentDistribution d;
  d.tau = std::abs(tau);
  const double a = d.tau;
  // gamma_n = a^n/n! * sqrt(1 + a^2/(n+1)^2), theta_n = atan(a/(n+1))
  double power = 1.0;  // a^n / n!
  double sum = 0.0;
  for (int n = 0;; n += 2) {
    const double g = power * std::sqrt(1.0 + a * a / ((n + 1.0) * (n + 1.0)));
    d.gamma_n.push_back(g);
    d.theta_n.push_back(std::atan(a / (n + 1.0)));
    d.cos_n.push_back(std::cos(d.theta_n.back()));
    d.sin_n.push_back(std::sin(d.theta_n.back()));
    sum += g;
    if (a == 0.0) break;
    const double next_power = power * a * a / ((n + 1.0) * (n + 2.0));
    const double next = next_power * std::sqrt(1.0 + a * a / ((n + 3.0) * (n + 3.0)));
    const double rho = a * a / ((n + 3.0) * (n + 4.0));  // bounds every later ratio
    if (n + 2 > a && rho < 1.0 && next / (1.0 - rho) <= tail_tol * sum) break;
    if (n > 4000) throw ConstructionError("segment series did not truncate");
    power = next_power;
  }
  d.total_gamma = sum;
  double acc = 0.0;
  for (double g : d.gamma_n) {
    acc += g;
    d.cumulative.push_back(acc / sum);
  }
  d.cumulative.back() = 1.0;
  return d;
}

std::size_t choose_r(double lambda, double t, double r_scale) {
  if (!std::isfinite(r_scale) || !std::isfinite(lambda) || !std::isfinite(t))
    throw ValidationError("choose_r needs finite inputs");
  const double v = std::ceil(r_scale * lambda * lambda * t * t);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

CompiledExponential::CompiledExponential(const PauliOperator& op, double t, std::size_t r, double tail_tol)
    : op_(op), t_(t), lambda_(op.weight()), r_(r) {
  if (r == 0) throw ValidationError("segment count must be positive");
  if (!std::isfinite(t)) throw ValidationError("evolution time is not finite");
  const double tau = lambda_ * std::abs(t) / static_cast<double>(r);
  segment_ = build_segment(tau, tail_tol);
  total_weight_ = std::pow(segment_.total_gamma, static_cast<double>(r));
  double acc = 0.0;
  for (const auto& term : op_.terms()) {
    probs_.push_back(std::abs(term.coeff) / lambda_);
    acc += probs_.back();
    cumulative_.push_back(acc);
  }
  if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

std::size_t CompiledExponential::draw_term(Rng& rng) const {
  if (cumulative_.size() == 1) return 0;
  const double u = uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
}

PhasedPauli CompiledExponential::fold(const PhasedPauli& acc, std::size_t term) const {
  const auto& tm = op_.terms()[term];
  return multiply(acc, PhasedPauli{tm.coeff < 0 ? 2 : 0, tm.string});
}

void CompiledExponential::append_segment(GateString& g, int n, const PhasedPauli& product,
                                         std::size_t rot_term) const {
  const auto& tm = op_.terms()[rot_term];
  const double s = (tm.coeff < 0 ? -1.0 : 1.0) * (t_ < 0 ? -1.0 : 1.0);
  const std::size_t m = n / 2;
  g.append_rotation(s * segment_.theta_n[m], segment_.cos_n[m], s * segment_.sin_n[m], tm.string);
  g.append_pauli({(product.phase + n) & 3, product.string});
}

void CompiledExponential::sample_into(GateString& g, Rng& rng) const {
  if (op_.empty() || segment_.tau == 0.0) return;  // exp(0) = identity
  const PhasedPauli id{0, PauliString(op_.num_qubits())};
  for (std::size_t seg = 0; seg < r_; ++seg) {
    const int n = segment_.draw(rng);
    PhasedPauli acc = id;
    for (int k = 0; k < n; ++k) acc = fold(acc, draw_term(rng));
    append_segment(g, n, acc, draw_term(rng));
  }
}

GateString CompiledExponential::sample(Rng& rng) const {
  GateString g(op_.num_qubits());
  sample_into(g, rng);
  return g;
}

}  // namespace rqla
