#include "rqla/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rqla/errors.hpp"
#include "rqla/stabilizer.hpp"

namespace rqla {

namespace {

// Dense oracle checks only run at desk scale.
constexpr std::size_t kDeskQubits = 6;

std::uint64_t norm_seed(std::uint64_t seed) { return shot_seed(seed, 0x6e6f726d616c697aULL); }

void check_options(const AppOptions& o) {
  if (!(o.eps > 0.0 && o.eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(o.split > 0.0 && o.split < 1.0)) throw ValidationError("error split must lie in (0, 1)");
  if (!(o.r_scale >= 1.0) || !std::isfinite(o.r_scale)) throw ValidationError("r_scale must be >= 1");
}

RunOptions run_options(const AppOptions& o, std::uint64_t seed) { return {seed, o.threads, o.trace}; }

PlanOptions plan_options(const AppOptions& o) {
  PlanOptions p;
  p.r_scale = o.r_scale;
  p.shot_ceiling = o.shot_ceiling;
  p.tail_tol = o.tail_tol;
  return p;
}

// Builders want eps in (0, 1); asking for more accuracy than needed is harmless.
double builder_eps(double e) { return std::min(e, 0.5); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

void describe(AppReport& r, const FourierSeries& s) {
  r.series_function = s.function;
  r.series_alpha = s.alpha();
  r.series_t_max = s.t_max();
  r.series_eps = s.eps;
  for (const auto& w : s.warnings) r.annotations.push_back(w);
}

// f(x) = 1/x for |x| in [1/G, s], as (1/s) h(x/s) with h certified on D_{sG}.
FourierSeries inverse_series(double s, double G, double eps_f) {
  const double b = std::max(1.0, s * G);
  const FourierSeries h = build_inverse(b, builder_eps(eps_f * s));
  FourierSeries f = scale_values(transform_argument(h, 0.0, s), 1.0 / s);
  f.eps = eps_f;
  return f;
}

// e^{-tau^2 (x - x0)^2 / 2} for |x - x0| <= sigma.
FourierSeries gaussian_series(double tau, double x0, double sigma, double eps_f) {
  if (tau == 0.0 || sigma == 0.0) return identity_series();
  return transform_argument(build_gaussian(tau * sigma, builder_eps(eps_f)), x0, sigma);
}

std::optional<std::vector<double>> desk_spectrum(const PauliOperator& op) {
  if (op.num_qubits() > kDeskQubits) return std::nullopt;
  return oracle::eigh(op.dense()).values;
}

double vector_norm(const InputState& in) {
  if (const auto* v = in.vector()) return v->l2() / v->normalization();
  return 1.0;
}

void check_linear(const LinearSystemProblem& p, double s, AppReport& rep) {
  if (!(p.inv_norm_bound > 0.0) || !std::isfinite(p.inv_norm_bound))
    throw ValidationError("inv_norm_bound must be positive");
  if (!(s > 0.0)) throw ValidationError("norm bound must be positive");
  if (s * p.inv_norm_bound < 1.0 - 1e-9) throw ValidationError("norm_bound * inv_norm_bound < 1 is impossible");
  if (p.b.num_qubits() != p.A.num_qubits()) throw DimensionError("b width does not match A");
  if (p.q && !(*p.q > 0.0)) throw ValidationError("normalization q must be positive");
  if (p.q_lower && !(*p.q_lower > 0.0)) throw ValidationError("q_lower must be positive");
  if (const auto spec = desk_spectrum(p.A)) {
    for (double e : *spec) {
      if (std::abs(e) < (1.0 - 1e-9) / p.inv_norm_bound || std::abs(e) > s * (1.0 + 1e-9))
        throw ValidationError("eigenvalue " + fmt(e) + " of A lies outside the inverse-series domain [1/" +
                              fmt(p.inv_norm_bound) + ", " + fmt(s) + "]");
    }
    rep.annotations.push_back("spectrum of A checked against the inverse-series domain (dense oracle)");
  } else {
    rep.annotations.push_back("spectrum of A not checked (too large for the dense oracle)");
  }
}

StateVector embed_vector(std::size_t top, const StateVector& v) { return kron(basis_state(2, top), v); }

}  // namespace

EmbeddedSystem embed_linear_system(const PauliOperator& h1, const PauliOperator& h2, const StateVector& b,
                                   const StateVector& psi) {
  if (h1.num_qubits() != h2.num_qubits()) throw DimensionError("H1 and H2 widths differ");
  const std::size_t n = h1.num_qubits();
  if (b.size() != (std::size_t{1} << n) || psi.size() != b.size()) throw DimensionError("vector size mismatch");
  auto unit = [](StateVector v) {
    const double nv = norm(v);
    if (!(nv > 0.0)) throw ValidationError("zero vector");
    for (auto& x : v) x /= nv;
    return v;
  };
  return {hermitian_embed(h1, h2), StatePrep::dense(n + 1, embed_vector(0, unit(b))),
          StatePrep::dense(n + 1, embed_vector(1, unit(psi)))};
}

AppReport solve_overlap(const LinearSystemProblem& p, const InputState& psi, const AppOptions& opt) {
  check_options(opt);
  AppReport rep;
  const double s = p.norm_bound.value_or(p.A.weight());
  check_linear(p, s, rep);
  if (psi.num_qubits() != p.A.num_qubits()) throw DimensionError("psi width does not match A");
  const double nb = vector_norm(p.b), npsi = vector_norm(psi);
  const bool estimate_q = !p.q;
  const double q = p.q ? *p.q : p.q_lower.value_or(nb / s);

  // Fourier part: |<psi|(s - f)|b>| <= eps_f ||psi|| ||b||
  double eps_f = (1.0 - opt.split) * opt.eps * q / (nb * npsi);
  if (estimate_q) eps_f = std::min(eps_f, (1.0 - opt.split) * opt.eps * q / (6.0 * nb));
  const FourierSeries series = inverse_series(s, p.inv_norm_bound, eps_f);
  describe(rep, series);

  PlanOptions po = plan_options(opt);
  po.prep_weight = psi.weight_bound() * p.b.weight_bound();
  const SamplingPlan pl = plan(series, p.A, opt.split * opt.eps * q, opt.delta, Mode::overlap, po);
  rep.core = estimate_overlap(pl, p.b, psi, run_options(opt, opt.seed));
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  if (!estimate_q) {
    rep.estimate = rep.core.mean / q;
    rep.bound = opt.eps;
    return rep;
  }
  const double wb = p.b.weight_bound() * p.b.weight_bound();
  const NormPlan np = plan_norm(pl, q, opt.eps, opt.delta, opt.split, 1.0, wb, opt.shot_ceiling);
  rep.norm = estimate_norm_squared(pl, p.b, np.M, run_options(opt, norm_seed(opt.seed)));
  rep.q_estimate = std::sqrt(rep.norm->mean.real());
  rep.estimate = rep.core.mean / *rep.q_estimate;
  rep.bound = 3.0 * opt.eps;
  rep.annotations.push_back("q estimated; combined error bound is 3 eps");
  return rep;
}

AppReport solve_observable(const LinearSystemProblem& p, const Observable& obs, const AppOptions& opt) {
  check_options(opt);
  AppReport rep;
  const double s = p.norm_bound.value_or(p.A.weight());
  check_linear(p, s, rep);
  if (obs.op.num_qubits() != p.A.num_qubits()) throw DimensionError("observable width does not match A");
  const double nb = vector_norm(p.b), c = obs.one_norm, F = p.inv_norm_bound;
  const bool estimate_q = !p.q;
  const double q = p.q ? *p.q : p.q_lower.value_or(nb / s);

  // |<sb|O|sb> - <fb|O|fb>| <= c (2F + eps_f) eps_f ||b||^2 <= 3 c F eps_f ||b||^2
  double eps_f = (1.0 - opt.split) * opt.eps * q * q / (3.0 * c * F * nb * nb);
  if (estimate_q) eps_f = std::min(eps_f, (1.0 - opt.split) * opt.eps * q / (6.0 * c * nb));
  eps_f = std::min(eps_f, F);
  const FourierSeries series = inverse_series(s, F, eps_f);
  describe(rep, series);

  PlanOptions po = plan_options(opt);
  po.prep_weight = p.b.weight_bound() * p.b.weight_bound();
  po.one_norm = c;
  const SamplingPlan pl = plan(series, p.A, opt.split * opt.eps * q * q, opt.delta, Mode::observable, po);
  rep.core = estimate_observable(pl, p.b, obs, run_options(opt, opt.seed));
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.annotations.push_back("observable range uses the Pauli one-norm " + fmt(c));
  if (!estimate_q) {
    rep.estimate = rep.core.mean.real() / (q * q);
    rep.bound = opt.eps;
    return rep;
  }
  const NormPlan np = plan_norm(pl, q, opt.eps, opt.delta, opt.split, c, po.prep_weight, opt.shot_ceiling);
  rep.norm = estimate_norm_squared(pl, p.b, np.M, run_options(opt, norm_seed(opt.seed)));
  rep.q_estimate = std::sqrt(rep.norm->mean.real());
  rep.estimate = rep.core.mean.real() / rep.norm->mean.real();
  rep.bound = 3.0 * opt.eps;
  rep.annotations.push_back("q estimated; combined error bound is 3 eps");
  return rep;
}

double ground_state_tau(double gap, double gamma, double one_norm, double eps) {
  if (!(gap > 0.0)) throw ValidationError("gap bound must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("overlap bound gamma must lie in (0, 1]");
  const double arg = 2.0 * one_norm / (eps * gamma);
  return arg > 1.0 ? std::sqrt(2.0 * std::log(arg)) / gap : 0.0;
}

namespace {

// Projection error of e^{-tau^2 (H-E0)^2/2} is charged eps/2; the normalized
// estimate then runs at eps/6 so that the factor 3 of an estimated q adds eps/2.
struct GroundCore {
  FourierSeries series;
  double tau, q_lower;
};

void ground_annotations(const PauliOperator& H, double gap, const StatePrep& trial, double gamma, double shift,
                        double shift_error, double tau, double eps, double c, AppReport& rep) {
  if (H.num_qubits() > kDeskQubits) {
    rep.annotations.push_back("ground-state preconditions not checked (too large for the dense oracle)");
    return;
  }
  const auto g = oracle::ground(H.dense());
  const double overlap = std::abs(inner(g.vector, trial.prepare()));
  if (gap > g.gap + 1e-9) rep.annotations.push_back("warning: gap bound " + fmt(gap) + " exceeds the true gap " + fmt(g.gap));
  if (gamma > overlap + 1e-9)
    rep.annotations.push_back("warning: gamma " + fmt(gamma) + " exceeds the true overlap " + fmt(overlap));
  if (std::abs(g.e0 - shift) > shift_error + 1e-9)
    rep.annotations.push_back("warning: |E0 - shift| = " + fmt(std::abs(g.e0 - shift)) + " exceeds shift_error");
  const double arg = c / (eps * gamma);
  if (arg > 1.0) {
    const double limit = gap / std::sqrt(2.0 * std::log(arg));
    if (g.e0 - shift > limit)
      rep.annotations.push_back("warning: shifted E0 " + fmt(g.e0 - shift) + " exceeds the precondition " + fmt(limit));
  }
  rep.annotations.push_back("oracle: E0 = " + fmt(g.e0) + ", gap = " + fmt(g.gap) + ", overlap = " + fmt(overlap) +
                            ", tau = " + fmt(tau));
}

}  // namespace

AppReport ground_state_expectation(const GroundStateProblem& p, const AppOptions& opt) {
  check_options(opt);
  const std::size_t n = p.H.num_qubits();
  if (p.trial.num_qubits() != n || p.O.op.num_qubits() != n) throw DimensionError("ground-state widths differ");
  if (!(p.shift_error >= 0.0)) throw ValidationError("shift_error must be >= 0");
  AppReport rep;
  const double c = p.O.one_norm;
  const double tau = ground_state_tau(p.gap, p.gamma, c, opt.eps);
  const double eps_c = opt.eps / 6.0;
  const double q = p.gamma * std::exp(-0.5 * tau * tau * p.shift_error * p.shift_error);
  const double sigma = p.H.plus_identity(-p.shift).weight();
  ground_annotations(p.H, p.gap, p.trial, p.gamma, p.shift, p.shift_error, tau, opt.eps, c, rep);

  const double eps_f = std::min((1.0 - opt.split) * eps_c * q * q / (3.0 * c), (1.0 - opt.split) * eps_c * q / (6.0 * c));
  const FourierSeries series = gaussian_series(tau, p.shift, sigma, eps_f);
  describe(rep, series);

  PlanOptions po = plan_options(opt);
  po.one_norm = c;
  const SamplingPlan pl = plan(series, p.H, opt.split * eps_c * q * q, opt.delta, Mode::observable, po);
  const InputState trial(p.trial);
  rep.core = estimate_observable(pl, trial, p.O, run_options(opt, opt.seed));
  const NormPlan np = plan_norm(pl, q, eps_c, opt.delta, opt.split, c, 1.0, opt.shot_ceiling);
  rep.norm = estimate_norm_squared(pl, trial, np.M, run_options(opt, norm_seed(opt.seed)));
  rep.q_estimate = std::sqrt(rep.norm->mean.real());
  rep.estimate = rep.core.mean.real() / rep.norm->mean.real();
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.bound = opt.eps;
  return rep;
}

PauliOperator work_operator(const PauliOperator& H, const PauliOperator& H0) {
  if (H.num_qubits() != H0.num_qubits()) throw DimensionError("H and H0 widths differ");
  const PauliOperator id(H.num_qubits(), {{PauliString(H.num_qubits()), 1.0}});
  return tensor(H, id) - tensor(id, H0.conj());
}

AppReport gibbs_expectation(const GibbsProblem& p, const AppOptions& opt) {
  check_options(opt);
  const std::size_t n = p.H.num_qubits();
  if (p.H0.num_qubits() != n || p.O.op.num_qubits() != n) throw DimensionError("Gibbs widths differ");
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw ValidationError("beta must be finite and >= 0");
  if (2 * n > kDeskQubits) throw DimensionError("Gibbs purification is built by the dense oracle; n <= 3");
  AppReport rep;
  const Matrix h = p.H.dense(), h0 = p.H0.dense();
  const double comm = (h * h0 - h0 * h).max_abs();
  if (comm > 1e-10) throw ValidationError("H and H0 do not commute (max entry " + fmt(comm) + ")");

  const PauliOperator W = work_operator(p.H, p.H0);
  const auto wspec = oracle::eigh(W.dense()).values;
  const Interval iv{wspec.front(), wspec.back()};
  const double c = p.O.one_norm;
  const double F = std::exp(-0.5 * p.beta * iv.lo);  // ||e^{-beta W/2}||
  const double q = std::exp(-0.5 * p.beta * iv.hi);  // <= ||e^{-beta W/2} Psi0||
  const double eps_c = opt.eps / 3.0;
  const double eps_f =
      std::min((1.0 - opt.split) * eps_c * q * q / (3.0 * c * F), (1.0 - opt.split) * eps_c * q / (6.0 * c));
  const FourierSeries series = build_exp(p.beta, iv, builder_eps(eps_f));
  describe(rep, series);
  rep.annotations.push_back("purification and spectral interval [" + fmt(iv.lo) + ", " + fmt(iv.hi) +
                            "] of W from the dense oracle (desk scale only)");

  const InputState psi0(StatePrep::dense(2 * n, oracle::purify(h0, p.beta)));
  const Observable O2(p.O.op.embed(2 * n, 0));
  PlanOptions po = plan_options(opt);
  po.one_norm = c;
  const SamplingPlan pl = plan(series, W, opt.split * eps_c * q * q, opt.delta, Mode::observable, po);
  rep.core = estimate_observable(pl, psi0, O2, run_options(opt, opt.seed));
  const NormPlan np = plan_norm(pl, q, eps_c, opt.delta, opt.split, c, 1.0, opt.shot_ceiling);
  rep.norm = estimate_norm_squared(pl, psi0, np.M, run_options(opt, norm_seed(opt.seed)));
  rep.q_estimate = std::sqrt(rep.norm->mean.real());
  rep.estimate = rep.core.mean.real() / rep.norm->mean.real();
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.bound = opt.eps;
  return rep;
}

PhasedPauli PauliMixture::draw(Rng& rng) const {
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * terms.size()), terms.size() - 1);
  return terms[k];
}

Matrix PauliMixture::dense() const {
  Matrix out(std::size_t{1} << terms.front().string.size(), std::size_t{1} << terms.front().string.size());
  for (const auto& t : terms) out += (weight / terms.size()) * t.phase_value() * t.string.dense();
  return out;
}

namespace {

PauliMixture jw_ladder(std::size_t modes, std::size_t i, std::size_t total, std::size_t offset, int y_phase) {
  if (i >= modes) throw DimensionError("mode index out of range");
  if (offset + modes > total) throw DimensionError("modes do not fit the register");
  PauliString x(total), y(total);
  for (std::size_t k = 0; k < i; ++k) {
    x.set_axis(offset + k, 'Z');
    y.set_axis(offset + k, 'Z');
  }
  x.set_axis(offset + i, 'X');
  y.set_axis(offset + i, 'Y');
  return {{{0, x}, {y_phase, y}}, 1.0};
}

}  // namespace

PauliMixture jw_annihilator(std::size_t modes, std::size_t i, std::size_t total, std::size_t offset) {
  return jw_ladder(modes, i, total, offset, 1);  // (X + iY)/2 = |0><1|
}

PauliMixture jw_creator(std::size_t modes, std::size_t i, std::size_t total, std::size_t offset) {
  return jw_ladder(modes, i, total, offset, 3);
}

PauliOperator greens_dilation(const GreensProblem& p) {
  const std::size_t n = p.H.num_qubits();
  const PauliOperator eta(n, {{PauliString(n), p.eta}});
  if (p.branch == oracle::Branch::particle)  // w - (H - E0) + i eta
    return hermitian_embed(p.H.scaled(-1.0).plus_identity(p.omega + p.E0), eta);
  return hermitian_embed(p.H.plus_identity(p.omega - p.E0), eta.scaled(-1.0));  // w + (H - E0) - i eta
}

AppReport greens_function(const GreensProblem& p, const AppOptions& opt) {
  check_options(opt);
  const std::size_t n = p.H.num_qubits(), total = n + 1;
  if (!(p.eta > 0.0)) throw ValidationError("broadening eta must be positive");
  if (p.trial.num_qubits() != n) throw DimensionError("trial width does not match H");
  if (p.i >= n || p.j >= n) throw DimensionError("mode index out of range");
  AppReport rep;
  const PauliOperator Y = greens_dilation(p);
  const double s = p.norm_bound.value_or(Y.weight());
  const double G = p.inv_norm_bound.value_or(1.0 / p.eta);
  if (!(s > 0.0) || !(G > 0.0)) throw ValidationError("norm bounds must be positive");

  // projection charged eps/2 through 2 sqrt2 ||B|| sin(angle), ||B|| <= G
  const double tau = ground_state_tau(p.gap, p.gamma, 2.0 * std::numbers::sqrt2 * G, opt.eps);
  const double eps_c = opt.eps / 6.0;
  const double q = p.gamma;
  const double eps_g = std::min((1.0 - opt.split) * eps_c * q / (6.0 * G), 0.1 * q);
  const double eps_inv = (1.0 - opt.split) * eps_c / (2.0 * 1.21);
  const double sigma = p.H.plus_identity(-p.E0).weight();

  if (n <= kDeskQubits - 1) {
    const Matrix ym = Y.dense();
    const double ynorm = oracle::operator_norm(ym), yinv = oracle::inverse_norm(ym);
    if (ynorm > s * (1.0 + 1e-9)) throw ValidationError("||Y|| = " + fmt(ynorm) + " exceeds norm_bound " + fmt(s));
    if (yinv > G * (1.0 + 1e-9))
      throw ValidationError("||Gamma^-1|| = " + fmt(yinv) + " exceeds inv_norm_bound " + fmt(G));
    const double e0 = oracle::ground(p.H.dense()).e0;
    if (std::abs(e0 - p.E0) > 1e-9)
      rep.annotations.push_back("warning: supplied E0 differs from the oracle value " + fmt(e0) +
                                "; the resolvent error is amplified by ||Gamma^-1|| ||(Gamma +- dE)^-1||");
  }
  ground_annotations(p.H, p.gap, p.trial, p.gamma, p.E0, 0.0, tau, opt.eps, 2.0 * std::numbers::sqrt2 * G, rep);
  rep.annotations.push_back("E0 is an input; errors in E0 shift the resolvent pole");

  const FourierSeries gs = gaussian_series(tau, p.E0, sigma, eps_g);
  const FourierSeries inv = inverse_series(s, G, eps_inv);
  describe(rep, inv);
  for (const auto& w : gs.warnings) rep.annotations.push_back(w);

  PlanOptions po = plan_options(opt);
  po.shots = 1;  // shot counts below come from the composite weight
  const PauliOperator h_full = p.H.embed(total, 1);
  const SamplingPlan gs_plan = plan(gs, h_full, opt.eps, opt.delta, Mode::overlap, po);
  const SamplingPlan inv_plan = plan(inv, Y, opt.eps, opt.delta, Mode::overlap, po);
  const bool particle = p.branch == oracle::Branch::particle;
  const PauliMixture left = particle ? jw_annihilator(n, p.i, total, 1) : jw_creator(n, p.i, total, 1);
  const PauliMixture right = particle ? jw_creator(n, p.j, total, 1) : jw_annihilator(n, p.j, total, 1);
  const double R = gs_plan.R * gs_plan.R * inv_plan.R * left.weight * right.weight;
  const double a = opt.split * eps_c * q * q;
  const std::uint64_t M = overlap_shots(R, a, opt.delta);
  if (M > opt.shot_ceiling)
    throw PlanningError("Green's function plan: required shots " + std::to_string(M) + " exceed ceiling", M);

  const StateVector psi = p.trial.prepare();
  const StateVector in0 = embed_vector(0, psi), in1 = embed_vector(1, psi);
  auto shot = [&](Rng& rng, ShotRecord& rec) -> cplx {
    thread_local GateString g, back;
    thread_local StateVector v;
    g.reset(total);
    back.reset(total);
    std::size_t k1 = 0, k2 = 0, k3 = 0;
    // <1,psi| f_GS^dag L f_inv R f_GS |0,psi>, applied right to left
    gs_plan.draw_into(g, rng, k1);
    g.append_pauli(right.draw(rng));
    inv_plan.draw_into(g, rng, k2);
    g.append_pauli(left.draw(rng));
    gs_plan.draw_into(back, rng, k3);
    g.append(back.adjoint());
    v = in0;
    g.apply(v.data(), v.size());
    const cplx ov = inner(in1, v);
    rec.terms = {k1, k2, k3};
    rec.rotations = g.rotation_count();
    rec.paulis = g.pauli_count();
    rec.o1 = uniform01(rng) < 0.5 * (1.0 + ov.real()) ? 1 : -1;
    rec.o2 = uniform01(rng) < 0.5 * (1.0 + ov.imag()) ? 1 : -1;
    return R * cplx(rec.o1, rec.o2);
  };
  rep.core = run_shots(M, shot, R * std::numbers::sqrt2, run_options(opt, opt.seed));
  rep.core.R = R;
  rep.core.eps = a;
  rep.core.delta = opt.delta;
  rep.core.mode = "greens";
  rep.core.r_vec = inv_plan.r_vec;

  const NormPlan np = plan_norm(gs_plan, q, eps_c, opt.delta, opt.split, G, 1.0, opt.shot_ceiling);
  rep.norm = estimate_norm_squared(gs_plan, InputState(StatePrep::dense(total, in0)), np.M,
                                   run_options(opt, norm_seed(opt.seed)));
  rep.q_estimate = std::sqrt(rep.norm->mean.real());
  rep.estimate = rep.core.mean / rep.norm->mean.real();
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.bound = opt.eps;
  rep.annotations.push_back("gaussian filter tau = " + fmt(tau) + ", weight " + fmt(gs_plan.R) +
                            "; inverse weight " + fmt(inv_plan.R));
  return rep;
}

// ---- stabilizer baselines

namespace {

// Gate list of a Clifford preparation; basis states become X gates.
std::vector<PrepGate> clifford_gates(const StatePrep& prep) {
  switch (prep.kind()) {
    case StatePrep::Kind::basis: {
      std::vector<PrepGate> out;
      const std::size_t n = prep.num_qubits();
      PauliString x(n);
      for (std::size_t k = 0; k < n; ++k)
        if ((prep.index() >> (n - 1 - k)) & 1) x.set_axis(k, 'X');
      if (!x.is_identity()) out.push_back({PrepGate::Kind::pauli, 0, 0, {0, x}, 0.0});
      return out;
    }
    case StatePrep::Kind::gates:
      if (!prep.is_clifford()) throw ValidationError("preparation contains non-Clifford rotations");
      return prep.gate_list();
    case StatePrep::Kind::dense:
      break;
  }
  throw ValidationError("stabilizer sampling needs a Clifford gate-list preparation");
}

bool same_gate(const PrepGate& a, const PrepGate& b) {
  return a.kind == b.kind && a.q0 == b.q0 && a.q1 == b.q1 && a.pauli == b.pauli && a.angle == b.angle;
}

PrepGate shifted(PrepGate g) {
  g.q0 += 1;
  g.q1 += 1;
  g.pauli.string = PauliString(1).tensor(g.pauli.string);
  return g;
}

// s = S C|0>, t = T C|0> with a shared Clifford prefix C and Pauli tails S, T.
struct CliffordPair {
  std::vector<PrepGate> prefix;
  PhasedPauli s_tail, t_tail;
};

CliffordPair split_preps(const StatePrep& s_prep, const StatePrep& t_prep) {
  if (s_prep.num_qubits() != t_prep.num_qubits()) throw DimensionError("s and t widths differ");
  const auto s = clifford_gates(s_prep), t = clifford_gates(t_prep);
  const std::size_t n = s_prep.num_qubits();
  std::size_t common = 0;
  while (common < s.size() && common < t.size() && same_gate(s[common], t[common])) ++common;
  auto tail = [&](const std::vector<PrepGate>& gates) {
    PhasedPauli acc{0, PauliString(n)};
    for (std::size_t k = common; k < gates.size(); ++k) {
      if (gates[k].kind != PrepGate::Kind::pauli)
        throw ValidationError("s and t must share a Clifford prefix and differ only by Pauli gates");
      acc = multiply(gates[k].pauli, acc);
    }
    return acc;
  };
  return {std::vector<PrepGate>(s.begin(), s.begin() + common), tail(s), tail(t)};
}

// <t|X|s> = <C0| T^dag X S |C0>
PhasedPauli sandwich(const CliffordPair& cp, const PhasedPauli& x) {
  const PhasedPauli t_dag{(4 - cp.t_tail.phase % 4) % 4, cp.t_tail.string};
  return multiply(multiply(t_dag, x), cp.s_tail);
}

struct StabilizerStats {
  std::uint64_t max_gates = 0, max_rows = 0;
};

// Runs M Hadamard tests of the Pauli returned by draw on C|0>; z = R * factor * <Q>-outcome.
using PauliDraw = std::function<std::pair<cplx, PhasedPauli>(Rng&, ShotRecord&)>;

EstimateReport run_stabilizer(std::size_t n, const std::vector<PrepGate>& prefix, double R, std::uint64_t M,
                              const PauliDraw& draw, const RunOptions& ro, StabilizerStats& stats) {
  Tableau base(n + 1);
  for (const auto& g : prefix) base.apply(shifted(g));
  std::mutex mu;
  auto shot = [&](Rng& rng, ShotRecord& rec) -> cplx {
    auto [factor, q] = draw(rng, rec);
    Tableau t = base;
    const std::uint64_t g0 = t.elementary_gates(), r0 = t.row_updates();
    t.h(0);
    t.controlled_pauli(0, PauliString(1).tensor(q.string));
    t.h(0);
    rec.o1 = t.measure_z(0, rng);
    rec.paulis = q.string.is_identity() ? 0 : 1;
    {
      std::lock_guard lock(mu);
      stats.max_gates = std::max(stats.max_gates, t.elementary_gates() - g0);
      stats.max_rows = std::max(stats.max_rows, t.row_updates() - r0);
    }
    // Re<Q_string> is what the test measures; the i^phase stays classical
    return R * factor * q.phase_value() * static_cast<double>(rec.o1);
  };
  return run_shots(M, shot, R, ro);
}

PhasedPauli signed_term(const PauliOperator& op, std::size_t k) {
  const auto& t = op.terms()[k];
  return {t.coeff < 0 ? 2 : 0, t.string};
}

}  // namespace

std::uint64_t poly_shots(double weight, double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw ValidationError("eps, delta out of range");
  const double m = std::ceil(2.0 * std::log(2.0 / delta) * weight * weight / (eps * eps));
  if (!std::isfinite(m) || m > 9.0e18) return UINT64_MAX;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(m));
}

AppReport classical_poly_overlap(const PauliOperator& A, const std::vector<cplx>& coeffs, const StatePrep& s_prep,
                                 const StatePrep& t_prep, const AppOptions& opt) {
  check_options(opt);
  const std::size_t n = A.num_qubits();
  if (s_prep.num_qubits() != n) throw DimensionError("preparation width does not match A");
  if (coeffs.empty()) throw ValidationError("empty polynomial");
  const CliffordPair cp = split_preps(s_prep, t_prep);

  const double lambda = A.weight();
  std::vector<double> w(coeffs.size()), cum(coeffs.size());
  double R = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    w[k] = std::abs(coeffs[k]) * std::pow(lambda, static_cast<double>(k));
    R += w[k];
  }
  if (!(R > 0.0)) throw ValidationError("polynomial has zero weight");
  double run = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    run += w[k] / R;
    cum[k] = run;
  }
  cum.back() = 1.0;
  if (coeffs.size() > 1 && A.empty()) throw ValidationError("empty operator with a nonconstant polynomial");
  const Observable sampler = A.empty() ? Observable(PauliOperator(n, {{PauliString(n), 1.0}})) : Observable(A);

  const std::uint64_t M = poly_shots(R, opt.eps, opt.delta);
  if (M > opt.shot_ceiling)
    throw PlanningError("polynomial plan: required shots " + std::to_string(M) + " exceed ceiling", M);
  AppReport rep;
  StabilizerStats stats;
  auto draw = [&](Rng& rng, ShotRecord& rec) -> std::pair<cplx, PhasedPauli> {
    const double u = uniform01(rng);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()), cum.size() - 1);
    rec.terms.push_back(k);
    PhasedPauli acc{0, PauliString(n)};
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t l = sampler.draw(rng);
      rec.terms.push_back(l);
      acc = multiply(acc, signed_term(sampler.op, l));
    }
    return {coeffs[k] / std::abs(coeffs[k]), sandwich(cp, acc)};
  };
  rep.core = run_stabilizer(n, cp.prefix, R, M, draw, run_options(opt, opt.seed), stats);
  rep.core.R = R;
  rep.core.eps = opt.eps;
  rep.core.delta = opt.delta;
  rep.core.mode = "classical-poly";
  rep.estimate = rep.core.mean;
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.bound = opt.eps;
  rep.annotations.push_back("max elementary Clifford gates per shot " + std::to_string(stats.max_gates) +
                            ", max tableau row updates " + std::to_string(stats.max_rows));
  return rep;
}

AppReport power_method_estimate(const PowerMethodProblem& p, const AppOptions& opt) {
  check_options(opt);
  const std::size_t n = p.H.num_qubits();
  if (p.trial.num_qubits() != n || p.O.op.num_qubits() != n) throw DimensionError("power-method widths differ");
  if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (p.k > 0 && !(std::abs(p.e0) > 0.0)) throw ValidationError("ground energy bound must be nonzero");
  AppReport rep;
  const CliffordPair cp = split_preps(p.trial, p.trial);
  const double lambda = p.H.weight(), c = p.O.one_norm;
  const double kk = static_cast<double>(p.k);
  const double d_lower = p.gamma * p.gamma * std::pow(std::abs(p.e0), 2.0 * kk);
  const double eps_c = opt.eps / 3.0;
  const double Rn = std::pow(lambda, 2.0 * kk) * c, Rd = std::pow(lambda, 2.0 * kk);
  const std::uint64_t Mn = poly_shots(Rn, eps_c * d_lower, opt.delta);
  const std::uint64_t Md = poly_shots(Rd, 0.5 * eps_c * d_lower / c, opt.delta);
  if (Mn > opt.shot_ceiling || Md > opt.shot_ceiling)
    throw PlanningError("power method: required shots " + std::to_string(std::max(Mn, Md)) + " exceed ceiling (k = " +
                            std::to_string(p.k) + ")",
                        std::max(Mn, Md));

  if (n <= kDeskQubits) {
    const auto ev = oracle::eigh(p.H.dense()).values;
    if (ev.size() > 1 && ev[1] >= 0.0)
      rep.annotations.push_back("warning: E1 = " + fmt(ev[1]) + " is not negative; power iteration may not converge");
  }
  if (p.gap > 0.0 && p.gamma < 1.0) {
    const double arg = c * std::sqrt(1.0 - p.gamma * p.gamma) / (p.gamma * opt.eps);
    if (arg > 1.0) {
      const double k_min = std::abs(p.e0) / p.gap * std::log(arg);
      rep.annotations.push_back("recommended k >= " + fmt(k_min));
    }
  }

  const Observable h_sampler = p.H.empty() ? Observable(PauliOperator(n, {{PauliString(n), 1.0}})) : Observable(p.H);
  auto chain = [&](bool with_o) {
    return [&, with_o](Rng& rng, ShotRecord& rec) -> std::pair<cplx, PhasedPauli> {
      PhasedPauli acc{0, PauliString(n)};
      auto mul = [&](const Observable& o) {
        const std::size_t l = o.draw(rng);
        rec.terms.push_back(l);
        acc = multiply(acc, signed_term(o.op, l));
      };
      for (std::size_t m = 0; m < p.k; ++m) mul(h_sampler);
      if (with_o) mul(p.O);
      for (std::size_t m = 0; m < p.k; ++m) mul(h_sampler);
      return {1.0, sandwich(cp, acc)};
    };
  };
  StabilizerStats stats;
  rep.core = run_stabilizer(n, cp.prefix, Rn, Mn, chain(true), run_options(opt, opt.seed), stats);
  rep.norm = run_stabilizer(n, cp.prefix, Rd, Md, chain(false), run_options(opt, norm_seed(opt.seed)), stats);
  rep.core.R = Rn;
  rep.norm->R = Rd;
  rep.core.mode = "power-numerator";
  rep.norm->mode = "power-denominator";
  const double D = rep.norm->mean.real();
  if (!(D > 0.0)) throw DegenerateNormalization("power-method denominator estimate is not positive", D);
  rep.q_estimate = std::sqrt(D);
  rep.estimate = rep.core.mean.real() / D;
  rep.eps = opt.eps;
  rep.delta = opt.delta;
  rep.bound = opt.eps;
  rep.annotations.push_back("shots: numerator " + std::to_string(Mn) + ", denominator " + std::to_string(Md) +
                            " (weight lambda^{2k} = " + fmt(Rd) + ")");
  return rep;
}

}  // namespace rqla
