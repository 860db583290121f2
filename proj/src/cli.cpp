#include "rqla/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rqla/errors.hpp"
#include "rqla/oracle.hpp"
#include "rqla/problem_io.hpp"

namespace rqla::cli {

namespace {

using io::json;
using io::ProblemFile;

AppOptions app_options(const RunConfig& c) {
  AppOptions o;
  o.eps = c.eps;
  o.delta = c.delta;
  o.r_scale = c.r_scale;
  o.split = c.split;
  o.shot_ceiling = c.shot_ceiling;
  o.seed = c.seed;
  o.threads = c.threads;
  o.trace = c.trace;
  return o;
}

void need(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

LinearSystemProblem linear_problem(const ProblemFile& f, std::optional<InputState>& psi_out) {
  PauliOperator A = f.pauli("hamiltonian");
  const std::size_t n = A.num_qubits();
  std::optional<InputState> b, psi;
  if (auto imag = f.optional_pauli("hamiltonian_imag")) {
    // B = H1 + i H2 through the Hermitian dilation; needs dense inputs
    const StateVector bv = f.input("vector", n).dense();
    const StateVector pv = f.has("psi") ? f.input("psi", n).dense() : bv;
    EmbeddedSystem e = embed_linear_system(A, *imag, bv, pv);
    A = e.A;
    b.emplace(e.b);
    psi.emplace(e.psi);
  } else {
    b.emplace(f.input("vector", n));
    psi.emplace(f.has("psi") ? f.input("psi", n) : *b);
  }
  psi_out = std::move(psi);
  return LinearSystemProblem{A,
                             *b,
                             f.param("inv_norm_bound"),
                             f.optional_param("norm_bound"),
                             f.optional_param("q"),
                             f.optional_param("q_lower")};
}

oracle::Branch parse_branch(const ProblemFile& f) {
  const json& p = f.params();
  if (!p.contains("branch")) return oracle::Branch::particle;
  const json& b = p.at("branch");
  if (b == "particle" || b == "+") return oracle::Branch::particle;
  if (b == "hole" || b == "-") return oracle::Branch::hole;
  throw ValidationError("params.branch must be \"particle\" or \"hole\"");
}

std::size_t index_param(const ProblemFile& f, const std::string& key, std::size_t fallback) {
  const auto v = f.optional_param(key);
  if (!v) return fallback;
  need(*v >= 0.0 && std::floor(*v) == *v, "params." + key + " must be a nonnegative integer");
  return static_cast<std::size_t>(*v);
}

AppReport run_application(const RunConfig& c) {
  const ProblemFile f = ProblemFile::load(c.problem_path);
  const AppOptions opt = app_options(c);
  const std::string& s = c.subcommand;
  if (s == "solve-linear") {
    std::optional<InputState> psi;
    const LinearSystemProblem p = linear_problem(f, psi);
    return solve_overlap(p, *psi, opt);
  }
  if (s == "solve-linear-observable") {
    std::optional<InputState> psi;
    const LinearSystemProblem p = linear_problem(f, psi);
    Observable O = f.observable();
    if (O.op.num_qubits() + 1 == p.A.num_qubits()) O = Observable(O.op.embed(p.A.num_qubits(), 1));  // embedded system
    return solve_observable(p, O, opt);
  }
  if (s == "ground-state") {
    const PauliOperator H = f.pauli("hamiltonian");
    const std::size_t n = H.num_qubits();
    const GroundStateProblem p{H,
                               f.param("gap"),
                               f.state("trial", n),
                               f.param("gamma"),
                               f.param_or("shift", 0.0),
                               f.param_or("shift_error", 0.0),
                               f.observable()};
    return ground_state_expectation(p, opt);
  }
  if (s == "gibbs") {
    const PauliOperator H = f.pauli("hamiltonian");
    const PauliOperator H0 = f.optional_pauli("h0").value_or(PauliOperator(H.num_qubits()));
    return gibbs_expectation(GibbsProblem{H, H0, f.param("beta"), f.observable()}, opt);
  }
  if (s == "greens") {
    GreensProblem p;
    p.H = f.pauli("hamiltonian");
    const std::size_t n = p.H.num_qubits();
    p.omega = f.param("omega");
    p.eta = f.param("eta");
    p.E0 = f.param("E0");
    p.i = index_param(f, "i", 0);
    p.j = index_param(f, "j", p.i);
    p.branch = parse_branch(f);
    p.gap = f.param("gap");
    p.trial = f.state("trial", n);
    p.gamma = f.param("gamma");
    p.inv_norm_bound = f.optional_param("inv_norm_bound");
    p.norm_bound = f.optional_param("norm_bound");
    return greens_function(p, opt);
  }
  if (s == "classical-poly") {
    const PauliOperator A = f.pauli("hamiltonian");
    const std::size_t n = A.num_qubits();
    need(f.params().contains("coeffs"), "missing params.coeffs");
    const auto coeffs = io::parse_complex_list(f.params().at("coeffs"));
    const StatePrep sp = f.state("state", n);
    const StatePrep tp = f.has("partner") ? f.state("partner", n) : sp;
    return classical_poly_overlap(A, coeffs, sp, tp, opt);
  }
  if (s == "power-method") {
    const PauliOperator H = f.pauli("hamiltonian");
    const PowerMethodProblem p{H,
                               index_param(f, "k", 1),
                               f.state("trial", H.num_qubits()),
                               f.observable(),
                               f.param("gamma"),
                               f.param("e0"),
                               f.param_or("gap", 0.0)};
    return power_method_estimate(p, opt);
  }
  throw ValidationError("unknown subcommand '" + s + "'");
}

std::string trace_path(const RunConfig& c) {
  if (!c.trace_path.empty()) return c.trace_path;
  return c.out.empty() ? "trace.jsonl" : c.out + ".trace.jsonl";
}

json fourier_check(const RunConfig& c) {
  FourierSeries s;
  std::function<cplx(double)> f;
  auto req = [](const std::optional<double>& v, const char* name) {
    if (!v) throw ValidationError(std::string("fourier-check needs --") + name);
    return *v;
  };
  if (c.func == "inverse") {
    const double b = req(c.b, "b");
    s = build_inverse(b, c.eps);
    f = [](double x) { return cplx(1.0 / x, 0.0); };
  } else if (c.func == "gaussian") {
    const double tau = req(c.tau, "tau");
    s = build_gaussian(tau, c.eps);
    f = [tau](double x) { return cplx(std::exp(-0.5 * tau * tau * x * x), 0.0); };
  } else if (c.func == "exp") {
    const double beta = req(c.beta, "beta");
    s = build_exp(beta, {req(c.lo, "lo"), req(c.hi, "hi")}, c.eps);
    f = [beta](double x) { return cplx(std::exp(-0.5 * beta * x), 0.0); };
  } else {
    throw ValidationError("--func must be inverse, gaussian or exp");
  }
  const auto grid = verification_grid(s.domain, 100000);
  const double re = sup_error(s, f, grid);
  json j = io::series_summary(s);
  j["recheck"] = {{"grid_points", grid.size()}, {"sup_error", re}, {"bound", 1.5 * c.eps}, {"pass", re <= 1.5 * c.eps}};
  if (!c.series_out.empty()) {
    std::ofstream o(c.series_out);
    if (!o) throw Error("cannot write " + c.series_out);
    io::write_series_jsonl(o, s);
  }
  return j;
}

json compile_exp(const RunConfig& c) {
  const ProblemFile f = ProblemFile::load(c.problem_path);
  const PauliOperator H = f.pauli("hamiltonian");
  const double t = c.t ? *c.t : f.param("t");
  const PauliOperator op = H.plus_identity(-H.coefficient(PauliString(H.num_qubits())));
  const double lambda = op.weight();
  std::size_t r = choose_r(lambda, t, c.r_scale);
  if (c.r) r = *c.r;
  else if (auto v = f.optional_param("r")) r = static_cast<std::size_t>(*v);
  need(r >= 1, "r must be positive");
  const CompiledExponential ce(op, t, r);
  const auto& seg = ce.segment();

  json j;
  j["lambda"] = lambda;
  j["t"] = t;
  j["r"] = r;
  j["identity_phase"] = io::complex_json(std::exp(cplx(0.0, t * H.coefficient(PauliString(H.num_qubits())))));
  j["segment"] = {{"tau", seg.tau},
                  {"gamma_n", seg.gamma_n},
                  {"theta_n", seg.theta_n},
                  {"max_order", seg.max_order()},
                  {"total_gamma", seg.total_gamma}};
  j["total_weight"] = ce.total_weight();
  j["weight_bound"] = std::exp(lambda * lambda * t * t / static_cast<double>(r));
  j["samples"] = c.samples;

  const bool dense = H.num_qubits() <= 6;
  const std::size_t dim = std::size_t{1} << H.num_qubits();
  Matrix acc(dim, dim);
  DepthStats d;
  double rot_sum = 0.0, pauli_sum = 0.0;
  for (std::size_t k = 0; k < c.samples; ++k) {
    Rng rng(shot_seed(c.seed, k));
    const GateString g = ce.sample(rng);
    const std::size_t rc = g.rotation_count();
    d.max_rotations = std::max(d.max_rotations, rc);
    rot_sum += static_cast<double>(rc);
    pauli_sum += static_cast<double>(g.pauli_count());
    if (dense) acc += g.dense();
  }
  if (c.samples > 0) {
    d.mean_rotations = rot_sum / static_cast<double>(c.samples);
    d.mean_paulis = pauli_sum / static_cast<double>(c.samples);
  }
  j["depth_stats"] = io::depth_json(d);
  if (dense && c.samples > 0) {
    // Monte Carlo check only; exactness is established by enumeration in the tests
    const Matrix mean = (cplx(ce.total_weight() / static_cast<double>(c.samples), 0.0)) * acc;
    j["sample_mean_error"] = oracle::operator_norm(mean - oracle::expm(op.dense(), t));
  }
  return j;
}

void write_out(const RunConfig& c, const json& j, std::ostream& out) {
  if (c.out.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream o(c.out);
  if (!o) throw Error("cannot write " + c.out);
  o << j.dump(2) << '\n';
}

}  // namespace

void validate(const RunConfig& c) {
  need(c.eps > 0.0 && c.eps < 1.0, "--eps must lie in (0, 1)");
  need(c.delta > 0.0 && c.delta < 1.0, "--delta must lie in (0, 1)");
  need(c.r_scale >= 1.0 && std::isfinite(c.r_scale), "--r-scale must be >= 1");
  need(c.split > 0.0 && c.split < 1.0, "--split must lie in (0, 1)");
  need(c.shot_ceiling >= 1, "--shot-ceiling must be positive");
  need(c.threads >= 1 && c.threads <= 1024, "--threads must lie in [1, 1024]");
  const bool needs_problem = c.subcommand != "fourier-check";
  need(!needs_problem || !c.problem_path.empty(), c.subcommand + " needs a problem file");
  if (c.r) need(*c.r >= 1, "--r must be positive");
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    json report;
    if (c.subcommand == "fourier-check") {
      report = fourier_check(c);
    } else if (c.subcommand == "compile-exp") {
      report = compile_exp(c);
    } else {
      const AppReport r = run_application(c);
      report = io::report_json(r, c.canonical);
      report["subcommand"] = c.subcommand;
      report["config"] = {{"eps", c.eps},     {"delta", c.delta},         {"r_scale", c.r_scale},
                          {"split", c.split}, {"shot_ceiling", c.shot_ceiling}};
      if (c.trace) {
        std::ofstream t(trace_path(c));
        if (!t) throw Error("cannot write " + trace_path(c));
        io::write_trace(t, r.core, "core");
        if (r.norm) io::write_trace(t, *r.norm, "norm");
      }
    }
    write_out(c, report, out);
    return kOk;
  } catch (const PlanningError& e) {
    err << "planning error: " << e.what() << " (required shots " << e.required_shots << ")\n";
    return kPlanning;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kValidation;
  } catch (const io::json::exception& e) {
    err << "problem file error: " << e.what() << '\n';
    return kValidation;
  } catch (const DegenerateNormalization& e) {
    err << "degenerate normalization: " << e.what() << " (Q = " << e.estimate
        << "); increase the normalization shots via a smaller --eps or a smaller q_lower\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace rqla::cli
