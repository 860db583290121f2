#include "rqla/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <numbers>
#include <sstream>

#include "rqla/errors.hpp"

namespace rqla {

namespace {

constexpr int kMaxRefinements = 10;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
}

void certify(FourierSeries& s, const std::function<cplx(double)>& f, double eps) {
  // a coarse pass rejects most failing rounds cheaply
  const auto coarse = verification_grid(s.domain, 400);
  s.achieved = sup_error(s, f, coarse);
  if (s.achieved > eps) return;
  const auto grid = verification_grid(s.domain);
  s.achieved = sup_error(s, f, grid);
}

// Builds are deterministic and the inverse certification is expensive, so
// repeated requests with identical arguments share one result.
template <class Build>
FourierSeries cached(char kind, double a, double b, double c, double d, Build build) {
  static std::mutex mu;
  static std::map<std::tuple<char, double, double, double, double>, FourierSeries> cache;
  const auto key = std::make_tuple(kind, a, b, c, d);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  FourierSeries s = build();
  std::lock_guard lock(mu);
  if (cache.size() > 64) cache.clear();
  cache.emplace(key, s);
  return s;
}

}  // namespace

FourierSeries build_inverse_uncached(double b, double eps);
FourierSeries build_gaussian_uncached(double tau, double eps);
FourierSeries build_exp_uncached(double beta, Interval iv, double eps);

FourierSeries build_inverse(double b, double eps) {
  return cached('i', b, eps, 0.0, 0.0, [&] { return build_inverse_uncached(b, eps); });
}

FourierSeries build_gaussian(double tau, double eps) {
  return cached('g', tau, eps, 0.0, 0.0, [&] { return build_gaussian_uncached(tau, eps); });
}

FourierSeries build_exp(double beta, Interval iv, double eps) {
  return cached('e', beta, iv.lo, iv.hi, eps, [&] { return build_exp_uncached(beta, iv, eps); });
}

double FourierSeries::alpha() const {
  double a = 0.0;
  for (const auto& t : terms) a += std::abs(t.alpha);
  return a;
}

double FourierSeries::t_max() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, std::abs(t.t));
  return m;
}

cplx evaluate(const FourierSeries& s, double x) { return SeriesEvaluator(s)(x); }

std::vector<cplx> evaluate(const FourierSeries& s, std::span<const double> xs) { return SeriesEvaluator(s)(xs); }

std::vector<double> verification_grid(const std::vector<Interval>& domain, std::size_t per_component) {
  std::vector<double> grid;
  const std::size_t half = std::max<std::size_t>(per_component / 2, 1);
  for (const auto& iv : domain) {
    grid.push_back(iv.lo);
    grid.push_back(iv.hi);
    const double w = iv.hi - iv.lo;
    if (w <= 0.0) continue;
    // distances from each endpoint, geometric in [1e-6 w, w/2]
    const double lo = 1e-6, hi = 0.5;
    for (std::size_t i = 0; i < half; ++i) {
      const double f = half == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (half - 1));
      grid.push_back(iv.lo + f * w);
      grid.push_back(iv.hi - f * w);
    }
  }
  return grid;
}

double sup_error(const FourierSeries& s, const std::function<cplx(double)>& f, std::span<const double> grid) {
  const SeriesEvaluator ev(s);
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(ev(x) - f(x)));
  return worst;
}

FourierSeries build_inverse_uncached(double b, double eps) {
  check_eps(eps);
  if (!(b >= 1.0) || !std::isfinite(b)) throw ValidationError("inverse bound b must be >= 1");
  const double L = std::log(b / eps);
  double cy = 1.0, cz = 1.0;
  double dy = eps / std::sqrt(L), dz = 1.0 / (b * std::sqrt(L));
  const auto f = [](double x) { return cplx(1.0 / x, 0.0); };

  for (int round = 0; round <= kMaxRefinements; ++round) {
    const std::size_t J = static_cast<std::size_t>(std::ceil(cy * b * std::sqrt(L) / dy));
    const std::size_t K = static_cast<std::size_t>(std::ceil(cz * std::sqrt(L) / dz));
    FourierSeries s;
    s.function = "inverse";
    s.domain = {{-1.0, -1.0 / b}, {1.0 / b, 1.0}};
    // y_j z_k = (2j+1) k dy dz / 2: merge equal products exactly
    std::vector<double> weights((2 * J - 1) * K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
      const double z = k * dz;
      const double a = dy * dz * z * std::exp(-0.5 * z * z) * kInvSqrt2Pi;
      for (std::size_t j = 0; j < J; ++j) weights[(2 * j + 1) * k] += a;
    }
    const double step = 0.5 * dy * dz;
    for (std::size_t m = 1; m < weights.size(); ++m) {
      if (weights[m] == 0.0) continue;
      const double a = weights[m];
      // the k and -k terms of i dy dz z e^{-z^2/2} e^{-i x y z} / sqrt(2 pi)
      s.terms.push_back({cplx(0.0, a), -step * static_cast<double>(m)});
      s.terms.push_back({cplx(0.0, -a), step * static_cast<double>(m)});
    }
    certify(s, f, eps);
    if (s.achieved <= eps) {
      s.eps = eps;
      return s;
    }
    const double y_tail = b * std::exp(-0.5 * std::pow(J * dy / b, 2));
    const double z_tail = 2.0 * b * std::exp(-0.5 * std::pow(K * dz, 2));
    const bool grow_y = y_tail > eps / 4, grow_z = z_tail > eps / 4;
    if (grow_y) cy *= 1.25;
    if (grow_z) cz *= 1.25;
    if (!grow_y && !grow_z) {
      dy /= 1.25;
      dz /= 1.25;
    }
  }
  throw ConstructionError("inverse series failed to certify after 10 refinements");
}

FourierSeries build_gaussian_uncached(double tau, double eps) {
  check_eps(eps);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("gaussian tau must be positive");
  double Z = std::sqrt(2.0 * std::log(2.0 / eps));
  double dz = std::min(1.0, 2.0 * std::numbers::pi / (tau + 2.0 * Z));
  const auto f = [tau](double x) { return cplx(std::exp(-0.5 * tau * tau * x * x), 0.0); };

  for (int round = 0; round <= kMaxRefinements; ++round) {
    const long K = static_cast<long>(std::ceil(Z / dz));
    FourierSeries s;
    s.function = "gaussian";
    s.domain = {{-1.0, 0.0}, {0.0, 1.0}};
    for (long k = -K; k <= K; ++k) {
      const double z = k * dz;
      s.terms.push_back({cplx(dz * std::exp(-0.5 * z * z) * kInvSqrt2Pi, 0.0), -z * tau});
    }
    certify(s, f, eps);
    if (s.achieved <= eps) {
      s.eps = eps;
      return s;
    }
    dz /= 2.0;
    Z *= 1.25;
  }
  throw ConstructionError("gaussian series failed to certify after 10 refinements");
}

FourierSeries build_exp_uncached(double beta, Interval iv, double eps) {
  check_eps(eps);
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and >= 0");
  if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
    throw ValidationError("spectral interval must be finite with lo <= hi");
  const auto f = [beta](double x) { return cplx(std::exp(-0.5 * beta * x), 0.0); };

  if (beta == 0.0 || iv.lo == iv.hi) {
    FourierSeries s;
    s.function = "exp";
    s.domain = {iv};
    s.terms = {{cplx(std::exp(-0.5 * beta * iv.lo), 0.0), 0.0}};
    certify(s, f, eps);
    s.eps = eps;
    return s;
  }

  // Fit g(u) = e^{-beta u/2} w(u), u = x - c, with w an erf window that is ~1 on
  // [-h, h] and dies over a margin mu; the period leaves another mu of slack.
  const double c = 0.5 * (iv.lo + iv.hi), h = 0.5 * (iv.hi - iv.lo);
  const double mu = 2.0 / beta;
  const double half_period = h + 2.0 * mu, period = 2.0 * half_period;
  const double scale = std::exp(-0.5 * beta * c);
  const double eps_g = eps / scale;
  double eps_w = eps_g;
  std::size_t N = 0;

  for (int round = 0; round <= kMaxRefinements; ++round) {
    const double amax = std::exp(0.5 * beta * (h + mu));
    const double L = std::max(1.0, std::log(8.0 * amax / eps_w));
    const double sigma = mu / (2.0 * std::sqrt(L));
    const double t_est = 2.0 * std::sqrt(L + 2.0) / sigma;
    const std::size_t need = static_cast<std::size_t>(std::ceil(4.0 * t_est * period / (2.0 * std::numbers::pi))) + 64;
    std::size_t n_pts = 64;
    while (n_pts < need) n_pts *= 2;
    N = std::max(N, n_pts);

    const double edge = h + 0.5 * mu;
    std::vector<double> g(N), u(N);
    for (std::size_t k = 0; k < N; ++k) {
      u[k] = -half_period + period * static_cast<double>(k) / N;
      const double w = 0.5 * (std::erf((u[k] + edge) / sigma) - std::erf((u[k] - edge) / sigma));
      g[k] = std::exp(-0.5 * beta * u[k]) * w;
    }
    const long M = static_cast<long>(N / 2) - 1;
    std::vector<std::pair<long, cplx>> coeffs;
    for (long m = -M; m <= M; ++m) {
      cplx acc = 0.0;
      const double om = 2.0 * std::numbers::pi * m / period;
      for (std::size_t k = 0; k < N; ++k) acc += g[k] * std::exp(cplx(0.0, -om * u[k]));
      coeffs.push_back({m, acc / static_cast<double>(N)});
    }
    std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) {
      return std::abs(a.first) < std::abs(b.first) || (std::abs(a.first) == std::abs(b.first) && a.first < b.first);
    });
    // drop the largest |m| while the dropped mass stays under eps_g / 4
    double dropped = 0.0;
    std::size_t keep = coeffs.size();
    while (keep > 1) {
      const long mk = std::abs(coeffs[keep - 1].first);
      double group = 0.0;
      std::size_t first = keep;
      while (first > 0 && std::abs(coeffs[first - 1].first) == mk) group += std::abs(coeffs[--first].second);
      if (dropped + group > eps_g / 4) break;
      dropped += group;
      keep = first;
    }
    FourierSeries s;
    s.function = "exp";
    s.domain = {iv};
    for (std::size_t k = 0; k < keep; ++k) {
      const double t = 2.0 * std::numbers::pi * coeffs[k].first / period;
      s.terms.push_back({scale * coeffs[k].second * std::exp(cplx(0.0, -t * c)), t});
    }
    certify(s, f, eps);
    if (s.achieved <= eps) {
      s.eps = eps;
      // compare against the published bounds for the exponential LCU
      const double m = std::max(4.0, std::sqrt(std::log(6.0 / eps)));
      const double vnorm = std::max(std::abs(iv.lo), std::abs(iv.hi));
      const double alpha_ref = 2.0 * std::exp(m) * std::exp(0.5 * beta * vnorm);
      const double z = 2.0 * beta * vnorm + 2.0 * m * m;
      const double tau_ref = std::numbers::pi * beta / z * (std::ceil(std::pow(z, 1.5) / 3.0) - 1.0);
      std::ostringstream w;
      if (s.alpha() > 4.0 * alpha_ref) {
        w << "exp series weight " << s.alpha() << " exceeds 4x reference bound " << alpha_ref;
        s.warnings.push_back(w.str());
      }
      if (tau_ref > 0.0 && s.t_max() > 4.0 * tau_ref) {
        w.str("");
        w << "exp series t_max " << s.t_max() << " exceeds 4x reference bound " << tau_ref;
        s.warnings.push_back(w.str());
      }
      return s;
    }
    eps_w /= 4.0;
    N *= 2;
  }
  throw ConstructionError("exp series failed to certify after 10 refinements");
}

FourierSeries identity_series() {
  FourierSeries s;
  s.function = "identity";
  s.terms = {{cplx(1.0, 0.0), 0.0}};
  s.domain = {{-1e300, 1e300}};
  return s;
}

FourierSeries transform_argument(const FourierSeries& s, double x0, double scale) {
  if (!(scale > 0.0)) throw ValidationError("argument scale must be positive");
  FourierSeries out = s;
  for (auto& t : out.terms) {
    t.t /= scale;
    t.alpha *= std::exp(cplx(0.0, -t.t * x0));
  }
  for (auto& iv : out.domain) iv = {x0 + scale * iv.lo, x0 + scale * iv.hi};
  return out;
}

FourierSeries scale_values(const FourierSeries& s, double c) {
  FourierSeries out = s;
  for (auto& t : out.terms) t.alpha *= c;
  out.eps *= std::abs(c);
  out.achieved *= std::abs(c);
  return out;
}

}  // namespace rqla
