#include "rqla/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rqla/errors.hpp"

namespace rqla::oracle {

namespace {

double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

}  // namespace

Eigensystem eigh(const Matrix& h, double tol) {
  const std::size_t n = h.rows();
  if (n != h.cols()) throw DimensionError("eigh needs a square matrix");
  if (!h.is_hermitian(1e-10 * std::max(1.0, h.max_abs()))) throw ValidationError("eigh needs a Hermitian matrix");
  Matrix a = h, v = Matrix::identity(n);

  for (int sweep = 0; sweep < 100 && off_diagonal_mass(a) > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        // phase q so the pivot turns real, then a real Jacobi rotation
        const cplx ph = apq / mag;  // e^{i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * mag);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        // G = diag(1, conj(ph)) * [[c, s], [-s, c]]
        const cplx g_pp = c, g_pq = s, g_qp = -s * std::conj(ph), g_qq = c * std::conj(ph);
        for (std::size_t k = 0; k < n; ++k) {  // a <- a G
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g_pp + akq * g_qp;
          a(k, q) = akp * g_pq + akq * g_qq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g_pp + vkq * g_qp;
          v(k, q) = vkp * g_pq + vkq * g_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // a <- G^dag a
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g_pp) * apk + std::conj(g_qp) * aqk;
          a(q, k) = std::conj(g_pq) * apk + std::conj(g_qq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
  }
  if (off_diagonal_mass(a) > tol * 1e3 * std::max(1.0, h.max_abs()))
    throw ConstructionError("Jacobi eigensolver did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  Eigensystem es{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    es.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) es.vectors(r, k) = v(r, order[k]);
  }
  return es;
}

Matrix apply_function(const Matrix& h, const std::function<cplx(double)>& f) {
  const auto es = eigh(h);
  const std::size_t n = h.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx fk = f(es.values[k]);
    for (std::size_t r = 0; r < n; ++r) {
      const cplx vr = es.vectors(r, k) * fk;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(es.vectors(c, k));
    }
  }
  return out;
}

Matrix expm(const Matrix& h, double t) {
  return apply_function(h, [t](double x) { return std::exp(cplx(0.0, x * t)); });
}

double operator_norm(const Matrix& m) {
  const auto es = eigh(m.adjoint() * m);
  return std::sqrt(std::max(0.0, es.values.back()));
}

double inverse_norm(const Matrix& m) {
  const auto es = eigh(m.adjoint() * m);
  if (es.values.front() <= 0.0) throw ValidationError("matrix is singular");
  return 1.0 / std::sqrt(es.values.front());
}

// Gaussian elimination with partial pivoting.
StateVector solve(const Matrix& m, const StateVector& b) {
  const std::size_t n = m.rows();
  if (n != m.cols() || b.size() != n) throw DimensionError("solve shape mismatch");
  Matrix a = m;
  StateVector x = b;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) throw ValidationError("matrix is singular");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(x[col], x[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = a(r, col) / a(col, col);
      if (f == cplx(0.0, 0.0)) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      x[r] -= f * x[col];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    cplx s = x[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return x;
}

Matrix inverse(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix out(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = solve(m, basis_state(n, c));
    for (std::size_t r = 0; r < n; ++r) out(r, c) = col[r];
  }
  return out;
}

Ground ground(const Matrix& h) {
  const auto es = eigh(h);
  Ground g;
  g.e0 = es.values[0];
  g.e1 = es.values.size() > 1 ? es.values[1] : es.values[0];
  g.gap = g.e1 - g.e0;
  g.vector.resize(h.rows());
  for (std::size_t r = 0; r < h.rows(); ++r) g.vector[r] = es.vectors(r, 0);
  return g;
}

Gibbs gibbs(const Matrix& h, double beta) {
  const auto es = eigh(h);
  const double shift = es.values.front();
  double z = 0.0;
  for (double e : es.values) z += std::exp(-beta * (e - shift));
  Matrix rho = apply_function(h, [&](double e) { return cplx(std::exp(-beta * (e - shift)) / z, 0.0); });
  return {rho, z * std::exp(-beta * shift)};
}

StateVector purify(const Matrix& h0, double beta) {
  const auto es = eigh(h0);
  const std::size_t d = h0.rows();
  const double shift = es.values.front();
  double z = 0.0;
  for (double e : es.values) z += std::exp(-beta * (e - shift));
  StateVector psi(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double w = std::exp(-beta * (es.values[k] - shift) / 2.0) / std::sqrt(z);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        psi[r * d + c] += w * es.vectors(r, k) * std::conj(es.vectors(c, k));
  }
  return psi;
}

Matrix reduce_first(const StateVector& psi, std::size_t dim_a) {
  const std::size_t dim_b = psi.size() / dim_a;
  if (dim_a * dim_b != psi.size()) throw DimensionError("bad bipartition");
  Matrix rho(dim_a, dim_a);
  for (std::size_t r = 0; r < dim_a; ++r)
    for (std::size_t c = 0; c < dim_a; ++c)
      for (std::size_t k = 0; k < dim_b; ++k) rho(r, c) += psi[r * dim_b + k] * std::conj(psi[c * dim_b + k]);
  return rho;
}

Matrix reduce_second(const StateVector& psi, std::size_t dim_a) {
  const std::size_t dim_b = psi.size() / dim_a;
  if (dim_a * dim_b != psi.size()) throw DimensionError("bad bipartition");
  Matrix rho(dim_b, dim_b);
  for (std::size_t r = 0; r < dim_b; ++r)
    for (std::size_t c = 0; c < dim_b; ++c)
      for (std::size_t k = 0; k < dim_a; ++k) rho(r, c) += psi[k * dim_b + r] * std::conj(psi[k * dim_b + c]);
  return rho;
}

Matrix annihilator(std::size_t n, std::size_t i) {
  if (i >= n) throw DimensionError("mode index out of range");
  const Matrix id = Matrix::identity(2);
  const Matrix z = Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  const Matrix lower = Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});  // |0><1|
  Matrix out = Matrix::identity(1);
  for (std::size_t k = 0; k < n; ++k) out = kron(out, k < i ? z : (k == i ? lower : id));
  return out;
}

cplx greens_exact(const Matrix& h, double omega, double eta, double e0, std::size_t i, std::size_t j,
                  Branch branch) {
  const std::size_t dim = h.rows();
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  const auto g = ground(h);
  const Matrix ai = annihilator(n, i), aj = annihilator(n, j);
  const Matrix id = Matrix::identity(dim);
  Matrix gamma, left, right;
  if (branch == Branch::particle) {
    gamma = cplx(omega + e0, eta) * id - h;
    left = ai;
    right = aj.adjoint();
  } else {
    gamma = cplx(omega - e0, -eta) * id + h;
    left = ai.adjoint();
    right = aj;
  }
  const StateVector rhs = right * g.vector;
  const StateVector x = solve(gamma, rhs);
  return inner(g.vector, left * x);
}

}  // namespace rqla::oracle
