#pragma once

#include <functional>
#include <vector>

#include "rqla/linalg.hpp"

// Dense ground truth for desk-scale checks. Everything here is O(dim^3) and
// deliberately independent of the sampling code.
namespace rqla::oracle {

struct Eigensystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

// Cyclic complex Jacobi; stops when the off-diagonal Frobenius mass is <= tol.
Eigensystem eigh(const Matrix& h, double tol = 1e-12);

Matrix apply_function(const Matrix& h, const std::function<cplx(double)>& f);
Matrix expm(const Matrix& h, double t);  // exp(i h t)
double operator_norm(const Matrix& m);
double inverse_norm(const Matrix& m);   // ||m^{-1}|| = 1/sigma_min
StateVector solve(const Matrix& m, const StateVector& b);
Matrix inverse(const Matrix& m);

struct Ground {
  double e0, e1, gap;
  StateVector vector;
};
Ground ground(const Matrix& h);

struct Gibbs {
  Matrix rho;
  double partition;
};
Gibbs gibbs(const Matrix& h, double beta);

// Thermofield double sum_i e^{-beta e_i / 2} |e_i>|e_i*> / sqrt(Z0) on the doubled register.
StateVector purify(const Matrix& h0, double beta);
Matrix reduce_first(const StateVector& psi, std::size_t dim_a);
Matrix reduce_second(const StateVector& psi, std::size_t dim_a);

// Jordan-Wigner annihilator for mode i (0-based) among n modes, built from 2x2 blocks.
Matrix annihilator(std::size_t n, std::size_t i);

enum class Branch { particle, hole };  // G^(+), G^(-)
// particle: <E0| a_i (w - (H - E0) + i eta)^{-1} a_j^dag |E0>
// hole:     <E0| a_i^dag (w + (H - E0) - i eta)^{-1} a_j |E0>
cplx greens_exact(const Matrix& h, double omega, double eta, double e0, std::size_t i, std::size_t j,
                  Branch branch);

}  // namespace rqla::oracle
