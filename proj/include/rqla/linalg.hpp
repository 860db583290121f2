#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rqla {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

// Row-major dense complex matrix. Only meant for desk-scale oracles and checks.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<cplx>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix adjoint() const;
  Matrix conj() const;
  cplx trace() const;
  double max_abs() const;
  bool is_hermitian(double tol) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(cplx s);

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(cplx s, Matrix a);
StateVector operator*(const Matrix& a, const StateVector& v);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix outer(const StateVector& a, const StateVector& b);  // |a><b|

cplx inner(const StateVector& a, const StateVector& b);  // <a|b>
double norm(const StateVector& v);
double norm_sq(const StateVector& v);
StateVector kron(const StateVector& a, const StateVector& b);
StateVector basis_state(std::size_t dim, std::size_t index);

double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace rqla
