#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace prodsdp {

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  // Unit matrix E_ij of the given shape.
  static Matrix unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }
  std::span<double> entries() { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Matrix transpose() const;
  bool is_symmetric() const;  // exact comparison
  bool all_finite() const;
  double max_abs() const;
  double frobenius_norm() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Square matrix whose entries are symmetric bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : m_(dim, dim) {}
  // Throws std::invalid_argument unless `m` is square and exactly symmetric.
  explicit SymMatrix(Matrix m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  // Averages m with its transpose.
  static SymMatrix symmetrize(const Matrix& m);
  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  // Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v);
  void add(std::size_t i, std::size_t j, double v);

  const Matrix& matrix() const { return m_; }
  operator const Matrix&() const { return m_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
};

inline constexpr int kDefaultJacobiSweeps = 100;
inline constexpr double kDefaultPsdTol = 1e-9;

// Sum of the entrywise product.  Throws on shape mismatch.
double frobenius_dot(const Matrix& a, const Matrix& b);
Matrix entrywise_product(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);
// Bipartite version [[0, A], [A^T, 0]].
SymMatrix hat(const Matrix& a);

// Cyclic Jacobi.  Throws std::runtime_error when the off-diagonal mass has
// not vanished after `max_sweeps` sweeps.
EigenDecomposition eigen(const SymMatrix& a, int max_sweeps = kDefaultJacobiSweeps);
double min_eigenvalue(const SymMatrix& a);
double max_eigenvalue(const SymMatrix& a);
bool is_psd(const SymMatrix& a, double tol = kDefaultPsdTol);

// Lower Cholesky factor of a symmetric positive definite matrix, or nullopt
// when a pivot is not positive.
std::optional<Matrix> cholesky(const Matrix& a);
// Solves L L^T x = b in place.
void cholesky_solve(const Matrix& lower, std::span<double> b);
// Inverse of a lower triangular matrix.
Matrix lower_inverse(const Matrix& lower);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
std::vector<double> kron(std::span<const double> a, std::span<const double> b);

}  // namespace prodsdp
