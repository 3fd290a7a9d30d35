#include "prodsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace prodsdp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: entry count does not match shape");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
  Matrix m(rows, cols);
  m(i, j) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector: dimension mismatch");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.is_symmetric()) throw std::invalid_argument("SymMatrix: input is not symmetric");
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("symmetrize: matrix is not square");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s.m_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

void SymMatrix::add(std::size_t i, std::size_t j, double v) {
  m_(i, j) += v;
  if (i != j) m_(j, i) += v;
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_dot");
  return dot(a.entries(), b.entries());
}

Matrix entrywise_product(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "entrywise_product");
  Matrix c(a.rows(), a.cols());
  auto ce = c.entries();
  auto ae = a.entries();
  auto be = b.entries();
  for (std::size_t k = 0; k < ce.size(); ++k) ce[k] = ae[k] * be[k];
  return c;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t br = b.rows();
  const std::size_t bc = b.cols();
  Matrix c(a.rows() * br, a.cols() * bc);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) c(i * br + k, j * bc + l) = aij * b(k, l);
    }
  }
  return c;
}

SymMatrix hat(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  SymMatrix h(m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) h.set(i, m + j, a(i, j));
  return h;
}

EigenDecomposition eigen(const SymMatrix& a, int max_sweeps) {
  const std::size_t n = a.dim();
  if (!a.matrix().all_finite()) throw std::invalid_argument("eigen: non-finite entry");
  Matrix w = a.matrix();
  Matrix v = Matrix::identity(n);

  const double scale = std::max(w.max_abs(), 1e-300);
  bool converged = n <= 1;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = w(p, p);
        const double aqq = w(q, q);
        // Rotation angle zeroing (p,q): tan via the smaller root.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double wkp = w(k, p);
          const double wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double wpk = w(p, k);
          const double wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (std::sqrt(off) > 1e-15 * scale) {
      throw std::runtime_error("eigen: Jacobi iteration did not converge in " +
                               std::to_string(max_sweeps) + " sweeps");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return w(x, x) < w(y, y); });
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = w(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return eigen(a).eigenvalues.front();
}

double max_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return eigen(a).eigenvalues.back();
}

bool is_psd(const SymMatrix& a, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd: negative tolerance");
  return min_eigenvalue(a) >= -tol;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  if (!a.is_square()) throw std::invalid_argument("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = &l(i, 0);
    for (std::size_t j = 0; j <= i; ++j) {
      const double* lj = &l(j, 0);
      double s = 0.0;
#pragma omp simd reduction(+ : s)
      for (std::size_t k = 0; k < j; ++k) s += li[k] * lj[k];
      const double r = a(i, j) - s;
      if (i == j) {
        if (!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
        l(i, i) = std::sqrt(r);
      } else {
        l(i, j) = r / l(j, j);
      }
    }
  }
  return l;
}

void cholesky_solve(const Matrix& lower, std::span<double> b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw std::invalid_argument("cholesky_solve: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = lower.row(i).data();
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * b[k];
    b[ii] = s / lower(ii, ii);
  }
}

Matrix lower_inverse(const Matrix& lower) {
  const std::size_t n = lower.rows();
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / lower(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += lower(i, k) * inv(k, j);
      inv(i, j) = -s / lower(i, i);
    }
  }
  return inv;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> kron(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a)
    for (double y : b) out.push_back(x * y);
  return out;
}

}  // namespace prodsdp
