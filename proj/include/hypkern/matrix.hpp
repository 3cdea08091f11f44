#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypkern {

using cplx = std::complex<double>;

namespace detail {
inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& z) { return std::conj(z); }
inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const cplx& z) { return std::abs(z); }
}  // namespace detail

/// Dense row-major matrix over double or std::complex<double>.
/// Deliberately small: only the operations the kernel calculus needs.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, T init = T{})
      : rows_(rows), cols_(cols), a_(rows * cols, init) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }
  static DenseMatrix constant(std::size_t rows, std::size_t cols, T value) {
    return DenseMatrix(rows, cols, value);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double max_abs() const {
    double m = 0.0;
    for (const T& v : a_) m = std::max(m, detail::abs_of(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const T& v : a_) {
      double r = detail::abs_of(v);
      s += r * r;
    }
    return std::sqrt(s);
  }

  DenseMatrix transpose() const {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  DenseMatrix adjoint() const {
    DenseMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = detail::conj_of((*this)(i, j));
    return m;
  }

  DenseMatrix operator*(const DenseMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
    DenseMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        T aik = (*this)(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
      }
    return out;
  }

  DenseMatrix operator+(const DenseMatrix& rhs) const {
    check_same_shape(rhs, "+");
    DenseMatrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
    return out;
  }

  DenseMatrix operator-(const DenseMatrix& rhs) const {
    check_same_shape(rhs, "-");
    DenseMatrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
    return out;
  }

  DenseMatrix operator*(T scale) const {
    DenseMatrix out = *this;
    for (T& v : out.a_) v *= scale;
    return out;
  }

  double max_abs_diff(const DenseMatrix& rhs) const {
    check_same_shape(rhs, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i)
      m = std::max(m, detail::abs_of(a_[i] - rhs.a_[i]));
    return m;
  }

 private:
  void check_same_shape(const DenseMatrix& rhs, const char* op) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw std::invalid_argument(std::string("matrix ") + op + ": shape mismatch");
  }

  std::size_t rows_, cols_;
  std::vector<T> a_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<cplx>;

inline ComplexMatrix to_complex(const RealMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline double hermitian_residual(const ComplexMatrix& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  return r;
}

/// Square complex matrix with the Hermitian invariant enforced at construction:
/// the asymmetry residual must be at most 1e-12 * max|entry|; the stored matrix
/// is then exactly symmetrized and has a real diagonal.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (!m_.square()) throw std::invalid_argument("HermitianMatrix: matrix must be square");
    double scale = m_.max_abs();
    double residual = hermitian_residual(m_);
    if (residual > kResidualBound * std::max(1.0, scale))
      throw std::invalid_argument("HermitianMatrix: input is not Hermitian (residual " +
                                  std::to_string(residual) + ")");
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      m_(i, i) = cplx(m_(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < m_.cols(); ++j) {
        cplx avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
        m_(i, j) = avg;
        m_(j, i) = std::conj(avg);
      }
    }
  }

  static HermitianMatrix from_real_symmetric(const RealMatrix& m) {
    if (!m.square()) throw std::invalid_argument("HermitianMatrix: matrix must be square");
    double residual = m.max_abs_diff(m.transpose());
    if (residual > kResidualBound * std::max(1.0, m.max_abs()))
      throw std::invalid_argument("HermitianMatrix: real input is not symmetric (residual " +
                                  std::to_string(residual) + ")");
    return HermitianMatrix(to_complex(m));
  }

  std::size_t dim() const { return m_.rows(); }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const ComplexMatrix& raw() const { return m_; }

  static constexpr double kResidualBound = 1e-12;

 private:
  ComplexMatrix m_;
};

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix vectors;            // columns, unitary
  std::size_t sweeps = 0;
  double off_norm = 0.0;
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.  Deterministic sweep
/// order (0,1), (0,2), ..., (n-2,n-1); terminates when the off-diagonal
/// Frobenius norm drops below 5e-15 times the matrix norm.  Fine for the
/// dimensions this library works at (a few hundred at most).
inline EighResult eigh(const HermitianMatrix& H) {
  const std::size_t n = H.dim();
  EighResult res;
  if (n == 0) {
    res.vectors = ComplexMatrix(0, 0);
    return res;
  }

  ComplexMatrix a = H.raw();
  ComplexMatrix q = ComplexMatrix::identity(n);
  const double fro = std::max(a.frobenius(), 1e-300);
  const double stop = 5e-15 * fro;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  const std::size_t max_sweeps = 64;
  std::size_t sweep = 0;
  double off = off_norm();
  while (off > stop && sweep < max_sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t qcol = p + 1; qcol < n; ++qcol) {
        const cplx apq = a(p, qcol);
        const double r = std::abs(apq);
        if (r <= 1e-300) {
          a(p, qcol) = a(qcol, p) = 0.0;
          continue;
        }
        const cplx w = apq / r;  // phase of the pivot
        const double app = a(p, p).real();
        const double aqq = a(qcol, qcol).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == qcol) continue;
          const cplx aip = a(i, p);
          const cplx aiq = a(i, qcol);
          a(i, p) = c * aip - s * std::conj(w) * aiq;
          a(i, qcol) = s * w * aip + c * aiq;
          a(p, i) = std::conj(a(i, p));
          a(qcol, i) = std::conj(a(i, qcol));
        }
        a(p, p) = app * c * c - 2.0 * s * c * r + aqq * s * s;
        a(qcol, qcol) = app * s * s + 2.0 * s * c * r + aqq * c * c;
        a(p, qcol) = a(qcol, p) = 0.0;

        for (std::size_t i = 0; i < n; ++i) {
          const cplx qip = q(i, p);
          const cplx qiq = q(i, qcol);
          q(i, p) = c * qip - s * std::conj(w) * qiq;
          q(i, qcol) = s * w * qip + c * qiq;
        }
      }
    }
    ++sweep;
    off = off_norm();
  }
  if (off > 1e-12 * fro)
    throw std::runtime_error("eigh: Jacobi failed to converge in 64 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  res.eigenvalues.resize(n);
  res.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    res.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) res.vectors(i, k) = q(i, order[k]);
  }
  res.sweeps = sweep;
  res.off_norm = off;
  return res;
}

}  // namespace hypkern
