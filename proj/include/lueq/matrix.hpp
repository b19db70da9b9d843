#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lueq {

using Complex = std::complex<double>;

// Dense complex matrix, row-major storage. Value type: copies are cheap at
// the dimensions this library targets (factors up to ~32).
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return entries_.size(); }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    const std::vector<Complex>& entries() const { return entries_; }
    std::vector<Complex>& entries() { return entries_; }

    bool same_shape(const ComplexMatrix& other) const;
    bool all_finite() const;

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;

    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    // Column j as an n x 1 matrix.
    ComplexMatrix column(std::size_t j) const;
    void set_column(std::size_t j, const ComplexMatrix& col);
    std::vector<Complex> column_vector(std::size_t j) const;

    // Copy of columns [first, first+count) as an n x count matrix.
    ComplexMatrix columns(std::size_t first, std::size_t count) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex s);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product with the row-major index convention:
// (a kron b)[i*q + j][k*q + l] = a[i][k] * b[j][l] for b of shape p x q.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// <x, y> = x^dag y for column vectors given as n x 1 matrices.
Complex inner(const ComplexMatrix& x, const ComplexMatrix& y);

}  // namespace lueq
