#pragma once

#include <string>
#include <vector>

#include "charloc/padic.hpp"

namespace charloc {

/// Dense matrix over a local field; all entries share one field.
class Matrix {
public:
    Matrix(FieldPtr F, int rows, int cols); // exact zeros
    static Matrix identity(const FieldPtr& F, int n);
    static Matrix from_rows(const FieldPtr& F, const std::vector<std::vector<Scalar>>& rows);
    /// n x n matrix with rational entries (row-major).
    static Matrix from_rationals(const FieldPtr& F, const std::vector<std::vector<Rational>>& rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const FieldPtr& field() const { return F_; }
    const Scalar& at(int i, int j) const { return a_[i * cols_ + j]; }
    void set(int i, int j, const Scalar& v);

    Matrix coerced_to(const FieldPtr& F) const;
    Matrix transpose() const;
    Scalar trace() const;
    bool is_zero_at_precision() const;

    Matrix operator-() const;
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator*(const Scalar& c, const Matrix& a);

    /// Determinant by exact cofactor expansion (small n; propagates
    /// approximate zeros honestly).
    Scalar det() const;
    /// Gaussian elimination with lowest-valuation pivoting; throws
    /// InsufficientPrecision when singular at the carried precision.
    Matrix inverse() const;

    std::string render() const;

private:
    FieldPtr F_;
    int rows_, cols_;
    std::vector<Scalar> a_;
};

bool approx_equal(const Matrix& a, const Matrix& b);

/// One kernel vector of a matrix that is singular at precision (used for
/// eigenvectors); scaled so the lowest-valuation entry is a unit.
std::vector<Scalar> kernel_vector(const Matrix& A);

/// Ad(g)X = g X g^{-1}.
Matrix ad_action(const Matrix& g, const Matrix& X);

} // namespace charloc
