#include "charloc/matrix.hpp"

#include <algorithm>
#include <sstream>

namespace charloc {

Matrix::Matrix(FieldPtr F, int rows, int cols) : F_(std::move(F)), rows_(rows), cols_(cols) {
    a_.reserve((size_t)rows_ * cols_);
    for (int i = 0; i < rows_ * cols_; ++i) a_.push_back(Scalar::zero(F_));
}

Matrix Matrix::identity(const FieldPtr& F, int n) {
    Matrix m(F, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, Scalar::one(F));
    return m;
}

Matrix Matrix::from_rows(const FieldPtr& F, const std::vector<std::vector<Scalar>>& rows) {
    int r = (int)rows.size();
    int c = r == 0 ? 0 : (int)rows[0].size();
    Matrix m(F, r, c);
    for (int i = 0; i < r; ++i) {
        if ((int)rows[i].size() != c) fail(ErrorKind::MalformedInput, "ragged matrix rows");
        for (int j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

Matrix Matrix::from_rationals(const FieldPtr& F, const std::vector<std::vector<Rational>>& rows) {
    int r = (int)rows.size();
    int c = r == 0 ? 0 : (int)rows[0].size();
    Matrix m(F, r, c);
    for (int i = 0; i < r; ++i) {
        if ((int)rows[i].size() != c) fail(ErrorKind::MalformedInput, "ragged matrix rows");
        for (int j = 0; j < c; ++j) m.set(i, j, Scalar::rational(F, rows[i][j]));
    }
    return m;
}

void Matrix::set(int i, int j, const Scalar& v) {
    a_[i * cols_ + j] = v.field()->same_field(*F_) ? v : v.coerced_to(F_);
}

Matrix Matrix::coerced_to(const FieldPtr& F) const {
    Matrix m(F, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.set(i, j, at(i, j).coerced_to(F));
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(F_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.set(j, i, at(i, j));
    return m;
}

Scalar Matrix::trace() const {
    Scalar t = Scalar::zero(F_);
    for (int i = 0; i < std::min(rows_, cols_); ++i) t = t + at(i, i);
    return t;
}

bool Matrix::is_zero_at_precision() const {
    return std::all_of(a_.begin(), a_.end(), [](const Scalar& s) { return s.is_zero_at_precision(); });
}

Matrix Matrix::operator-() const {
    Matrix m(F_, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m.set(i, j, -at(i, j));
    return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorKind::MalformedInput, "matrix shape mismatch");
    Matrix bb = b.field()->same_field(*a.field()) ? b : b.coerced_to(a.field());
    Matrix m(a.field(), a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m.set(i, j, a.at(i, j) + bb.at(i, j));
    return m;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-b); }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::MalformedInput, "matrix shape mismatch");
    FieldPtr F = a.field()->coercible_from(*b.field()) ? a.field() : b.field();
    Matrix aa = a.coerced_to(F), bb = b.coerced_to(F);
    Matrix m(F, a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            Scalar s = Scalar::zero(F);
            for (int k = 0; k < a.cols(); ++k) s = s + aa.at(i, k) * bb.at(k, j);
            m.set(i, j, s);
        }
    return m;
}

Matrix operator*(const Scalar& c, const Matrix& a) {
    Matrix m(a.field(), a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m.set(i, j, c * a.at(i, j));
    return m;
}

namespace {

Scalar det_rec(const Matrix& m, std::vector<int>& cols, int row) {
    const FieldPtr& F = m.field();
    if ((int)cols.size() == 1) return m.at(row, cols[0]);
    Scalar acc = Scalar::zero(F);
    for (size_t k = 0; k < cols.size(); ++k) {
        int c = cols[k];
        if (m.at(row, c).is_exact_zero()) continue;
        std::vector<int> rest;
        rest.reserve(cols.size() - 1);
        for (size_t t = 0; t < cols.size(); ++t)
            if (t != k) rest.push_back(cols[t]);
        Scalar minor = det_rec(m, rest, row + 1);
        Scalar term = m.at(row, c) * minor;
        acc = (k % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

} // namespace

Scalar Matrix::det() const {
    if (rows_ != cols_) fail(ErrorKind::MalformedInput, "determinant of a non-square matrix");
    std::vector<int> cols(cols_);
    for (int j = 0; j < cols_; ++j) cols[j] = j;
    return det_rec(*this, cols, 0);
}

Matrix Matrix::inverse() const {
    if (rows_ != cols_) fail(ErrorKind::MalformedInput, "inverse of a non-square matrix");
    int n = rows_;
    // augmented elimination with lowest-valuation pivoting
    std::vector<std::vector<Scalar>> w;
    w.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Scalar> row;
        row.reserve(2 * n);
        for (int j = 0; j < n; ++j) row.push_back(at(i, j));
        for (int j = 0; j < n; ++j) row.push_back(i == j ? Scalar::one(F_) : Scalar::zero(F_));
        w.push_back(std::move(row));
    }
    for (int col = 0; col < n; ++col) {
        int best = -1;
        Rational bestval;
        for (int r = col; r < n; ++r) {
            Valuation v = w[r][col].val();
            if (!v.is_finite()) continue;
            if (best < 0 || v.value() < bestval) {
                best = r;
                bestval = v.value();
            }
        }
        if (best < 0)
            fail(ErrorKind::InsufficientPrecision, "matrix is singular at the carried precision");
        std::swap(w[col], w[best]);
        Scalar inv = w[col][col].inverse();
        for (int j = col; j < 2 * n; ++j) w[col][j] = inv * w[col][j];
        for (int r = 0; r < n; ++r) {
            if (r == col || w[r][col].is_zero_at_precision()) continue;
            Scalar factor = w[r][col];
            for (int j = col; j < 2 * n; ++j) w[r][j] = w[r][j] - factor * w[col][j];
        }
    }
    Matrix out(F_, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.set(i, j, w[i][n + j]);
    return out;
}

std::string Matrix::render() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        os << "[";
        for (int j = 0; j < cols_; ++j) {
            if (j) os << ", ";
            os << at(i, j).render();
        }
        os << "]";
    }
    os << "]";
    return os.str();
}

bool approx_equal(const Matrix& a, const Matrix& b) { return (a - b).is_zero_at_precision(); }

std::vector<Scalar> kernel_vector(const Matrix& A) {
    int n = A.rows();
    if (A.cols() != n) fail(ErrorKind::MalformedInput, "kernel_vector expects a square matrix");
    const FieldPtr& F = A.field();
    std::vector<std::vector<Scalar>> w;
    w.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Scalar> row;
        for (int j = 0; j < n; ++j) row.push_back(A.at(i, j));
        w.push_back(std::move(row));
    }
    std::vector<int> pivot_of_col(n, -1);
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int best = -1;
        Rational bestval;
        for (int r = rank; r < n; ++r) {
            Valuation v = w[r][col].val();
            if (!v.is_finite()) continue;
            if (best < 0 || v.value() < bestval) {
                best = r;
                bestval = v.value();
            }
        }
        if (best < 0) continue; // free column
        std::swap(w[rank], w[best]);
        Scalar inv = w[rank][col].inverse();
        for (int j = 0; j < n; ++j) w[rank][j] = inv * w[rank][j];
        for (int r = 0; r < n; ++r) {
            if (r == rank || w[r][col].is_zero_at_precision()) continue;
            Scalar factor = w[r][col];
            for (int j = 0; j < n; ++j) w[r][j] = w[r][j] - factor * w[rank][j];
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    int free_col = -1;
    for (int col = 0; col < n; ++col)
        if (pivot_of_col[col] < 0) {
            free_col = col;
            break;
        }
    if (free_col < 0)
        fail(ErrorKind::PrecisionTooLowToSeparateRoots, "no kernel direction at the carried precision");
    std::vector<Scalar> v;
    for (int j = 0; j < n; ++j) v.push_back(j == free_col ? Scalar::one(F) : Scalar::zero(F));
    for (int col = 0; col < n; ++col) {
        int r = pivot_of_col[col];
        if (r >= 0) v[col] = -w[r][free_col];
    }
    // scale to make the lowest-valuation entry a unit
    Rational vmin;
    bool seen = false;
    for (const auto& s : v) {
        Valuation val = s.val();
        if (!val.is_finite()) continue;
        if (!seen || val.value() < vmin) {
            vmin = val.value();
            seen = true;
        }
    }
    if (seen && vmin != 0) {
        // divide by an element of valuation vmin
        const FieldPtr& FF = F;
        long e = FF->e();
        Rational scaled = vmin * e;
        long w_pi = (long)(numerator(scaled) / denominator(scaled));
        Scalar scale = Scalar::one(FF);
        Scalar pi = Scalar::uniformizer(FF);
        long q = w_pi >= 0 ? w_pi : -w_pi;
        for (long i = 0; i < q; ++i) scale = scale * pi;
        if (w_pi < 0) scale = scale.inverse();
        for (auto& s : v) s = s / scale;
    }
    return v;
}

Matrix ad_action(const Matrix& g, const Matrix& X) {
    FieldPtr F = g.field()->coercible_from(*X.field()) ? g.field() : X.field();
    Matrix gg = g.coerced_to(F);
    return gg * X.coerced_to(F) * gg.inverse();
}

} // namespace charloc
