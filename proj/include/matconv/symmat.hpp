#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "matconv/errors.hpp"

namespace matconv {

inline constexpr int kMaxMatrixDim = 32;  // dense eigensolver budget
inline constexpr int kMaxInputDim = 16;

/// Real symmetric matrix with canonical upper-triangle storage: one stored
/// copy per (i,j) pair, row-major over rows i with columns j >= i.
class SymMat {
public:
    explicit SymMat(int dim) : dim_(check_dim(dim)), packed_(packed_size(dim), 0.0) {}

    SymMat(int dim, std::vector<double> packed) : dim_(check_dim(dim)), packed_(std::move(packed)) {
        if (packed_.size() != packed_size(dim_))
            throw DimensionMismatch("packed entry count does not match dim " + std::to_string(dim_));
        check_finite();
    }

    /// Builds from a full row-major matrix; rejects asymmetric input.
    static SymMat from_rows(const std::vector<std::vector<double>>& rows) {
        const int n = static_cast<int>(rows.size());
        check_dim(n);
        double max_abs = 0.0;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n)
                throw DimensionMismatch("matrix rows have unequal lengths");
            for (double v : r) max_abs = std::max(max_abs, std::abs(v));
        }
        SymMat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                if (std::abs(rows[i][j] - rows[j][i]) > 1e-9 * (1.0 + max_abs))
                    throw DimensionMismatch("matrix is not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
                m.set(i, j, rows[i][j]);
            }
        m.check_finite();
        return m;
    }

    static SymMat identity(int dim) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }

    static SymMat scaled_identity(int dim, double v) {
        SymMat m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, v);
        return m;
    }

    int dim() const { return dim_; }
    const std::vector<double>& packed() const { return packed_; }

    double at(int i, int j) const {
        return packed_[index(i, j)];
    }

    void set(int i, int j, double v) { packed_[index(i, j)] = v; }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(dim_),
                                              std::vector<double>(static_cast<std::size_t>(dim_)));
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = at(i, j);
        return rows;
    }

    bool is_finite() const {
        for (double v : packed_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    SymMat& operator+=(const SymMat& other) {
        require_same_dim(other, "+");
        for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] += other.packed_[k];
        return *this;
    }

    SymMat& operator-=(const SymMat& other) {
        require_same_dim(other, "-");
        for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] -= other.packed_[k];
        return *this;
    }

    SymMat& operator*=(double s) {
        for (double& v : packed_) v *= s;
        return *this;
    }

    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(double s, SymMat a) { return a *= s; }

    SymMat operator-() const {
        SymMat m = *this;
        return m *= -1.0;
    }

    /// y = A x.
    std::vector<double> apply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw DimensionMismatch("vector length does not match matrix dim");
        std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
        for (int i = 0; i < dim_; ++i) {
            long double acc = 0.0L;
            for (int j = 0; j < dim_; ++j) acc += static_cast<long double>(at(i, j)) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = static_cast<double>(acc);
        }
        return y;
    }

    /// <z, A z>, accumulated in extended precision.
    long double quadratic_form(const std::vector<double>& z) const {
        if (static_cast<int>(z.size()) != dim_)
            throw DimensionMismatch("vector length does not match matrix dim");
        long double acc = 0.0L;
        for (int i = 0; i < dim_; ++i) {
            acc += static_cast<long double>(at(i, i)) * z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < dim_; ++j)
                acc += 2.0L * static_cast<long double>(at(i, j)) * z[static_cast<std::size_t>(i)] *
                       z[static_cast<std::size_t>(j)];
        }
        return acc;
    }

private:
    static int check_dim(int dim) {
        if (dim < 1 || dim > kMaxMatrixDim)
            throw DimensionMismatch("matrix dim must be in [1, " + std::to_string(kMaxMatrixDim) +
                                    "], got " + std::to_string(dim));
        return dim;
    }

    static std::size_t packed_size(int dim) {
        return static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2;
    }

    std::size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(2 * dim_ - i + 1) / 2 +
               static_cast<std::size_t>(j - i);
    }

    void require_same_dim(const SymMat& other, const char* op) const {
        if (other.dim_ != dim_)
            throw DimensionMismatch(std::string("dim mismatch in SymMat ") + op + ": " +
                                    std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }

    void check_finite() const {
        if (!is_finite()) throw NonFinite("SymMat entries must be finite");
    }

    int dim_;
    std::vector<double> packed_;
};

/// <A, B> = trace(AB) on symmetric matrices.
inline double frobenius(const SymMat& a, const SymMat& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("frobenius: dims " + std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    long double acc = 0.0L;
    const int n = a.dim();
    for (int i = 0; i < n; ++i) {
        acc += static_cast<long double>(a.at(i, i)) * b.at(i, i);
        for (int j = i + 1; j < n; ++j)
            acc += 2.0L * static_cast<long double>(a.at(i, j)) * b.at(i, j);
    }
    return static_cast<double>(acc);
}

inline double frobenius_norm(const SymMat& a) {
    return std::sqrt(std::max(0.0, frobenius(a, a)));
}

/// Entrywise (Hadamard) product.
inline SymMat hadamard(const SymMat& m, const SymMat& a) {
    if (m.dim() != a.dim()) throw DimensionMismatch("hadamard: dim mismatch");
    SymMat out(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j) out.set(i, j, m.at(i, j) * a.at(i, j));
    return out;
}

inline SymMat block_diag(const SymMat& a, const SymMat& b) {
    SymMat out(a.dim() + b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j) out.set(i, j, a.at(i, j));
    for (int i = 0; i < b.dim(); ++i)
        for (int j = i; j < b.dim(); ++j) out.set(a.dim() + i, a.dim() + j, b.at(i, j));
    return out;
}

/// [[A, -A], [-A, A]].
inline SymMat double_block(const SymMat& a) {
    const int n = a.dim();
    SymMat out(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            out.set(i, j, a.at(i, j));
            out.set(n + i, n + j, a.at(i, j));
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.set(i, n + j, -a.at(std::min(i, j), std::max(i, j)));
    return out;
}

/// Dense rectangular matrix, row-major. Payload carrier for congruence
/// transforms M F M^T and affine precompositions F(Ay + b).
class DenseMat {
public:
    DenseMat(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
        if (rows < 1 || cols < 1) throw DimensionMismatch("DenseMat dims must be positive");
    }

    static DenseMat from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty() || rows.front().empty()) throw DimensionMismatch("DenseMat needs at least one entry");
        DenseMat m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
        for (int i = 0; i < m.rows_; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != m.cols_)
                throw DimensionMismatch("DenseMat rows have unequal lengths");
            for (int j = 0; j < m.cols_; ++j) {
                const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (!std::isfinite(v)) throw NonFinite("DenseMat entries must be finite");
                m(i, j) = v;
            }
        }
        return m;
    }

    static DenseMat identity(int n) {
        DenseMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(rows_),
                                              std::vector<double>(static_cast<std::size_t>(cols_)));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (*this)(i, j);
        return rows;
    }

    /// y = A x.
    std::vector<double> apply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != cols_) throw DimensionMismatch("DenseMat apply: length mismatch");
        std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
        for (int i = 0; i < rows_; ++i) {
            long double acc = 0.0L;
            for (int j = 0; j < cols_; ++j) acc += static_cast<long double>((*this)(i, j)) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = static_cast<double>(acc);
        }
        return y;
    }

    /// y = A^T x.
    std::vector<double> apply_transpose(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != rows_) throw DimensionMismatch("DenseMat apply_transpose: length mismatch");
        std::vector<double> y(static_cast<std::size_t>(cols_), 0.0);
        for (int j = 0; j < cols_; ++j) {
            long double acc = 0.0L;
            for (int i = 0; i < rows_; ++i) acc += static_cast<long double>((*this)(i, j)) * x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(j)] = static_cast<double>(acc);
        }
        return y;
    }

    /// Determinant of a square matrix via partially pivoted LU.
    double det() const {
        if (rows_ != cols_) throw DimensionMismatch("det: matrix not square");
        const int n = rows_;
        std::vector<double> a = data_;
        auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; };
        double det = 1.0;
        for (int k = 0; k < n; ++k) {
            int piv = k;
            for (int i = k + 1; i < n; ++i)
                if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
            if (at(piv, k) == 0.0) return 0.0;
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(k, j));
                det = -det;
            }
            det *= at(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double f = at(i, k) / at(k, k);
                for (int j = k; j < n; ++j) at(i, j) -= f * at(k, j);
            }
        }
        return det;
    }

private:
    int rows_;
    int cols_;
    std::vector<double> data_;
};

/// M S M^T for M in R^{m x l}, S in S^l; each output entry computed once,
/// so the result is exactly symmetric.
inline SymMat congruence_transform(const DenseMat& m, const SymMat& s) {
    if (m.cols() != s.dim()) throw DimensionMismatch("congruence: M columns must equal matrix dim");
    const int out = m.rows();
    // W = M S
    DenseMat w(out, s.dim());
    for (int i = 0; i < out; ++i)
        for (int j = 0; j < s.dim(); ++j) {
            long double acc = 0.0L;
            for (int k = 0; k < s.dim(); ++k) acc += static_cast<long double>(m(i, k)) * s.at(k, j);
            w(i, j) = static_cast<double>(acc);
        }
    SymMat r(out);
    for (int i = 0; i < out; ++i)
        for (int j = i; j < out; ++j) {
            long double acc = 0.0L;
            for (int k = 0; k < s.dim(); ++k) acc += static_cast<long double>(w(i, k)) * m(j, k);
            r.set(i, j, static_cast<double>(acc));
        }
    return r;
}

/// d-tuple (V^(1), ..., V^(d)) of symmetric matrices of equal dim: a linear
/// operator R^d -> S^l and the carrier of subgradient candidates.
class MatTuple {
public:
    explicit MatTuple(std::vector<SymMat> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw DimensionMismatch("MatTuple needs at least one entry");
        for (const SymMat& v : entries_) {
            if (v.dim() != entries_.front().dim())
                throw DimensionMismatch("MatTuple entries must share a common dim");
            if (!v.is_finite()) throw NonFinite("MatTuple entries must be finite");
        }
    }

    static MatTuple zeros(int count, int dim) {
        return MatTuple(std::vector<SymMat>(static_cast<std::size_t>(count), SymMat(dim)));
    }

    int count() const { return static_cast<int>(entries_.size()); }
    int dim() const { return entries_.front().dim(); }

    const SymMat& operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    SymMat& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }

    const std::vector<SymMat>& entries() const { return entries_; }

    /// Sum_i c_i V^(i).
    SymMat combine(const std::vector<double>& c) const {
        if (static_cast<int>(c.size()) != count())
            throw DimensionMismatch("MatTuple combine: coefficient count mismatch");
        SymMat out(dim());
        for (int i = 0; i < count(); ++i) {
            SymMat term = entries_[static_cast<std::size_t>(i)];
            term *= c[static_cast<std::size_t>(i)];
            out += term;
        }
        return out;
    }

    MatTuple& operator+=(const MatTuple& other) {
        if (other.count() != count()) throw DimensionMismatch("MatTuple +: count mismatch");
        for (int i = 0; i < count(); ++i) entries_[static_cast<std::size_t>(i)] += other[i];
        return *this;
    }

    MatTuple& operator*=(double s) {
        for (SymMat& v : entries_) v *= s;
        return *this;
    }

    friend MatTuple operator+(MatTuple a, const MatTuple& b) { return a += b; }
    friend MatTuple operator*(double s, MatTuple a) { return a *= s; }

private:
    std::vector<SymMat> entries_;
};

}  // namespace matconv
