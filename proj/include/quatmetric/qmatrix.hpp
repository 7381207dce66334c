#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "quaternion.hpp"

namespace quatmetric {

/// 2n x 2m complex image [[A, B], [-conj(B), conj(A)]] of M = A + B j.
using SymplecticImage = Eigen::MatrixXcd;

/// Column vector in a right quaternionic module: scalars multiply from the right.
class QVector {
public:
    QVector() = default;
    explicit QVector(std::size_t dim) : data_(dim) {}
    QVector(std::initializer_list<Quaternion> entries) : data_(entries) {}
    explicit QVector(std::vector<Quaternion> entries) : data_(std::move(entries)) {}

    static QVector basis(std::size_t dim, std::size_t k) {
        QVector v(dim);
        v[k] = Quaternion{1};
        return v;
    }

    std::size_t dim() const { return data_.size(); }
    Quaternion& operator[](std::size_t k) { return data_[k]; }
    const Quaternion& operator[](std::size_t k) const { return data_[k]; }
    const std::vector<Quaternion>& entries() const { return data_; }

    double norm() const {
        double s = 0;
        for (const auto& q : data_) s += q.norm2();
        return std::sqrt(s);
    }

    // v * lambda
    friend QVector operator*(QVector v, const Quaternion& lambda) {
        for (auto& q : v.data_) q = q * lambda;
        return v;
    }
    friend QVector operator+(QVector a, const QVector& b) {
        check_same(a, b);
        for (std::size_t k = 0; k < a.dim(); ++k) a[k] += b[k];
        return a;
    }
    friend QVector operator-(QVector a, const QVector& b) {
        check_same(a, b);
        for (std::size_t k = 0; k < a.dim(); ++k) a[k] -= b[k];
        return a;
    }

private:
    static void check_same(const QVector& a, const QVector& b) {
        if (a.dim() != b.dim()) throw DimensionMismatch("vector dimensions differ");
    }

    std::vector<Quaternion> data_;
};

/// <u|v> = sum_k conj(u_k) v_k. Right-linear in v, conjugate-linear in u.
inline Quaternion inner(const QVector& u, const QVector& v) {
    if (u.dim() != v.dim()) throw DimensionMismatch("inner product of vectors of different dimension");
    Quaternion s;
    for (std::size_t k = 0; k < u.dim(); ++k) s += conj(u[k]) * v[k];
    return s;
}

/// Dense row-major quaternionic matrix.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    QMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static QMatrix identity(std::size_t n) {
        QMatrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = Quaternion{1};
        return m;
    }

    static QMatrix diagonal(const std::vector<Quaternion>& d) {
        QMatrix m(d.size(), d.size());
        for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
        return m;
    }

    static QMatrix from_complex(const Eigen::MatrixXcd& c) {
        QMatrix m(static_cast<std::size_t>(c.rows()), static_cast<std::size_t>(c.cols()));
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t col = 0; col < m.cols(); ++col) m(r, col) = Quaternion{c(r, col)};
        return m;
    }

    static QMatrix from_columns(const std::vector<QVector>& cols) {
        if (cols.empty()) return {};
        QMatrix m(cols.front().dim(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) m.set_column(c, cols[c]);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    Quaternion& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Quaternion& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Quaternion>& entries() const { return data_; }

    QVector column(std::size_t c) const {
        QVector v(rows_);
        for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    void set_column(std::size_t c, const QVector& v) {
        if (v.dim() != rows_) throw DimensionMismatch("column length does not match row count");
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
    }

    bool is_complex() const {
        return std::all_of(data_.begin(), data_.end(), [](const Quaternion& q) { return q.is_complex(); });
    }

    friend QMatrix operator+(QMatrix a, const QMatrix& b) {
        check_same_shape(a, b);
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
        return a;
    }
    friend QMatrix operator-(QMatrix a, const QMatrix& b) {
        check_same_shape(a, b);
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
        return a;
    }
    friend QMatrix operator-(QMatrix a) {
        for (auto& q : a.data_) q = -q;
        return a;
    }
    friend QMatrix operator*(QMatrix a, double s) {
        for (auto& q : a.data_) q *= s;
        return a;
    }
    friend QMatrix operator*(double s, QMatrix a) { return std::move(a) * s; }
    // Entry-wise right multiplication M * lambda.
    friend QMatrix operator*(QMatrix a, const Quaternion& lambda) {
        for (auto& q : a.data_) q = q * lambda;
        return a;
    }
    // Entry-wise left multiplication lambda * M.
    friend QMatrix operator*(const Quaternion& lambda, QMatrix a) {
        for (auto& q : a.data_) q = lambda * q;
        return a;
    }

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
    friend QVector operator*(const QMatrix& a, const QVector& v);

    friend bool operator==(const QMatrix&, const QMatrix&) = default;

private:
    static void check_same_shape(const QMatrix& a, const QMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> data_;
};

inline QMatrix matmul(const QMatrix& a, const QMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    QMatrix c(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Quaternion& ark = a(r, k);
            for (std::size_t col = 0; col < b.cols(); ++col) c(r, col) += ark * b(k, col);
        }
    return c;
}

inline QMatrix operator*(const QMatrix& a, const QMatrix& b) { return matmul(a, b); }

inline QVector operator*(const QMatrix& a, const QVector& v) {
    if (a.cols() != v.dim()) throw DimensionMismatch("matrix-vector dimension mismatch");
    QVector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) out[r] += a(r, k) * v[k];
    return out;
}

/// Conjugate transpose.
inline QMatrix adjoint(const QMatrix& a) {
    QMatrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = conj(a(r, c));
    return t;
}

inline QMatrix commutator(const QMatrix& a, const QMatrix& b) { return a * b - b * a; }

inline double frobenius_norm(const QMatrix& a) {
    double s = 0;
    for (const auto& q : a.entries()) s += q.norm2();
    return std::sqrt(s);
}

/// Re tr(A^dagger B); the real inner product used for commutant bases.
inline double real_trace_inner(const QMatrix& a, const QMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("trace inner product shapes differ");
    double s = 0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        const auto& p = a.entries()[k];
        const auto& q = b.entries()[k];
        s += p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Complex symplectic embedding

inline SymplecticImage embed(const QMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.rows());
    const auto p = static_cast<Eigen::Index>(m.cols());
    SymplecticImage c(2 * n, 2 * p);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index col = 0; col < p; ++col) {
            const auto [a, b] = split(m(static_cast<std::size_t>(r), static_cast<std::size_t>(col)));
            c(r, col) = a;
            c(r, p + col) = b;
            c(n + r, col) = -std::conj(b);
            c(n + r, p + col) = std::conj(a);
        }
    return c;
}

/// Inverse of embed. Reads A and B from the top block row, after checking the
/// lower block row mirrors them within 1e-10 (relative to max(1, |C|)).
inline QMatrix lift(const SymplecticImage& c) {
    if (c.rows() % 2 != 0 || c.cols() % 2 != 0) throw NotSymplecticBlockForm("image dimensions must be even");
    const Eigen::Index n = c.rows() / 2;
    const Eigen::Index p = c.cols() / 2;
    const double tol = 1e-10 * std::max(1.0, c.norm());
    QMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(p));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index col = 0; col < p; ++col) {
            const Complex a = c(r, col);
            const Complex b = c(r, p + col);
            if (std::abs(c(n + r, col) + std::conj(b)) > tol || std::abs(c(n + r, p + col) - std::conj(a)) > tol)
                throw NotSymplecticBlockForm("lower block row does not mirror the upper one");
            m(static_cast<std::size_t>(r), static_cast<std::size_t>(col)) = join(a, b);
        }
    return m;
}

namespace detail {

// Nearest quaternionic matrix to a numerically computed image: averages the
// two copies of each block instead of trusting one of them.
inline QMatrix project_lift(const Eigen::MatrixXcd& c) {
    const Eigen::Index n = c.rows() / 2;
    const Eigen::Index p = c.cols() / 2;
    QMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(p));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index col = 0; col < p; ++col) {
            const Complex a = 0.5 * (c(r, col) + std::conj(c(n + r, p + col)));
            const Complex b = 0.5 * (c(r, p + col) - std::conj(c(n + r, col)));
            m(static_cast<std::size_t>(r), static_cast<std::size_t>(col)) = join(a, b);
        }
    return m;
}

}  // namespace detail

/// v = va + vb j  ->  [va; -conj(vb)], so that embed(M) * embed(v) = embed(M v).
inline Eigen::VectorXcd embed(const QVector& v) {
    const auto n = static_cast<Eigen::Index>(v.dim());
    Eigen::VectorXcd x(2 * n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto [a, b] = split(v[static_cast<std::size_t>(r)]);
        x(r) = a;
        x(n + r) = -std::conj(b);
    }
    return x;
}

inline QVector lift_vector(const Eigen::VectorXcd& x) {
    const Eigen::Index n = x.size() / 2;
    QVector v(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) v[static_cast<std::size_t>(r)] = join(x(r), Complex(-std::conj(x(n + r))));
    return v;
}

/// Singular values of embed(m), descending. Each appears twice.
inline Eigen::VectorXd singular_values(const QMatrix& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(embed(m)).singularValues();
}

/// sigma_min / sigma_max of the complex image; 0 for the zero matrix.
inline double inverse_condition(const QMatrix& m) {
    if (m.empty()) return 1.0;
    const auto s = singular_values(m);
    const double smax = s(0);
    return smax > 0 ? s(s.size() - 1) / smax : 0.0;
}

inline constexpr double kSingularThreshold = 1e-12;

inline QMatrix inverse(const QMatrix& m) {
    if (!m.square()) throw DimensionMismatch("inverse of a non-square matrix");
    if (inverse_condition(m) < kSingularThreshold) throw Singular("matrix is numerically singular");
    const SymplecticImage c = embed(m);
    return detail::project_lift(c.partialPivLu().inverse());
}

enum class Symmetry { Hermitian, AntiHermitian, Neither };

inline const char* to_string(Symmetry s) {
    switch (s) {
        case Symmetry::Hermitian: return "Hermitian";
        case Symmetry::AntiHermitian: return "AntiHermitian";
        case Symmetry::Neither: return "Neither";
    }
    return "unknown";
}

/// Hermitian when |M - M^dagger|_F <= tol |M|_F; anti-Hermitian when
/// |M + M^dagger|_F <= tol |M|_F. Hermitian takes precedence (zero matrix).
inline Symmetry classify(const QMatrix& m, double tol) {
    if (!m.square()) throw DimensionMismatch("classify requires a square matrix");
    const QMatrix md = adjoint(m);
    const double scale = tol * frobenius_norm(m);
    if (frobenius_norm(m - md) <= scale) return Symmetry::Hermitian;
    if (frobenius_norm(m + md) <= scale) return Symmetry::AntiHermitian;
    return Symmetry::Neither;
}

/// Eigenvalues of a Hermitian quaternionic matrix, ascending, one per
/// quaternionic dimension (the complex image lists each one twice).
inline std::vector<double> hermitian_eigenvalues(const QMatrix& h) {
    if (!h.square()) throw DimensionMismatch("hermitian_eigenvalues requires a square matrix");
    Eigen::MatrixXcd c = embed(h);
    c = 0.5 * (c + c.adjoint()).eval();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(c, Eigen::EigenvaluesOnly).eigenvalues();
    std::vector<double> out;
    for (Eigen::Index k = 0; k < ev.size(); k += 2) out.push_back(0.5 * (ev(k) + ev(k + 1)));
    return out;
}

}  // namespace quatmetric
