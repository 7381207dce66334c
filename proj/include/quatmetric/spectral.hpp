#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "qmatrix.hpp"

namespace quatmetric {

/// Standard right eigenvalues of a square quaternionic matrix.
///
/// Each similarity class of right eigenvalues is represented by the complex
/// number with nonnegative imaginary part; `eigenvalues` lists them with
/// multiplicity, `S` holds unit right eigenvectors as columns and `D` the
/// matching diagonal, so that H S = S D when `diagonalizable` is set.
struct RightSpectrum {
    std::vector<Complex> eigenvalues;
    QMatrix S;
    QMatrix D;
    bool diagonalizable = false;
    /// Degeneracy label: eigenvalues[k] belongs to multiplicity class classes[k].
    std::vector<std::size_t> classes;
};

namespace detail {

struct EigenCluster {
    Complex center;
    std::size_t size = 0;
    std::size_t first_seen = 0;
};

// Single-linkage clustering of points in the complex plane.
inline std::vector<EigenCluster> cluster_eigenvalues(const Eigen::VectorXcd& values, double tol) {
    const auto m = static_cast<std::size_t>(values.size());
    std::vector<std::size_t> label(m);
    std::iota(label.begin(), label.end(), std::size_t{0});
    auto find = [&](std::size_t a) {
        while (label[a] != a) a = label[a] = label[label[a]];
        return a;
    };
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (std::abs(values(static_cast<Eigen::Index>(a)) - values(static_cast<Eigen::Index>(b))) <= tol) {
                label[find(b)] = find(a);
            }

    std::vector<EigenCluster> clusters;
    std::vector<std::ptrdiff_t> slot(m, -1);
    for (std::size_t a = 0; a < m; ++a) {
        const std::size_t root = find(a);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
            clusters.push_back({Complex{}, 0, a});
        }
        auto& c = clusters[static_cast<std::size_t>(slot[root])];
        c.center += values(static_cast<Eigen::Index>(a));
        ++c.size;
    }
    for (auto& c : clusters) c.center /= static_cast<double>(c.size);
    return clusters;
}

// Every eigenvalue mu of the complex image needs a distinct partner near conj(mu).
inline void check_conjugate_pairing(const Eigen::VectorXcd& values, double tol) {
    const auto m = static_cast<std::size_t>(values.size());
    std::vector<bool> used(m, false);
    for (std::size_t a = 0; a < m; ++a) {
        if (used[a]) continue;
        used[a] = true;
        const Complex target = std::conj(values(static_cast<Eigen::Index>(a)));
        std::size_t best = m;
        double best_d = 0;
        for (std::size_t b = 0; b < m; ++b) {
            if (used[b]) continue;
            const double d = std::abs(values(static_cast<Eigen::Index>(b)) - target);
            if (best == m || d < best_d) best = b, best_d = d;
        }
        if (best == m || best_d > tol)
            throw EmbeddingSpectrumAsymmetric("eigenvalues of the complex image do not pair up");
        used[best] = true;
    }
}

// Right singular vectors of A belonging to the `count` smallest singular values,
// plus the largest of those singular values.
struct SmallestSingular {
    Eigen::MatrixXcd vectors;
    double worst = 0;
};

inline SmallestSingular smallest_right_singular(const Eigen::MatrixXcd& a, Eigen::Index count) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const Eigen::Index c = a.cols();
    SmallestSingular out;
    out.vectors = svd.matrixV().rightCols(count);
    out.worst = count > 0 ? svd.singularValues()(c - count) : 0.0;
    return out;
}

// Unit right scalar u making the first significant component of v u real
// positive. Only complex u keep a non-real eigenvalue fixed, and those can
// only align the 1-part (or, when it vanishes, the j-part) of a component.
inline Quaternion phase_fix(const QVector& v, bool any_unit) {
    for (std::size_t k = 0; k < v.dim(); ++k) {
        const Quaternion c = v[k];
        if (c.abs() <= 1e-8) continue;
        if (any_unit) return conj(c) / c.abs();
        const auto [a, b] = split(c);
        if (std::abs(a) > 1e-8) return Quaternion{std::conj(a) / std::abs(a)};
        return Quaternion{b / std::abs(b)};
    }
    return Quaternion{1};
}

}  // namespace detail

inline RightSpectrum right_eigen(const QMatrix& h) {
    if (!h.square()) throw DimensionMismatch("right_eigen requires a square matrix");
    const std::size_t n = h.rows();
    RightSpectrum spec;
    if (n == 0) {
        spec.diagonalizable = true;
        return spec;
    }

    const double hnorm = frobenius_norm(h);
    if (hnorm == 0.0) {
        spec.eigenvalues.assign(n, Complex{});
        spec.S = QMatrix::identity(n);
        spec.D = QMatrix(n, n);
        spec.diagonalizable = true;
        spec.classes.assign(n, 0);
        return spec;
    }

    const SymplecticImage c = embed(h);
    const Eigen::VectorXcd mu = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(c, false).eigenvalues();

    const double cluster_tol = 1e-7 * hnorm;
    const double kernel_tol = 1e-9 * hnorm;
    detail::check_conjugate_pairing(mu, 10 * cluster_tol);

    struct EigenClass {
        Complex value;
        std::size_t multiplicity;
        std::size_t first_seen;
        bool real;
    };
    std::vector<EigenClass> classes;
    const auto clusters = detail::cluster_eigenvalues(mu, cluster_tol);
    std::size_t upper = 0, lower = 0;
    for (const auto& cl : clusters) {
        if (std::abs(cl.center.imag()) <= cluster_tol) {
            if (cl.size % 2 != 0) throw EmbeddingSpectrumAsymmetric("real eigenvalue of odd multiplicity in the complex image");
            classes.push_back({Complex(cl.center.real(), 0.0), cl.size / 2, cl.first_seen, true});
        } else if (cl.center.imag() > 0) {
            upper += cl.size;
            classes.push_back({cl.center, cl.size, cl.first_seen, false});
        } else {
            lower += cl.size;
        }
    }
    if (upper != lower) throw EmbeddingSpectrumAsymmetric("upper and lower half-plane counts differ");

    std::stable_sort(classes.begin(), classes.end(), [](const EigenClass& a, const EigenClass& b) {
        const double ma = std::abs(a.value), mb = std::abs(b.value);
        if (ma != mb) return ma < mb;
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.first_seen < b.first_seen;
    });

    bool full_geometric = true;
    std::vector<QVector> columns;
    const auto dim2 = static_cast<Eigen::Index>(2 * n);
    for (std::size_t id = 0; id < classes.size(); ++id) {
        const auto& cls = classes[id];
        const Eigen::MatrixXcd shifted = c - cls.value * Eigen::MatrixXcd::Identity(dim2, dim2);
        std::vector<QVector> picked;
        if (!cls.real) {
            const auto m = static_cast<Eigen::Index>(cls.multiplicity);
            const auto ker = detail::smallest_right_singular(shifted, m);
            if (ker.worst > kernel_tol) full_geometric = false;
            for (Eigen::Index k = 0; k < m; ++k) picked.push_back(lift_vector(ker.vectors.col(k)));
        } else {
            // The kernel is closed under v -> v j here; pick a quaternionic basis
            // from it by pivoted Gram-Schmidt with quaternion coefficients.
            const auto m2 = static_cast<Eigen::Index>(2 * cls.multiplicity);
            const auto ker = detail::smallest_right_singular(shifted, m2);
            if (ker.worst > kernel_tol) full_geometric = false;
            std::vector<QVector> candidates;
            for (Eigen::Index k = 0; k < m2; ++k) candidates.push_back(lift_vector(ker.vectors.col(k)));
            while (picked.size() < cls.multiplicity) {
                std::size_t best = 0;
                double best_norm = -1;
                for (std::size_t k = 0; k < candidates.size(); ++k) {
                    const double nk = candidates[k].norm();
                    if (nk > best_norm) best = k, best_norm = nk;
                }
                if (best_norm <= 0) break;
                const QVector u = candidates[best] * Quaternion{1.0 / best_norm};
                picked.push_back(u);
                for (auto& cand : candidates) cand = cand - u * inner(u, cand);
            }
            while (picked.size() < cls.multiplicity) picked.push_back(QVector(n));
        }
        for (auto& v : picked) {
            const double nv = v.norm();
            if (nv > 0) v = v * Quaternion{1.0 / nv};
            v = v * detail::phase_fix(v, cls.real);
            columns.push_back(std::move(v));
            spec.eigenvalues.push_back(cls.value);
            spec.classes.push_back(id);
        }
    }

    spec.S = QMatrix::from_columns(columns);
    std::vector<Quaternion> diag;
    for (const auto& l : spec.eigenvalues) diag.push_back(Quaternion{l});
    spec.D = QMatrix::diagonal(diag);

    bool verified = true;
    for (std::size_t k = 0; k < n; ++k) {
        const QVector s = spec.S.column(k);
        const double r = (h * s - s * Quaternion{spec.eigenvalues[k]}).norm();
        if (r > 1e-8 * hnorm * s.norm()) verified = false;
    }
    spec.diagonalizable = full_geometric && verified && inverse_condition(spec.S) >= kSingularThreshold;
    return spec;
}

/// Every eigenvalue satisfies |Re l| <= tol (1 + |l|).
inline bool is_imaginary_spectrum(const RightSpectrum& spec, double tol) {
    return std::all_of(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                       [tol](const Complex& l) { return std::abs(l.real()) <= tol * (1 + std::abs(l)); });
}

/// Energies |l|, ascending.
inline std::vector<double> eigenvalue_moduli(const RightSpectrum& spec) {
    std::vector<double> out;
    out.reserve(spec.eigenvalues.size());
    for (const auto& l : spec.eigenvalues) out.push_back(std::abs(l));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace quatmetric
