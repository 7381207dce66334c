#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qmatrix.hpp"
#include "quaternion.hpp"

namespace quatmetric::random {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Quaternion quaternion(Rng& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng), g(rng), g(rng)};
}

inline Complex complex_in_disk(Rng& rng, double radius) {
    const double r = radius * std::sqrt(uniform(rng, 0, 1));
    const double th = uniform(rng, 0, 2 * M_PI);
    return std::polar(r, th);
}

/// Unit pure-imaginary quaternion, uniform on the sphere.
inline Quaternion imaginary_unit(Rng& rng) {
    std::normal_distribution<double> g;
    Quaternion q{0, g(rng), g(rng), g(rng)};
    return q / q.abs();
}

inline QMatrix matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    QMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = quaternion(rng);
    return m;
}

inline QVector vector(Rng& rng, std::size_t dim) {
    QVector v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = quaternion(rng);
    return v;
}

inline QMatrix antihermitian(Rng& rng, std::size_t n) {
    const QMatrix g = matrix(rng, n, n);
    return (g - adjoint(g)) * 0.5;
}

inline QMatrix hermitian(Rng& rng, std::size_t n) {
    const QMatrix g = matrix(rng, n, n);
    return (g + adjoint(g)) * 0.5;
}

/// Well-conditioned invertible matrix, 1 + 0.4 G / sqrt(n).
inline QMatrix invertible(Rng& rng, std::size_t n) {
    return QMatrix::identity(n) + matrix(rng, n, n) * (0.4 / std::sqrt(static_cast<double>(n)));
}

/// T D T^-1 with D = diag(E_k u_k), u_k random imaginary units, E_k in [0.5, 3].
/// When `degenerate` is set the first two energies coincide.
inline QMatrix quasi_antihermitian(Rng& rng, std::size_t n, bool degenerate = false) {
    std::vector<Quaternion> d;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = (degenerate && k == 1) ? d[0].abs() : 0.5 + 0.5 * static_cast<double>(k) + uniform(rng, 0, 0.4);
        d.push_back(imaginary_unit(rng) * e);
    }
    const QMatrix t = invertible(rng, n);
    return t * QMatrix::diagonal(d) * inverse(t);
}

/// Diagonalizable, but one eigenvalue has real part of modulus >= 0.1.
inline QMatrix with_real_spectral_part(Rng& rng, std::size_t n) {
    std::vector<Quaternion> d;
    for (std::size_t k = 0; k < n; ++k) d.push_back(imaginary_unit(rng) * (0.5 + 0.6 * static_cast<double>(k)));
    const double re = uniform(rng, 0.1, 1.0) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1);
    d[static_cast<std::size_t>(uniform(rng, 0, static_cast<double>(n) - 1e-9))] += Quaternion{re};
    const QMatrix t = invertible(rng, n);
    return t * QMatrix::diagonal(d) * inverse(t);
}

/// Similar to a matrix with a 2x2 Jordan block on an imaginary eigenvalue.
inline QMatrix with_jordan_block(Rng& rng, std::size_t n) {
    QMatrix j(n, n);
    const Quaternion lambda = Quaternion::i() * uniform(rng, 0.5, 2.0);
    for (std::size_t k = 0; k < n; ++k) j(k, k) = k < 2 ? lambda : imaginary_unit(rng) * (3.0 + static_cast<double>(k));
    j(0, 1) = Quaternion{1};
    const QMatrix t = invertible(rng, n);
    return t * j * inverse(t);
}

}  // namespace quatmetric::random
