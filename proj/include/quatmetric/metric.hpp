#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "qmatrix.hpp"
#include "spectral.hpp"

namespace quatmetric {

// Thresholds shared by every metric computation.
inline constexpr double kKernelThreshold = 1e-9;     // relative to the largest singular value
inline constexpr double kPositivityThreshold = 1e-10;  // min eigenvalue relative to max
inline constexpr double kImaginarySpectrumTol = 1e-9;
inline constexpr double kMetricResidualTol = 1e-8;

/// Hermitian metric eta together with a positivity certificate.
struct MetricOperator {
    QMatrix eta;
    /// R with eta = R^dagger R; present only when eta is positive definite.
    std::optional<QMatrix> factor;
    bool positive = false;
    /// Eigenvalues of eta, ascending.
    std::vector<double> eigenvalues;
};

/// Wraps a Hermitian matrix as a metric: certifies positivity and, when
/// positive, stores the positive square root as factor.
inline MetricOperator make_metric(const QMatrix& eta) {
    if (!eta.square()) throw DimensionMismatch("metric must be square");
    MetricOperator m;
    m.eta = eta;
    if (eta.empty()) {
        m.positive = true;
        return m;
    }
    Eigen::MatrixXcd c = embed(eta);
    c = 0.5 * (c + c.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
    const Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); k += 2) m.eigenvalues.push_back(0.5 * (ev(k) + ev(k + 1)));
    const double lo = m.eigenvalues.front(), hi = m.eigenvalues.back();
    m.positive = hi > 0 && lo > kPositivityThreshold * hi;
    if (m.positive) {
        const Eigen::MatrixXcd root =
            es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
        m.factor = detail::project_lift(root);
    }
    return m;
}

/// |eta H + H^dagger eta|_F / (|eta|_F |H|_F); zero iff eta H eta^-1 = -H^dagger.
inline double verify_pseudo_antihermitian(const QMatrix& eta, const QMatrix& h) {
    if (!eta.square() || !h.square() || eta.rows() != h.rows())
        throw DimensionMismatch("metric and operator must be square of equal size");
    if (inverse_condition(eta) < kSingularThreshold) throw Singular("metric is not invertible");
    const double num = frobenius_norm(eta * h + adjoint(h) * eta);
    const double den = frobenius_norm(eta) * frobenius_norm(h);
    return den > 0 ? num / den : 0.0;
}

/// Scalar field the unknown operator is allowed to range over.
enum class Field { Quaternion, Complex };

namespace detail {

// Orthonormal (under Re tr(A^dagger B)) real basis of all n x n matrices, or
// of the Hermitian ones, with entries in the chosen field.
inline std::vector<QMatrix> coordinate_basis(std::size_t n, bool hermitian, Field field) {
    const std::size_t units = field == Field::Quaternion ? 4 : 2;
    const Quaternion unit[4] = {Quaternion{1}, Quaternion::i(), Quaternion::j(), Quaternion::k()};
    std::vector<QMatrix> basis;
    if (!hermitian) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t u = 0; u < units; ++u) {
                    QMatrix e(n, n);
                    e(r, c) = unit[u];
                    basis.push_back(std::move(e));
                }
        return basis;
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t r = 0; r < n; ++r) {
        QMatrix e(n, n);
        e(r, r) = Quaternion{1};
        basis.push_back(std::move(e));
        for (std::size_t c = r + 1; c < n; ++c)
            for (std::size_t u = 0; u < units; ++u) {
                QMatrix f(n, n);
                f(r, c) = unit[u] * s;
                f(c, r) = conj(unit[u]) * s;
                basis.push_back(std::move(f));
            }
    }
    return basis;
}

inline void append_real(Eigen::VectorXd& out, Eigen::Index& at, const QMatrix& m) {
    for (const auto& q : m.entries()) {
        out(at++) = q.w;
        out(at++) = q.x;
        out(at++) = q.y;
        out(at++) = q.z;
    }
}

// Real kernel of the linear map T -> (op(T, H_i))_i restricted to span(basis).
// Returned matrices are orthonormal in the trace inner product.
template <typename Op>
std::vector<QMatrix> real_kernel(const std::vector<QMatrix>& basis, std::span<const QMatrix> hs, Op op) {
    const auto cols = static_cast<Eigen::Index>(basis.size());
    if (cols == 0) return {};
    const std::size_t n = basis.front().rows();
    std::vector<QMatrix> out;
    Eigen::MatrixXd v;
    Eigen::Index null_start = 0;
    if (hs.empty()) {
        v = Eigen::MatrixXd::Identity(cols, cols);
    } else {
        const auto rows = static_cast<Eigen::Index>(4 * n * n * hs.size());
        Eigen::MatrixXd a(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            Eigen::VectorXd col(rows);
            Eigen::Index at = 0;
            for (const auto& h : hs) append_real(col, at, op(basis[static_cast<std::size_t>(c)], h));
            a.col(c) = col;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv(k) > kKernelThreshold * smax) ++rank;
        v = svd.matrixV();
        null_start = rank;
    }
    for (Eigen::Index k = null_start; k < cols; ++k) {
        QMatrix t(n, n);
        for (Eigen::Index c = 0; c < cols; ++c)
            if (v(c, k) != 0.0) t = t + basis[static_cast<std::size_t>(c)] * v(c, k);
        // Fix the sign deterministically: nonnegative trace, else first nonzero coordinate positive.
        double tr = 0;
        for (std::size_t d = 0; d < n; ++d) tr += t(d, d).w;
        double sign = tr;
        if (std::abs(tr) < 1e-12)
            for (Eigen::Index c = 0; c < cols; ++c)
                if (std::abs(v(c, k)) > 1e-12) {
                    sign = v(c, k);
                    break;
                }
        out.push_back(sign < 0 ? -t : t);
    }
    return out;
}

inline void check_family(std::span<const QMatrix> hs, std::size_t n) {
    for (const auto& h : hs)
        if (!h.square() || h.rows() != n) throw DimensionMismatch("operator family must be square and of equal size");
}

inline QMatrix combine(const std::vector<QMatrix>& basis, const Eigen::VectorXd& coeff) {
    QMatrix t = basis.front() * 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) t = t + basis[k] * coeff(static_cast<Eigen::Index>(k));
    return t;
}

}  // namespace detail

/// Hermitian solutions eta of eta H_i + H_i^dagger eta = 0 for every i.
struct MetricSolutionSpace {
    std::vector<QMatrix> basis;
    std::vector<bool> basis_positive;
    std::size_t dim = 0;
    /// Largest relative residual over basis elements and operators.
    double max_residual = 0;
    /// A positive definite solution of unit Frobenius norm, when one was found.
    std::optional<QMatrix> positive_element;
    /// Real dimension of the span of the positive solutions found.
    std::size_t positive_span_dim = 0;
};

inline MetricSolutionSpace metric_solution_space(std::span<const QMatrix> hs, std::size_t n,
                                                 Field field = Field::Quaternion, std::uint64_t seed = 0) {
    detail::check_family(hs, n);
    MetricSolutionSpace out;
    const auto basis = detail::coordinate_basis(n, true, field);
    out.basis = detail::real_kernel(basis, hs, [](const QMatrix& eta, const QMatrix& h) {
        return eta * h + adjoint(h) * eta;
    });
    out.dim = out.basis.size();
    for (const auto& b : out.basis) {
        out.basis_positive.push_back(make_metric(b).positive);
        for (const auto& h : hs) {
            const double hn = frobenius_norm(h);
            if (hn > 0) out.max_residual = std::max(out.max_residual, frobenius_norm(b * h + adjoint(h) * b) / hn);
        }
    }
    if (out.dim == 0) return out;

    // Search for a positive element: maximize the smallest eigenvalue of
    // sum_k c_k B_k over the unit sphere by supergradient ascent, starting
    // from the best of the identity projection, +-B_k and random draws.
    const auto d = static_cast<Eigen::Index>(out.dim);
    std::vector<Eigen::MatrixXcd> images;
    for (const auto& b : out.basis) images.push_back(embed(b));
    auto evaluate = [&](const Eigen::VectorXd& coeff, Eigen::VectorXd* grad) {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(images.front().rows(), images.front().cols());
        for (Eigen::Index k = 0; k < d; ++k) c += coeff(k) * images[static_cast<std::size_t>(k)];
        c = 0.5 * (c + c.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
        const Eigen::VectorXd ev = es.eigenvalues();
        if (grad) {
            const Eigen::VectorXcd x = es.eigenvectors().col(0);
            grad->resize(d);
            for (Eigen::Index k = 0; k < d; ++k)
                (*grad)(k) = (x.adjoint() * images[static_cast<std::size_t>(k)] * x)(0, 0).real();
        }
        const double hi = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
        return hi > 0 ? ev(0) / hi : -1.0;
    };

    std::vector<Eigen::VectorXd> starts;
    {
        const QMatrix id = QMatrix::identity(n);
        Eigen::VectorXd p(d);
        for (Eigen::Index k = 0; k < d; ++k) p(k) = real_trace_inner(out.basis[static_cast<std::size_t>(k)], id);
        if (p.norm() > 1e-12) starts.push_back(p.normalized());
    }
    for (Eigen::Index k = 0; k < d; ++k) {
        starts.push_back(Eigen::VectorXd::Unit(d, k));
        starts.push_back(-Eigen::VectorXd::Unit(d, k));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < 64; ++s) {
        Eigen::VectorXd r(d);
        for (Eigen::Index k = 0; k < d; ++k) r(k) = gauss(rng);
        starts.push_back(r.normalized());
    }

    Eigen::VectorXd best = starts.front();
    double best_score = -2;
    for (const auto& s : starts) {
        const double sc = evaluate(s, nullptr);
        if (sc > best_score) best_score = sc, best = s;
    }
    Eigen::VectorXd grad;
    for (int it = 0; it < 200 && best_score <= kPositivityThreshold * 10; ++it) {
        evaluate(best, &grad);
        const double step = 0.5 / std::sqrt(1.0 + it);
        Eigen::VectorXd trial = (best + step * grad).normalized();
        const double sc = evaluate(trial, nullptr);
        if (sc > best_score) best_score = sc, best = trial;
    }

    const QMatrix candidate = detail::combine(out.basis, best);
    const MetricOperator cm = make_metric(candidate);
    if (!cm.positive) return out;
    const double fn = frobenius_norm(candidate);
    out.positive_element = candidate * (1.0 / fn);

    // The positive cone is open in the solution space: p + t B_k stays
    // positive for t below the smallest eigenvalue of p (|B_k|_op <= 1).
    const double t = 0.5 * cm.eigenvalues.front() / fn;
    std::vector<Eigen::VectorXd> cone{best / fn};
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::VectorXd e = best / fn + t * Eigen::VectorXd::Unit(d, k);
        if (make_metric(detail::combine(out.basis, e)).positive) cone.push_back(e);
    }
    Eigen::MatrixXd span(d, static_cast<Eigen::Index>(cone.size()));
    for (std::size_t k = 0; k < cone.size(); ++k) span.col(static_cast<Eigen::Index>(k)) = cone[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
    const auto& sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > kKernelThreshold * sv(0)) ++out.positive_span_dim;
    return out;
}

/// Real bases of the commutant {T : T H_i = H_i T} and of its Hermitian part.
struct CommutantBasis {
    std::vector<QMatrix> full_basis;
    std::vector<QMatrix> hermitian_basis;
    std::size_t full_dim = 0;
    std::size_t hermitian_dim = 0;
};

inline CommutantBasis commutant(std::span<const QMatrix> hs, std::size_t n, Field field = Field::Quaternion) {
    detail::check_family(hs, n);
    auto comm = [](const QMatrix& t, const QMatrix& h) { return t * h - h * t; };
    CommutantBasis out;
    out.full_basis = detail::real_kernel(detail::coordinate_basis(n, false, field), hs, comm);
    out.hermitian_basis = detail::real_kernel(detail::coordinate_basis(n, true, field), hs, comm);
    out.full_dim = out.full_basis.size();
    out.hermitian_dim = out.hermitian_basis.size();
    return out;
}

struct IrreducibilityVerdict {
    bool irreducible = false;
    /// Hermitian commutant basis; a single multiple of the identity when irreducible.
    std::vector<QMatrix> certificate;
};

/// Irreducible iff the Hermitian commutant consists of real multiples of 1 only.
inline IrreducibilityVerdict is_irreducible(std::span<const QMatrix> hs, std::size_t n,
                                            Field field = Field::Quaternion) {
    auto c = commutant(hs, n, field);
    return {c.hermitian_dim == 1, std::move(c.hermitian_basis)};
}

namespace detail {

inline RightSpectrum checked_spectrum(const QMatrix& h) {
    if (!h.square()) throw DimensionMismatch("operator must be square");
    RightSpectrum spec = right_eigen(h);
    if (!spec.diagonalizable) throw NotQuasiAntiHermitian(QuasiAntiHermitianFailure::NonDiagonalizable);
    if (!is_imaginary_spectrum(spec, kImaginarySpectrumTol))
        throw NotQuasiAntiHermitian(QuasiAntiHermitianFailure::RealSpectrumPart);
    return spec;
}

inline QMatrix hermitian_part(const QMatrix& m) { return (m + adjoint(m)) * 0.5; }

}  // namespace detail

/// Positive definite eta with eta H + H^dagger eta = 0, for H diagonalizable
/// with imaginary spectrum. With H = S D S^-1 the candidate is
/// eta = (S S^dagger)^-1 = R^dagger R, R = S^-1.
inline MetricOperator build_metric(const QMatrix& h) {
    const RightSpectrum spec = detail::checked_spectrum(h);
    const QMatrix r = inverse(spec.S);
    MetricOperator m = make_metric(detail::hermitian_part(adjoint(r) * r));
    if (m.positive && verify_pseudo_antihermitian(m.eta, h) <= kMetricResidualTol) {
        m.factor = r;
        return m;
    }
    // Eigenvectors too ill-conditioned for the closed form; solve the linear
    // equation directly.
    const QMatrix family[] = {h};
    const auto space = metric_solution_space(family, h.rows());
    if (!space.positive_element) throw NotQuasiAntiHermitian(QuasiAntiHermitianFailure::NonDiagonalizable);
    return make_metric(*space.positive_element);
}

struct BiorthonormalSystem {
    std::vector<QVector> psi;
    std::vector<QVector> phi;
    /// Distinct energies E_n >= 0, ascending, with degeneracies d_n.
    std::vector<double> energies;
    std::vector<std::size_t> degeneracies;
    /// level[k] indexes energies for the pair (psi[k], phi[k]).
    std::vector<std::size_t> level;
    /// Metric used to build phi = eta psi.
    QMatrix eta;
};


inline BiorthonormalSystem biorthonormal(const QMatrix& h) {
    const RightSpectrum spec = detail::checked_spectrum(h);
    const std::size_t n = h.rows();
    BiorthonormalSystem sys;

    std::vector<QVector> psi;
    std::vector<double> energy;
    for (std::size_t k = 0; k < n; ++k) {
        const Quaternion lambda{spec.eigenvalues[k]};
        // Rotate the eigenvalue onto +i E_n; a no-op for complex representatives.
        const Quaternion u = rotation_to_complex(lambda);
        QVector v = spec.S.column(k) * u;
        energy.push_back(lambda.abs());
        psi.push_back(std::move(v));
    }
    const QMatrix s = QMatrix::from_columns(psi);
    const QMatrix sinv = inverse(s);
    sys.eta = detail::hermitian_part(adjoint(sinv) * sinv);

    // eta-orthonormalize inside each degenerate level; across levels the
    // vectors are eta-orthogonal already.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j)
            if (spec.classes[j] == spec.classes[k]) psi[k] = psi[k] - psi[j] * inner(psi[j], sys.eta * psi[k]);
        const double nk = std::sqrt(inner(psi[k], sys.eta * psi[k]).w);
        psi[k] = psi[k] * Quaternion{1.0 / nk};
        psi[k] = psi[k] * detail::phase_fix(psi[k], false);
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 || spec.classes[k] != spec.classes[k - 1]) {
            sys.energies.push_back(energy[k]);
            sys.degeneracies.push_back(0);
        }
        ++sys.degeneracies.back();
        sys.level.push_back(sys.energies.size() - 1);
        sys.phi.push_back(sys.eta * psi[k]);
    }
    sys.psi = std::move(psi);
    return sys;
}

/// sum_k |psi_k> i E_k <phi_k|
inline QMatrix reconstruct(const BiorthonormalSystem& sys) {
    if (sys.psi.empty()) return {};
    const std::size_t n = sys.psi.front().dim();
    QMatrix h(n, n);
    for (std::size_t k = 0; k < sys.psi.size(); ++k) {
        const Quaternion ie{0, sys.energies[sys.level[k]], 0, 0};
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) h(r, c) += sys.psi[k][r] * ie * conj(sys.phi[k][c]);
    }
    return h;
}

/// <u|eta|v>
inline Quaternion eta_inner(const QVector& u, const QMatrix& eta, const QVector& v) { return inner(u, eta * v); }

}  // namespace quatmetric
