#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "metric.hpp"
#include "qmatrix.hpp"

namespace quatmetric {

// Two-level model with H = i [[w/2, conj(W)], [W, -w/2]] (hbar = 1).

/// Spinorial su(2) generators, [J_l, J_m] = -eps_lmn J_n.
inline std::array<QMatrix, 3> j_operators() {
    const Quaternion i = Quaternion::i();
    const Quaternion zero{};
    return {QMatrix{{zero, i * 0.5}, {i * 0.5, zero}},
            QMatrix{{zero, Quaternion{0.5}}, {Quaternion{-0.5}, zero}},
            QMatrix{{i * 0.5, zero}, {zero, i * -0.5}}};
}

inline Eigen::Matrix2cd hamiltonian_complex(double omega, Complex rabi) {
    const Complex i{0, 1};
    Eigen::Matrix2cd h;
    h << i * (omega / 2), i * std::conj(rabi), i * rabi, -i * (omega / 2);
    return h;
}

/// Anti-Hermitian Hamiltonian 2 Re(W) J1 + 2 Im(W) J2 + w J3.
inline QMatrix hamiltonian(double omega, Complex rabi) {
    return QMatrix::from_complex(hamiltonian_complex(omega, rabi));
}

/// exp(tau H(omega, rabi)) in closed form: H^2 = -lambda^2 with
/// lambda = sqrt(omega^2/4 + |rabi|^2), so exp(tau H) = cos(lambda tau) + sin(lambda tau)/lambda H.
inline Eigen::Matrix2cd propagator_step(double omega, Complex rabi, double tau) {
    const double lambda = std::sqrt(omega * omega / 4 + std::norm(rabi));
    const double x = lambda * tau;
    const double sinc = std::abs(x) < 1e-4 ? 1 - x * x / 6 + x * x * x * x / 120 : std::sin(x) / x;
    return std::cos(x) * Eigen::Matrix2cd::Identity() + (tau * sinc) * hamiltonian_complex(omega, rabi);
}

// ---------------------------------------------------------------------------
// Configuration

/// Piece of a time profile: constant `start` or linear ramp start -> end.
struct ProfileSegment {
    double t_start = 0;
    double t_end = 0;
    Complex start;
    Complex end;
    bool chirp = false;

    Complex at(double t) const {
        if (!chirp || t_end == t_start) return start;
        const double s = (t - t_start) / (t_end - t_start);
        return start + (end - start) * s;
    }
};

struct Profile {
    std::vector<ProfileSegment> segments;

    static Profile constant(Complex value, double t_max) { return {{{0.0, t_max, value, value, false}}}; }

    const ProfileSegment& segment_at(double t) const {
        for (const auto& s : segments)
            if (t <= s.t_end) return s;
        return segments.back();
    }
    Complex at(double t) const { return segment_at(t).at(t); }
};

struct ModelConfig {
    Profile omega;  // real-valued; imaginary parts must vanish
    Profile rabi;
    double metric_a = 1;
    Complex metric_z;
    std::vector<double> t_grid;

    bool metric_positive() const { return metric_a > std::abs(metric_z); }
};

namespace detail {

inline void validate_profile(const Profile& p, const std::string& name, double t_max, bool real_valued) {
    if (p.segments.empty()) throw ConfigInvalid(name + ": no segments");
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
        const auto& s = p.segments[k];
        const std::string where = name + "[" + std::to_string(k) + "]";
        if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || !std::isfinite(s.start.real()) ||
            !std::isfinite(s.start.imag()) || !std::isfinite(s.end.real()) || !std::isfinite(s.end.imag()))
            throw ConfigInvalid(where + ": non-finite value");
        if (s.t_end < s.t_start) throw ConfigInvalid(where + ": t_end precedes t_start");
        if (real_valued && (s.start.imag() != 0 || s.end.imag() != 0))
            throw ConfigInvalid(where + ": value must be real");
        const double expect = k == 0 ? 0.0 : p.segments[k - 1].t_end;
        if (std::abs(s.t_start - expect) > 1e-12 * std::max(1.0, std::abs(expect)))
            throw ConfigInvalid(where + (k == 0 ? ": first segment must start at t = 0" : ": gap or overlap with previous segment"));
    }
    if (p.segments.back().t_end < t_max - 1e-12 * std::max(1.0, t_max))
        throw ConfigInvalid(name + ": segments end before the last grid time");
}

}  // namespace detail

inline void validate(const ModelConfig& cfg) {
    if (cfg.t_grid.empty()) throw ConfigInvalid("t_grid: empty");
    if (cfg.t_grid.front() != 0.0) throw ConfigInvalid("t_grid[0]: grid must start at 0");
    for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
        if (!std::isfinite(cfg.t_grid[k])) throw ConfigInvalid("t_grid[" + std::to_string(k) + "]: non-finite");
        if (k > 0 && !(cfg.t_grid[k] > cfg.t_grid[k - 1]))
            throw ConfigInvalid("t_grid[" + std::to_string(k) + "]: grid must be strictly increasing");
    }
    if (!std::isfinite(cfg.metric_a) || !std::isfinite(cfg.metric_z.real()) || !std::isfinite(cfg.metric_z.imag()))
        throw ConfigInvalid("metric: non-finite value");
    const double t_max = cfg.t_grid.back();
    detail::validate_profile(cfg.omega, "omega", t_max, true);
    detail::validate_profile(cfg.rabi, "rabi", t_max, false);
}

// ---------------------------------------------------------------------------
// Metric of the model

/// eta = [[a, j z], [-j z, a]]; eigenvalues a -+ |z|, positive iff a > |z|.
inline MetricOperator eta_model(double a, Complex z) {
    const Quaternion jz = Quaternion::j() * Quaternion{z};
    const QMatrix eta{{Quaternion{a}, jz}, {-jz, Quaternion{a}}};
    MetricOperator m;
    m.eta = eta;
    const double s = std::abs(z);
    m.eigenvalues = {a - s, a + s};
    m.positive = a > s;
    if (m.positive) {
        // N = eta - a 1 squares to |z|^2, so sqrt(eta) = alpha 1 + beta N.
        const double rp = std::sqrt(a + s), rm = std::sqrt(a - s);
        const double alpha = 0.5 * (rp + rm);
        const double beta = s > 0 ? 0.5 * (rp - rm) / s : 0.5 / std::sqrt(a);
        m.factor = QMatrix::identity(2) * alpha + (eta - QMatrix::identity(2) * a) * beta;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Cayley-Klein parametrization U = [[conj(F), G], [-conj(G), F]]

struct CKSample {
    Complex F{1.0};
    Complex G{};
};

struct CayleyKlein {
    std::vector<Complex> F;
    std::vector<Complex> G;
};

inline QMatrix ck_matrix(const CKSample& ck) {
    return QMatrix{{Quaternion{std::conj(ck.F)}, Quaternion{ck.G}}, {Quaternion{-std::conj(ck.G)}, Quaternion{ck.F}}};
}

inline CKSample extract_ck(const QMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionMismatch("Cayley-Klein matrix must be 2x2");
    for (const auto& q : u.entries())
        if (std::abs(q.y) > 1e-10 || std::abs(q.z) > 1e-10) throw NotCKForm("propagator left the complex subfield");
    if (frobenius_norm(adjoint(u) * u - QMatrix::identity(2)) > 1e-9) throw NotCKForm("propagator is not unitary");
    const CKSample ck{u(1, 1).to_complex(), u(0, 1).to_complex()};
    if (frobenius_norm(u - ck_matrix(ck)) > 1e-9) throw NotCKForm("propagator does not have the Cayley-Klein pattern");
    return ck;
}

struct TransitionProbabilities {
    double standard = 0;  // |<-|U|+>|^2 = |G|^2
    double eta = 0;       // |<-|eta U|+>|^2 = |z|^2 |F|^2 + |G|^2 at a = 1
};

inline TransitionProbabilities transition_probabilities(const CKSample& ck, Complex z) {
    const double g2 = std::norm(ck.G);
    return {g2, std::norm(z) * std::norm(ck.F) + g2};
}

// ---------------------------------------------------------------------------
// Expectation values

/// <psi|A|psi>, or <psi|eta A|psi> when a metric is supplied.
inline Quaternion expectation(const QMatrix& a, const QVector& psi, const MetricOperator* eta = nullptr) {
    if (!a.square() || a.cols() != psi.dim()) throw DimensionMismatch("operator and state dimensions differ");
    QVector v = a * psi;
    if (eta) {
        if (eta->eta.rows() != psi.dim()) throw DimensionMismatch("metric and state dimensions differ");
        v = eta->eta * v;
    }
    return inner(psi, v);
}

/// <psi|eta|psi>
inline double eta_norm(const QVector& psi, const MetricOperator& eta) { return inner(psi, eta.eta * psi).w; }

// ---------------------------------------------------------------------------
// Time evolution

struct EvolutionTrajectory {
    std::vector<double> times;
    std::vector<QMatrix> U;
    CayleyKlein ck;
    std::vector<double> p_standard;
    std::vector<double> p_eta;
    std::vector<double> unitarity_residual;      // |U^dag U - 1|_F
    std::vector<double> eta_unitarity_residual;  // |U^dag eta U - eta|_F / |eta|_F
};

namespace detail {

// Product of `steps` exponential-midpoint factors across [a, b].
inline Eigen::Matrix2cd midpoint_product(const ModelConfig& cfg, double a, double b, int steps) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    const double h = (b - a) / steps;
    for (int s = 0; s < steps; ++s) {
        const double tm = a + (s + 0.5) * h;
        u = propagator_step(cfg.omega.at(tm).real(), cfg.rabi.at(tm), h) * u;
    }
    return u;
}

inline Eigen::Matrix2cd propagate_interval(const ModelConfig& cfg, double a, double b) {
    const double tm = 0.5 * (a + b);
    if (!cfg.omega.segment_at(tm).chirp && !cfg.rabi.segment_at(tm).chirp)
        return propagator_step(cfg.omega.at(tm).real(), cfg.rabi.at(tm), b - a);
    // Halve until successive refinements agree. Unitarity is exact at every
    // refinement level, so the step-doubling difference is the error gauge.
    int steps = 1;
    Eigen::Matrix2cd coarse = midpoint_product(cfg, a, b, steps);
    for (;;) {
        Eigen::Matrix2cd fine = midpoint_product(cfg, a, b, 2 * steps);
        steps *= 2;
        if ((fine - coarse).norm() < 1e-11 || steps >= (1 << 20)) return fine;
        coarse = fine;
    }
}

inline std::vector<double> breakpoints(const ModelConfig& cfg, double a, double b) {
    std::vector<double> cuts{a, b};
    for (const Profile* p : {&cfg.omega, &cfg.rabi})
        for (const auto& s : p->segments)
            if (s.t_end > a && s.t_end < b) cuts.push_back(s.t_end);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace detail

/// Propagator of d/dt Psi = H(t) Psi sampled on the configured grid, with the
/// Cayley-Klein pair and both transition probabilities at every sample.
inline EvolutionTrajectory evolve(const ModelConfig& cfg) {
    validate(cfg);
    const MetricOperator eta = eta_model(cfg.metric_a, cfg.metric_z);
    const double eta_fn = std::max(frobenius_norm(eta.eta), 1e-300);
    EvolutionTrajectory tr;
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
        if (k > 0) {
            const auto cuts = detail::breakpoints(cfg, cfg.t_grid[k - 1], cfg.t_grid[k]);
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) u = detail::propagate_interval(cfg, cuts[c], cuts[c + 1]) * u;
        }
        const QMatrix uq = QMatrix::from_complex(u);
        const CKSample ck = extract_ck(uq);
        const auto p = transition_probabilities(ck, cfg.metric_z);
        const QMatrix ud = adjoint(uq);
        tr.times.push_back(cfg.t_grid[k]);
        tr.ck.F.push_back(ck.F);
        tr.ck.G.push_back(ck.G);
        tr.p_standard.push_back(p.standard);
        tr.p_eta.push_back(p.eta);
        tr.unitarity_residual.push_back(frobenius_norm(ud * uq - QMatrix::identity(2)));
        tr.eta_unitarity_residual.push_back(frobenius_norm(ud * eta.eta * uq - eta.eta) / eta_fn);
        tr.U.push_back(uq);
    }
    return tr;
}

/// Uniform grid 0, t_max/steps, ..., t_max.
inline std::vector<double> uniform_grid(double t_max, std::size_t steps) {
    std::vector<double> g(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) g[k] = steps ? t_max * static_cast<double>(k) / static_cast<double>(steps) : 0.0;
    return g;
}

}  // namespace quatmetric
