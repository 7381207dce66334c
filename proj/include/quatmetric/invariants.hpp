#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynamics.hpp"
#include "metric.hpp"
#include "qmatrix.hpp"
#include "random.hpp"
#include "spectral.hpp"

namespace quatmetric {

/// A named property with a measured worst-case residual; passes when the
/// residual does not exceed the tolerance. Count-type checks report the
/// number of violating instances against tolerance 0.
struct Invariant {
    std::string name;
    double tolerance;
    std::function<double(random::Rng&)> measure;
};

struct InvariantResult {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

/// Chirped model used by the trajectory checks: omega ramps linearly and the
/// Rabi frequency switches between constant and chirped pieces.
inline ModelConfig sample_chirp_config(double t_max, std::size_t steps, Complex z) {
    ModelConfig cfg;
    const double mid = t_max / 2;
    cfg.omega.segments = {{0.0, mid, Complex{-2.0}, Complex{1.0}, true}, {mid, t_max, Complex{1.0}, Complex{3.0}, true}};
    cfg.rabi.segments = {{0.0, mid, Complex{0.8, 0.3}, Complex{0.8, 0.3}, false},
                         {mid, t_max, Complex{0.8, 0.3}, Complex{0.2, -0.5}, true}};
    cfg.metric_a = 1.0;
    cfg.metric_z = z;
    cfg.t_grid = uniform_grid(t_max, steps);
    return cfg;
}

inline double rabi_oracle(double omega, Complex rabi, double t) {
    const double lambda = std::sqrt(omega * omega / 4 + std::norm(rabi));
    const double s = std::sin(lambda * t);
    return std::norm(rabi) * s * s / (lambda * lambda);
}

namespace detail {

inline double rel(double num, double den) { return den > 0 ? num / den : num; }

inline std::size_t random_dim(random::Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(random::uniform(rng, 0, static_cast<double>(hi - lo + 1) - 1e-9));
}

}  // namespace detail

inline std::vector<Invariant> invariant_suite() {
    using random::Rng;
    std::vector<Invariant> s;

    // -- quaternion scalars
    s.push_back({"quat.norm_multiplicative", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 10000; ++t) {
                         const auto p = random::quaternion(rng), q = random::quaternion(rng);
                         worst = std::max(worst, detail::rel(std::abs((p * q).abs() - p.abs() * q.abs()), p.abs() * q.abs()));
                     }
                     return worst;
                 }});
    s.push_back({"quat.associativity", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 10000; ++t) {
                         const auto p = random::quaternion(rng), q = random::quaternion(rng), r = random::quaternion(rng);
                         worst = std::max(worst, detail::rel(((p * q) * r - p * (q * r)).abs(), p.abs() * q.abs() * r.abs()));
                     }
                     return worst;
                 }});
    s.push_back({"quat.noncommutativity_witness", 0.0, [](Rng&) {
                     const auto i = Quaternion::i(), j = Quaternion::j();
                     return (i * j + j * i).abs() + (i * j - Quaternion::k()).abs();
                 }});
    s.push_back({"quat.split_join_roundtrip", 0.0, [](Rng& rng) {
                     double bad = 0;
                     for (int t = 0; t < 1000; ++t) {
                         const auto q = random::quaternion(rng);
                         const auto [a, b] = split(q);
                         if (!(join(a, b) == q)) ++bad;
                     }
                     return bad;
                 }});
    s.push_back({"quat.conj_antimultiplicative", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 1000; ++t) {
                         const auto p = random::quaternion(rng), q = random::quaternion(rng);
                         worst = std::max(worst, detail::rel((conj(p * q) - conj(q) * conj(p)).abs(), p.abs() * q.abs()));
                     }
                     return worst;
                 }});

    // -- matrices and the embedding
    s.push_back({"qmatrix.adjoint_of_product", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto a = random::matrix(rng, 4, 4), b = random::matrix(rng, 4, 4);
                         worst = std::max(worst, detail::rel(frobenius_norm(adjoint(a * b) - adjoint(b) * adjoint(a)),
                                                             frobenius_norm(a) * frobenius_norm(b)));
                     }
                     return worst;
                 }});
    s.push_back({"qmatrix.embedding_homomorphism", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto a = random::matrix(rng, 3, 3), b = random::matrix(rng, 3, 3);
                         const double d1 = (embed(a * b) - embed(a) * embed(b)).norm();
                         const double d2 = (embed(adjoint(a)) - embed(a).adjoint()).norm();
                         const double d3 = (embed(QMatrix::identity(3)) - Eigen::MatrixXcd::Identity(6, 6)).norm();
                         worst = std::max({worst, detail::rel(d1, frobenius_norm(a) * frobenius_norm(b)), d2, d3});
                     }
                     return worst;
                 }});
    s.push_back({"qmatrix.embedding_frobenius", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto a = random::matrix(rng, 4, 3);
                         const double f = frobenius_norm(a);
                         worst = std::max(worst, detail::rel(std::abs(embed(a).squaredNorm() - 2 * f * f), 2 * f * f));
                     }
                     return worst;
                 }});
    s.push_back({"qmatrix.lift_roundtrip", 0.0, [](Rng& rng) {
                     double bad = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto a = random::matrix(rng, 3, 3);
                         if (!(lift(embed(a)) == a)) ++bad;
                     }
                     return bad;
                 }});
    s.push_back({"qmatrix.inner_product_adjoint", 1e-11, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 100; ++t) {
                         const auto m = random::matrix(rng, 4, 4);
                         const auto u = random::vector(rng, 4), v = random::vector(rng, 4);
                         worst = std::max(worst, detail::rel((inner(u, m * v) - inner(adjoint(m) * u, v)).abs(),
                                                             frobenius_norm(m) * u.norm() * v.norm()));
                     }
                     return worst;
                 }});
    s.push_back({"qmatrix.right_linearity", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 100; ++t) {
                         const auto m = random::matrix(rng, 4, 4);
                         const auto v = random::vector(rng, 4);
                         const auto l = random::quaternion(rng);
                         worst = std::max(worst, detail::rel((m * (v * l) - (m * v) * l).norm(),
                                                             frobenius_norm(m) * v.norm() * l.abs()));
                     }
                     return worst;
                 }});
    s.push_back({"qmatrix.inverse", 1e-10, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto m = random::invertible(rng, 4);
                         worst = std::max(worst, frobenius_norm(m * inverse(m) - QMatrix::identity(4)) * inverse_condition(m));
                     }
                     return worst;
                 }});

    // -- spectra
    s.push_back({"spectral.eigen_equation", 1e-9, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto h = random::matrix(rng, 3, 3);
                         const auto sp = right_eigen(h);
                         worst = std::max(worst, detail::rel(frobenius_norm(h * sp.S - sp.S * sp.D), frobenius_norm(h)));
                     }
                     return worst;
                 }});
    s.push_back({"spectral.embedding_pairing", 1e-9, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto h = random::matrix(rng, 3, 3);
                         const auto sp = right_eigen(h);
                         Eigen::VectorXcd mu = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(embed(h), false).eigenvalues();
                         std::vector<Complex> expect;
                         for (const auto& l : sp.eigenvalues) expect.push_back(l), expect.push_back(std::conj(l));
                         std::vector<bool> used(expect.size(), false);
                         for (Eigen::Index k = 0; k < mu.size(); ++k) {
                             double best = 1e300;
                             std::size_t at = 0;
                             for (std::size_t e = 0; e < expect.size(); ++e)
                                 if (!used[e] && std::abs(expect[e] - mu(k)) < best) best = std::abs(expect[e] - mu(k)), at = e;
                             used[at] = true;
                             worst = std::max(worst, best / frobenius_norm(h));
                         }
                     }
                     return worst;
                 }});
    s.push_back({"spectral.similarity_invariance", 1e-7, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 30; ++t) {
                         const auto h = random::matrix(rng, 3, 3);
                         const auto tm = random::invertible(rng, 3);
                         const auto a = right_eigen(h), b = right_eigen(tm * h * inverse(tm));
                         auto key = [](std::vector<Complex> v) {
                             std::sort(v.begin(), v.end(), [](Complex x, Complex y) {
                                 return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
                             });
                             return v;
                         };
                         const auto ka = key(a.eigenvalues), kb = key(b.eigenvalues);
                         for (std::size_t k = 0; k < ka.size(); ++k) worst = std::max(worst, std::abs(ka[k] - kb[k]) / frobenius_norm(h));
                     }
                     return worst;
                 }});
    s.push_back({"spectral.antihermitian_imaginary_diagonalizable", 0.0, [](Rng& rng) {
                     double bad = 0;
                     for (int t = 0; t < 50; ++t) {
                         const auto sp = right_eigen(random::antihermitian(rng, detail::random_dim(rng, 2, 4)));
                         if (!sp.diagonalizable || !is_imaginary_spectrum(sp, 1e-9)) ++bad;
                     }
                     return bad;
                 }});

    // -- metrics
    s.push_back({"metric.construct_quasianti_hermitian", 1e-8, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 40; ++t) {
                         const auto h = random::quasi_antihermitian(rng, detail::random_dim(rng, 2, 4), t % 4 == 0);
                         const auto m = build_metric(h);
                         if (!m.positive) return 1.0;
                         worst = std::max(worst, verify_pseudo_antihermitian(m.eta, h));
                     }
                     return worst;
                 }});
    s.push_back({"metric.reject_typed_errors", 0.0, [](Rng& rng) {
                     double bad = 0;
                     for (int t = 0; t < 40; ++t) {
                         const bool jordan = t % 2 == 0;
                         const auto n = detail::random_dim(rng, 2, 4);
                         const auto h = jordan ? random::with_jordan_block(rng, n) : random::with_real_spectral_part(rng, n);
                         try {
                             build_metric(h);
                             ++bad;
                         } catch (const NotQuasiAntiHermitian& e) {
                             const auto want = jordan ? QuasiAntiHermitianFailure::NonDiagonalizable
                                                      : QuasiAntiHermitianFailure::RealSpectrumPart;
                             if (e.reason != want) ++bad;
                         }
                     }
                     return bad;
                 }});
    s.push_back({"metric.spinorial_commutant_dimensions", 0.0, [](Rng&) {
                     const auto js = j_operators();
                     const auto q = commutant(js, 2, Field::Quaternion);
                     const auto c = commutant(js, 2, Field::Complex);
                     return static_cast<double>((q.full_dim != 4) + (q.hermitian_dim != 3) + (c.hermitian_dim != 1));
                 }});
    s.push_back({"metric.uniqueness_iff_irreducible", 0.0, [](Rng& rng) {
                     double bad = 0;
                     for (int t = 0; t < 10; ++t) {
                         std::vector<QMatrix> fam;
                         if (t % 2 == 0) {
                             const auto n = detail::random_dim(rng, 2, 3);
                             for (int k = 0; k < 2; ++k) fam.push_back(random::antihermitian(rng, n));
                         } else {
                             for (int k = 0; k < 2; ++k) {
                                 QMatrix b(3, 3);
                                 const auto a2 = random::antihermitian(rng, 2), a1 = random::antihermitian(rng, 1);
                                 for (std::size_t r = 0; r < 2; ++r)
                                     for (std::size_t c = 0; c < 2; ++c) b(r, c) = a2(r, c);
                                 b(2, 2) = a1(0, 0);
                                 fam.push_back(b);
                             }
                         }
                         const std::size_t n = fam.front().rows();
                         const bool irr = is_irreducible(fam, n).irreducible;
                         const auto space = metric_solution_space(fam, n, Field::Quaternion, rng());
                         if (irr != (t % 2 == 0)) ++bad;
                         if (irr && space.positive_span_dim != 1) ++bad;
                         if (!irr && space.positive_span_dim < 2) ++bad;
                     }
                     return bad;
                 }});
    s.push_back({"metric.eta_inner_product", 1e-11, [](Rng& rng) {
                     const auto js = j_operators();
                     const auto space = metric_solution_space(js, 2, Field::Quaternion, rng());
                     if (!space.positive_element) return 1.0;
                     const QMatrix& eta = *space.positive_element;
                     double worst = 0;
                     for (int t = 0; t < 1000; ++t) {
                         const auto u = random::vector(rng, 2), v = random::vector(rng, 2);
                         worst = std::max(worst, (eta_inner(u, eta, v) - conj(eta_inner(v, eta, u))).abs() / (u.norm() * v.norm()));
                         if (!(eta_inner(v, eta, v).w > 0)) return 1.0;
                     }
                     return worst;
                 }});
    s.push_back({"metric.biorthonormal_reconstruction", 1e-8, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 20; ++t) {
                         const auto n = detail::random_dim(rng, 2, 4);
                         const auto h = random::quasi_antihermitian(rng, n, t % 3 == 0);
                         const auto sys = biorthonormal(h);
                         QMatrix gram(n, n), comp1(n, n), comp2(n, n);
                         for (std::size_t a = 0; a < n; ++a)
                             for (std::size_t b = 0; b < n; ++b) {
                                 gram(a, b) = inner(sys.phi[a], sys.psi[b]);
                                 for (std::size_t k = 0; k < n; ++k) {
                                     comp1(a, b) += sys.psi[k][a] * conj(sys.phi[k][b]);
                                     comp2(a, b) += sys.phi[k][a] * conj(sys.psi[k][b]);
                                 }
                             }
                         const auto id = QMatrix::identity(n);
                         worst = std::max({worst, frobenius_norm(gram - id), frobenius_norm(comp1 - id), frobenius_norm(comp2 - id),
                                           frobenius_norm(reconstruct(sys) - h) / frobenius_norm(h)});
                     }
                     return worst;
                 }});

    // -- two-level dynamics
    s.push_back({"dynamics.su2_commutation", 1e-15, [](Rng&) {
                     const auto j = j_operators();
                     return std::max({frobenius_norm(commutator(j[0], j[1]) + j[2]), frobenius_norm(commutator(j[1], j[2]) + j[0]),
                                      frobenius_norm(commutator(j[2], j[0]) + j[1])});
                 }});
    s.push_back({"dynamics.secular_metric", 1e-12, [](Rng& rng) {
                     double worst = 0;
                     for (int t = 0; t < 1000; ++t) {
                         const double a = random::uniform(rng, 0.5, 3.0);
                         const auto z = random::complex_in_disk(rng, 0.99 * a);
                         const auto h = hamiltonian(random::uniform(rng, -5, 5), random::complex_in_disk(rng, 5));
                         worst = std::max(worst, verify_pseudo_antihermitian(eta_model(a, z).eta, h));
                     }
                     return worst;
                 }});
    s.push_back({"dynamics.unitarity", 1e-9, [](Rng& rng) {
                     const auto tr = evolve(sample_chirp_config(10.0, 500, random::complex_in_disk(rng, 0.9)));
                     return *std::max_element(tr.unitarity_residual.begin(), tr.unitarity_residual.end());
                 }});
    s.push_back({"dynamics.eta_unitarity", 1e-9, [](Rng& rng) {
                     const auto tr = evolve(sample_chirp_config(10.0, 500, random::complex_in_disk(rng, 0.9)));
                     return *std::max_element(tr.eta_unitarity_residual.begin(), tr.eta_unitarity_residual.end());
                 }});
    s.push_back({"dynamics.ck_normalization", 1e-9, [](Rng& rng) {
                     const auto tr = evolve(sample_chirp_config(10.0, 500, random::complex_in_disk(rng, 0.9)));
                     double worst = 0;
                     for (std::size_t k = 0; k < tr.times.size(); ++k)
                         worst = std::max(worst, std::abs(std::norm(tr.ck.F[k]) + std::norm(tr.ck.G[k]) - 1));
                     return worst;
                 }});
    s.push_back({"dynamics.probability_difference", 1e-8, [](Rng& rng) {
                     const auto z = random::complex_in_disk(rng, 0.9);
                     const auto tr = evolve(sample_chirp_config(10.0, 500, z));
                     double worst = 0;
                     for (std::size_t k = 0; k < tr.times.size(); ++k) {
                         // matrix route: |<-| eta U |+>|^2 with a = 1
                         const auto m = eta_model(1.0, z);
                         const double via_matrix = inner(QVector::basis(2, 1), m.eta * tr.U[k] * QVector::basis(2, 0)).norm2();
                         worst = std::max({worst, std::abs(tr.p_eta[k] - tr.p_standard[k] - std::norm(z) * std::norm(tr.ck.F[k])),
                                           std::abs(via_matrix - tr.p_eta[k])});
                     }
                     return worst;
                 }});
    s.push_back({"dynamics.rabi_oracle", 1e-8, [](Rng& rng) {
                     ModelConfig cfg;
                     const double omega = random::uniform(rng, -3, 3);
                     const Complex rabi = random::complex_in_disk(rng, 2);
                     cfg.t_grid = uniform_grid(20.0, 400);
                     cfg.omega = Profile::constant(omega, 20.0);
                     cfg.rabi = Profile::constant(rabi, 20.0);
                     const auto tr = evolve(cfg);
                     double worst = 0;
                     for (std::size_t k = 0; k < tr.times.size(); ++k)
                         worst = std::max(worst, std::abs(tr.p_standard[k] - rabi_oracle(omega, rabi, tr.times[k])));
                     return worst;
                 }});
    s.push_back({"dynamics.quaternionic_consistency", 1e-10, [](Rng& rng) {
                     const auto tr = evolve(sample_chirp_config(5.0, 50, Complex{0.3, 0.1}));
                     double worst = 0;
                     for (const auto& u : tr.U) {
                         const auto psi = random::vector(rng, 2);
                         QVector alpha(2), beta(2);
                         for (std::size_t k = 0; k < 2; ++k) {
                             const auto [a, b] = split(psi[k]);
                             alpha[k] = Quaternion{a};
                             beta[k] = Quaternion{b};
                         }
                         const QVector whole = u * psi;
                         const QVector parts = u * alpha + (u * beta) * Quaternion::j();
                         worst = std::max(worst, (whole - parts).norm());
                     }
                     return worst;
                 }});
    // Diagonal elements computed directly from the spinorial J operators and
    // eta = [[1, jz], [-jz, 1]]. Both diagonal elements of eta J2 equal -jz/2.
    s.push_back({"dynamics.expectation_table", 1e-10, [](Rng& rng) {
                     double worst = 0;
                     const auto js = j_operators();
                     const auto plus = QVector::basis(2, 0), minus = QVector::basis(2, 1);
                     const auto i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
                     for (int t = 0; t < 100; ++t) {
                         const double omega = random::uniform(rng, -5, 5);
                         const Complex rabi = random::complex_in_disk(rng, 5);
                         const Quaternion z{random::complex_in_disk(rng, 0.99)};
                         const auto eta = eta_model(1.0, z.to_complex());
                         const auto h = hamiltonian(omega, rabi);
                         const Quaternion rq{rabi}, rqc{std::conj(rabi)};
                         auto d = [](Quaternion a, Quaternion b) { return (a - b).abs(); };
                         worst = std::max({worst,
                                           d(expectation(js[0], plus), {}), d(expectation(js[0], minus), {}),
                                           d(expectation(js[0], plus, &eta), k * z * -0.5), d(expectation(js[0], minus, &eta), k * z * 0.5),
                                           d(expectation(js[1], plus), {}), d(expectation(js[1], minus), {}),
                                           d(expectation(js[1], plus, &eta), j * z * -0.5), d(expectation(js[1], minus, &eta), j * z * -0.5),
                                           d(expectation(js[2], plus), i * 0.5), d(expectation(js[2], minus), i * -0.5),
                                           d(expectation(js[2], plus, &eta), i * 0.5), d(expectation(js[2], minus, &eta), i * -0.5),
                                           d(expectation(h, plus), i * (omega / 2)), d(expectation(h, minus), i * (-omega / 2)),
                                           d(expectation(h, plus, &eta), i * (omega / 2) - k * z * rq),
                                           d(expectation(h, minus, &eta), i * (-omega / 2) + k * z * rqc)});
                     }
                     return worst;
                 }});
    return s;
}

/// Worker count from QUATMETRIC_THREADS, defaulting to the hardware count.
inline unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QUATMETRIC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

/// Runs every invariant with an independent generator derived from (seed,
/// index), so results do not depend on scheduling. A tolerance override
/// replaces every invariant's tolerance.
inline std::vector<InvariantResult> run_invariants(std::uint64_t seed, std::optional<double> tol_override = {},
                                                   unsigned threads = thread_budget()) {
    const auto suite = invariant_suite();
    std::vector<InvariantResult> out(suite.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < suite.size();) {
            std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                             static_cast<std::uint32_t>(k)};
            random::Rng rng(sq);
            const double tol = tol_override.value_or(suite[k].tolerance);
            double r;
            try {
                r = suite[k].measure(rng);
            } catch (const std::exception&) {
                r = std::numeric_limits<double>::infinity();
            }
            out[k] = {suite[k].name, r, tol, r <= tol};
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace quatmetric
