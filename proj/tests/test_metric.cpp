#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "quatmetric/dynamics.hpp"
#include "quatmetric/metric.hpp"
#include "quatmetric/random.hpp"

using namespace quatmetric;
using Catch::Matchers::WithinAbs;

namespace {

// Secular metric pattern: equal real diagonal, (0,1) entry in the j,k plane, (1,0) = -(0,1).
double secular_pattern_defect(const QMatrix& eta) {
    const Quaternion d0 = eta(0, 0), d1 = eta(1, 1), off = eta(0, 1);
    return (d0 - d1).abs() + d0.imag().abs() + std::abs(off.w) + std::abs(off.x) + (eta(1, 0) + off).abs();
}

std::vector<QMatrix> spinorial_family() {
    return {hamiltonian(0.7, Complex{1.3, 0.0}), hamiltonian(-1.1, Complex{0.0, 0.9}), hamiltonian(2.0, Complex{-0.4, 0.5})};
}

}  // namespace

TEST_CASE("verify_pseudo_antihermitian") {
    const auto h = hamiltonian(1.3, Complex{0.2, -0.7});
    CHECK(verify_pseudo_antihermitian(eta_model(1.0, Complex{0.4, 0.3}).eta, h) <= 1e-12);
    CHECK(verify_pseudo_antihermitian(QMatrix::identity(2), h) <= 1e-12);

    random::Rng rng(31);
    CHECK(verify_pseudo_antihermitian(QMatrix::identity(3), random::antihermitian(rng, 3)) <= 1e-12);

    // Hermitian H = 1: |2 * 1|_F / (|1|_F |1|_F) = 2 sqrt(2) / 2 = sqrt(2)
    CHECK_THAT(verify_pseudo_antihermitian(QMatrix::identity(2), QMatrix::identity(2)), WithinAbs(std::sqrt(2.0), 1e-15));

    CHECK_THROWS_AS(verify_pseudo_antihermitian(QMatrix(2, 2), h), Singular);
    CHECK_THROWS_AS(verify_pseudo_antihermitian(QMatrix::identity(3), h), DimensionMismatch);
}

TEST_CASE("build_metric on anti-Hermitian input") {
    const auto h = hamiltonian(0.9, Complex{0.5, 0.5});
    const auto m = build_metric(h);
    CHECK(m.positive);
    CHECK(verify_pseudo_antihermitian(m.eta, h) <= 1e-8);
    REQUIRE(m.factor);
    CHECK(frobenius_norm(m.eta - adjoint(*m.factor) * *m.factor) <= 1e-9 * frobenius_norm(m.eta));
    CHECK(classify(m.eta, 1e-11) == Symmetry::Hermitian);
}

TEST_CASE("build_metric on a similarity transform of diag(i, 2i)") {
    random::Rng rng(32);
    const auto t = random::invertible(rng, 2);
    const auto h = t * QMatrix::diagonal({Quaternion::i(), Quaternion::i() * 2.0}) * inverse(t);
    const auto m = build_metric(h);
    CHECK(verify_pseudo_antihermitian(m.eta, h) <= 1e-8);
    CHECK(m.positive);
    CHECK(hermitian_eigenvalues(m.eta).front() > 0);
}

TEST_CASE("build_metric rejects the nilpotent block and real spectra") {
    const QMatrix nil{{Quaternion{0}, Quaternion{1}}, {Quaternion{0}, Quaternion{0}}};
    try {
        build_metric(nil);
        FAIL("expected NotQuasiAntiHermitian");
    } catch (const NotQuasiAntiHermitian& e) {
        CHECK(e.reason == QuasiAntiHermitianFailure::NonDiagonalizable);
    }
    try {
        build_metric(QMatrix::diagonal({Quaternion{0.1, 1, 0, 0}, Quaternion::j()}));
        FAIL("expected NotQuasiAntiHermitian");
    } catch (const NotQuasiAntiHermitian& e) {
        CHECK(e.reason == QuasiAntiHermitianFailure::RealSpectrumPart);
    }
}

TEST_CASE("build_metric round trip on random instances") {
    random::Rng rng(33);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const auto h = random::quasi_antihermitian(rng, n, t % 5 == 0);
        const auto m = build_metric(h);
        CHECK(m.positive);
        CHECK(verify_pseudo_antihermitian(m.eta, h) <= 1e-8);
    }
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const bool jordan = t % 2 == 0;
        const auto h = jordan ? random::with_jordan_block(rng, n) : random::with_real_spectral_part(rng, n);
        const auto want = jordan ? QuasiAntiHermitianFailure::NonDiagonalizable : QuasiAntiHermitianFailure::RealSpectrumPart;
        try {
            build_metric(h);
            FAIL("expected NotQuasiAntiHermitian");
        } catch (const NotQuasiAntiHermitian& e) {
            CHECK(e.reason == want);
        }
    }
}

TEST_CASE("metric solution space of the spinorial family is the secular metric family") {
    const auto fam = spinorial_family();
    const auto space = metric_solution_space(fam, 2);
    REQUIRE(space.dim == 3);
    CHECK(space.max_residual <= 1e-9);
    for (const auto& b : space.basis) CHECK(secular_pattern_defect(b) <= 1e-9);
    REQUIRE(space.positive_element);
    CHECK(make_metric(*space.positive_element).positive);
    CHECK(space.positive_span_dim == 3);

    const auto complex_space = metric_solution_space(fam, 2, Field::Complex);
    CHECK(complex_space.dim == 1);
    CHECK(complex_space.positive_span_dim == 1);
}

TEST_CASE("metric solution space small cases") {
    // diag(i, 2i): by hand, eta = [[p, q], [conj q, r]] forces q = 0; p, r real.
    const QMatrix d[] = {QMatrix::diagonal({Quaternion::i(), Quaternion::i() * 2.0})};
    const auto space = metric_solution_space(d, 2);
    CHECK(space.dim == 2);
    for (const auto& b : space.basis) {
        CHECK(b(0, 1).abs() <= 1e-12);
        CHECK(b(0, 0).imag().abs() + b(1, 1).imag().abs() <= 1e-12);
    }
    CHECK(space.positive_span_dim == 2);

    for (std::size_t n = 1; n <= 4; ++n) CHECK(metric_solution_space({}, n).dim == 2 * n * n - n);
    CHECK(metric_solution_space({}, 3, Field::Complex).dim == 9);
}

TEST_CASE("commutant") {
    const auto js = j_operators();
    const auto c = commutant(js, 2);
    CHECK(c.full_dim == 4);
    CHECK(c.hermitian_dim == 3);
    for (const auto& t : c.full_basis)
        for (const auto& h : js) CHECK(frobenius_norm(t * h - h * t) <= 1e-9 * frobenius_norm(t) * frobenius_norm(h));
    for (std::size_t a = 0; a < c.full_basis.size(); ++a)
        for (std::size_t b = 0; b < c.full_basis.size(); ++b)
            CHECK_THAT(real_trace_inner(c.full_basis[a], c.full_basis[b]), WithinAbs(a == b ? 1.0 : 0.0, 1e-12));
    for (const auto& h : c.hermitian_basis) CHECK(secular_pattern_defect(h) <= 1e-9);

    // diag(i, 2j): no off-diagonal intertwiner since i and 2j are not similar;
    // T = diag(alpha, beta) with alpha in span{1,i}, beta in span{1,j}.
    const QMatrix dij[] = {QMatrix::diagonal({Quaternion::i(), Quaternion::j() * 2.0})};
    const auto cd = commutant(dij, 2);
    CHECK(cd.full_dim == 4);
    for (const auto& t : cd.full_basis) {
        CHECK(t(0, 1).abs() + t(1, 0).abs() <= 1e-12);
        CHECK(std::abs(t(0, 0).y) + std::abs(t(0, 0).z) <= 1e-12);
        CHECK(std::abs(t(1, 1).x) + std::abs(t(1, 1).z) <= 1e-12);
    }

    const QMatrix zero[] = {QMatrix(3, 3)};
    CHECK(commutant(zero, 3).full_dim == 36);

    // diag(i, j): i and j are similar, so each off-diagonal slot adds {u : i u = u j}, dim 2.
    const QMatrix sim[] = {QMatrix::diagonal({Quaternion::i(), Quaternion::j()})};
    CHECK(commutant(sim, 2).full_dim == 8);
}

TEST_CASE("irreducibility") {
    const auto js = j_operators();
    const auto complex_verdict = is_irreducible(js, 2, Field::Complex);
    CHECK(complex_verdict.irreducible);
    REQUIRE(complex_verdict.certificate.size() == 1);
    CHECK(frobenius_norm(complex_verdict.certificate[0] - QMatrix::identity(2) * (1 / std::sqrt(2.0))) <= 1e-12);

    const auto quat_verdict = is_irreducible(js, 2, Field::Quaternion);
    CHECK_FALSE(quat_verdict.irreducible);
    CHECK(quat_verdict.certificate.size() == 3);

    for (std::size_t n = 2; n <= 4; ++n) {
        const QMatrix ii[] = {QMatrix::identity(n) * Quaternion::i()};
        CHECK_FALSE(is_irreducible(ii, n).irreducible);
    }
}

TEST_CASE("uniqueness iff irreducibility on random families") {
    random::Rng rng(34);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
        const std::vector<QMatrix> irr = {random::antihermitian(rng, n), random::antihermitian(rng, n)};
        CHECK(is_irreducible(irr, n).irreducible);
        CHECK(metric_solution_space(irr, n).positive_span_dim == 1);

        // block-diagonal direct sum
        std::vector<QMatrix> red;
        for (int k = 0; k < 2; ++k) {
            QMatrix b(n + 1, n + 1);
            const auto top = random::antihermitian(rng, n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) b(r, c) = top(r, c);
            b(n, n) = random::imaginary_unit(rng);
            red.push_back(b);
        }
        CHECK_FALSE(is_irreducible(red, n + 1).irreducible);
        CHECK(metric_solution_space(red, n + 1).positive_span_dim >= 2);
    }
}

TEST_CASE("eta inner product is a valid inner product") {
    random::Rng rng(35);
    const auto space = metric_solution_space(spinorial_family(), 2, Field::Quaternion, 1);
    REQUIRE(space.positive_element);
    const QMatrix& eta = *space.positive_element;
    for (int t = 0; t < 1000; ++t) {
        const auto u = random::vector(rng, 2), v = random::vector(rng, 2);
        CHECK((eta_inner(u, eta, v) - conj(eta_inner(v, eta, u))).abs() <= 1e-11 * u.norm() * v.norm());
        CHECK(eta_inner(v, eta, v).w > 0);
    }
}

TEST_CASE("biorthonormal system") {
    SECTION("diagonal two-level Hamiltonian") {
        // The +i/2 eigenvector of diag(i/2, -i/2) in the second slot is e2 j, not e2.
        const auto sys = biorthonormal(hamiltonian(1.0, Complex{}));
        CHECK(sys.energies == std::vector<double>{0.5});
        CHECK(sys.degeneracies == std::vector<std::size_t>{2});
        CHECK((sys.psi[0] - QVector::basis(2, 0)).norm() <= 1e-12);
        CHECK(sys.psi[1][0].abs() <= 1e-12);
        CHECK((sys.psi[1][1] - Quaternion::j()).abs() <= 1e-12);
        for (std::size_t k = 0; k < 2; ++k) CHECK((sys.phi[k] - sys.psi[k]).norm() <= 1e-12);
    }
    SECTION("diag(i, 3i)") {
        const auto sys = biorthonormal(QMatrix::diagonal({Quaternion::i(), Quaternion::i() * 3.0}));
        CHECK(sys.energies.size() == 2);
        CHECK_THAT(sys.energies[0], WithinAbs(1.0, 1e-14));
        CHECK_THAT(sys.energies[1], WithinAbs(3.0, 1e-14));
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK((sys.psi[k] - QVector::basis(2, k)).norm() <= 1e-12);
            CHECK((sys.phi[k] - QVector::basis(2, k)).norm() <= 1e-12);
        }
    }
    SECTION("random quasianti-Hermitian") {
        random::Rng rng(36);
        for (int t = 0; t < 30; ++t) {
            const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
            const auto h = random::quasi_antihermitian(rng, n, t % 3 == 0);
            const auto sys = biorthonormal(h);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    CHECK((inner(sys.phi[a], sys.psi[b]) - Quaternion{a == b ? 1.0 : 0.0}).abs() <= 1e-9);
            CHECK(frobenius_norm(reconstruct(sys) - h) <= 1e-8 * frobenius_norm(h));
            for (double e : sys.energies) CHECK(e >= 0);
        }
    }
    CHECK_THROWS_AS(biorthonormal(QMatrix{{Quaternion{0}, Quaternion{1}}, {Quaternion{0}, Quaternion{0}}}),
                    NotQuasiAntiHermitian);
}
