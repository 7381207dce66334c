#include <catch2/catch_amalgamated.hpp>

#include "quatmetric/dynamics.hpp"
#include "quatmetric/qmatrix.hpp"
#include "quatmetric/random.hpp"

using namespace quatmetric;
using Catch::Matchers::WithinAbs;

TEST_CASE("spinorial commutator and identity product") {
    const auto j = j_operators();
    CHECK(frobenius_norm(j[0] * j[1] - j[1] * j[0] + j[2]) <= 1e-15);
    random::Rng rng(2);
    const auto a = random::matrix(rng, 3, 3);
    CHECK(a * QMatrix::identity(3) == a);
    CHECK_THROWS_AS(random::matrix(rng, 2, 3) * random::matrix(rng, 2, 3), DimensionMismatch);
}

TEST_CASE("adjoint") {
    const auto j = j_operators();
    CHECK(adjoint(j[2]) == -j[2]);
    const Quaternion jz = Quaternion::j() * Quaternion{Complex{0.4, -0.2}};
    const QMatrix eta{{Quaternion{1}, jz}, {-jz, Quaternion{1}}};
    CHECK(adjoint(eta) == eta);

    random::Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto a = random::matrix(rng, 4, 4), b = random::matrix(rng, 4, 4);
        CHECK(adjoint(adjoint(a)) == a);
        // entry-wise oracle: (AB)^dagger_{rc} = conj((AB)_{cr})
        const QMatrix ab = a * b;
        QMatrix expect(4, 4);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) expect(r, c) = conj(ab(c, r));
        CHECK(frobenius_norm(adjoint(ab) - expect) == 0.0);
        CHECK(frobenius_norm(expect - adjoint(b) * adjoint(a)) <= 1e-12 * frobenius_norm(a) * frobenius_norm(b));
    }
}

TEST_CASE("symplectic embedding") {
    const SymplecticImage cj = embed(QMatrix{{Quaternion::j()}});
    CHECK(cj(0, 0) == Complex{0});
    CHECK(cj(0, 1) == Complex{1});
    CHECK(cj(1, 0) == Complex{-1});
    CHECK(cj(1, 1) == Complex{0});

    // complex H: B = 0, so the image is diag(H, conj(H))
    const Eigen::Matrix2cd hc = hamiltonian_complex(0.7, Complex{0.3, -1.1});
    const SymplecticImage ch = embed(hamiltonian(0.7, Complex{0.3, -1.1}));
    CHECK((ch.topLeftCorner(2, 2) - hc).norm() == 0.0);
    CHECK((ch.bottomRightCorner(2, 2) - hc.conjugate()).norm() == 0.0);
    CHECK(ch.topRightCorner(2, 2).norm() == 0.0);
    CHECK(ch.bottomLeftCorner(2, 2).norm() == 0.0);

    random::Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto m = random::matrix(rng, 3, 3), n = random::matrix(rng, 3, 3);
        CHECK(lift(embed(m)) == m);
        CHECK((embed(m * n) - embed(m) * embed(n)).norm() <= 1e-12 * frobenius_norm(m) * frobenius_norm(n));
        CHECK((embed(adjoint(m)) - embed(m).adjoint()).norm() <= 1e-12);
        CHECK_THAT(embed(m).squaredNorm(), WithinAbs(2 * std::pow(frobenius_norm(m), 2), 1e-10));
        const auto v = random::vector(rng, 3);
        CHECK((embed(m * v) - embed(m) * embed(v)).norm() <= 1e-12 * frobenius_norm(m) * v.norm());
    }

    SymplecticImage bad = embed(random::matrix(rng, 2, 2));
    bad(3, 3) += 1.0;
    CHECK_THROWS_AS(lift(bad), NotSymplecticBlockForm);
    CHECK_THROWS_AS(lift(Eigen::MatrixXcd::Zero(3, 2)), NotSymplecticBlockForm);
}

TEST_CASE("inner product is sesquilinear and M^dagger is its adjoint") {
    random::Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const auto m = random::matrix(rng, 4, 4);
        const auto u = random::vector(rng, 4), v = random::vector(rng, 4);
        const auto l = random::quaternion(rng);
        CHECK((inner(u, m * v) - inner(adjoint(m) * u, v)).abs() <= 1e-11 * frobenius_norm(m) * u.norm() * v.norm());
        CHECK((inner(u, v * l) - inner(u, v) * l).abs() <= 1e-12 * u.norm() * v.norm() * l.abs());
        CHECK((inner(u * l, v) - conj(l) * inner(u, v)).abs() <= 1e-12 * u.norm() * v.norm() * l.abs());
        CHECK(((m * (v * l)) - (m * v) * l).norm() <= 1e-12 * frobenius_norm(m) * v.norm() * l.abs());
        const Quaternion vv = inner(v, v);
        CHECK(vv.w >= 0);
        CHECK(vv.imag().abs() <= 1e-14);
    }
}

TEST_CASE("matrix inverse") {
    CHECK(inverse(QMatrix::identity(3)) == QMatrix::identity(3));
    const QMatrix d = QMatrix::diagonal({Quaternion::i(), Quaternion::j()});
    CHECK(frobenius_norm(inverse(d) - QMatrix::diagonal({-Quaternion::i(), -Quaternion::j()})) <= 1e-15);

    // eta of the two-level model with a = 2, z = 1: eta^-1 = (a 1 - N)/(a^2 - |z|^2)
    const MetricOperator eta = eta_model(2.0, Complex{1.0});
    const QMatrix n = eta.eta - QMatrix::identity(2) * 2.0;
    const QMatrix expect = (QMatrix::identity(2) * 2.0 - n) * (1.0 / 3.0);
    CHECK(frobenius_norm(inverse(eta.eta) - expect) <= 1e-14);
    CHECK(frobenius_norm(eta.eta * inverse(eta.eta) - QMatrix::identity(2)) <= 1e-14);

    CHECK_THROWS_AS(inverse(QMatrix{{Quaternion{1}, Quaternion{2}}, {Quaternion{2}, Quaternion{4}}}), Singular);
    CHECK_THROWS_AS(inverse(QMatrix(2, 3)), DimensionMismatch);

    random::Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto m = random::invertible(rng, 4);
        CHECK(frobenius_norm(m * inverse(m) - QMatrix::identity(4)) <= 1e-10 / inverse_condition(m));
    }
}

TEST_CASE("classify") {
    CHECK(classify(hamiltonian(0.8, Complex{1.2, -0.4}), 1e-12) == Symmetry::AntiHermitian);
    CHECK(classify(eta_model(1.0, Complex{0.3, 0.2}).eta, 1e-12) == Symmetry::Hermitian);
    CHECK(classify(QMatrix(2, 2), 1e-12) == Symmetry::Hermitian);
    CHECK(classify(QMatrix{{Quaternion{1}, Quaternion{1}}, {Quaternion{0}, Quaternion{1}}}, 1e-12) == Symmetry::Neither);
    CHECK_THROWS_AS(classify(QMatrix(2, 3), 1e-12), DimensionMismatch);
}

TEST_CASE("hermitian eigenvalues come from the doubled image spectrum") {
    const auto ev = hermitian_eigenvalues(eta_model(1.0, Complex{0.6}).eta);
    REQUIRE(ev.size() == 2);
    CHECK_THAT(ev[0], WithinAbs(0.4, 1e-14));
    CHECK_THAT(ev[1], WithinAbs(1.6, 1e-14));
}
