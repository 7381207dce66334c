#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracles.hpp"
#include "quatmetric/dynamics.hpp"
#include "quatmetric/random.hpp"
#include "quatmetric/spectral.hpp"

using namespace quatmetric;
using Catch::Matchers::WithinAbs;

namespace {

double eigen_residual(const QMatrix& h, const RightSpectrum& sp) {
    return frobenius_norm(h * sp.S - sp.S * sp.D) / std::max(frobenius_norm(h), 1e-300);
}

}  // namespace

TEST_CASE("J3 collapses +-i/2 into one class") {
    const auto sp = right_eigen(j_operators()[2]);
    REQUIRE(sp.eigenvalues.size() == 2);
    for (const auto& l : sp.eigenvalues) {
        CHECK_THAT(l.real(), WithinAbs(0.0, 1e-14));
        CHECK_THAT(l.imag(), WithinAbs(0.5, 1e-14));
    }
    CHECK(sp.diagonalizable);
    CHECK(sp.classes[0] == sp.classes[1]);
    CHECK(eigen_residual(j_operators()[2], sp) <= 1e-9);
    CHECK(eigenvalue_moduli(sp) == std::vector<double>{sp.eigenvalues[0].imag(), sp.eigenvalues[1].imag()});
}

TEST_CASE("two-level Hamiltonian spectra against the characteristic polynomial") {
    // omega = 1, Omega = 0
    const auto sp0 = right_eigen(hamiltonian(1.0, Complex{}));
    for (const auto& l : sp0.eigenvalues) CHECK(std::abs(l - Complex{0, 0.5}) <= 1e-14);

    random::Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        const double omega = random::uniform(rng, -5, 5);
        const Complex rabi = random::complex_in_disk(rng, 5);
        const Eigen::Matrix2cd hc = hamiltonian_complex(omega, rabi);
        const auto [l1, l2] = oracle::eig2(hc(0, 0), hc(0, 1), hc(1, 0), hc(1, 1));
        const auto sp = right_eigen(hamiltonian(omega, rabi));
        const auto moduli = eigenvalue_moduli(sp);
        const double lambda = std::sqrt(omega * omega / 4 + std::norm(rabi));
        CHECK_THAT(moduli[0], WithinAbs(std::abs(l1), 1e-12));
        CHECK_THAT(moduli[1], WithinAbs(std::abs(l2), 1e-12));
        CHECK_THAT(moduli[0], WithinAbs(lambda, 1e-12));
        CHECK(std::abs(sp.eigenvalues[0] - oracle::fold(l1)) <= 1e-12);
        CHECK(is_imaginary_spectrum(sp, 1e-12));
        CHECK(sp.diagonalizable);
    }
}

TEST_CASE("complex matrix: right eigenvalues are folded complex eigenvalues") {
    random::Rng rng(22);
    for (int t = 0; t < 30; ++t) {
        Eigen::Matrix2cd c = Eigen::Matrix2cd::Random();
        const auto [l1, l2] = oracle::eig2(c(0, 0), c(0, 1), c(1, 0), c(1, 1));
        auto expect = std::vector<Complex>{oracle::fold(l1), oracle::fold(l2)};
        const auto sp = right_eigen(QMatrix::from_complex(c));
        auto got = sp.eigenvalues;
        auto key = [](Complex a, Complex b) { return std::abs(a) < std::abs(b); };
        std::sort(expect.begin(), expect.end(), key);
        std::sort(got.begin(), got.end(), key);
        for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(got[k] - expect[k]) <= 1e-12);
    }
}

TEST_CASE("real diagonal") {
    const auto sp = right_eigen(QMatrix::diagonal({Quaternion{1}, Quaternion{2}}));
    CHECK(sp.eigenvalues == std::vector<Complex>{Complex{1}, Complex{2}});
    CHECK(sp.diagonalizable);
    for (std::size_t k = 0; k < 2; ++k) CHECK((sp.S.column(k) - QVector::basis(2, k)).norm() <= 1e-14);
    CHECK_FALSE(is_imaginary_spectrum(sp, 1e-9));
}

TEST_CASE("mixed real/imaginary diagonal is not imaginary") {
    CHECK_FALSE(is_imaginary_spectrum(right_eigen(QMatrix::diagonal({Quaternion{1}, Quaternion::i()})), 1e-9));
}

TEST_CASE("similar to diag(i, 2i) has imaginary spectrum") {
    random::Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const auto s = random::invertible(rng, 2);
        const auto h = s * QMatrix::diagonal({Quaternion::i(), Quaternion::i() * 2.0}) * inverse(s);
        const auto sp = right_eigen(h);
        CHECK(is_imaginary_spectrum(sp, 1e-9));
        CHECK(sp.diagonalizable);
        CHECK(eigen_residual(h, sp) <= 1e-9);
        const auto m = eigenvalue_moduli(sp);
        CHECK_THAT(m[0], WithinAbs(1.0, 1e-10));
        CHECK_THAT(m[1], WithinAbs(2.0, 1e-10));
    }
}

TEST_CASE("zero matrix and Jordan block") {
    const auto z = right_eigen(QMatrix(2, 2));
    CHECK(eigenvalue_moduli(z) == std::vector<double>{0.0, 0.0});
    CHECK(z.diagonalizable);

    const auto nil = right_eigen(QMatrix{{Quaternion{0}, Quaternion{1}}, {Quaternion{0}, Quaternion{0}}});
    CHECK_FALSE(nil.diagonalizable);
    CHECK(nil.eigenvalues.size() == 2);

    random::Rng rng(24);
    for (int t = 0; t < 20; ++t) CHECK_FALSE(right_eigen(random::with_jordan_block(rng, 3)).diagonalizable);
}

TEST_CASE("degenerate real eigenvalue picks a quaternionic basis") {
    random::Rng rng(25);
    const auto s = random::invertible(rng, 3);
    const auto h = s * QMatrix::diagonal({Quaternion{2}, Quaternion{2}, Quaternion::j()}) * inverse(s);
    const auto sp = right_eigen(h);
    CHECK(sp.diagonalizable);
    CHECK(eigen_residual(h, sp) <= 1e-9);
}

TEST_CASE("spectral invariants on random matrices") {
    random::Rng rng(26);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const auto h = random::matrix(rng, n, n);
        const auto sp = right_eigen(h);
        REQUIRE(sp.eigenvalues.size() == n);
        CHECK(sp.diagonalizable);
        CHECK(eigen_residual(h, sp) <= 1e-9);
        for (const auto& l : sp.eigenvalues) CHECK(l.imag() >= 0);
        for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(sp.eigenvalues[k - 1]) <= std::abs(sp.eigenvalues[k]) + 1e-15);

        // similarity invariance of (Re l, |Im l|)
        const auto tm = random::invertible(rng, n);
        const auto sp2 = right_eigen(tm * h * inverse(tm));
        auto ka = sp.eigenvalues, kb = sp2.eigenvalues;
        auto key = [](Complex x, Complex y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
        std::sort(ka.begin(), ka.end(), key);
        std::sort(kb.begin(), kb.end(), key);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(ka[k] - kb[k]) <= 1e-7 * frobenius_norm(h));

        // anti-Hermitian input: imaginary spectrum, diagonalizable
        const auto ah = right_eigen(random::antihermitian(rng, n));
        CHECK(ah.diagonalizable);
        CHECK(is_imaginary_spectrum(ah, 1e-9));
    }
}

TEST_CASE("right_eigen rejects non-square input") {
    CHECK_THROWS_AS(right_eigen(QMatrix(2, 3)), DimensionMismatch);
}
