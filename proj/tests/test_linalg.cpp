#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dtsesn/linalg.hpp"
#include "dtsesn/rng.hpp"
#include "oracles.hpp"

using dtsesn::Matrix;
using dtsesn::Vector;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
    dtsesn::Rng rng(seed);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.symmetric();
    return m;
}

}  // namespace

TEST_CASE("eigenvalue moduli of the identity") {
    const auto mods = dtsesn::eigenvalue_moduli(Matrix::Identity(3, 3));
    REQUIRE(mods.size() == 3);
    for (double m : mods) REQUIRE(m == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue moduli of a rotation") {
    Matrix rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;  // eigenvalues +-i
    const auto mods = dtsesn::eigenvalue_moduli(rot);
    REQUIRE(mods.size() == 2);
    REQUIRE(mods[0] == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(mods[1] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue moduli input validation") {
    REQUIRE_THROWS_AS(dtsesn::eigenvalue_moduli(Matrix::Zero(2, 3)), dtsesn::DimensionError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(dtsesn::eigenvalue_moduli(bad), dtsesn::PreconditionError);
}

TEST_CASE("eigenvalue moduli match characteristic-polynomial roots on 4x4 matrices") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        const Matrix m = random_matrix(4, 4, seed);
        const auto mods = dtsesn::eigenvalue_moduli(m);
        const auto oracle = oracles::moduli_of_roots(
            oracles::polynomial_roots(oracles::char_poly_coeffs(m)));
        REQUIRE(mods.size() == oracle.size());
        for (std::size_t i = 0; i < mods.size(); ++i)
            REQUIRE(mods[i] == Catch::Approx(oracle[i]).epsilon(1e-8).margin(1e-10));
    }
}

TEST_CASE("moduli scale linearly with the matrix") {
    const Matrix m = random_matrix(6, 6, 21);
    const auto base = dtsesn::eigenvalue_moduli(m);
    for (double c : {2.5, -0.7, 0.0}) {
        const auto scaled = dtsesn::eigenvalue_moduli((c * m).eval());
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double expected = std::abs(c) * base[i];
            REQUIRE(scaled[i] == Catch::Approx(expected).epsilon(1e-10).margin(1e-12));
        }
    }
}

TEST_CASE("spectral radius basics") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = -2.0;
    REQUIRE(dtsesn::spectral_radius(d) == 2.0);
    REQUIRE(dtsesn::spectral_radius(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("spectral radius agrees with the full spectrum on a sparse-pattern matrix") {
    dtsesn::Rng rng(77);
    Matrix m = Matrix::Zero(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            if (rng.uniform01() < 0.1) m(i, j) = rng.symmetric();
    const auto mods = dtsesn::eigenvalue_moduli(m);
    REQUIRE(dtsesn::spectral_radius(m) == Catch::Approx(mods.front()).epsilon(1e-8));
}

TEST_CASE("ridge with beta 0 on a square invertible design reproduces targets") {
    Matrix s(3, 3);
    s << 2, 1, 0, 0, 3, 1, 1, 0, 2;
    const Matrix d = random_matrix(3, 2, 31);
    const Matrix w = dtsesn::ridge_solve(s, d, 0.0);
    REQUIRE(w.rows() == 2);
    REQUIRE(w.cols() == 3);
    REQUIRE(((s * w.transpose()) - d).norm() <= 1e-8 * d.norm());
}

TEST_CASE("ridge with zero targets is zero") {
    const Matrix s = random_matrix(10, 4, 32);
    for (double beta : {0.0, 0.5}) {
        const Matrix w = dtsesn::ridge_solve(s, Matrix::Zero(10, 2), beta);
        REQUIRE(w.norm() == 0.0);
    }
}

TEST_CASE("ridge matches a hand-computed two-column solution") {
    Matrix s(3, 2);
    s << 1.0, 0.5, -0.25, 2.0, 0.75, -1.5;
    Matrix d(3, 1);
    d << 0.3, -1.1, 0.7;
    const auto w_hand = oracles::ridge_2col(s, d, 0.1);
    const Matrix w = dtsesn::ridge_solve(s, d, 0.1);
    REQUIRE(w(0, 0) == Catch::Approx(w_hand[0]).epsilon(1e-8));
    REQUIRE(w(0, 1) == Catch::Approx(w_hand[1]).epsilon(1e-8));
}

TEST_CASE("ridge satisfies the normal-equation stationarity condition") {
    for (std::uint64_t seed : {41u, 42u, 43u}) {
        const Matrix s = random_matrix(30, 7, seed);
        const Matrix d = random_matrix(30, 3, seed + 100);
        const double beta = 1e-3;
        const Matrix w = dtsesn::ridge_solve(s, d, beta);
        Matrix gram = s.transpose() * s;
        gram.diagonal().array() += beta;
        const Matrix residual = w * gram - d.transpose() * s;
        REQUIRE(residual.norm() <= 1e-8 * (d.transpose() * s).norm());
    }
}

TEST_CASE("ridge norm shrinks as beta grows") {
    const Matrix s = random_matrix(25, 6, 51);
    const Matrix d = random_matrix(25, 2, 52);
    double prev = std::numeric_limits<double>::infinity();
    for (double beta : {0.0, 1e-4, 1e-2, 1.0, 100.0}) {
        const double norm = dtsesn::ridge_solve(s, d, beta).norm();
        REQUIRE(norm <= prev + 1e-12);
        prev = norm;
    }
}

TEST_CASE("ridge rejects a rank-deficient design without regularization") {
    Matrix s(4, 2);
    s.col(0) << 1, 2, 3, 4;
    s.col(1) = 2.0 * s.col(0);  // duplicate direction
    const Matrix d = random_matrix(4, 1, 61);
    REQUIRE_THROWS_AS(dtsesn::ridge_solve(s, d, 0.0), dtsesn::SingularityError);
    REQUIRE_NOTHROW(dtsesn::ridge_solve(s, d, 1e-6));
}

TEST_CASE("ridge precondition checks") {
    const Matrix s = random_matrix(3, 2, 71);
    REQUIRE_THROWS_AS(dtsesn::ridge_solve(s, random_matrix(4, 1, 72), 0.1),
                      dtsesn::DimensionError);
    REQUIRE_THROWS_AS(dtsesn::ridge_solve(s, random_matrix(3, 1, 73), -1.0),
                      dtsesn::PreconditionError);
}
