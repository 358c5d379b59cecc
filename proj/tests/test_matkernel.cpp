#include <doctest.h>

#include "cfma/matkernel.hpp"
#include "cfma/polynomial.hpp"
#include "support.hpp"

using namespace cfma;
using testing_support::Rand;

TEST_CASE("cholesky of a diagonal matrix")
{
    const Matrix k = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    const Matrix b = cholesky(k);
    CHECK(b(0, 0) == doctest::Approx(2.0));
    CHECK(b(1, 1) == doctest::Approx(3.0));
    CHECK(b(0, 1) == 0.0);
    CHECK(b(1, 0) == 0.0);
}

TEST_CASE("cholesky of a rank-one matrix keeps the zero column last")
{
    Matrix k(2, 2);
    k << 1.0, 2.0, 2.0, 4.0;
    const Matrix b = cholesky(k);
    CHECK(b(0, 0) == doctest::Approx(1.0));
    CHECK(b(1, 0) == doctest::Approx(2.0));
    CHECK(b.col(1).norm() == doctest::Approx(0.0));
    CHECK((b * b.transpose() - k).norm() < 1e-12);
}

TEST_CASE("cholesky of the zero matrix")
{
    const Matrix b = cholesky(Matrix::Zero(3, 3));
    CHECK(b.norm() == 0.0);
}

TEST_CASE("cholesky rejects indefinite and asymmetric input")
{
    Matrix k(2, 2);
    k << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(cholesky(k), Error);
    try {
        cholesky(k);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_psd);
    }
    Matrix asym(2, 2);
    asym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(cholesky(asym), Error);
}

TEST_CASE("cholesky with a leading zero pivot still factors the matrix")
{
    const Matrix k = Eigen::Vector3d(0.0, 2.0, 5.0).asDiagonal();
    const Matrix b = cholesky(k);
    CHECK((b * b.transpose() - k).norm() < 1e-12);
    const Matrix p = pivoted_cholesky(k);
    CHECK((p * p.transpose() - k).norm() < 1e-12);
}

TEST_CASE("cholesky reconstructs random PSD matrices of every rank")
{
    Rand rng(1);
    for (int n = 0; n < 1000; ++n) {
        const int dim = rng.integer(1, 5);
        const int rank = rng.integer(0, dim);
        const Matrix k = rng.psd(dim, rank, rng.uniform(0.1, 100.0));
        const Matrix b = cholesky(k);
        CAPTURE(n);
        REQUIRE((b * b.transpose() - k).norm() <= 1e-8 * std::max(1.0, k.norm()));
    }
}

TEST_CASE("full-rank cholesky is lower triangular with positive diagonal")
{
    Rand rng(2);
    for (int n = 0; n < 200; ++n) {
        const int dim = rng.integer(1, 5);
        const Matrix k = rng.psd(dim, dim, 10.0) + 0.1 * Matrix::Identity(dim, dim);
        const Matrix b = cholesky(k);
        for (int i = 0; i < dim; ++i) {
            CHECK(b(i, i) > 0.0);
            for (int j = i + 1; j < dim; ++j)
                CHECK(b(i, j) == 0.0);
        }
    }
}

TEST_CASE("determinant examples")
{
    CHECK(det(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
    Matrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    CHECK(det(m) == doctest::Approx(-2.0));
    Matrix singular(3, 3);
    singular << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    CHECK(std::abs(det(singular)) < 1e-12);
    CHECK(det(Matrix(0, 0)) == 1.0);
    CHECK_THROWS_AS(det(Matrix::Zero(2, 3)), Error);
}

TEST_CASE("determinant agrees with cofactor expansion and longhand LU")
{
    Rand rng(3);
    for (int n = 0; n < 300; ++n) {
        const int dim = rng.integer(1, 6);
        const Matrix m = rng.matrix(dim, dim, -3.0, 3.0);
        const double d = det(m);
        CHECK(testing_support::rel_diff(d, testing_support::cofactor_det(m)) < 1e-10);
        CHECK(testing_support::rel_diff(d, testing_support::lu_pivot_product(m)) < 1e-10);
    }
}

TEST_CASE("determinant is multiplicative and satisfies Sylvester's identity")
{
    Rand rng(4);
    for (int n = 0; n < 200; ++n) {
        const int p = rng.integer(1, 5);
        const int q = rng.integer(1, 5);
        const Matrix a = rng.matrix(p, p);
        const Matrix b = rng.matrix(p, p);
        CHECK(testing_support::rel_diff(det(Matrix(a * b)), det(a) * det(b)) < 1e-10);
        const Matrix x = rng.matrix(p, q);
        const Matrix y = rng.matrix(q, p);
        const double lhs = det(Matrix(Matrix::Identity(p, p) + x * y));
        const double rhs = det(Matrix(Matrix::Identity(q, q) + y * x));
        CHECK(testing_support::rel_diff(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("svd examples")
{
    const Matrix d = Eigen::Vector2d(3.0, 1.0).asDiagonal();
    const auto f = svd(d);
    CHECK(f.values(0) == doctest::Approx(3.0));
    CHECK(f.values(1) == doctest::Approx(1.0));

    Matrix outer = Eigen::Vector2d(1.0, 2.0) * Eigen::RowVector2d(3.0, 4.0);
    const auto g = svd(outer);
    CHECK(g.values(0) == doctest::Approx(std::sqrt(5.0) * 5.0));
    CHECK(g.values(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("svd reconstructs random rectangular matrices")
{
    Rand rng(5);
    for (int n = 0; n < 200; ++n) {
        const Matrix m = rng.matrix(rng.integer(1, 5), rng.integer(1, 5), -2.0, 2.0);
        const auto f = svd(m);
        CHECK((f.left * f.diagonal() * f.right.transpose() - m).norm() < 1e-10);
        CHECK((f.left.transpose() * f.left - Matrix::Identity(m.rows(), m.rows())).norm() < 1e-10);
        CHECK((f.right.transpose() * f.right - Matrix::Identity(m.cols(), m.cols())).norm() < 1e-10);
        for (Eigen::Index i = 1; i < f.values.size(); ++i)
            CHECK(f.values(i - 1) >= f.values(i));
    }
}

TEST_CASE("symmetric eigen examples")
{
    Matrix m(2, 2);
    m << 2.0, 1.0, 1.0, 2.0;
    const auto e = sym_eigen(m);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK((m * e.vectors.col(0) - 3.0 * e.vectors.col(0)).norm() < 1e-12);
}

TEST_CASE("symmetric eigenvalues are roots of the characteristic polynomial")
{
    Rand rng(6);
    for (int n = 0; n < 100; ++n) {
        const Matrix g = rng.matrix(3, 3);
        const Matrix m = g + g.transpose();
        const auto e = sym_eigen(m);
        for (int i = 0; i < 3; ++i) {
            const double lambda = e.values(i);
            CHECK(std::abs(det(Matrix(m - lambda * Matrix::Identity(3, 3)))) < 1e-9 * std::max(1.0, m.norm() * m.norm() * m.norm()));
        }
        CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - m).norm() < 1e-10);
    }
}

TEST_CASE("polynomial arithmetic")
{
    const Polynomial p({1.0, 2.0});       // 1 + 2x
    const Polynomial q({-1.0, 0.0, 1.0}); // x^2 - 1
    const Polynomial prod = p * q;
    CHECK(prod.degree() == 3);
    CHECK(prod(2.0) == doctest::Approx(p(2.0) * q(2.0)));
    CHECK((p + q)(3.0) == doctest::Approx(7.0 + 8.0));
    CHECK((q - q).degree() == 0);
    CHECK(q.derivative()(5.0) == doctest::Approx(10.0));
    CHECK(Polynomial::monomial(3, 2.0)(2.0) == doctest::Approx(16.0));
}

TEST_CASE("polynomial interpolation recovers a known quartic")
{
    const Polynomial truth({0.5, -1.0, 2.0, 0.25, 3.0});
    const auto nodes = Polynomial::chebyshev_nodes(5);
    std::vector<double> values;
    for (double x : nodes)
        values.push_back(truth(x));
    const Polynomial fit = Polynomial::interpolate(nodes, values, 4);
    for (int k = 0; k <= 4; ++k)
        CHECK(fit.coefficient(k) == doctest::Approx(truth.coefficient(k)).epsilon(1e-12));
}

TEST_CASE("real roots examples")
{
    const auto r1 = real_roots(Polynomial({-1.0, 0.0, 1.0}));
    REQUIRE(r1.size() == 2);
    CHECK(r1[0] == doctest::Approx(-1.0));
    CHECK(r1[1] == doctest::Approx(1.0));

    CHECK(real_roots(Polynomial({1.0, 0.0, 1.0})).empty());

    // (1 + P) g^2 - (sqrt(1 + 2P) + 2P) g + (1 + P) at P = 10: roots bracket 1.
    const double p = 10.0;
    const auto r2 = real_roots(Polynomial({1.0 + p, -(std::sqrt(1.0 + 2.0 * p) + 2.0 * p), 1.0 + p}));
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] < 1.0);
    CHECK(r2[1] > 1.0);
    CHECK(r2[0] * r2[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(real_roots(Polynomial({0.0, 0.0})), Error);
    CHECK_THROWS_AS(real_roots(Polynomial({3.0})), Error);
}

TEST_CASE("real roots agree with a dense sign-change scan")
{
    Rand rng(7);
    for (int n = 0; n < 40; ++n) {
        const int real_count = rng.integer(0, 4);
        Polynomial p({rng.uniform(0.5, 2.0)});
        for (int k = 0; k < real_count; ++k)
            p = p * Polynomial({-rng.uniform(-4.0, 4.0), 1.0});
        if (rng.integer(0, 1) == 1) {
            const double re = rng.uniform(-3.0, 3.0), im = rng.uniform(0.2, 2.0);
            p = p * Polynomial({re * re + im * im, -2.0 * re, 1.0});
        }
        if (p.degree() < 1)
            continue;
        const auto roots = real_roots(p);
        const auto brackets = testing_support::sign_change_brackets(p, -5.0, 5.0, 1000000);
        CAPTURE(n);
        CHECK(roots.size() == brackets.size());
        for (const auto& [lo, hi] : brackets) {
            const bool found = std::any_of(roots.begin(), roots.end(),
                                           [&](double x) { return x >= lo - 1e-9 && x <= hi + 1e-9; });
            CHECK(found);
        }
    }
}

TEST_CASE("decibel conversion")
{
    CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-3.0) == doctest::Approx(0.501187).epsilon(1e-5));
}
