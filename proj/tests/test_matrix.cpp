#include <catch2/catch_amalgamated.hpp>

#include "emodyn/matrix.hpp"
#include "emodyn/rng.hpp"

using Catch::Matchers::WithinAbs;
using namespace emodyn;

TEST_CASE("basic algebra", "[matrix]") {
    Matrix a(2, 2, {1, 2, 3, 4});
    Matrix b(2, 2, {5, 6, 7, 8});

    Matrix sum = a + b;
    CHECK(sum(0, 0) == 6);
    CHECK(sum(1, 1) == 12);

    Matrix prod = a * b;
    CHECK(prod(0, 0) == 19);
    CHECK(prod(0, 1) == 22);
    CHECK(prod(1, 0) == 43);
    CHECK(prod(1, 1) == 50);

    Matrix t = a.transpose();
    CHECK(t(0, 1) == 3);

    CHECK_THROWS_AS(a + Matrix(3, 2), DimensionError);
    CHECK_THROWS_AS(a * Matrix(3, 3), DimensionError);
}

TEST_CASE("gauss-jordan inverse round-trips", "[matrix]") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 4;
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.normal();
        for (std::size_t i = 0; i < n; ++i) m(i, i) += 3.0;  // keep it comfortably regular

        InverseResult res = invert(m);
        Matrix prod = m * res.inverse;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK_THAT(prod(i, j), WithinAbs(i == j ? 1.0 : 0.0, 1e-9));
    }
}

TEST_CASE("inverse log-determinant matches 2x2 closed form", "[matrix]") {
    Matrix m(2, 2, {3, 1, 1, 2});
    InverseResult res = invert(m);
    CHECK(res.det_sign == 1);
    CHECK_THAT(res.log_abs_det, WithinAbs(std::log(5.0), 1e-12));

    Matrix flipped(2, 2, {1, 2, 3, 4});  // det = -2
    InverseResult res2 = invert(flipped);
    CHECK(res2.det_sign == -1);
    CHECK_THAT(res2.log_abs_det, WithinAbs(std::log(2.0), 1e-12));
}

TEST_CASE("singular and ill-conditioned matrices are rejected", "[matrix]") {
    CHECK_THROWS_AS(invert(Matrix(2, 2, {1, 2, 2, 4})), NumericError);
    CHECK_THROWS_AS(invert(Matrix::scalar(0.0)), NumericError);

    Matrix nearly(2, 2, {1.0, 0.0, 0.0, 1e-13});
    CHECK_THROWS_AS(invert(nearly), NumericError);
    CHECK_NOTHROW(invert(nearly, 1e14));
}

TEST_CASE("cholesky handles PSD inputs with zero pivots", "[matrix]") {
    Matrix psd(2, 2, {4, 2, 2, 1});  // rank 1
    Matrix l = cholesky_psd(psd);
    Matrix rebuilt = l * l.transpose();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK_THAT(rebuilt(i, j), WithinAbs(psd(i, j), 1e-9));

    CHECK_THROWS_AS(cholesky_psd(Matrix(2, 2, {1, 0, 0, -1})), NumericError);
}

TEST_CASE("spd solve agrees with the inverse", "[matrix]") {
    Matrix a(3, 3, {4, 1, 0, 1, 3, 1, 0, 1, 2});
    Matrix b(3, 2, {1, 0, 0, 1, 1, 1});
    Matrix x = solve_spd(a, b);
    Matrix x_ref = invert(a).inverse * b;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK_THAT(x(i, j), WithinAbs(x_ref(i, j), 1e-10));

    CHECK_THROWS_AS(solve_spd(Matrix(2, 2, {1, 2, 2, 1}), Matrix(2, 1)), NumericError);
}

TEST_CASE("symmetrize and asymmetry measure", "[matrix]") {
    Matrix m(2, 2, {1, 2, 4, 1});
    CHECK_THAT(m.max_asymmetry(), WithinAbs(2.0, 1e-15));
    Matrix s = symmetrized(m);
    CHECK_THAT(s(0, 1), WithinAbs(3.0, 1e-15));
    CHECK_THAT(s.max_asymmetry(), WithinAbs(0.0, 1e-15));
}
