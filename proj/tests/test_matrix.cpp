#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rafm/matrix.hpp"
#include "rafm/prng.hpp"
#include "rafm/samplers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace rafm;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("matmul hand case") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix c = matmul(a, b);
    CHECK(c(0, 0) == 19);
    CHECK(c(0, 1) == 22);
    CHECK(c(1, 0) == 43);
    CHECK(c(1, 1) == 50);
}

TEST_CASE("identity is a left unit for matmul") {
    Matrix eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    Prng rng(5);
    Matrix a = sample_gaussian(rng, 3, 4);
    Matrix c = matmul(eye, a);
    for (std::size_t k = 0; k < a.data.size(); ++k)
        CHECK(c.data[k] == a.data[k]);
}

TEST_CASE("matmul_bt agrees with explicit transpose") {
    Prng rng(6);
    Matrix a = sample_gaussian(rng, 5, 3);
    Matrix b = sample_gaussian(rng, 4, 3);
    Matrix bt(3, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) bt(j, i) = b(i, j);
    Matrix direct = matmul_bt(a, b);
    Matrix ref = matmul(a, bt);
    REQUIRE(direct.rows == ref.rows);
    REQUIRE(direct.cols == ref.cols);
    for (std::size_t k = 0; k < ref.data.size(); ++k)
        CHECK(direct.data[k] == doctest::Approx(ref.data[k]).epsilon(1e-14));
}

TEST_CASE("dimension mismatch is rejected") {
    Matrix a(2, 3), b(2, 3);
    CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
    Matrix c(4, 2);
    CHECK_THROWS_AS(matmul_bt(a, c), std::invalid_argument);
    Matrix d(3, 3);
    CHECK_THROWS_AS(add_scaled(a, 1.0, d), std::invalid_argument);
}

TEST_CASE("row_norms of unit-sphere rows are all 1") {
    Prng rng(7);
    Matrix u = sample_uniform_sphere(rng, 50, 6);
    for (double r : row_norms(u))
        CHECK(std::abs(r - 1.0) <= 1e-12);
}

TEST_CASE("row_norms matches the 3-4-5 triangle") {
    Matrix m = from_rows({{3, 4}, {0, 0}});
    auto r = row_norms(m);
    CHECK(r[0] == doctest::Approx(5.0));
    CHECK(r[1] == 0.0);
}

TEST_CASE("add_scaled is elementwise a += alpha b") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{10, 20}, {30, 40}});
    add_scaled(a, 0.5, b);
    CHECK(a(0, 0) == 6.0);
    CHECK(a(0, 1) == 12.0);
    CHECK(a(1, 0) == 18.0);
    CHECK(a(1, 1) == 24.0);
}

TEST_CASE("sort_column returns an ascending copy") {
    Matrix m = from_rows({{3, 9}, {1, 7}, {2, 8}});
    auto c0 = sort_column(m, 0);
    CHECK(c0 == std::vector<double>{1, 2, 3});
    // source matrix untouched
    CHECK(m(0, 0) == 3);
}

TEST_CASE("dot and norm on hand vectors") {
    std::vector<double> x = {1, 2, 2}, y = {2, -1, 0.5};
    CHECK(dot(x, y) == doctest::Approx(1.0));
    CHECK(norm(x) == doctest::Approx(3.0));
}

TEST_CASE("finiteness checks see NaN and infinity") {
    Matrix m = from_rows({{1, 2}, {3, 4}});
    CHECK(all_finite(m));
    CHECK(row_finite(m, 1));
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(all_finite(m));
    CHECK(row_finite(m, 0));
    CHECK_FALSE(row_finite(m, 1));
    m(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_FALSE(row_finite(m, 1));
}
