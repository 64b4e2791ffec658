#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "debtlab/linalg.hpp"
#include "debtlab/rng.hpp"
#include "support/oracles.hpp"

using namespace debtlab;

TEST_CASE("qr solves a known 2x2 system exactly") {
    // y = 1 + 2x at x = 0, 1, 2
    Matrix a(3, 2);
    for (int r = 0; r < 3; ++r) {
        a(r, 0) = 1.0;
        a(r, 1) = r;
    }
    auto ls = qr_least_squares(a, {1.0, 3.0, 5.0});
    REQUIRE_FALSE(ls.rank_deficient);
    CHECK(ls.coef[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ls.coef[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("qr agrees with the normal-equations oracle on random instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = oracle::random_instance(seed, 60, 5);
        Matrix a(60, 6);
        for (std::size_t r = 0; r < 60; ++r) {
            a(r, 0) = 1.0;
            for (std::size_t c = 0; c < 5; ++c) a(r, c + 1) = inst.x(r, c);
        }
        auto ls = qr_least_squares(a, inst.y);
        REQUIRE_FALSE(ls.rank_deficient);
        auto ref = oracle::normal_equations_fit(inst.x, inst.y);
        for (std::size_t j = 0; j < ref.size(); ++j)
            CHECK(ls.coef[j] == doctest::Approx(ref[j]).epsilon(1e-8));
    }
}

TEST_CASE("qr reports the duplicated column") {
    Rng rng(4);
    Matrix a(20, 4);
    for (std::size_t r = 0; r < 20; ++r) {
        a(r, 0) = 1.0;
        a(r, 1) = rng.uniform();
        a(r, 2) = rng.uniform();
        a(r, 3) = a(r, 1);  // duplicate of column 1
    }
    std::vector<double> y(20, 1.0);
    auto ls = qr_least_squares(a, y);
    CHECK(ls.rank_deficient);
    CHECK(ls.deficient_col == 3);
}

TEST_CASE("jacobi eigen on a known 2x2 matrix") {
    Matrix a(2, 2);
    a(0, 0) = 2.0; a(0, 1) = 1.0;
    a(1, 0) = 1.0; a(1, 1) = 2.0;
    auto eig = jacobi_eigen(a);
    CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 6;
        Matrix a(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const double v = rng.uniform(-1.0, 1.0);
                a(i, j) = v;
                a(j, i) = v;
            }
        auto eig = jacobi_eigen(a);

        // A V = V diag(values), columns orthonormal
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> v(m), av(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) v[i] = eig.vectors(i, j);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = 0; k < m; ++k) av[i] += a(i, k) * v[k];
            for (std::size_t i = 0; i < m; ++i)
                CHECK(av[i] == doctest::Approx(eig.values[j] * v[i]).epsilon(1e-9).scale(1.0));
        }
        for (std::size_t j1 = 0; j1 < m; ++j1)
            for (std::size_t j2 = j1; j2 < m; ++j2) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += eig.vectors(i, j1) * eig.vectors(i, j2);
                CHECK(dot == doctest::Approx(j1 == j2 ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
            }
        for (std::size_t j = 0; j + 1 < m; ++j) CHECK(eig.values[j] >= eig.values[j + 1]);
    }
}

TEST_CASE("inverse normal cdf hits standard quantiles") {
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(inverse_normal_cdf(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(inverse_normal_cdf(0.0));
    CHECK_THROWS(inverse_normal_cdf(1.0));
}
