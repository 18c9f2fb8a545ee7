#include "doctest.h"

#include <random>

#include "fblab/quadrature.hpp"
#include "test_oracles.hpp"

using namespace fblab;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    auto r = quad::gauss_legendre(6);
    for (int k = 0; k <= 11; ++k) {
        double s = 0.0;
        for (int i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
        double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        CHECK(s == doctest::Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("gauss-jacobi matches the Beta-function moments") {
    // int_{-1}^1 (1-x)^al (1+x)^be (1+x)^k dx = 2^{al+be+k+1} B(al+1, be+k+1)
    for (double al : {-0.75, -0.25, 0.0, 0.5}) {
        for (double be : {-0.5, 0.0, 0.75}) {
            auto r = quad::gauss_jacobi(10, al, be);
            for (int k = 0; k <= 6; ++k) {
                double s = 0.0;
                for (int i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(1.0 + r.x[i], k);
                double exact = std::exp((al + be + k + 1) * std::log(2.0) + std::lgamma(al + 1.0) +
                                        std::lgamma(be + k + 1.0) - std::lgamma(al + be + k + 2.0));
                CHECK(s == doctest::Approx(exact).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("weighted sphere rule is exact for monomials") {
    std::mt19937_64 rng(7);
    for (int n : {1, 2}) {
        for (double a : {-0.7, -0.5, 0.0, 0.3, 0.5}) {
            auto rule = quad::sphere_rule(n, a, 12);
            for (int trial = 0; trial < 12; ++trial) {
                int p1 = 2 * static_cast<int>(rng() % 4);
                int p2 = n == 2 ? 2 * static_cast<int>(rng() % 3) : 0;
                int py = 2 * static_cast<int>(rng() % 3);
                if (p1 + p2 + py > 12) continue;
                double s = 0.0;
                for (const auto& nd : rule)
                    s += nd.w * std::pow(nd.z[0], p1) * std::pow(nd.z[1], p2) * std::pow(nd.z[2], py);
                double exact = oracles::sphere_monomial(n, a, p1, p2, py);
                CHECK(s == doctest::Approx(exact).epsilon(1e-12));
            }
            // odd powers vanish by node symmetry
            double s_odd = 0.0;
            for (const auto& nd : rule) s_odd += nd.w * nd.z[0] * nd.z[2] * nd.z[2];
            CHECK(std::abs(s_odd) < 1e-14);
        }
    }
}

TEST_CASE("ball rule matches the radial closed form") {
    for (int n : {1, 2}) {
        for (double a : {-0.5, 0.25}) {
            auto rule = quad::ball_rule(n, a, 8);
            double s = 0.0;
            for (const auto& nd : rule) s += nd.w * nd.z[0] * nd.z[0];
            CHECK(s == doctest::Approx(oracles::ball_monomial(n, a, 2, 0, 0)).epsilon(1e-12));
            double m = 0.0;
            for (const auto& nd : rule) m += nd.w;
            CHECK(m == doctest::Approx(oracles::ball_monomial(n, a, 0, 0, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("invalid quadrature parameters are rejected") {
    CHECK_THROWS_AS(quad::gauss_jacobi(0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quad::gauss_jacobi(4, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quad::sphere_rule(3, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(quad::sphere_rule(1, 1.0, 4), std::invalid_argument);
}

} // TEST_SUITE
