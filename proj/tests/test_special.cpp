#include <doctest.h>

#include <cmath>

#include "saddleperm/errors.hpp"
#include "saddleperm/special.hpp"

using saddleperm::chi_sq_tail;

namespace {

// Closed forms for small degrees of freedom, used as an independent check of
// the incomplete-gamma path.
double tail_d1(double x) { return std::erfc(std::sqrt(0.5 * x)); }
double tail_d2(double x) { return std::exp(-0.5 * x); }
double tail_d3(double x) {
    return std::erfc(std::sqrt(0.5 * x)) +
           std::sqrt(2.0 * x / 3.1415926535897932385) * std::exp(-0.5 * x);
}
double tail_d4(double x) { return std::exp(-0.5 * x) * (1.0 + 0.5 * x); }

}  // namespace

TEST_CASE("chi_sq_tail matches closed forms to 1e-10 on [0, 200]") {
    for (double x = 0.0; x <= 200.0; x += 0.25) {
        CHECK(std::fabs(chi_sq_tail(1, x) - tail_d1(x)) <= 1e-10);
        CHECK(std::fabs(chi_sq_tail(2, x) - tail_d2(x)) <= 1e-12);
        CHECK(std::fabs(chi_sq_tail(3, x) - tail_d3(x)) <= 1e-10);
        CHECK(std::fabs(chi_sq_tail(4, x) - tail_d4(x)) <= 1e-10);
    }
}

TEST_CASE("chi_sq_tail reference values") {
    CHECK(std::fabs(chi_sq_tail(3, 5.0) - 0.1718) < 5e-5);
    CHECK(std::fabs(chi_sq_tail(3, 10.0) - 0.0186) < 5e-5);
    for (int d = 1; d <= 12; ++d) CHECK(chi_sq_tail(d, 0.0) == 1.0);
}

TEST_CASE("chi_sq_tail is a decreasing probability") {
    for (int d : {1, 2, 3, 5, 8}) {
        double prev = 1.0 + 1e-15;
        for (double x = 0.0; x <= 60.0; x += 0.5) {
            const double p = chi_sq_tail(d, x);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("chi_sq_tail domain errors") {
    CHECK_THROWS_AS(chi_sq_tail(0, 1.0), saddleperm::DomainError);
    CHECK_THROWS_AS(chi_sq_tail(-3, 1.0), saddleperm::DomainError);
    CHECK_THROWS_AS(chi_sq_tail(3, -0.1), saddleperm::DomainError);
}
