#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qptrace/oracle.hpp"
#include "qptrace/polynomial.hpp"

using qptrace::Complex;
using qptrace::ContourRectangle;
using qptrace::count_zeros;
using qptrace::find_roots;
using qptrace::QuasiPolynomial;
using qptrace::RealPolynomial;
using qptrace::refine_zero;
using qptrace::root_bound;

namespace {

QuasiPolynomial fixture() {
    return QuasiPolynomial(RealPolynomial({1.0, 1.0, 1.0}), RealPolynomial({0.0, 1.0}));
}

const Complex kJ(0.0, 1.0);
const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("rectangle validation") {
    CHECK_NOTHROW(qptrace::validate_rectangle({-1.0, 1.0, -1.0, 1.0}));
    CHECK_THROWS_AS(qptrace::validate_rectangle({1.0, -1.0, -1.0, 1.0}), qptrace::InvalidInput);
    CHECK_THROWS_AS(qptrace::validate_rectangle({-1.0, 1.0, 1.0, 1.0}), qptrace::InvalidInput);
    ContourRectangle r{-1.0, 1.0, -1.0, 1.0};
    r.segments_per_edge = 0;
    CHECK_THROWS_AS(qptrace::validate_rectangle(r), qptrace::InvalidInput);
    CHECK_THROWS_AS(count_zeros(fixture(), -0.5, {-1.0, 1.0, -1.0, 1.0}),
                    qptrace::InvalidInput);
}

TEST_CASE("zero count at the end of the sweep") {
    CHECK(count_zeros(fixture(), kPi, {-1.0001, 3.0, -23.0, 23.0}) == 25);
}

TEST_CASE("zero count is invariant under contour refinement") {
    ContourRectangle fine{-1.0001, 3.0, -23.0, 23.0};
    fine.segments_per_edge = 512;
    CHECK(count_zeros(fixture(), kPi, fine) == 25);
}

TEST_CASE("delay-free count over a root-free rectangle") {
    const QuasiPolynomial df(RealPolynomial({1.0, 1.0}), RealPolynomial({0.0}), true);
    CHECK(count_zeros(df, 0.7, {0.0, 2.0, -1.0, 1.0}) == 0);
}

TEST_CASE("double root counted with multiplicity at zero delay") {
    CHECK(count_zeros(fixture(), 0.0, {-1.5, 1.0, -1.0, 1.0}) == 2);
}

TEST_CASE("counts add across a vertical bisection") {
    // roots -0.5, 0.5, +-j
    const QuasiPolynomial df(RealPolynomial({-0.25, 0.0, 0.75, 0.0, 1.0}),
                             RealPolynomial({0.0}), true);
    const int whole = count_zeros(df, 0.0, {-2.0, 2.0, -2.0, 2.0});
    const int left = count_zeros(df, 0.0, {-2.0, 0.2, -2.0, 2.0});
    const int right = count_zeros(df, 0.0, {0.2, 2.0, -2.0, 2.0});
    CHECK(whole == 4);
    CHECK(left == 3);
    CHECK(right == 1);
    CHECK(left + right == whole);
}

TEST_CASE("delay-free counts agree with direct root finding") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(2, 8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = deg(rng);
        std::vector<double> c(static_cast<std::size_t>(n) + 1);
        for (double& x : c) x = coef(rng);
        while (std::abs(c.back()) < 0.2) c.back() = coef(rng);
        const RealPolynomial p{std::vector<double>(c)};
        const QuasiPolynomial df(RealPolynomial(std::vector<double>(c)),
                                 RealPolynomial({0.0}), true);
        const double r = root_bound(p) + 0.5;
        CHECK(count_zeros(df, 0.0, {-r, r, -r, r}) == n);
        CHECK(find_roots(p, 1e-10).size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("verification refuses a contour pinned to a zero") {
    // (s+1)^6: the root sits on the initial contour and stays inside the
    // clearance band through every inflation attempt.
    const QuasiPolynomial df(
        RealPolynomial({1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0}), RealPolynomial({0.0}), true);
    CHECK_THROWS_AS(count_zeros(df, 0.0, {-1.0, 0.0, -0.5, 0.5}),
                    qptrace::VerificationUnavailable);
}

TEST_CASE("refine_zero converges to the boundary zero") {
    const Complex z = refine_zero(fixture(), kPi, Complex(0.1, 0.9), 1e-10);
    CHECK(std::abs(z - kJ) <= 1e-8);
}

TEST_CASE("refine_zero keeps a seed that is already a zero") {
    const Complex seed(-1.0, 0.0);
    const Complex z = refine_zero(fixture(), 0.0, seed, 1e-10);
    CHECK(z == seed);
}

TEST_CASE("refine_zero failure modes") {
    CHECK_THROWS_AS(refine_zero(fixture(), 0.0, kJ, -1.0), qptrace::InvalidInput);
    const QuasiPolynomial df(RealPolynomial({1.0, 0.0, 1.0}), RealPolynomial({0.0}), true);
    // f_s vanishes exactly at the stationary point s = 0 while f does not.
    CHECK_THROWS_AS(refine_zero(df, 0.0, Complex(0.0, 0.0), 1e-10), qptrace::NumericFailure);
    // A real seed can never reach the purely imaginary roots.
    CHECK_THROWS_AS(refine_zero(df, 0.0, Complex(1000.0, 0.0), 1e-10),
                    qptrace::NumericFailure);
}

TEST_CASE("finite-difference displacement rate matches the sensitivity") {
    const QuasiPolynomial q = fixture();
    const double delta = 1e-4;
    const Complex sp = refine_zero(q, kPi + delta, kJ, 1e-12);
    const Complex sm = refine_zero(q, kPi - delta, kJ, 1e-12);
    const double rate = std::abs(sp - sm) / (2.0 * delta);
    CHECK(std::abs(rate - sensitivity_bound(q, kJ, kPi)) <= 1e-3);
    CHECK(std::abs(rate - 1.0 / (2.0 + kPi)) <= 1e-3);
}
