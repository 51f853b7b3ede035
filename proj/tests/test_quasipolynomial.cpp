#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qptrace/quasipolynomial.hpp"

using qptrace::Complex;
using qptrace::QuasiPolynomial;
using qptrace::RealPolynomial;

namespace {

QuasiPolynomial fixture() {
    return QuasiPolynomial(RealPolynomial({1.0, 1.0, 1.0}), RealPolynomial({0.0, 1.0}));
}

const Complex kJ(0.0, 1.0);

}  // namespace

TEST_CASE("construction enforces the retarded form") {
    CHECK_NOTHROW(fixture());
    CHECK_THROWS_AS(QuasiPolynomial(RealPolynomial({1.0, 1.0}), RealPolynomial({1.0, 1.0})),
                    qptrace::InvalidInput);
    CHECK_THROWS_AS(QuasiPolynomial(RealPolynomial({1.0}), RealPolynomial({0.0, 1.0})),
                    qptrace::InvalidInput);
    CHECK_THROWS_AS(QuasiPolynomial(RealPolynomial({1.0, 1.0}), RealPolynomial({0.0})),
                    qptrace::InvalidInput);
    CHECK_THROWS_AS(QuasiPolynomial(RealPolynomial({0.0}), RealPolynomial({0.0}), true),
                    qptrace::InvalidInput);

    const QuasiPolynomial df(RealPolynomial({1.0, 1.0}), RealPolynomial({0.0}), true);
    CHECK(df.delay_free());
    CHECK_FALSE(fixture().delay_free());
    CHECK(fixture().coeff_scale() == 1.0);
}

TEST_CASE("f at reference points") {
    const QuasiPolynomial q = fixture();
    CHECK(std::abs(q.f(kJ, std::numbers::pi)) <= 1e-14);
    CHECK(q.f(Complex(-1.0, 0.0), 0.0) == Complex(0.0, 0.0));
}

TEST_CASE("f at h = 0 equals a + b bit for bit") {
    const QuasiPolynomial q = fixture();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const Complex s(d(rng), d(rng));
        const Complex direct = q.a()(s) + q.b()(s);
        CHECK(q.f(s, 0.0) == direct);
    }
}

TEST_CASE("f_s at reference points") {
    const QuasiPolynomial q = fixture();
    CHECK(q.f_s(Complex(-1.0, 0.0), 0.0) == Complex(0.0, 0.0));
    CHECK(q.f_s(kJ, 0.0) == Complex(2.0, 2.0));
}

TEST_CASE("f_h at reference points") {
    const QuasiPolynomial q = fixture();
    CHECK(q.f_h(Complex(0.0, 0.0), 0.7) == Complex(0.0, 0.0));
    CHECK(q.f_h(kJ, 0.0) == Complex(1.0, 0.0));
}

TEST_CASE("partial derivatives match central finite differences") {
    const QuasiPolynomial q = fixture();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(-3.0, 3.0), hh(0.0, 3.0);
    const double delta = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const Complex s(re(rng), im(rng));
        const double h = hh(rng);

        const Complex fd_s_re = (q.f(s + delta, h) - q.f(s - delta, h)) / (2.0 * delta);
        CHECK(std::abs(fd_s_re - q.f_s(s, h)) <= 1e-4 * (1.0 + std::abs(q.f_s(s, h))));
        const Complex fd_s_im =
            (q.f(s + delta * kJ, h) - q.f(s - delta * kJ, h)) / (2.0 * delta * kJ);
        CHECK(std::abs(fd_s_im - q.f_s(s, h)) <= 1e-4 * (1.0 + std::abs(q.f_s(s, h))));

        const double hp = h + delta, hm = h - delta;
        if (hm < 0.0) continue;
        const Complex fd_h = (q.f(s, hp) - q.f(s, hm)) / (2.0 * delta);
        CHECK(std::abs(fd_h - q.f_h(s, h)) <= 1e-4 * (1.0 + std::abs(q.f_h(s, h))));
    }
}

TEST_CASE("finite-difference error shrinks quadratically") {
    const QuasiPolynomial q = fixture();
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> re(-1.0, 1.0), im(-2.0, 2.0), hh(0.1, 2.5);
    std::vector<double> ratios;
    for (int trial = 0; trial < 40; ++trial) {
        const Complex s(re(rng), im(rng));
        const double h = hh(rng);
        const auto fd_err = [&](double d) {
            const Complex fd = (q.f(s + d, h) - q.f(s - d, h)) / (2.0 * d);
            return std::abs(fd - q.f_s(s, h));
        };
        const double e1 = fd_err(1e-3), e2 = fd_err(5e-4);
        if (e2 < 1e-13) continue;
        ratios.push_back(e1 / e2);
    }
    REQUIRE(ratios.size() >= 20);
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    CHECK(median >= 3.0);
    CHECK(median <= 5.0);
}

TEST_CASE("conjugate symmetry of f, f_s, f_h") {
    const QuasiPolynomial q = fixture();
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-5.0, 5.0), hh(0.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Complex s(re(rng), im(rng));
        const double h = hh(rng);
        const double ulp = 1e-15;
        CHECK(std::abs(q.f(std::conj(s), h) - std::conj(q.f(s, h))) <=
              ulp * (1.0 + std::abs(q.f(s, h))));
        CHECK(std::abs(q.f_s(std::conj(s), h) - std::conj(q.f_s(s, h))) <=
              ulp * (1.0 + std::abs(q.f_s(s, h))));
        CHECK(std::abs(q.f_h(std::conj(s), h) - std::conj(q.f_h(s, h))) <=
              ulp * (1.0 + std::abs(q.f_h(s, h))));
    }
}

TEST_CASE("overflow guard") {
    const QuasiPolynomial q = fixture();
    CHECK_THROWS_AS(q.f(Complex(-800.0, 0.0), 1.0), qptrace::OutOfDomain);
    CHECK_THROWS_AS(q.f_s(Complex(-800.0, 0.0), 1.0), qptrace::OutOfDomain);
    CHECK_THROWS_AS(q.f_h(Complex(-800.0, 0.0), 1.0), qptrace::OutOfDomain);
    CHECK_NOTHROW(q.f(Complex(-800.0, 0.0), 0.0));
}

TEST_CASE("sensitivity bound") {
    const QuasiPolynomial q = fixture();
    CHECK(sensitivity_bound(q, Complex(0.0, 0.0), 0.4) == 0.0);
    CHECK(std::abs(sensitivity_bound(q, kJ, 0.0) - 1.0 / (2.0 * std::sqrt(2.0))) <= 1e-12);
    CHECK(std::abs(sensitivity_bound(q, kJ, std::numbers::pi) - 1.0 / (2.0 + std::numbers::pi)) <=
          1e-12);
    CHECK_THROWS_AS(sensitivity_bound(q, Complex(-1.0, 0.0), 0.0), qptrace::SingularDerivative);
}
