#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "qptrace/errors.hpp"

namespace qptrace {

using Complex = std::complex<double>;

/// Dense real-coefficient polynomial, coefficients ascending in the power of s
/// (coeffs()[k] multiplies s^k).  The zero polynomial is stored as {0}.
class RealPolynomial {
public:
    RealPolynomial() : coeffs_{0.0} {}

    explicit RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
        for (double c : coeffs_) {
            if (!std::isfinite(c)) throw InvalidInput("polynomial coefficient is not finite");
        }
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    double max_coeff_magnitude() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Horner evaluation.  A real argument yields an exactly real result.
    Complex operator()(Complex s) const {
        Complex r(0.0, 0.0);
        for (std::size_t k = coeffs_.size(); k-- > 0;) r = r * s + coeffs_[k];
        return r;
    }

    double operator()(double s) const {
        double r = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) r = r * s + coeffs_[k];
        return r;
    }

    RealPolynomial derivative() const {
        if (coeffs_.size() <= 1) return RealPolynomial{};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return RealPolynomial(std::move(d));
    }

    friend RealPolynomial operator+(const RealPolynomial& p, const RealPolynomial& q) {
        std::vector<double> c(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < p.coeffs_.size(); ++k) c[k] += p.coeffs_[k];
        for (std::size_t k = 0; k < q.coeffs_.size(); ++k) c[k] += q.coeffs_[k];
        return RealPolynomial(std::move(c));
    }

    friend RealPolynomial operator*(const RealPolynomial& p, const RealPolynomial& q) {
        if (p.is_zero() || q.is_zero()) return RealPolynomial{};
        std::vector<double> c(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * q.coeffs_[j];
        return RealPolynomial(std::move(c));
    }

private:
    std::vector<double> coeffs_;
};

namespace detail {

// Magnitude scale of p evaluated near s: |p(s)| is meaningful only relative
// to this (evaluation roundoff is proportional to it).
inline double poly_local_scale(const RealPolynomial& p, Complex s) {
    return p.max_coeff_magnitude() * std::max(1.0, std::pow(std::abs(s), p.degree()));
}

}  // namespace detail

/// Cauchy bound: every root r satisfies |r| <= 1 + max_{k<n} |c_k / c_n|.
inline double root_bound(const RealPolynomial& p) {
    if (p.degree() < 1) throw InvalidInput("root_bound requires degree >= 1");
    const auto& c = p.coeffs();
    const double lead = std::abs(c.back());
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) m = std::max(m, std::abs(c[k]) / lead);
    return 1.0 + m;
}

/// All complex roots (with multiplicity) by Aberth-Ehrlich simultaneous
/// iteration.  Each returned root r satisfies |p(r)| <= tol * scale where
/// scale is the largest coefficient magnitude.
inline std::vector<Complex> find_roots(const RealPolynomial& p, double tol) {
    const int n = p.degree();
    if (n < 1) throw InvalidInput("find_roots requires degree >= 1");
    if (!(tol > 0.0)) throw InvalidInput("find_roots requires tol > 0");
    const auto& c = p.coeffs();
    const double scale = p.max_coeff_magnitude();

    if (n == 1) return {Complex(-c[0] / c[1], 0.0)};

    const RealPolynomial dp = p.derivative();
    const double radius = root_bound(p);
    std::vector<Complex> z(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * i / n + std::numbers::pi / (2.0 * n);
        z[i] = radius * Complex(std::cos(th), std::sin(th));
    }

    const int cap = 500;
    for (int it = 0; it < cap; ++it) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            const Complex pv = p(z[i]);
            if (std::abs(pv) <= 0.1 * tol * scale) continue;
            const Complex dv = dp(z[i]);
            Complex corr;
            if (std::abs(dv) == 0.0) {
                corr = Complex(tol * radius, tol * radius);
            } else {
                const Complex newton = pv / dv;
                Complex sum(0.0, 0.0);
                for (int j = 0; j < n; ++j)
                    if (j != i) sum += 1.0 / (z[i] - z[j]);
                corr = newton / (1.0 - newton * sum);
            }
            z[i] -= corr;
            if (std::abs(corr) > 1e-15 * (1.0 + std::abs(z[i]))) moved = true;
        }
        if (!moved) break;
    }

    for (int i = 0; i < n; ++i) {
        if (!(std::abs(p(z[i])) <= tol * scale))
            throw NumericFailure("find_roots did not converge within the iteration cap");
    }

    // Deterministic order; snap near-real roots so real-axis roots of real
    // polynomials come out exactly real.
    std::sort(z.begin(), z.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    for (auto& r : z) {
        if (std::abs(r.imag()) <= tol * (1.0 + std::abs(r))) r = Complex(r.real(), 0.0);
    }
    return z;
}

}  // namespace qptrace
