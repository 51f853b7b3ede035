#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qptrace/errors.hpp"
#include "qptrace/quasipolynomial.hpp"

namespace qptrace {

struct ContourRectangle {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;
    int segments_per_edge = 256;
};

inline void validate_rectangle(const ContourRectangle& r) {
    if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max))
        throw InvalidInput("rectangle must have re_min < re_max and im_min < im_max");
    if (r.segments_per_edge < 1) throw InvalidInput("segments_per_edge must be >= 1");
}

namespace detail {

// Signed phase change of f along [z0, z1], splitting any sub-segment whose
// jump exceeds pi/2; a jump near pi is direction-ambiguous, so refinement is
// mandatory, with a depth cap turning persistent ambiguity into an error.
inline double phase_change(const QuasiPolynomial& q, double h, Complex z0, Complex f0, Complex z1,
                           Complex f1, int depth) {
    if (std::abs(f0) == 0.0 || std::abs(f1) == 0.0)
        throw VerificationUnavailable("zero of f encountered on the contour");
    const double jump = std::arg(f1 / f0);
    if (std::abs(jump) <= 0.5 * std::numbers::pi) return jump;
    if (depth >= 12)
        throw VerificationUnavailable("phase ambiguity: contour refinement limit reached");
    const Complex mid = 0.5 * (z0 + z1);
    const Complex fm = q.f(mid, h);
    return phase_change(q, h, z0, f0, mid, fm, depth + 1) +
           phase_change(q, h, mid, fm, z1, f1, depth + 1);
}

}  // namespace detail

/// Number of zeros of f(., h) strictly inside the rectangle, by accumulating
/// the phase of f around the boundary (argument principle).  The rectangle is
/// inflated by 1e-3 per side, up to 5 times, if a contour point comes within
/// 1e-6 * scale of a zero.  Fails loudly (never returns a wrong count):
/// contour-too-close and phase-ambiguity both raise VerificationUnavailable.
inline int count_zeros(const QuasiPolynomial& q, double h, ContourRectangle rect) {
    validate_rectangle(rect);
    if (!(h >= 0.0)) throw InvalidInput("h must be >= 0");
    const double clearance = 1e-6 * q.coeff_scale();

    for (int attempt = 0;; ++attempt) {
        std::vector<Complex> pts;
        const int n = rect.segments_per_edge;
        pts.reserve(static_cast<std::size_t>(4) * n);
        const Complex c0(rect.re_min, rect.im_min), c1(rect.re_max, rect.im_min),
            c2(rect.re_max, rect.im_max), c3(rect.re_min, rect.im_max);
        const Complex corners[5] = {c0, c1, c2, c3, c0};
        for (int e = 0; e < 4; ++e)
            for (int i = 0; i < n; ++i)
                pts.push_back(corners[e] +
                              (static_cast<double>(i) / n) * (corners[e + 1] - corners[e]));
        pts.push_back(c0);

        std::vector<Complex> fv(pts.size());
        double fmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            fv[i] = q.f(pts[i], h);
            fmin = std::min(fmin, std::abs(fv[i]));
        }
        if (fmin <= clearance) {
            if (attempt >= 5)
                throw VerificationUnavailable(
                    "contour too close to a zero after 5 inflation attempts");
            rect.re_min -= 1e-3;
            rect.re_max += 1e-3;
            rect.im_min -= 1e-3;
            rect.im_max += 1e-3;
            continue;
        }

        double total = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            total += detail::phase_change(q, h, pts[i], fv[i], pts[i + 1], fv[i + 1], 0);
        const double winding = total / (2.0 * std::numbers::pi);
        const double rounded = std::round(winding);
        if (std::abs(winding - rounded) >= 0.25)
            throw VerificationUnavailable("phase accumulation did not close to an integer");
        return static_cast<int>(rounded);
    }
}

/// Newton iteration s <- s - f/f_s from seed until |f| <= tol * scale, at
/// most 100 iterations; a seed already inside the tolerance is returned
/// unchanged.  The scale is the local evaluation magnitude of f at the
/// current point, so convergence is attainable at any |s|.
inline Complex refine_zero(const QuasiPolynomial& q, double h, Complex seed, double tol) {
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    Complex s = seed;
    for (int it = 0; it <= 100; ++it) {
        const double damp = std::exp(std::min(700.0, -h * s.real()));
        const double gate = tol * (detail::poly_local_scale(q.a(), s) +
                                   damp * detail::poly_local_scale(q.b(), s));
        if (std::abs(q.f(s, h)) <= gate) return s;
        const Complex fs = q.f_s(s, h);
        if (std::abs(fs) <= 1e-300)
            throw NumericFailure("no zero near seed: Newton derivative vanished");
        s -= q.f(s, h) / fs;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw NumericFailure("no zero near seed: Newton iteration diverged");
    }
    throw NumericFailure("no zero near seed: Newton did not converge in 100 iterations");
}

}  // namespace qptrace
