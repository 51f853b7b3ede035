#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qptrace/errors.hpp"
#include "qptrace/polynomial.hpp"
#include "qptrace/quasipolynomial.hpp"

namespace qptrace {

/// Right half-plane Re(s) > sigma0 together with the frequency window
/// [0, omega_max] searched for boundary crossings.
struct Region {
    double sigma0 = 0.0;
    double omega_max = 0.0;
};

inline void validate_region(const Region& r) {
    if (!std::isfinite(r.sigma0)) throw InvalidInput("sigma0 must be finite");
    if (!(r.omega_max > 0.0) || !std::isfinite(r.omega_max))
        throw InvalidInput("omega_max must be positive and finite");
}

/// A zero of f sitting exactly on Re(s) = sigma0 at s = sigma0 + j*omega for
/// delay h = delay.  branch is the integer k closing the phase equation
/// h*omega + 2*k*pi + arg(-a/b) = 0.  entering == (rt_value > 0) where
/// rt_value = Re[(1/s)(b'/b - a'/a - h)].
struct CrossingEvent {
    double omega = 0.0;
    double delay = 0.0;
    std::int64_t branch = 0;
    bool entering = false;
    double rt_value = 0.0;
};

namespace detail {

// p(shift + x) expanded in x, by repeated synthetic division.
inline std::vector<double> taylor_shift(const RealPolynomial& p, double shift) {
    std::vector<double> work = p.coeffs();
    std::vector<double> out;
    out.reserve(work.size());
    while (!work.empty()) {
        double rem = 0.0;
        std::vector<double> quo(work.size() > 1 ? work.size() - 1 : 0);
        for (std::size_t k = work.size(); k-- > 0;) {
            const double c = work[k] + rem * shift;
            if (k == 0) {
                rem = c;
            } else {
                quo[k - 1] = c;
                rem = c;
            }
        }
        out.push_back(rem);
        work = std::move(quo);
    }
    return out;
}

// |p(sigma0 + j*w)|^2 is an even polynomial in w; returns its coefficients
// as a polynomial in x = w^2.
inline RealPolynomial abs2_on_line(const RealPolynomial& p, double sigma0) {
    const std::vector<double> sh = taylor_shift(p, sigma0);
    std::vector<double> u(sh.size(), 0.0), v(sh.size(), 0.0);
    for (std::size_t k = 0; k < sh.size(); ++k) {
        if (k % 2 == 0)
            u[k] = sh[k] * ((k / 2) % 2 == 0 ? 1.0 : -1.0);
        else
            v[k] = sh[k] * (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0);
    }
    const RealPolynomial pu{std::vector<double>(u)}, pv{std::vector<double>(v)};
    const RealPolynomial sq = pu * pu + pv * pv;
    const auto& c = sq.coeffs();
    std::vector<double> even((c.size() + 1) / 2, 0.0);
    for (std::size_t k = 0; k < c.size(); k += 2) even[k / 2] = c[k];
    return RealPolynomial(std::move(even));
}

}  // namespace detail

/// Frequency window large enough to contain every boundary crossing with
/// delay in (0, h_final]: the magnitude equation forces
/// |a(sigma0+jw)|^2 <= c |b(sigma0+jw)|^2 with c = max(1, e^{-2 h_final sigma0}),
/// and the left side dominates beyond the largest real root of the difference.
inline double default_omega_max(const QuasiPolynomial& q, double sigma0, double h_final) {
    if (q.delay_free()) return 1.0;
    const double fallback =
        1.25 * (root_bound(q.a() + q.b()) +
                2.0 * std::numbers::pi * (q.a().degree() + 1) / h_final);
    try {
        const RealPolynomial ax = detail::abs2_on_line(q.a(), sigma0);
        const RealPolynomial bx = detail::abs2_on_line(q.b(), sigma0);
        const double logc = std::max(0.0, -2.0 * h_final * sigma0);
        if (logc > 680.0) return fallback;
        const RealPolynomial minus_cb = RealPolynomial{{-std::exp(logc)}} * bx;
        const RealPolynomial diff = ax + minus_cb;
        if (diff.degree() < 1) return 1.0;
        double xmax = 0.0;
        for (const Complex r : find_roots(diff, 1e-10)) {
            if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r)))
                xmax = std::max(xmax, r.real());
        }
        if (xmax <= 0.0) return 1.0;
        return 1.1 * std::sqrt(xmax) + 1.0;
    } catch (const NumericFailure&) {
        return fallback;
    }
}

/// Magnitude-equation delay h(w) = -ln|a(sigma0+jw)/b(sigma0+jw)| / sigma0.
/// Returns nullopt when the value is not a positive finite delay.
inline std::optional<double> delay_of_omega(const QuasiPolynomial& q, double sigma0, double omega) {
    if (sigma0 == 0.0) throw InvalidInput("delay_of_omega requires sigma0 != 0");
    const Complex s(sigma0, omega);
    const Complex bv = q.b()(s);
    if (std::abs(bv) <= 1e-14 * detail::poly_local_scale(q.b(), s))
        throw BoundaryPole("b vanishes at sigma0 + j*omega; no crossing at this frequency");
    const Complex av = q.a()(s);
    const double h = -std::log(std::abs(av / bv)) / sigma0;
    if (!std::isfinite(h) || h <= 0.0) return std::nullopt;
    return h;
}

/// Corollary-of-the-trajectory-ODE direction value at a boundary zero:
/// positive means the zero enters Re(s) > sigma0 as h increases through delay.
inline double direction_test(const QuasiPolynomial& q, double sigma0, double omega, double delay) {
    const Complex s(sigma0, omega);
    if (std::abs(s) <= 1e-12) throw DegenerateCrossing("direction undefined at s = 0");
    const Complex av = q.a()(s);
    const Complex bv = q.b()(s);
    if (std::abs(av) <= 1e-12 * detail::poly_local_scale(q.a(), s))
        throw DegenerateCrossing("a vanishes at the boundary point");
    if (std::abs(bv) <= 1e-12 * detail::poly_local_scale(q.b(), s))
        throw DegenerateCrossing("b vanishes at the boundary point");
    const Complex ratio = (q.db()(s) / bv - q.da()(s) / av - delay) / s;
    return ratio.real();
}

/// Every boundary crossing (omega in [0, omega_max], delay in (0, h_final])
/// of the line Re(s) = sigma0, classified, sorted by delay ascending.
/// Accepted events satisfy |f(sigma0 + j omega, delay)| <= tol * scale.
/// Diagnostic notes (degenerate or tangential crossings, skipped poles) are
/// appended to *warnings when provided.
inline std::vector<CrossingEvent> find_crossings(const QuasiPolynomial& q, const Region& region,
                                                 double h_final, double tol,
                                                 std::vector<std::string>* warnings = nullptr) {
    validate_region(region);
    if (!(h_final > 0.0)) throw InvalidInput("h_final must be positive");
    if (!(tol > 0.0)) throw InvalidInput("tol must be positive");
    if (q.delay_free()) return {};

    const double sigma0 = region.sigma0;
    const double scale = q.coeff_scale();
    const double two_pi = 2.0 * std::numbers::pi;
    const double h_slack = h_final * (1.0 + 1e-12) + 1e-12;
    const auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    struct Candidate {
        double omega, delay;
        std::int64_t branch;
    };
    std::vector<Candidate> cands;

    const auto push_candidate = [&](double w, double h, std::int64_t k) {
        if (!(h > 0.0) || h > h_slack) return;
        const Complex s(sigma0, w);
        if (std::abs(q.f(s, h)) <= tol * scale) cands.push_back({w, std::min(h, h_final), k});
    };

    if (sigma0 != 0.0) {
        const auto h_of = [&](double w) -> std::optional<double> {
            const Complex s(sigma0, w);
            const Complex bv = q.b()(s);
            if (std::abs(bv) <= 1e-14 * detail::poly_local_scale(q.b(), s)) return std::nullopt;
            const double h = -std::log(std::abs(q.a()(s) / bv)) / sigma0;
            if (!std::isfinite(h)) return std::nullopt;
            return h;
        };
        const auto theta = [&](double w) {
            const Complex s(sigma0, w);
            return std::arg(-q.a()(s) / q.b()(s));
        };
        // Polish the bisected frequency with a few Gauss-Newton steps on
        // w -> f(sigma0 + jw, h(w)); bisection alone leaves a residual of
        // |f_s| * (bracket width), which can exceed the acceptance gate when
        // |f_s| is large at high-frequency crossings.
        const auto polish = [&](double w, double width) {
            for (int it = 0; it < 3; ++it) {
                const auto h = h_of(w);
                if (!h || *h <= 0.0) break;
                const Complex s(sigma0, w);
                const Complex av = q.a()(s), bv = q.b()(s);
                if (std::abs(av) == 0.0 || std::abs(bv) == 0.0) break;
                const double hprime =
                    ((q.da()(s) / av).imag() - (q.db()(s) / bv).imag()) / sigma0;
                const Complex F = q.f(s, *h);
                const Complex Fp = Complex(0.0, 1.0) * q.f_s(s, *h) + hprime * q.f_h(s, *h);
                const double denom = std::norm(Fp);
                if (denom == 0.0) break;
                const double dw = -(std::conj(Fp) * F).real() / denom;
                if (!std::isfinite(dw) || std::abs(dw) > width + 1e-9) break;
                w += dw;
            }
            return w;
        };

        const int n_cells = 4096;
        const double dw = region.omega_max / n_cells;
        std::optional<double> h0 = h_of(0.0);
        double t0 = 0.0;
        if (h0) t0 = theta(0.0);
        for (int i = 0; i < n_cells; ++i) {
            const double w0 = i * dw, w1 = (i + 1) * dw;
            const std::optional<double> h1 = h_of(w1);
            double t1 = 0.0;
            if (h1) t1 = theta(w1);
            if (h0 && h1) {
                const bool feas0 = *h0 > 0.0 && *h0 <= h_slack;
                const bool feas1 = *h1 > 0.0 && *h1 <= h_slack;
                if (feas0 || feas1) {
                    const double t1u = t0 + std::remainder(t1 - t0, two_pi);
                    const double P0 = *h0 * w0 + t0;
                    const double P1 = *h1 * w1 + t1u;
                    const std::int64_t kmid = std::llround(-(P0 + P1) / (2.0 * two_pi));
                    for (std::int64_t k = kmid - 1; k <= kmid + 1; ++k) {
                        const double g0 = P0 + two_pi * static_cast<double>(k);
                        const double g1 = P1 + two_pi * static_cast<double>(k);
                        if (!(g0 * g1 < 0.0)) continue;
                        double lo = w0, hi = w1, glo = g0;
                        const double tref = t0;
                        const auto g_at = [&](double w) {
                            const auto h = h_of(w);
                            if (!h) return std::numeric_limits<double>::quiet_NaN();
                            const double t = tref + std::remainder(theta(w) - tref, two_pi);
                            return *h * w + t + two_pi * static_cast<double>(k);
                        };
                        for (int it = 0; it < 200; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const double gm = g_at(mid);
                            if (std::isnan(gm)) break;
                            if (glo * gm <= 0.0) {
                                hi = mid;
                            } else {
                                lo = mid;
                                glo = gm;
                            }
                            if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
                        }
                        const double w = polish(0.5 * (lo + hi), w1 - w0);
                        const auto h = h_of(w);
                        if (h) push_candidate(w, *h, k);
                    }
                }
            }
            h0 = h1;
            t0 = t1;
        }

        // Real-axis crossing at omega = 0: f(sigma0, h) = 0 has the closed
        // form e^{-h sigma0} = -a(sigma0)/b(sigma0); the grid's sign test
        // cannot see this root when the phase residual touches zero without
        // changing sign.
        const double av0 = q.a()(sigma0);
        const double bv0 = q.b()(sigma0);
        if (std::abs(bv0) > 1e-14 * detail::poly_local_scale(q.b(), Complex(sigma0, 0.0)) &&
            -av0 / bv0 > 0.0) {
            const double h = -std::log(-av0 / bv0) / sigma0;
            if (h > 0.0 && h <= h_slack) push_candidate(0.0, h, 0);
        }
    } else {
        // sigma0 == 0: |a(jw)| = |b(jw)| reduces to a polynomial condition in
        // x = w^2; each root yields a frequency whose admissible delays form
        // the arithmetic sequence h = (2 m pi - arg(-a/b)) / w.
        const RealPolynomial ax = detail::abs2_on_line(q.a(), 0.0);
        const RealPolynomial bx = detail::abs2_on_line(q.b(), 0.0);
        const RealPolynomial diff = ax + RealPolynomial{{-1.0}} * bx;
        if (diff.degree() >= 1) {
            const RealPolynomial ddiff = diff.derivative();
            for (const Complex r : find_roots(diff, 1e-12)) {
                if (std::abs(r.imag()) > 1e-7 * (1.0 + std::abs(r))) continue;
                double x = r.real();
                for (int it = 0; it < 4; ++it) {
                    const double d = ddiff(x);
                    if (d == 0.0) break;
                    x -= diff(x) / d;
                }
                if (!(x > 0.0)) continue;
                const double w = std::sqrt(x);
                if (w > region.omega_max) continue;
                if (w <= 1e-9) {
                    warn("skipped degenerate boundary zero at the origin (omega = 0, sigma0 = 0)");
                    continue;
                }
                const Complex s(0.0, w);
                const Complex bv = q.b()(s);
                if (std::abs(bv) <= 1e-14 * detail::poly_local_scale(q.b(), s)) {
                    warn("skipped boundary pole at omega = " + std::to_string(w));
                    continue;
                }
                const double th = std::arg(-q.a()(s) / bv);
                const auto m_lo = static_cast<std::int64_t>(std::floor(th / two_pi)) - 1;
                const auto m_hi = static_cast<std::int64_t>(
                                      std::ceil((h_final * w + th) / two_pi)) +
                                  1;
                for (std::int64_t m = m_lo; m <= m_hi; ++m) {
                    const double h = (two_pi * static_cast<double>(m) - th) / w;
                    if (h > 0.0 && h <= h_slack)
                        push_candidate(w, h, std::llround(-(h * w + th) / two_pi));
                }
            }
        }
    }

    std::vector<CrossingEvent> events;
    for (const Candidate& c : cands) {
        bool dup = false;
        for (const CrossingEvent& e : events) {
            if (std::abs(e.omega - c.omega) <= 1e-9 && std::abs(e.delay - c.delay) <= 1e-9) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        double rt = 0.0;
        try {
            rt = direction_test(q, sigma0, c.omega, c.delay);
        } catch (const DegenerateCrossing& ex) {
            warn("dropped degenerate crossing at omega = " + std::to_string(c.omega) +
                 ", delay = " + std::to_string(c.delay) + ": " + ex.what());
            continue;
        }
        if (rt == 0.0)
            warn("tangential crossing (direction value 0) at omega = " + std::to_string(c.omega) +
                 ", delay = " + std::to_string(c.delay) + "; not treated as entering");
        events.push_back({c.omega, c.delay, c.branch, rt > 0.0, rt});
    }
    std::sort(events.begin(), events.end(), [](const CrossingEvent& x, const CrossingEvent& y) {
        if (x.delay != y.delay) return x.delay < y.delay;
        return x.omega < y.omega;
    });
    return events;
}

}  // namespace qptrace
