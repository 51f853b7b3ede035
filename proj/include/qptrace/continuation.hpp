#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qptrace/errors.hpp"
#include "qptrace/quasipolynomial.hpp"

namespace qptrace {

/// Controls one trajectory integration.  adaptive = false disables the step
/// controller, the rejection loop, and the corrector (pure fixed-step RK4
/// with step h_step_init); used for convergence-order studies.
struct TraceConfig {
    double eps_tz = 1e-3;
    double h_step_init = 1e-2;
    double h_step_min = 1e-8;
    double h_step_max = 0.1;
    int corrector_cap = 3;
    bool adaptive = true;
};

inline void validate_config(const TraceConfig& cfg) {
    if (!(cfg.eps_tz > 0.0)) throw InvalidInput("eps_tz must be positive");
    if (!(cfg.h_step_min > 0.0) || !(cfg.h_step_init > 0.0) || !(cfg.h_step_max > 0.0))
        throw InvalidInput("step sizes must be positive");
    if (cfg.h_step_min > cfg.h_step_init || cfg.h_step_init > cfg.h_step_max)
        throw InvalidInput("require h_step_min <= h_step_init <= h_step_max");
    if (cfg.corrector_cap < 0) throw InvalidInput("corrector_cap must be >= 0");
}

struct TrajectorySample {
    double h = 0.0;
    Complex s{0.0, 0.0};
    double residual = 0.0;
};

enum class AdvanceStatus { ok, defect_point, step_underflow };

struct AdvanceResult {
    std::vector<TrajectorySample> samples;
    AdvanceStatus status = AdvanceStatus::ok;
    std::string defect_reason;
};

/// ds/dh = -(f_h + f)/f_s.  On the zero manifold (f = 0) this is the exact
/// root velocity -f_h/f_s; off the manifold the extra f term contracts the
/// flow back onto the zero (|f|^2 decays along the flow at frozen h).
inline Complex trajectory_rhs(const QuasiPolynomial& q, Complex s, double h) {
    const Complex fs = q.f_s(s, h);
    if (std::abs(fs) <= 1e-12 * q.coeff_scale())
        throw SingularDerivative("f_s vanishes along the trajectory");
    return -(q.f_h(s, h) + q.f(s, h)) / fs;
}

/// Integrate one zero from sample.h to exactly h_target.  Per step: classical
/// 4-stage Runge-Kutta, then up to corrector_cap Newton corrections at fixed
/// h when the residual exceeds eps_tz, then reject-and-halve down to
/// h_step_min.  The accepted step feeds the next step size through
/// dh' = dh * sqrt(eps_tz / max(residual, 1e-3 * eps_tz)), clamped to
/// [h_step_min, h_step_max]; the floor keeps on-manifold growth bounded.
inline AdvanceResult advance(const QuasiPolynomial& q, const TrajectorySample& sample,
                             double h_target, const TraceConfig& cfg) {
    validate_config(cfg);
    if (!(h_target >= sample.h)) throw InvalidInput("h_target must be >= the starting delay");
    if (cfg.adaptive && !(sample.residual <= cfg.eps_tz))
        throw InvalidInput("starting sample violates the residual tube");

    AdvanceResult out;
    out.samples.push_back(sample);
    if (h_target == sample.h) return out;

    double h = sample.h;
    Complex s = sample.s;
    double dh = std::clamp(cfg.h_step_init, cfg.h_step_min, cfg.h_step_max);

    const auto defect = [&](const std::string& why) {
        out.status = AdvanceStatus::defect_point;
        out.defect_reason = why;
        return out;
    };

    while (h < h_target) {
        const double remaining = h_target - h;
        double step = cfg.adaptive ? std::min(dh, remaining) : std::min(cfg.h_step_init, remaining);
        const bool landing = step >= remaining;
        if (landing) step = remaining;

        Complex s_new;
        try {
            const Complex k1 = trajectory_rhs(q, s, h);
            const Complex k2 = trajectory_rhs(q, s + 0.5 * step * k1, h + 0.5 * step);
            const Complex k3 = trajectory_rhs(q, s + 0.5 * step * k2, h + 0.5 * step);
            const Complex k4 = trajectory_rhs(q, s + step * k3, h + step);
            s_new = s + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const SingularDerivative& ex) {
            return defect(ex.what());
        } catch (const OutOfDomain& ex) {
            return defect(ex.what());
        }

        const double h_new = landing ? h_target : h + step;
        double res;
        try {
            res = std::isfinite(s_new.real()) && std::isfinite(s_new.imag())
                      ? std::abs(q.f(s_new, h_new))
                      : std::numeric_limits<double>::infinity();
        } catch (const OutOfDomain& ex) {
            return defect(ex.what());
        }

        if (!cfg.adaptive && !std::isfinite(res))
            return defect("non-finite state in fixed-step mode");

        if (cfg.adaptive && res > cfg.eps_tz && std::isfinite(res)) {
            for (int it = 0; it < cfg.corrector_cap && res > cfg.eps_tz; ++it) {
                const Complex fs = q.f_s(s_new, h_new);
                if (std::abs(fs) <= 1e-12 * q.coeff_scale()) break;
                s_new -= q.f(s_new, h_new) / fs;
                res = std::abs(q.f(s_new, h_new));
            }
        }

        if (cfg.adaptive && !(res <= cfg.eps_tz)) {
            if (step <= cfg.h_step_min * (1.0 + 1e-12)) {
                out.status = AdvanceStatus::step_underflow;
                out.defect_reason = "step underflow: residual tube unreachable at h_step_min";
                return out;
            }
            dh = std::max(0.5 * step, cfg.h_step_min);
            continue;
        }

        h = h_new;
        s = s_new;
        out.samples.push_back({h, s, res});
        if (cfg.adaptive)
            dh = std::clamp(step * std::sqrt(cfg.eps_tz / std::max(res, 1e-3 * cfg.eps_tz)),
                            cfg.h_step_min, cfg.h_step_max);
    }
    return out;
}

}  // namespace qptrace
