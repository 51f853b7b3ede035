#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qptrace/continuation.hpp"
#include "qptrace/crossing.hpp"
#include "qptrace/errors.hpp"
#include "qptrace/polynomial.hpp"
#include "qptrace/quasipolynomial.hpp"

namespace qptrace {

enum class TrajectoryStatus { active, exited, defect };

struct Trajectory {
    int id = 0;
    /// Index into TraceResult::events for trajectories inserted at a
    /// boundary crossing; -1 for trajectories seeded from the roots of a+b.
    int origin_event = -1;
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::active;
    std::string defect_reason;

    double start_h() const { return samples.front().h; }
    double end_h() const { return samples.back().h; }
};

struct TraceResult {
    std::vector<Trajectory> trajectories;
    std::vector<CrossingEvent> events;
    std::vector<double> delay_set;
    std::vector<Complex> zeros_final;
    double max_residual = 0.0;
    Region region;
    double h_final = 0.0;
    TraceConfig config;
    std::vector<std::string> warnings;
};

namespace detail {

inline Complex newton_polish(const QuasiPolynomial& q, Complex s, double h, double gate, int cap) {
    Complex best = s;
    double best_res = std::abs(q.f(s, h));
    for (int it = 0; it < cap && best_res > gate; ++it) {
        const Complex fs = q.f_s(s, h);
        if (std::abs(fs) <= 1e-12 * q.coeff_scale()) break;
        s -= q.f(s, h) / fs;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) break;
        const double res = std::abs(q.f(s, h));
        if (res < best_res) {
            best = s;
            best_res = res;
        }
    }
    return best;
}

}  // namespace detail

/// Whether the trajectory represents a zero inside the region at delay h.
/// An exited trajectory's final sample is already outside; a defect
/// trajectory is unknown past its defect point.
inline bool trajectory_alive_at(const Trajectory& t, double h) {
    const double tol = 1e-9;
    if (h < t.start_h() - tol) return false;
    switch (t.status) {
        case TrajectoryStatus::active:
            return h <= t.end_h() + tol;
        case TrajectoryStatus::exited:
        case TrajectoryStatus::defect:
            return h < t.end_h() - tol;
    }
    return false;
}

inline int active_count_at(const TraceResult& result, double h) {
    int n = 0;
    for (const Trajectory& t : result.trajectories)
        if (trajectory_alive_at(t, h)) ++n;
    return n;
}

/// Zero location of a trajectory at delay h, linearly interpolated between
/// the bracketing accepted samples.
inline std::optional<Complex> trajectory_position_at(const Trajectory& t, double h) {
    if (!trajectory_alive_at(t, h)) return std::nullopt;
    const auto& ss = t.samples;
    if (h <= ss.front().h) return ss.front().s;
    if (h >= ss.back().h) return ss.back().s;
    auto it = std::lower_bound(ss.begin(), ss.end(), h,
                               [](const TrajectorySample& a, double v) { return a.h < v; });
    const TrajectorySample& hi = *it;
    const TrajectorySample& lo = *(it - 1);
    if (hi.h == lo.h) return hi.s;
    const double w = (h - lo.h) / (hi.h - lo.h);
    return lo.s + w * (hi.s - lo.s);
}

/// Sweep every zero of f(s,h) in Re(s) > sigma0 from h = 0 to h_final:
/// seed with the roots of a+b, insert conjugate pairs at each entering
/// boundary crossing, advance every live trajectory between consecutive
/// delay-set elements, and drop trajectories once Re(s) < sigma0 - 1e-6.
/// Multiple seeds closer than 1e-4 * max(1, |z|) form a cluster; each member
/// is pushed off the (singular) multiple root by 1e-4 * e^{j theta_m} with
/// equally spaced angles and re-polished at h = h_step_min before tracing.
inline TraceResult trace_all(const QuasiPolynomial& q, const Region& region, double h_final,
                             const TraceConfig& cfg) {
    validate_region(region);
    validate_config(cfg);
    if (!(h_final > 0.0)) throw InvalidInput("h_final must be positive");

    const double sigma0 = region.sigma0;
    const double boundary_margin = 1e-9;
    const double exit_margin = 1e-6;
    const double polish_gate = 1e-12 * q.coeff_scale();

    TraceResult result;
    result.region = region;
    result.h_final = h_final;
    result.config = cfg;
    result.events = find_crossings(q, region, h_final, 1e-8, &result.warnings);

    result.delay_set.push_back(0.0);
    for (const CrossingEvent& e : result.events)
        if (e.entering) result.delay_set.push_back(e.delay);
    std::sort(result.delay_set.begin(), result.delay_set.end());

    std::vector<double> stops;
    for (double d : result.delay_set)
        if (d > 0.0 && d <= h_final && (stops.empty() || d - stops.back() > 1e-9))
            stops.push_back(d);
    if (stops.empty() || h_final - stops.back() > 1e-9) stops.push_back(h_final);

    const RealPolynomial h0_poly = q.delay_free() ? q.a() : q.a() + q.b();
    std::vector<Complex> seeds;
    if (h0_poly.degree() >= 1) seeds = find_roots(h0_poly, 1e-10);
    std::sort(seeds.begin(), seeds.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    int next_id = 0;
    if (q.delay_free()) {
        for (const Complex r : seeds) {
            if (r.real() < sigma0 - boundary_margin) continue;
            Trajectory t;
            t.id = next_id++;
            const double res = std::abs(q.f(r, 0.0));
            t.samples.push_back({0.0, r, res});
            t.samples.push_back({h_final, r, res});
            result.trajectories.push_back(std::move(t));
        }
    } else {
        // Group seeds into clusters of numerically coincident roots before
        // the boundary filter: a multiple root exactly on the boundary is
        // returned by the root finder as a spread of copies straddling it,
        // and must be kept or dropped as a unit (by its centroid).
        std::vector<bool> used(seeds.size(), false);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (used[i]) continue;
            std::vector<std::size_t> cluster{i};
            used[i] = true;
            for (std::size_t j = i + 1; j < seeds.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(seeds[j] - seeds[i]) <= 1e-4 * std::max(1.0, std::abs(seeds[i]))) {
                    cluster.push_back(j);
                    used[j] = true;
                }
            }
            Complex center{0.0, 0.0};
            for (std::size_t j : cluster) center += seeds[j];
            center /= static_cast<double>(cluster.size());
            if (center.real() < sigma0 - boundary_margin) continue;
            if (cluster.size() == 1) {
                Trajectory t;
                t.id = next_id++;
                t.samples.push_back({0.0, seeds[i], std::abs(q.f(seeds[i], 0.0))});
                result.trajectories.push_back(std::move(t));
                continue;
            }
            for (std::size_t m = 0; m < cluster.size(); ++m) {
                const double theta =
                    2.0 * std::numbers::pi * static_cast<double>(m) / cluster.size();
                const Complex start = center + 1e-4 * std::polar(1.0, theta);
                Trajectory t;
                t.id = next_id++;
                t.samples.push_back({0.0, start, std::abs(q.f(start, 0.0))});
                const Complex polished =
                    detail::newton_polish(q, start, cfg.h_step_min, polish_gate, 50);
                t.samples.push_back(
                    {cfg.h_step_min, polished, std::abs(q.f(polished, cfg.h_step_min))});
                result.trajectories.push_back(std::move(t));
            }
        }

        for (const double stop : stops) {
            for (Trajectory& t : result.trajectories) {
                if (t.status != TrajectoryStatus::active) continue;
                if (t.end_h() >= stop) continue;
                const AdvanceResult adv = advance(q, t.samples.back(), stop, cfg);
                bool exited = false;
                for (std::size_t k = 1; k < adv.samples.size(); ++k) {
                    t.samples.push_back(adv.samples[k]);
                    if (adv.samples[k].s.real() < sigma0 - exit_margin) {
                        exited = true;
                        break;
                    }
                }
                if (exited) {
                    t.status = TrajectoryStatus::exited;
                } else if (adv.status != AdvanceStatus::ok) {
                    t.status = TrajectoryStatus::defect;
                    t.defect_reason = adv.defect_reason;
                    result.warnings.push_back("trajectory " + std::to_string(t.id) +
                                              " stopped at h = " + std::to_string(t.end_h()) +
                                              ": " + adv.defect_reason);
                }
            }
            for (std::size_t ei = 0; ei < result.events.size(); ++ei) {
                const CrossingEvent& e = result.events[ei];
                if (!e.entering || std::abs(e.delay - stop) > 1e-9) continue;
                const Complex plus =
                    detail::newton_polish(q, Complex(sigma0, e.omega), stop, polish_gate, 20);
                Trajectory t;
                t.id = next_id++;
                t.origin_event = static_cast<int>(ei);
                t.samples.push_back({stop, plus, std::abs(q.f(plus, stop))});
                result.trajectories.push_back(std::move(t));
                if (e.omega > 1e-12) {
                    const Complex minus = std::conj(plus);
                    Trajectory tc;
                    tc.id = next_id++;
                    tc.origin_event = static_cast<int>(ei);
                    tc.samples.push_back({stop, minus, std::abs(q.f(minus, stop))});
                    result.trajectories.push_back(std::move(tc));
                }
            }
        }
    }

    for (Trajectory& t : result.trajectories) {
        if (t.status != TrajectoryStatus::active) continue;
        TrajectorySample& last = t.samples.back();
        const Complex polished = detail::newton_polish(q, last.s, last.h, polish_gate, 50);
        const double res = std::abs(q.f(polished, last.h));
        if (res <= last.residual) {
            last.s = polished;
            last.residual = res;
        }
        result.zeros_final.push_back(last.s);
    }
    for (const Trajectory& t : result.trajectories)
        for (const TrajectorySample& smp : t.samples)
            result.max_residual = std::max(result.max_residual, smp.residual);
    return result;
}

enum class StabilityVerdict { stable, marginal, unstable, inconclusive };

inline const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::stable: return "stable";
        case StabilityVerdict::marginal: return "marginal";
        case StabilityVerdict::unstable: return "unstable";
        case StabilityVerdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct AbscissaSample {
    double h = 0.0;
    /// Largest Re(s) among zeros inside the region; empty when no zero is
    /// inside at this delay.
    std::optional<double> abscissa;
};

struct StabilityReport {
    std::vector<AbscissaSample> grid;
    StabilityVerdict verdict = StabilityVerdict::inconclusive;
    /// First delay at which the restricted spectral abscissa reaches 0
    /// (linear interpolation between grid samples); empty if it never does.
    std::optional<double> delay_margin;
    /// First delay from which some zero sits within 0.01 of the imaginary
    /// axis; empty if none does.
    std::optional<double> near_marginal_from;
    std::string note;
};

/// Delay-stability summary over a uniform 257-point grid joined with the
/// delay set.  Verdicts compare the restricted abscissa at h_final against
/// Re(s) = 0 with tolerance 1e-6, and are only meaningful when sigma0 < 0;
/// otherwise zeros left of sigma0 are invisible and the report says so.
inline StabilityReport stability_report(const TraceResult& result) {
    StabilityReport rep;
    const double sigma0 = result.region.sigma0;

    std::vector<double> grid;
    const int n_grid = 257;
    for (int i = 0; i < n_grid; ++i)
        grid.push_back(result.h_final * static_cast<double>(i) / (n_grid - 1));
    for (double d : result.delay_set)
        if (d <= result.h_final) grid.push_back(d);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
               grid.end());

    for (const double h : grid) {
        std::optional<double> alpha;
        for (const Trajectory& t : result.trajectories) {
            const auto pos = trajectory_position_at(t, h);
            if (!pos) continue;
            if (pos->real() < sigma0 - 1e-9) continue;
            if (!alpha || pos->real() > *alpha) alpha = pos->real();
        }
        rep.grid.push_back({h, alpha});
    }

    const double axis_tol = 1e-6;
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        if (!rep.grid[i].abscissa) continue;
        const double a1 = *rep.grid[i].abscissa;
        if (a1 < -axis_tol) continue;
        double margin = rep.grid[i].h;
        if (i > 0 && rep.grid[i - 1].abscissa) {
            const double a0 = *rep.grid[i - 1].abscissa;
            if (a0 < -axis_tol && a1 > a0)
                margin = rep.grid[i - 1].h +
                         (-axis_tol - a0) / (a1 - a0) * (rep.grid[i].h - rep.grid[i - 1].h);
        }
        rep.delay_margin = margin;
        break;
    }
    const double near_band = 1e-2;
    for (const AbscissaSample& g : rep.grid) {
        if (g.abscissa && *g.abscissa >= -near_band) {
            rep.near_marginal_from = g.h;
            break;
        }
    }

    if (sigma0 >= 0.0) {
        rep.verdict = StabilityVerdict::inconclusive;
        rep.note = "sigma0 >= 0: zeros left of the boundary are not tracked, so stability "
                   "relative to the imaginary axis cannot be decided";
        return rep;
    }
    std::optional<double> final_alpha;
    for (auto it = rep.grid.rbegin(); it != rep.grid.rend(); ++it) {
        if (it->abscissa) {
            final_alpha = it->abscissa;
            break;
        }
    }
    if (!final_alpha) {
        rep.verdict = StabilityVerdict::stable;
        rep.note = "no zero right of sigma0 at any sampled delay";
    } else if (*final_alpha > axis_tol) {
        rep.verdict = StabilityVerdict::unstable;
    } else if (*final_alpha >= -axis_tol) {
        rep.verdict = StabilityVerdict::marginal;
    } else {
        rep.verdict = StabilityVerdict::stable;
    }
    if (rep.near_marginal_from)
        rep.note += (rep.note.empty() ? "" : "; ") + std::string("zeros within ") +
                    "0.01 of the imaginary axis from h = " + std::to_string(*rep.near_marginal_from);
    return rep;
}

}  // namespace qptrace
