#pragma once

#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "qptrace/oracle.hpp"
#include "qptrace/problem.hpp"
#include "qptrace/serialize.hpp"
#include "qptrace/tracker.hpp"

namespace qptrace {

struct TraceRun {
    QuasiPolynomial q;
    TraceResult result;
    StabilityReport stability;
    int exit_code = 0;
};

inline TraceRun execute_trace(const ProblemSpec& spec) {
    if (!(spec.h_final > 0.0)) throw InvalidInput("h_final must be positive");
    if (!(spec.eps_tz > 0.0)) throw InvalidInput("eps_tz must be positive");
    QuasiPolynomial q = make_quasipolynomial(spec);
    const Region region = make_region(spec, q);
    TraceConfig cfg;
    cfg.eps_tz = spec.eps_tz;
    TraceResult result = trace_all(q, region, spec.h_final, cfg);
    StabilityReport stability = stability_report(result);
    int code = 0;
    for (const Trajectory& t : result.trajectories)
        if (t.status == TrajectoryStatus::defect) code = 1;
    return TraceRun{std::move(q), std::move(result), std::move(stability), code};
}

/// Rectangle guaranteed to contain every zero of f(., h) with Re(s) >= sigma0:
/// for such zeros |e^{-hs}| <= e^{-h sigma0}, so |s| obeys a Cauchy-type bound
/// with the delay term inflated by that factor.
inline ContourRectangle verification_rectangle(const QuasiPolynomial& q, const Region& region,
                                               double h) {
    const auto& ac = q.a().coeffs();
    double num = 0.0;
    for (std::size_t k = 0; k + 1 < ac.size(); ++k) num += std::abs(ac[k]);
    const double damp = std::exp(std::min(700.0, -h * region.sigma0));
    for (const double c : q.b().coeffs()) num += damp * std::abs(c);
    const double r_zero = std::max(1.0, num / std::abs(ac.back()));

    double im_extent = std::max(region.omega_max, r_zero);
    const RealPolynomial h0_poly = q.delay_free() ? q.a() : q.a() + q.b();
    if (h0_poly.degree() >= 1) im_extent = std::max(im_extent, root_bound(h0_poly) + 1.0);

    ContourRectangle rect;
    rect.re_min = region.sigma0;
    rect.re_max = r_zero + 1.0;
    rect.im_min = -im_extent;
    rect.im_max = im_extent;
    rect.segments_per_edge = 256;
    return rect;
}

/// Number of distinct zeros inside the region at delay h according to the
/// traced data: live trajectories are interpolated to h, polished by Newton,
/// and coincident results (within 1e-9 relative) are counted once.
inline int traced_distinct_count(const QuasiPolynomial& q, const TraceResult& result, double h,
                                 std::vector<std::string>* warnings = nullptr) {
    std::vector<Complex> zs;
    for (const Trajectory& t : result.trajectories) {
        const auto pos = trajectory_position_at(t, h);
        if (!pos) continue;
        zs.push_back(detail::newton_polish(q, *pos, h, 1e-12 * q.coeff_scale(), 50));
    }
    std::vector<Complex> distinct;
    for (const Complex z : zs) {
        bool dup = false;
        for (const Complex d : distinct) {
            if (std::abs(z - d) <= 1e-9 * (1.0 + std::abs(z))) {
                dup = true;
                break;
            }
        }
        if (!dup) distinct.push_back(z);
    }
    if (warnings && distinct.size() != zs.size())
        warnings->push_back("delay " + std::to_string(h) + ": " +
                            std::to_string(zs.size() - distinct.size()) +
                            " trajectories collapsed onto shared zeros");
    return static_cast<int>(distinct.size());
}

inline int run_trace(const ProblemSpec& spec) {
    TraceRun run = execute_trace(spec);
    std::filesystem::create_directories(spec.output_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(spec.output_dir) / name).string();
    };
    write_text_file(path("trajectories.csv"), trajectories_csv(run.result));
    write_json_file(path("events.json"), events_json(run.result));
    write_json_file(path("report.json"),
                    report_json(run.result, run.stability, spec.a_coeffs,
                                spec.b_coeffs.empty() ? std::vector<double>{0.0} : spec.b_coeffs));
    return run.exit_code;
}

inline int run_verify(const ProblemSpec& spec, const std::vector<double>& delays) {
    for (const double d : delays)
        if (!(d >= 0.0) || d > spec.h_final * (1.0 + 1e-12))
            throw InvalidInput("verify delay out of [0, h_final]: " + format_double(d));

    TraceRun run = execute_trace(spec);
    ordered_json j;
    j["format_version"] = 1;
    j["results"] = ordered_json::array();
    bool all_match = true;
    for (const double d : delays) {
        ordered_json entry;
        entry["delay"] = d;
        const int traced = traced_distinct_count(run.q, run.result, d, &run.result.warnings);
        entry["traced"] = traced;
        try {
            const int oracle =
                count_zeros(run.q, d, verification_rectangle(run.q, run.result.region, d));
            entry["oracle"] = oracle;
            entry["match"] = traced == oracle;
            if (traced != oracle) all_match = false;
        } catch (const VerificationUnavailable& ex) {
            entry["oracle"] = nullptr;
            entry["match"] = false;
            entry["error"] = ex.what();
            all_match = false;
        }
        j["results"].push_back(std::move(entry));
    }
    j["all_match"] = all_match;
    std::filesystem::create_directories(spec.output_dir);
    write_json_file((std::filesystem::path(spec.output_dir) / "verify.json").string(), j);
    return all_match ? 0 : 1;
}

inline void print_summary(const TraceRun& run, std::ostream& os) {
    os << "zeros at h_final: " << run.result.zeros_final.size() << "\n";
    for (const Complex z : run.result.zeros_final)
        os << "  " << format_double(z.real()) << (z.imag() < 0 ? " - " : " + ")
           << format_double(std::abs(z.imag())) << "j\n";
    os << "crossing events: " << run.result.events.size() << "\n";
    os << "delay set size: " << run.result.delay_set.size() << "\n";
    os << "max residual: " << format_double(run.result.max_residual) << "\n";
    os << "stability: " << to_string(run.stability.verdict) << "\n";
    if (run.stability.delay_margin)
        os << "delay margin: " << format_double(*run.stability.delay_margin) << "\n";
    if (run.stability.near_marginal_from)
        os << "near-marginal zeros from h = " << format_double(*run.stability.near_marginal_from)
           << "\n";
    if (!run.stability.note.empty()) os << "note: " << run.stability.note << "\n";
    for (const std::string& w : run.result.warnings) os << "warning: " << w << "\n";
}

}  // namespace qptrace
