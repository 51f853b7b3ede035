#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "qptrace/crossing.hpp"
#include "qptrace/errors.hpp"
#include "qptrace/tracker.hpp"

namespace qptrace {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::string trajectories_csv(const TraceResult& result) {
    std::string out = "traj_id,h,re,im,residual\n";
    for (const Trajectory& t : result.trajectories) {
        for (const TrajectorySample& smp : t.samples) {
            out += std::to_string(t.id);
            out += ',';
            out += format_double(smp.h);
            out += ',';
            out += format_double(smp.s.real());
            out += ',';
            out += format_double(smp.s.imag());
            out += ',';
            out += format_double(smp.residual);
            out += '\n';
        }
    }
    return out;
}

inline ordered_json events_json(const TraceResult& result) {
    ordered_json j;
    j["format_version"] = 1;
    j["events"] = ordered_json::array();
    for (const CrossingEvent& e : result.events) {
        ordered_json je;
        je["omega"] = e.omega;
        je["delay"] = e.delay;
        je["branch"] = e.branch;
        je["entering"] = e.entering;
        je["rt_value"] = e.rt_value;
        j["events"].push_back(std::move(je));
    }
    return j;
}

inline ordered_json stability_json(const StabilityReport& rep) {
    ordered_json j;
    j["verdict"] = to_string(rep.verdict);
    if (rep.delay_margin)
        j["delay_margin"] = *rep.delay_margin;
    else
        j["delay_margin"] = nullptr;
    if (rep.near_marginal_from)
        j["near_marginal_from"] = *rep.near_marginal_from;
    else
        j["near_marginal_from"] = nullptr;
    j["note"] = rep.note;
    j["abscissa_grid"] = ordered_json::array();
    for (const AbscissaSample& g : rep.grid) {
        ordered_json jg;
        jg["h"] = g.h;
        if (g.abscissa)
            jg["abscissa"] = *g.abscissa;
        else
            jg["abscissa"] = nullptr;
        j["abscissa_grid"].push_back(std::move(jg));
    }
    return j;
}

inline ordered_json report_json(const TraceResult& result, const StabilityReport& rep,
                                const std::vector<double>& a_coeffs,
                                const std::vector<double>& b_coeffs) {
    ordered_json j;
    j["format_version"] = 1;
    j["zeros_final"] = ordered_json::array();
    for (const Complex z : result.zeros_final) {
        ordered_json jz;
        jz["re"] = z.real();
        jz["im"] = z.imag();
        j["zeros_final"].push_back(std::move(jz));
    }
    j["delay_set"] = result.delay_set;
    j["max_residual"] = result.max_residual;
    j["stability_report"] = stability_json(rep);
    ordered_json cfg;
    cfg["a"] = a_coeffs;
    cfg["b"] = b_coeffs;
    cfg["sigma0"] = result.region.sigma0;
    cfg["omega_max"] = result.region.omega_max;
    cfg["h_final"] = result.h_final;
    cfg["eps_tz"] = result.config.eps_tz;
    cfg["h_step_init"] = result.config.h_step_init;
    cfg["h_step_min"] = result.config.h_step_min;
    cfg["h_step_max"] = result.config.h_step_max;
    cfg["corrector_cap"] = result.config.corrector_cap;
    cfg["adaptive"] = result.config.adaptive;
    j["config"] = std::move(cfg);
    ordered_json jt = ordered_json::array();
    for (const Trajectory& t : result.trajectories) {
        ordered_json e;
        e["id"] = t.id;
        e["origin"] = t.origin_event < 0 ? std::string("initial-root")
                                         : "entered-at-event-" + std::to_string(t.origin_event);
        switch (t.status) {
            case TrajectoryStatus::active: e["status"] = "active"; break;
            case TrajectoryStatus::exited: e["status"] = "exited"; break;
            case TrajectoryStatus::defect: e["status"] = "defect"; break;
        }
        e["start_h"] = t.start_h();
        e["end_h"] = t.end_h();
        if (t.status == TrajectoryStatus::defect) e["defect_reason"] = t.defect_reason;
        jt.push_back(std::move(e));
    }
    j["trajectories"] = std::move(jt);
    j["warnings"] = result.warnings;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << content;
    f.flush();
    if (!f) throw Error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace qptrace
