#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qptrace/qptrace.hpp"

namespace {

struct CommonOpts {
    std::string a, b, config, out;
    double sigma0 = 0.0, h_final = 0.0, eps_tz = 1e-3, omega_max = 0.0;
    CLI::Option *oa = nullptr, *ob = nullptr, *osigma = nullptr, *ohf = nullptr, *oeps = nullptr,
                *oomega = nullptr, *oout = nullptr, *oconfig = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    o.oa = cmd->add_option("--a", o.a, "coefficients of a, ascending, comma-separated");
    o.ob = cmd->add_option("--b", o.b, "coefficients of b, ascending, comma-separated");
    o.osigma = cmd->add_option("--sigma0", o.sigma0, "boundary abscissa of the region");
    o.ohf = cmd->add_option("--h-final", o.h_final, "final delay of the sweep");
    o.oeps = cmd->add_option("--eps-tz", o.eps_tz, "trajectory residual tolerance");
    o.oomega = cmd->add_option("--omega-max", o.omega_max, "frequency cap for crossing search");
    o.oout = cmd->add_option("--out", o.out, "output directory");
    o.oconfig = cmd->add_option("--config", o.config, "config file (key = value lines)");
}

qptrace::ProblemSpec build_spec(const CommonOpts& o) {
    qptrace::ProblemSpec spec;
    if (o.oconfig->count()) qptrace::apply_config_file(spec, o.config);
    if (o.oa->count()) spec.a_coeffs = qptrace::parse_double_list(o.a, "a");
    if (o.ob->count()) spec.b_coeffs = qptrace::parse_double_list(o.b, "b");
    if (o.osigma->count()) spec.sigma0 = o.sigma0;
    if (o.ohf->count()) spec.h_final = o.h_final;
    if (o.oeps->count()) spec.eps_tz = o.eps_tz;
    if (o.oomega->count()) spec.omega_max = o.omega_max;
    if (o.oout->count()) spec.output_dir = o.out;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace every zero of a(s) + b(s)e^{-hs} in Re(s) > sigma0 as h sweeps 0 "
                 "to h_final"};
    app.require_subcommand(1);

    CLI::App* trace_cmd = app.add_subcommand(
        "trace", "run the sweep; write trajectories.csv, events.json, report.json");
    CommonOpts trace_opts;
    add_common(trace_cmd, trace_opts);

    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "compare traced zero counts against argument-principle counts");
    CommonOpts verify_opts;
    add_common(verify_cmd, verify_opts);
    std::string delays_arg;
    verify_cmd->add_option("--delays", delays_arg, "delays to verify, comma-separated");

    CLI::App* report_cmd = app.add_subcommand(
        "report", "run the sweep and print a summary; write report.json when --out is given");
    CommonOpts report_opts;
    add_common(report_cmd, report_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (trace_cmd->parsed()) {
            const int code = qptrace::run_trace(build_spec(trace_opts));
            if (code != 0) std::cerr << "trace finished with defect trajectories\n";
            return code;
        }
        if (verify_cmd->parsed()) {
            std::vector<double> delays;
            if (!delays_arg.empty())
                delays = qptrace::parse_double_list(delays_arg, "delays");
            return qptrace::run_verify(build_spec(verify_opts), delays);
        }
        const qptrace::ProblemSpec spec = build_spec(report_opts);
        const qptrace::TraceRun run = qptrace::execute_trace(spec);
        qptrace::print_summary(run, std::cout);
        if (report_opts.oout->count()) {
            std::filesystem::create_directories(spec.output_dir);
            qptrace::write_json_file(
                (std::filesystem::path(spec.output_dir) / "report.json").string(),
                qptrace::report_json(run.result, run.stability, spec.a_coeffs,
                                     spec.b_coeffs.empty() ? std::vector<double>{0.0}
                                                           : spec.b_coeffs));
        }
        return run.exit_code;
    } catch (const qptrace::InvalidInput& ex) {
        std::cerr << "invalid input: " << ex.what() << "\n";
        return 2;
    } catch (const qptrace::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
