#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qptrace/crossing.hpp"
#include "qptrace/errors.hpp"
#include "qptrace/quasipolynomial.hpp"

namespace qptrace {

/// A complete problem statement as accepted by the command line: the two
/// coefficient lists (ascending powers), the region boundary, the sweep end,
/// tolerances, and where to write results.
struct ProblemSpec {
    std::vector<double> a_coeffs;
    std::vector<double> b_coeffs;
    double sigma0 = 0.0;
    double h_final = 0.0;
    double eps_tz = 1e-3;
    std::optional<double> omega_max;
    std::string output_dir = ".";
};

inline double parse_double(const std::string& text, const std::string& what) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    double value = 0.0;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw InvalidInput("cannot parse " + what + ": '" + text + "'");
    return value;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string item;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::size_t stop = comma == std::string::npos ? text.size() : comma;
        item = text.substr(start, stop - start);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos)
            throw InvalidInput("empty element in " + what + ": '" + text + "'");
        out.push_back(parse_double(item.substr(first, last - first + 1), what));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw InvalidInput(what + " must contain at least one coefficient");
    return out;
}

/// Reads `key = value` lines into spec; '#' starts a comment, blank lines
/// are skipped.  Keys mirror the command-line flags: a, b, sigma0, h_final,
/// eps_tz, omega_max, out.
inline void apply_config_file(ProblemSpec& spec, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value");
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty())
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": empty value for " + key);
        if (key == "a")
            spec.a_coeffs = parse_double_list(value, "a");
        else if (key == "b")
            spec.b_coeffs = parse_double_list(value, "b");
        else if (key == "sigma0")
            spec.sigma0 = parse_double(value, "sigma0");
        else if (key == "h_final")
            spec.h_final = parse_double(value, "h_final");
        else if (key == "eps_tz")
            spec.eps_tz = parse_double(value, "eps_tz");
        else if (key == "omega_max")
            spec.omega_max = parse_double(value, "omega_max");
        else if (key == "out")
            spec.output_dir = value;
        else
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
    }
}

inline QuasiPolynomial make_quasipolynomial(const ProblemSpec& spec) {
    if (spec.a_coeffs.empty()) throw InvalidInput("coefficients of a are required");
    const RealPolynomial a(spec.a_coeffs);
    const RealPolynomial b(spec.b_coeffs.empty() ? std::vector<double>{0.0} : spec.b_coeffs);
    return QuasiPolynomial(a, b, b.is_zero());
}

inline Region make_region(const ProblemSpec& spec, const QuasiPolynomial& q) {
    Region r;
    r.sigma0 = spec.sigma0;
    r.omega_max = spec.omega_max ? *spec.omega_max : default_omega_max(q, spec.sigma0, spec.h_final);
    validate_region(r);
    return r;
}

}  // namespace qptrace
