#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "betatrix/error.hpp"
#include "betatrix/matrix.hpp"
#include "betatrix/spectral.hpp"
#include "betatrix/symbolic.hpp"
#include "betatrix/verify.hpp"
#include "betatrix/version.hpp"

namespace betatrix {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Numbers

/// Shortest decimal string that round-trips to the same double, '.' decimal
/// point regardless of locale.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw Error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

inline void write_csv_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out << ',';
        out << format_double(values[i]);
    }
    out << '\n';
}

// ---------------------------------------------------------------------------
// Matrices

inline Json to_json(const TridiagonalSym& t) {
    return {{"kind", "tridiagonal"}, {"diag", t.diag}, {"subdiag", t.subdiag}};
}

inline Json to_json(const BidiagonalPos& b) {
    return {{"kind", "bidiagonal"}, {"diag", b.diag}, {"subdiag", b.subdiag}};
}

using StructuredMatrix = std::variant<TridiagonalSym, BidiagonalPos>;

namespace detail {

inline std::vector<double> number_array(const Json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw InputError(std::string("matrix JSON: missing array '") + field + "'");
    std::vector<double> out;
    out.reserve(j.at(field).size());
    for (const auto& v : j.at(field)) {
        if (!v.is_number())
            throw InputError(std::string("matrix JSON: non-numeric entry in '") + field + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

inline StructuredMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw InputError("matrix JSON: expected an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    auto diag = detail::number_array(j, "diag");
    auto sub = detail::number_array(j, "subdiag");
    if (diag.empty() || sub.size() + 1 != diag.size())
        throw InputError("matrix JSON: need n >= 1 diagonal entries and n - 1 subdiagonal entries");
    if (kind == "tridiagonal") {
        TridiagonalSym t(std::move(diag), std::move(sub));
        t.validate_finite();
        return t;
    }
    if (kind == "bidiagonal")
        return BidiagonalPos(std::move(diag), std::move(sub));
    throw InputError("matrix JSON: unknown kind '" + kind + "'");
}

inline Json to_json(const Spectrum& s) { return {{"lambda", s.lambda}, {"q", s.q}}; }

// ---------------------------------------------------------------------------
// Polynomials

inline Json to_json(const BetaPoly& p) {
    Json terms = Json::array();
    for (const auto& [key, c] : p.terms()) {
        terms.push_back({{"exp", {key.first, key.second}},
                         {"num", numerator(c).str()},
                         {"den", denominator(c).str()}});
    }
    return {{"vars", {"s", "a"}}, {"terms", terms}};
}

inline BetaPoly beta_poly_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
        throw InputError("polynomial JSON: expected an object with a 'terms' array");
    BetaPoly p;
    for (const auto& t : j.at("terms")) {
        const auto& e = t.at("exp");
        if (!e.is_array() || e.size() != 2)
            throw InputError("polynomial JSON: 'exp' must be [power of s, power of a]");
        const Rational c(BigInt(t.at("num").get<std::string>()), BigInt(t.at("den").get<std::string>()));
        p.add_term({e[0].get<unsigned>(), e[1].get<unsigned>()}, c);
    }
    return p;
}

inline Json to_json(const ExpectedCharPoly& e) {
    Json coeffs = Json::array();
    for (const auto& c : e.coefficients)
        coeffs.push_back(to_json(c));
    return {{"variable", "y"}, {"degree", e.degree}, {"coefficients", coeffs}, {"text", e.to_string()}};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const CheckResult& c) {
    Json j = {{"name", c.name},
              {"statistic", c.statistic},
              {"threshold", c.threshold},
              {"pass", c.pass},
              {"sample_count", c.sample_count},
              {"seed", c.seed}};
    if (!c.detail.empty())
        j["detail"] = c.detail;
    return j;
}

inline Json to_json(const Report& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(to_json(c));
    return {{"pass", r.all_pass()}, {"failures", r.failures()}, {"checks", checks}};
}

// ---------------------------------------------------------------------------
// Run records

/// Provenance stored with every output so a run can be repeated exactly.
struct RunRecord {
    std::string command;
    Json params = Json::object();
    std::uint64_t seed = 0;
    std::string version{kVersion};
    double wall_time_seconds = 0.0;
    std::vector<std::string> outputs;
};

inline Json to_json(const RunRecord& r) {
    return {{"command", r.command},       {"params", r.params},
            {"seed", r.seed},             {"version", r.version},
            {"wall_time_seconds", r.wall_time_seconds}, {"outputs", r.outputs}};
}

/// Measures wall time from construction.
class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// CSV files carry the run record as a leading comment line.
inline void write_csv_header(std::ostream& out, const RunRecord& record) {
    out << "# run: " << to_json(record).dump() << '\n';
}

} // namespace betatrix
