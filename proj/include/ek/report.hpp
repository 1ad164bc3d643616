#pragma once

#include <string>

#include <json.hpp>

#include "ek/lattice.hpp"
#include "ek/numeric.hpp"

namespace ek {

using ordered_json = nlohmann::ordered_json;

/// Structured outcome of one verification check.  pass <=> abs_error <=
/// tolerance, with abs_error = |lhs - rhs| (checks that compare on a log
/// scale say so in params and store the log-scale error here).
struct VerificationReport {
    std::string check_name;
    std::array<double, 4> lattice{};
    ordered_json params = ordered_json::object();
    cplx lhs;
    cplx rhs;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_ms = 0.0;

    void finish(const cplx &lhs_value, const cplx &rhs_value, double tol)
    {
        lhs = lhs_value;
        rhs = rhs_value;
        abs_error = std::abs(lhs_value - rhs_value);
        tolerance = tol;
        pass = abs_error <= tol;
    }

    ordered_json to_json() const
    {
        ordered_json j;
        j["check"] = check_name;
        j["lattice"] = lattice;
        j["params"] = params;
        j["lhs"] = {lhs.real(), lhs.imag()};
        j["rhs"] = {rhs.real(), rhs.imag()};
        j["abs_error"] = abs_error;
        j["tolerance"] = tolerance;
        j["pass"] = pass;
        j["runtime_ms"] = runtime_ms;
        return j;
    }
};

inline std::array<double, 4> lattice_echo(const Lattice &L)
{
    return {L.omega1.real(), L.omega1.imag(), L.omega2.real(), L.omega2.imag()};
}

} // namespace ek
