#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "mechband/ode_spec.hpp"

namespace mechband::cli {

/// Parses a spec document:
///   {"dims": {"T","V","Q","R","T_init","R_init"},
///    "weights": {"gov","init","smooth"},      (optional, default 1)
///    "c": [T][Q][V][R+1], "d": [T][Q], "u": [T_init][V][R_init+1], "s": [T-1]}
/// Unknown keys are rejected. Throws Error(ParseError) naming the JSON path
/// of the offending value, or the validate_spec error for a well-formed but
/// invalid spec.
OdeSpec parse_spec_json(const std::string& text);
OdeSpec read_spec_file(const std::filesystem::path& path);

/// Inverse of parse_spec_json, numbers with round-trip precision.
std::string spec_to_json(const OdeSpec& spec);

/// Header t,time,var,order,value; one row per (t, v, r) in flat order.
void write_trajectory_csv(std::ostream& out, const OdeSpec& spec, const Solution& y);

}  // namespace mechband::cli
