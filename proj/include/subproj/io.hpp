#pragma once

#include <iosfwd>
#include <string>

#include "subproj/feasibility.hpp"

namespace subproj {

/// Parses a problem document (JSON). Unknown keys and malformed values raise
/// SchemaError; the numerics are not touched.
Problem parse_problem(const std::string& text);

/// Inverse of parse_problem. Callables are written by builtin name and
/// parameters; anything else raises NotSerializable.
std::string serialize_problem(const Problem& p);

/// Parses a single function record.
FunctionSpec parse_function(const std::string& text, std::size_t dimension);
std::string serialize_function(const FunctionSpec& f);

/// CSV trace: header, one row per iteration, then a '#' summary row.
void write_trace(std::ostream& out, const Problem& p, const SolveTrace& trace);

/// Shortest text that reads back as the same double.
std::string format_double(double v);

}  // namespace subproj
