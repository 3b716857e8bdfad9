#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "appc/simulation.hpp"

namespace appc {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header names in column order for a trace of dimension n.
std::vector<std::string> trace_columns(std::size_t n, bool has_oracle);

/// One header row, then one row per sample, %.17g formatting.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);
void write_trace_csv(const std::string& path, const SimulationTrace& trace);

/// Inverse of write_trace_csv. The dimension and the presence of oracle
/// columns are inferred from the header. theta_star is recovered as
/// theta - theta_err from the first row when oracle columns are present.
SimulationTrace read_trace_csv(std::istream& in);
SimulationTrace read_trace_csv(const std::string& path);

/// %.17g
std::string format_double(double v);

}  // namespace appc
