#include "appc/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace appc {

namespace {

void indexed(std::vector<std::string>& cols, const std::string& base, std::size_t count) {
  for (std::size_t i = 1; i <= count; ++i) cols.push_back(base + std::to_string(i));
}

// Columns in write order; each entry pulls the matching values from a sample.
std::vector<std::vector<double>> row_groups(const TraceSample& s, bool has_oracle) {
  std::vector<std::vector<double>> g;
  g.push_back({s.t});
  g.push_back(s.x);
  if (has_oracle) {
    g.push_back(s.xref);
    g.push_back(s.eref);
  }
  g.push_back({s.u});
  if (has_oracle) g.push_back({s.u_star});
  g.push_back({s.r});
  g.push_back(s.theta);
  if (has_oracle) g.push_back(s.theta_err);
  g.push_back(s.phi_bar_state);
  g.push_back({s.decay});
  g.push_back({s.phi, s.phi_rel, s.Delta, s.Delta_scale_log10, s.Omega, s.Omega_scale_log10,
               s.Omega_rate});
  g.push_back(s.Upsilon);
  g.push_back({s.Delta_M, s.Delta_x, s.Delta_r});
  if (has_oracle) g.push_back({s.zA_res, s.zB_res});
  return g;
}

double parse_number(const std::string& field, std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw TraceFormatError("line " + std::to_string(line) + ": not a number: '" + field + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_columns(std::size_t n, bool has_oracle) {
  std::vector<std::string> c{"t"};
  indexed(c, "x", n);
  if (has_oracle) {
    indexed(c, "xref", n);
    indexed(c, "eref", n);
  }
  c.push_back("u");
  if (has_oracle) c.push_back("u_star");
  c.push_back("r");
  indexed(c, "theta", n + 1);
  if (has_oracle) indexed(c, "theta_err", n + 1);
  indexed(c, "Phibar", n + 1);
  c.emplace_back("decay");
  for (const char* name : {"phi", "phi_rel", "Delta", "Delta_scale_log10", "Omega",
                           "Omega_scale_log10", "Omega_rate"}) {
    c.emplace_back(name);
  }
  indexed(c, "Upsilon", n + 1);
  for (const char* name : {"Delta_M", "Delta_x", "Delta_r"}) c.emplace_back(name);
  if (has_oracle) {
    c.emplace_back("zA_res");
    c.emplace_back("zB_res");
  }
  return c;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  const auto cols = trace_columns(trace.n, trace.has_oracle);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const TraceSample& s : trace.samples) {
    bool first = true;
    for (const auto& group : row_groups(s, trace.has_oracle)) {
      for (double v : group) {
        if (!first) out << ',';
        out << format_double(v);
        first = false;
      }
    }
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const SimulationTrace& trace) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trace_csv(f, trace);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

SimulationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceFormatError("empty trace file");
  const auto header = split(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;

  std::size_t n = 0;
  while (index.count("x" + std::to_string(n + 1))) ++n;
  if (n == 0) throw TraceFormatError("header has no x1 column");
  const bool has_oracle = index.count("theta_err1") > 0;
  const auto expected = trace_columns(n, has_oracle);
  if (header != expected) {
    throw TraceFormatError("header does not match the trace layout for n = " + std::to_string(n));
  }

  SimulationTrace trace;
  trace.n = n;
  trace.has_oracle = has_oracle;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(cells.size()));
    }
    std::size_t pos = 0;
    auto next = [&]() { return parse_number(cells[pos++], lineno); };
    auto take = [&](std::size_t count) {
      std::vector<double> v(count);
      for (double& e : v) e = next();
      return v;
    };
    TraceSample s;
    s.t = next();
    s.x = take(n);
    if (has_oracle) {
      s.xref = take(n);
      s.eref = take(n);
    }
    s.u = next();
    if (has_oracle) s.u_star = next();
    s.r = next();
    s.theta = take(n + 1);
    if (has_oracle) s.theta_err = take(n + 1);
    s.phi_bar_state = take(n + 1);
    s.decay = next();
    s.phi = next();
    s.phi_rel = next();
    s.Delta = next();
    s.Delta_scale_log10 = next();
    s.Omega = next();
    s.Omega_scale_log10 = next();
    s.Omega_rate = next();
    s.Upsilon = take(n + 1);
    s.Delta_M = next();
    s.Delta_x = next();
    s.Delta_r = next();
    if (has_oracle) {
      s.zA_res = next();
      s.zB_res = next();
    }
    if (!trace.samples.empty() && !(s.t > trace.samples.back().t)) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": time grid not strictly increasing");
    }
    trace.samples.push_back(std::move(s));
  }
  if (has_oracle && !trace.samples.empty()) {
    const TraceSample& s0 = trace.samples.front();
    for (std::size_t i = 0; i <= n; ++i) trace.theta_star.push_back(s0.theta[i] - s0.theta_err[i]);
  }
  return trace;
}

SimulationTrace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return read_trace_csv(f);
}

}  // namespace appc
