// CSV artifacts and small file loaders. Numbers are written with 17
// significant digits so written values round-trip bit-exactly.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "analysis.hpp"

namespace pdspec {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {
inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}
}  // namespace detail

/// snapshots.csv: t,x,y[,exact]. All recorded snapshots plus the final state.
inline void write_snapshots_csv(const std::filesystem::path& path, const SolveResult& result,
                                const ManufacturedProblem* problem) {
  const bool with_exact = problem && problem->has_exact;
  auto out = detail::open_out(path);
  out << (with_exact ? "t,x,y,exact\n" : "t,x,y\n");
  auto write_field = [&](double t, const Field& y) {
    for (int i = 0; i < y.size(); ++i) {
      const double x = y.grid.x(i);
      out << format_g17(t) << ',' << format_g17(x) << ',' << format_g17(y[i]);
      if (with_exact) out << ',' << format_g17(problem->exact(x, t));
      out << '\n';
    }
  };
  bool final_written = false;
  for (const auto& snap : result.snapshots) {
    write_field(snap.t, snap.y);
    final_written = final_written || snap.t == result.final_t;
  }
  if (!final_written) write_field(result.final_t, result.final_y);
}

/// error_series.csv: t,max_rel_error.
inline void write_error_series_csv(const std::filesystem::path& path,
                                   const std::vector<std::pair<double, double>>& series) {
  auto out = detail::open_out(path);
  out << "t,max_rel_error\n";
  for (const auto& [t, e] : series) out << format_g17(t) << ',' << format_g17(e) << '\n';
}

/// error_profile.csv: x,rel_error on Omega nodes.
inline void write_profile_csv(const std::filesystem::path& path, const ErrorProfile& profile,
                              const MaskField& mask) {
  auto out = detail::open_out(path);
  out << "x,rel_error\n";
  for (int i = 0; i < profile.profile.size(); ++i)
    if (mask.in_omega(i))
      out << format_g17(profile.profile.grid.x(i)) << ',' << format_g17(profile.profile[i])
          << '\n';
}

/// convergence.csv: param,error (param is eps or dx).
inline void write_convergence_csv(const std::filesystem::path& path,
                                  const ConvergenceReport& report) {
  auto out = detail::open_out(path);
  out << "param,error\n";
  for (const auto& row : report.rows)
    out << format_g17(row.param) << ',' << format_g17(row.error) << '\n';
}

/// benchmark.csv: n,method,seconds.
inline void write_benchmark_csv(const std::filesystem::path& path,
                                const BenchmarkReport& report) {
  auto out = detail::open_out(path);
  out << "n,method,seconds\n";
  for (const auto& row : report.rows)
    out << row.n << ',' << row.method << ',' << format_g17(row.seconds) << '\n';
}

/// Two-column numeric CSV (blank lines and # comments allowed; an optional
/// non-numeric header line is skipped). Used for kernel sample tables and
/// custom initial conditions.
inline std::vector<std::pair<double, double>> load_two_column_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected two comma-separated columns");
    }
    try {
      size_t pa = 0, pb = 0;
      const double va = std::stod(a, &pa);
      const double vb = std::stod(b, &pb);
      rows.emplace_back(va, vb);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected two numeric columns, got '" + line + "'");
    }
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  return rows;
}

}  // namespace pdspec
