#include "pe/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pe/errors.hpp"

namespace pe {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void field_row(std::ostream& out, double t, double x, double p1, double p2,
               const Equilibrium& eq) {
  const RiemannPair r = eq.shifted(p1, p2);
  const GasState s = state_from_riemann(r, eq.gamma);
  out << format_number(t) << ',' << format_number(x) << ',' << format_number(p1) << ','
      << format_number(p2) << ',' << format_number(r.m) << ',' << format_number(r.n) << ','
      << format_number(s.rho) << ',' << format_number(s.u) << '\n';
}

constexpr const char* kFieldHeader = "t,x,phi1,phi2,m,n,rho,u\n";

void write_snapshot_rows(std::ostream& out, const Snapshot& snap, double length,
                         const Equilibrium& eq) {
  const int nx = snap.state.nx();
  for (int k = 0; k < nx; ++k)
    field_row(out, snap.t, length * k / (nx - 1), snap.state.phi1[k], snap.state.phi2[k], eq);
}

} // namespace

void emit_field_csv(const PeriodicField& field, const Equilibrium& eq, const std::string& path) {
  auto out = open_out(path);
  out << kFieldHeader;
  for (int j = 0; j < field.nt(); ++j)
    for (int k = 0; k < field.nx(); ++k)
      field_row(out, field.t(j), field.x(k), field(0, j, k), field(1, j, k), eq);
  close_out(out, path);
}

void emit_snapshot_csv(const Snapshot& snapshot, double length, const Equilibrium& eq,
                       const std::string& path) {
  auto out = open_out(path);
  out << kFieldHeader;
  write_snapshot_rows(out, snapshot, length, eq);
  close_out(out, path);
}

void emit_trajectory_csv(const Trajectory& traj, const Equilibrium& eq, const std::string& path) {
  auto out = open_out(path);
  out << kFieldHeader;
  for (const Snapshot& s : traj.snapshots) write_snapshot_rows(out, s, traj.length, eq);
  close_out(out, path);
}

PeriodicField read_field_csv(const std::string& path, double period) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "t,x,phi1,phi2,m,n,rho,u")
    throw IoError("'" + path + "': missing or unexpected field CSV header");
  struct Row {
    double t, x, p1, p2;
  };
  std::vector<Row> rows;
  std::map<double, int> ts, xs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[8];
    int n = 0;
    while (n < 8 && std::getline(ls, cell, ',')) {
      try {
        v[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw IoError("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (n != 8) throw IoError("'" + path + "' line " + std::to_string(lineno) + ": expected 8 columns");
    rows.push_back({v[0], v[1], v[2], v[3]});
    ts.emplace(v[0], 0);
    xs.emplace(v[1], 0);
  }
  const int nt = static_cast<int>(ts.size());
  const int nx = static_cast<int>(xs.size());
  if (static_cast<std::size_t>(nt) * nx != rows.size())
    throw IoError("'" + path + "': rows do not form a full t x x grid");
  int i = 0;
  for (auto& [t, idx] : ts) idx = i++;
  i = 0;
  for (auto& [x, idx] : xs) idx = i++;
  PeriodicField f(nt, nx, period, xs.rbegin()->first);
  for (const Row& r : rows) {
    const int j = ts[r.t];
    const int k = xs[r.x];
    f(0, j, k) = r.p1;
    f(1, j, k) = r.p2;
  }
  return f;
}

void emit_table_csv(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& path) {
  auto out = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  close_out(out, path);
}

void emit_report_csv(const ConvergenceReport& report, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < report.diffs.size(); ++i) {
    const int iter = static_cast<int>(i) + 1;
    double theta = std::nan("");
    for (const auto& [l, r] : report.theta_estimates)
      if (l == iter) theta = r;
    rows.push_back({std::to_string(iter), format_number(report.diffs[i]), format_number(theta)});
  }
  emit_table_csv({"iter", "sup_diff", "theta_est"}, rows, path);
}

void emit_report_csv(const StabilityReport& report, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t w = 0; w < report.window_sup_c0.size(); ++w)
    rows.push_back({std::to_string(w), format_number(report.window_sup_c0[w]),
                    format_number(report.window_sup_c1[w]), format_number(report.ratio_c0[w]),
                    format_number(report.ratio_c1[w])});
  emit_table_csv({"window", "sup_c0", "sup_c1", "ratio_c0", "ratio_c1"}, rows, path);
}

void emit_report_csv(const RegularityReport& report, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < report.stencils.size(); ++i)
    rows.push_back({report.stencils[i], format_number(report.sup_coarse[i]),
                    format_number(report.sup_fine[i]), format_number(report.refinement_ratios[i])});
  emit_table_csv({"stencil", "sup_coarse", "sup_fine", "ratio"}, rows, path);
}

} // namespace pe
