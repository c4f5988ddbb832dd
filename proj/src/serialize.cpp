#include "afshape/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace afshape {

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string code_csv(const CodeSequence& x) {
  std::ostringstream os;
  os << "index,phase_rad,re,im\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ph = x.phases()[i];
    os << i << ',' << format_double(ph) << ',' << format_double(std::cos(ph)) << ',' << format_double(std::sin(ph))
       << '\n';
  }
  return os.str();
}

namespace {

double parse_number(const std::string& field, int line) {
  double v = 0.0;
  const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
  if (r.ec != std::errc{} || r.ptr != field.data() + field.size())
    throw std::runtime_error("code csv line " + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

}  // namespace

std::vector<CodeRow> parse_code_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "index,phase_rad,re,im")
    throw std::runtime_error("code csv: missing or unexpected header");
  std::vector<CodeRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) throw std::runtime_error("code csv line " + std::to_string(lineno) + ": expected 4 fields");
    rows.push_back({static_cast<int>(parse_number(f[0], lineno)), parse_number(f[1], lineno),
                    parse_number(f[2], lineno), parse_number(f[3], lineno)});
  }
  return rows;
}

CodeSequence code_from_rows(const std::vector<CodeRow>& rows) {
  std::vector<double> ph;
  ph.reserve(rows.size());
  for (const auto& r : rows) ph.push_back(r.phase);
  return CodeSequence(std::move(ph));
}

std::string grid_csv(const AFGrid& grid, bool in_db) {
  const Eigen::MatrixXd m = in_db ? grid.magnitude_db() : grid.magnitude;
  std::ostringstream os;
  os << "lag";
  for (int p : grid.bins) os << ',' << p;
  os << '\n';
  for (std::size_t r = 0; r < grid.lags.size(); ++r) {
    os << grid.lags[r];
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << format_double(m(static_cast<Eigen::Index>(r), c));
    os << '\n';
  }
  return os.str();
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json grid_json(const AFGrid& grid) {
  return {{"n", grid.n},
          {"lags", grid.lags},
          {"bins", grid.bins},
          {"magnitude", matrix_rows(grid.magnitude)},
          {"magnitude_db", matrix_rows(grid.magnitude_db())}};
}

std::string trace_csv(const ConvergenceTrace& trace, bool with_timing) {
  std::ostringstream os;
  os << "outer_iter,C,m2_objective,elapsed_ms\n";
  for (const auto& r : trace.outer)
    os << r.outer_iter << ',' << format_double(r.C) << ',' << format_double(r.m2_objective) << ','
       << (with_timing ? format_double(r.elapsed_ms) : std::string("0")) << '\n';
  return os.str();
}

json trace_json(const ConvergenceTrace& trace, bool with_timing) {
  json rows = json::array();
  for (const auto& r : trace.outer) {
    rows.push_back({{"outer_iter", r.outer_iter},
                    {"C", r.C},
                    {"m2_objective", r.m2_objective},
                    {"elapsed_ms", with_timing ? r.elapsed_ms : 0.0},
                    {"inner_steps", r.inner_steps},
                    {"uqp_worst_step", r.uqp_worst_step}});
  }
  json out = {{"converged", trace.converged}, {"outer", std::move(rows)}};
  if (!trace.inner.empty()) out["inner"] = trace.inner;
  return out;
}

std::string inner_trace_csv(const ConvergenceTrace& trace) {
  std::ostringstream os;
  os << "outer_iter,step,uqp_objective\n";
  for (std::size_t t = 0; t < trace.inner.size(); ++t)
    for (std::size_t s = 0; s < trace.inner[t].size(); ++s)
      os << t + 1 << ',' << s << ',' << format_double(trace.inner[t][s]) << '\n';
  return os.str();
}

json report_json(const RegionReport& rep) {
  json cells = json::array();
  for (std::size_t i = 0; i < rep.cells.size(); ++i)
    cells.push_back({{"k", rep.cells[i].lag}, {"p", rep.cells[i].doppler}, {"level_db", rep.cell_db[i]}});
  return {{"region_energy", rep.region_energy},
          {"region_avg_db", rep.region_avg_db},
          {"region_peak_db", rep.region_peak_db},
          {"global_peak_sidelobe_db", rep.global_peak_sidelobe_db},
          {"cells", std::move(cells)}};
}

json comparison_json(const Comparison& cmp) {
  return {{"before", report_json(cmp.before)},
          {"after", report_json(cmp.after)},
          {"suppression_db", cmp.suppression_db}};
}

std::string comparison_csv(const Comparison& cmp) {
  std::ostringstream os;
  os << "k,p,before_db,after_db\n";
  for (std::size_t i = 0; i < cmp.before.cells.size(); ++i)
    os << cmp.before.cells[i].lag << ',' << cmp.before.cells[i].doppler << ',' << format_double(cmp.before.cell_db[i])
       << ',' << format_double(cmp.after.cell_db[i]) << '\n';
  return os.str();
}

json loaded_region_json(const LoadedRegion& loaded) {
  json cells = json::array();
  for (const auto& lp : loaded.pairs)
    cells.push_back({{"k", lp.cell.lag},
                     {"p", lp.cell.doppler},
                     {"min_eig_r", lp.min_eig_r},
                     {"min_eig_i", lp.min_eig_i}});
  return {{"n", loaded.n}, {"zeta", loaded.zeta}, {"cells", std::move(cells)}};
}

}  // namespace afshape
