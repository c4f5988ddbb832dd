// CSV and JSON encodings of codes, grids, traces and reports.

#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "afshape/af_core.hpp"
#include "afshape/metrics.hpp"
#include "afshape/reformulation.hpp"
#include "afshape/solver.hpp"

namespace afshape {

using nlohmann::json;

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

/// Header "index,phase_rad,re,im", one row per entry.
std::string code_csv(const CodeSequence& x);

struct CodeRow {
  int index = 0;
  double phase = 0.0;
  double re = 0.0;
  double im = 0.0;
};

/// Parses code_csv output. Throws std::runtime_error on malformed input.
std::vector<CodeRow> parse_code_csv(std::istream& in);
CodeSequence code_from_rows(const std::vector<CodeRow>& rows);

/// Rows are lags, header row holds the Doppler bins.
std::string grid_csv(const AFGrid& grid, bool in_db);
json grid_json(const AFGrid& grid);

/// Columns outer_iter,C,m2_objective,elapsed_ms. Without timing the
/// elapsed_ms column is written as 0 so repeated runs give identical bytes.
std::string trace_csv(const ConvergenceTrace& trace, bool with_timing);
json trace_json(const ConvergenceTrace& trace, bool with_timing);

/// Columns outer_iter,step,uqp_objective (only when inner values were recorded).
std::string inner_trace_csv(const ConvergenceTrace& trace);

json report_json(const RegionReport& rep);
json comparison_json(const Comparison& cmp);
/// Columns k,p,before_db,after_db over the region cells.
std::string comparison_csv(const Comparison& cmp);

/// Per-cell min eigenvalues of the loaded matrices, for debugging.
json loaded_region_json(const LoadedRegion& loaded);

}  // namespace afshape
