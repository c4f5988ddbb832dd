#include "afshape/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace afshape {

RegionReport report(const CodeSequence& x, const RegionSpec& region) {
  const int n = x.length();
  RegionReport rep;
  rep.region_energy = eval_objective(x, region);
  rep.cells = region.cells();
  rep.region_peak_db = kDbFloor;
  double sum_db = 0.0;
  for (const auto& c : rep.cells) {
    const double db = level_db(std::abs(eval_af(x, c.lag, c.doppler)), n);
    rep.cell_db.push_back(db);
    sum_db += db;
    rep.region_peak_db = std::max(rep.region_peak_db, db);
  }
  rep.region_avg_db = sum_db / static_cast<double>(rep.cells.size());

  const auto [lo, hi] = doppler_range(n);
  rep.global_peak_sidelobe_db = kDbFloor;
  for (int k = -(n - 1); k <= n - 1; ++k)
    for (int p = lo; p <= hi; ++p) {
      if (k == 0 && p == 0) continue;
      rep.global_peak_sidelobe_db = std::max(rep.global_peak_sidelobe_db, level_db(std::abs(eval_af(x, k, p)), n));
    }
  return rep;
}

Comparison compare(const CodeSequence& before, const CodeSequence& after, const RegionSpec& region) {
  if (before.size() != after.size())
    throw ConfigError("n", "compared codes differ in length (" + std::to_string(before.size()) + " vs " +
                               std::to_string(after.size()) + ")");
  Comparison out{report(before, region), report(after, region), 0.0};
  out.suppression_db = out.before.region_avg_db - out.after.region_avg_db;
  return out;
}

}  // namespace afshape
