// Sidelobe metrics over a suppression region, mainlobe-normalised dB.

#pragma once

#include <vector>

#include "afshape/af_core.hpp"

namespace afshape {

struct RegionReport {
  double region_energy = 0.0;  // identical to eval_objective
  double region_avg_db = 0.0;
  double region_peak_db = 0.0;
  double global_peak_sidelobe_db = 0.0;  // over every (k,p) != (0,0)
  std::vector<BinIndex> cells;
  std::vector<double> cell_db;  // same order as cells
};

RegionReport report(const CodeSequence& x, const RegionSpec& region);

struct Comparison {
  RegionReport before;
  RegionReport after;
  double suppression_db = 0.0;  // before.region_avg_db - after.region_avg_db
};

Comparison compare(const CodeSequence& before, const CodeSequence& after, const RegionSpec& region);

}  // namespace afshape
