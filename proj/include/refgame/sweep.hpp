#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "refgame/equilibrium.hpp"
#include "refgame/errors.hpp"
#include "refgame/game.hpp"
#include "refgame/rewards.hpp"
#include "refgame/tree.hpp"

namespace refgame {

struct SweepSpec {
  std::vector<int> node_counts;
  int samples = 1;                // random trees per (a, n) cell
  std::vector<double> a_values;   // geometric scheme bases
  ModelParams params;
  std::uint64_t base_seed = 0;
};

struct SweepCell {
  double a;
  int n;
  double mean_sum_effort;  // over the R4 samples only
  double stddev;
  int samples;             // R4 samples aggregated into the mean
  int non_r4;              // samples flagged out (other regions)
};

// Solves `samples` uniform-attachment trees per (a, n) cell and averages
// the equilibrium sum effort. Tree seeds are base_seed + sample index, so
// each a value sees the same trees at a given n. Cells are emitted in the
// given (a, n) order; non-R4 samples are counted, never mixed in.
inline std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  if (spec.samples < 1) throw OutOfRange("sweep needs at least one sample per cell");
  for (int n : spec.node_counts)
    if (n < 1) throw OutOfRange("node counts must be positive");

  std::vector<SweepCell> cells;
  cells.reserve(spec.a_values.size() * spec.node_counts.size());
  for (double a : spec.a_values) {
    const RewardScheme scheme = geometric_scheme(a);
    for (int n : spec.node_counts) {
      SweepCell cell{a, n, 0.0, 0.0, 0, 0};
      double sum = 0.0, sumsq = 0.0;
      for (int s = 0; s < spec.samples; ++s) {
        const ReferralTree tree =
            random_tree(n, spec.base_seed + static_cast<std::uint64_t>(s));
        const EquilibriumResult result = solve(tree, scheme, spec.params);
        if (result.region == Region::R4) {
          sum += result.x;
          sumsq += result.x * result.x;
          ++cell.samples;
        } else {
          ++cell.non_r4;
        }
      }
      if (cell.samples > 0) cell.mean_sum_effort = sum / cell.samples;
      if (cell.samples > 1) {
        const double var =
            std::max(0.0, (sumsq - sum * sum / cell.samples) / (cell.samples - 1.0));
        cell.stddev = std::sqrt(var);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace refgame
