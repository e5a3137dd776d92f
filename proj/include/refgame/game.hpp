#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "refgame/errors.hpp"
#include "refgame/rewards.hpp"
#include "refgame/tree.hpp"

namespace refgame {

// Task arrival rate, per-task reward and per-unit-effort cost; all > 0.
struct ModelParams {
  ModelParams(double lambda_arrival_, double reward_, double cost_)
      : lambda_arrival(lambda_arrival_), reward(reward_), cost(cost_) {
    if (!(lambda_arrival > 0.0)) throw OutOfRange("arrival rate must be positive");
    if (!(reward > 0.0)) throw OutOfRange("reward must be positive");
    if (!(cost > 0.0)) throw OutOfRange("cost must be positive");
  }

  double lambda_arrival;
  double reward;
  double cost;

  // gamma * R / C, the ratio that selects the equilibrium region.
  double reward_cost_ratio(double gamma) const { return gamma * reward / cost; }
};

// Per-agent attempt rates (the strategy profile).
using EffortProfile = std::vector<double>;

inline void validate_profile(const ReferralTree& tree, const EffortProfile& profile) {
  if (static_cast<int>(profile.size()) != tree.size())
    throw OutOfRange("profile has " + std::to_string(profile.size()) +
                     " efforts for " + std::to_string(tree.size()) + " nodes");
  for (double v : profile)
    if (!(v >= 0.0)) throw OutOfRange("efforts must be nonnegative");
}

inline double total_effort(const EffortProfile& profile) {
  double total = 0.0;
  for (double v : profile) total += v;
  return total;
}

enum class Region { R1, R2, R3, R4 };
enum class Zone { Z1, Z2, Z4 };

inline const char* to_string(Region region) {
  switch (region) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
  }
  return "?";
}

inline const char* to_string(Zone zone) {
  switch (zone) {
    case Zone::Z1: return "Z1";
    case Zone::Z2: return "Z2";
    case Zone::Z4: return "Z4";
  }
  return "?";
}

struct ZoneLabel {
  Zone zone;
  bool in_z3;  // meaningful only when zone == Z2
};

// Absolute tolerance for boundary classifications, scaled to the compared
// quantity.
inline double classification_tolerance(double scale) {
  return 1e-9 * std::max(1.0, scale);
}

// sum over j in T_i \ {i} of delta_ij * values[j]. Stops descending once
// the scheme cannot pay at the next distance.
inline double weighted_descendant_sum(const ReferralTree& tree, const RewardScheme& scheme,
                                      int i, const std::vector<double>& values) {
  const auto limit = scheme.max_share_distance();
  double sum = 0.0;
  std::vector<std::pair<int, int>> stack;  // (node, distance from i)
  for (int c : tree.children(i)) stack.emplace_back(c, 1);
  while (!stack.empty()) {
    const auto [node, dist] = stack.back();
    stack.pop_back();
    sum += scheme.share_at(dist) * values[node];
    if (!limit || dist < *limit)
      for (int c : tree.children(node)) stack.emplace_back(c, dist + 1);
  }
  return sum;
}

struct EffortShares {
  std::vector<double> f;  // f[i] in [0,1]; 1 for every leaf
  double sum_f = 0.0;
};

// Bottom-up effort-sharing recursion: leaves start at 1 and
// f_i = max(0, 1 - sum_{j in T_i \ {i}} delta_ij f_j).
inline EffortShares effort_shares(const ReferralTree& tree, const RewardScheme& scheme) {
  EffortShares shares;
  shares.f.assign(tree.size(), 0.0);
  const std::vector<int> order = tree.subtree(tree.root());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int i = *it;
    shares.f[i] = std::max(0.0, 1.0 - weighted_descendant_sum(tree, scheme, i, shares.f));
  }
  for (double v : shares.f) shares.sum_f += v;
  return shares;
}

// Payoff rate when the total attempt rate exceeds the arrival rate: every
// task is served and agents race for the scarce tasks. Requires a positive
// total attempt rate.
inline double utility_task_limited(int i, const EffortProfile& profile, const ReferralTree& tree,
                                   const RewardScheme& scheme, const ModelParams& params) {
  const double total = total_effort(profile);
  const double passive = weighted_descendant_sum(tree, scheme, i, profile);
  return params.lambda_arrival * params.reward * (scheme.gamma() * profile[i] + passive) / total -
         params.cost * profile[i];
}

// Payoff rate when the total attempt rate is at most the arrival rate: the
// queue is almost never empty, so every attempt lands a task and each node
// grabs at its own attempt rate.
inline double utility_attempt_limited(int i, const EffortProfile& profile, const ReferralTree& tree,
                                      const RewardScheme& scheme, const ModelParams& params) {
  const double passive = weighted_descendant_sum(tree, scheme, i, profile);
  return scheme.gamma() * params.reward * profile[i] + params.reward * passive -
         params.cost * profile[i];
}

// Expected payoff rate of agent i under the given profile. The attempt-
// limited branch also covers the all-zero profile (value 0 for everyone).
inline double utility(int i, const EffortProfile& profile, const ReferralTree& tree,
                      const RewardScheme& scheme, const ModelParams& params) {
  return total_effort(profile) > params.lambda_arrival
             ? utility_task_limited(i, profile, tree, scheme, params)
             : utility_attempt_limited(i, profile, tree, scheme, params);
}

// Region of the parameter space by gamma R / C: [0,1) -> R1, 1 -> R2,
// (1, sum_f/(sum_f - 1)] -> R3, beyond -> R4. A degenerate sum_f of 1
// (single-node trees) pushes the R3 upper bound to +infinity.
inline Region classify_region(const ModelParams& params, const RewardScheme& scheme,
                              const EffortShares& shares) {
  const double ratio = params.reward_cost_ratio(scheme.gamma());
  const double eps = classification_tolerance(ratio);
  if (std::abs(ratio - 1.0) <= eps) return Region::R2;
  if (ratio < 1.0) return Region::R1;
  if (shares.sum_f - 1.0 <= 1e-12) return Region::R3;
  const double threshold = shares.sum_f / (shares.sum_f - 1.0);
  return ratio <= threshold + eps ? Region::R3 : Region::R4;
}

// Zone of an effort profile by total attempt rate vs arrival rate, plus
// the Z3 membership flag inside Z2: every node's own effort plus the
// share-weighted subtree effort must reach lambda (1 - C/(gamma R)).
inline ZoneLabel classify_zone(const EffortProfile& profile, const ModelParams& params,
                               const ReferralTree& tree, const RewardScheme& scheme) {
  validate_profile(tree, profile);
  const double total = total_effort(profile);
  const double eps = classification_tolerance(params.lambda_arrival);
  ZoneLabel label{Zone::Z1, false};
  if (std::abs(total - params.lambda_arrival) <= eps) {
    label.zone = Zone::Z2;
    const double floor =
        params.lambda_arrival * (1.0 - params.cost / (scheme.gamma() * params.reward));
    label.in_z3 = true;
    for (int i = 0; i < tree.size(); ++i) {
      const double weighted = profile[i] + weighted_descendant_sum(tree, scheme, i, profile);
      if (weighted < floor - eps) {
        label.in_z3 = false;
        break;
      }
    }
  } else if (total > params.lambda_arrival) {
    label.zone = Zone::Z4;
  }
  return label;
}

}  // namespace refgame
