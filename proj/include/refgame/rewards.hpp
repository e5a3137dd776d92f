#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "refgame/errors.hpp"
#include "refgame/tree.hpp"

namespace refgame {

// Anonymous reward-sharing scheme. The node grabbing a task keeps the
// fraction gamma of the task reward; the ancestor d >= 1 hops above the
// grabber receives share_at(d). The sequence gamma, share_at(1),
// share_at(2), ... is non-increasing, and every entry lies in [0, 1).
class RewardScheme {
 public:
  double gamma() const { return gamma_; }
  std::optional<int> level_cap() const { return level_cap_; }

  // Fraction of the task reward paid to an ancestor d >= 1 hops above the
  // grabbing node.
  double share_at(int d) const {
    if (d < 1) throw IndexOutOfRange("share distance must be >= 1");
    if (level_cap_ && d > *level_cap_) return 0.0;
    if (geometric_base_) return std::pow(*geometric_base_, d + 1);
    return d <= static_cast<int>(shares_.size()) ? shares_[d - 1] : 0.0;
  }

  // Largest distance that can carry a nonzero share; nullopt if unbounded.
  std::optional<int> max_share_distance() const {
    if (geometric_base_) return level_cap_;
    int limit = static_cast<int>(shares_.size());
    if (level_cap_ && *level_cap_ < limit) limit = *level_cap_;
    return limit;
  }

 private:
  RewardScheme() = default;
  friend RewardScheme geometric_scheme(double a, std::optional<int> level_cap);
  friend RewardScheme anonymous_scheme(double gamma, const std::vector<double>& shares);

  double gamma_ = 0.0;
  std::vector<double> shares_;            // explicit per-distance shares
  std::optional<double> geometric_base_;  // 1/a for geometric schemes
  std::optional<int> level_cap_;
};

// Geometric mechanism: gamma = 1/a, and an ancestor d hops above the
// grabber receives (1/a)^(d+1), optionally zeroed beyond level_cap.
inline RewardScheme geometric_scheme(double a, std::optional<int> level_cap = std::nullopt) {
  if (!(a > 1.0)) throw InvalidBase("geometric base must exceed 1, got " + std::to_string(a));
  if (level_cap && *level_cap < 1) throw OutOfRange("level cap must be a positive integer");
  RewardScheme scheme;
  scheme.gamma_ = 1.0 / a;
  scheme.geometric_base_ = 1.0 / a;
  scheme.level_cap_ = level_cap;
  return scheme;
}

// General anonymous scheme from an explicit share list; shares[d-1] is the
// fraction at distance d and everything beyond the list is zero.
inline RewardScheme anonymous_scheme(double gamma, const std::vector<double>& shares) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw OutOfRange("gamma must lie in (0,1), got " + std::to_string(gamma));
  double prev = gamma;
  for (std::size_t d = 0; d < shares.size(); ++d) {
    if (!(shares[d] >= 0.0 && shares[d] < 1.0))
      throw OutOfRange("share at distance " + std::to_string(d + 1) + " outside [0,1)");
    if (shares[d] > prev)
      throw NotMonotone("share at distance " + std::to_string(d + 1) +
                        " exceeds the preceding share");
    prev = shares[d];
  }
  RewardScheme scheme;
  scheme.gamma_ = gamma;
  scheme.shares_ = shares;
  return scheme;
}

// Fraction of the reward node i receives when node j grabs a task: gamma
// on the diagonal, the distance share when j sits below i, else zero.
inline double delta(const RewardScheme& scheme, const ReferralTree& tree, int i, int j) {
  const auto d = tree.hop_distance(i, j);
  if (i == j) return scheme.gamma();
  return d ? scheme.share_at(*d) : 0.0;
}

struct BudgetReport {
  bool ok;
  int worst_node;    // grabber whose column sum is largest
  double worst_sum;  // that column sum; must be <= 1
};

// Checks sum_k delta_kj <= 1 for every grabber j. Only j's ancestor chain
// contributes, so each column is gamma plus the shares along the path to
// the root.
inline BudgetReport validate_budget(const RewardScheme& scheme, const ReferralTree& tree) {
  BudgetReport report{true, 0, 0.0};
  for (int j = 0; j < tree.size(); ++j) {
    double sum = scheme.gamma();
    for (int d = 1; d <= tree.depth(j); ++d) sum += scheme.share_at(d);
    if (sum > report.worst_sum) {
      report.worst_sum = sum;
      report.worst_node = j;
    }
  }
  report.ok = report.worst_sum <= 1.0 + 1e-12;
  return report;
}

}  // namespace refgame
