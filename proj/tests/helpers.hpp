#pragma once

#include <optional>
#include <vector>

#include <refgame/refgame.hpp>

namespace testutil {

using namespace refgame;

inline ReferralTree chain(int n) {
  std::vector<std::optional<int>> parents(n);
  for (int i = 1; i < n; ++i) parents[i] = i - 1;
  return ReferralTree::from_parents(parents);
}

inline ReferralTree star(int leaves) {
  std::vector<std::optional<int>> parents(leaves + 1);
  for (int i = 1; i <= leaves; ++i) parents[i] = 0;
  return ReferralTree::from_parents(parents);
}

inline EffortProfile random_profile(int n, SplitMix64& rng, double scale = 1.0) {
  EffortProfile profile(n);
  for (auto& v : profile) v = rng.next_double() * scale;
  return profile;
}

// Random positive profile rescaled so the efforts sum to target.
inline EffortProfile random_profile_with_total(int n, SplitMix64& rng, double target) {
  EffortProfile profile(n);
  double sum = 0.0;
  for (auto& v : profile) {
    v = 0.05 + rng.next_double();
    sum += v;
  }
  for (auto& v : profile) v *= target / sum;
  return profile;
}

inline std::vector<double> random_beta(int n, SplitMix64& rng) {
  std::vector<double> beta(n);
  double sum = 0.0;
  for (auto& b : beta) {
    b = 0.05 + rng.next_double();
    sum += b;
  }
  for (auto& b : beta) b /= sum;
  return beta;
}

}  // namespace testutil
