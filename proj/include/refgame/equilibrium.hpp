#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "refgame/errors.hpp"
#include "refgame/game.hpp"

namespace refgame {

enum class Characterization { UniquePoint, SetZ1UnionZ2, SetZ3, UniquePointZ4 };

inline const char* to_string(Characterization c) {
  switch (c) {
    case Characterization::UniquePoint: return "unique-point";
    case Characterization::SetZ1UnionZ2: return "set-Z1uZ2";
    case Characterization::SetZ3: return "set-Z3";
    case Characterization::UniquePointZ4: return "unique-point-Z4";
  }
  return "?";
}

struct ClosedFormR4 {
  EffortProfile profile;  // effort_i = y * f_i
  double x;               // sum of equilibrium efforts
  double y;               // per-unit effort level
};

// Unique region-R4 equilibrium:
//   y = (lambda gamma R / C) (sum_f - 1) / sum_f^2,  effort_i = y f_i,
//   x = (lambda gamma R / C) (sum_f - 1) / sum_f.
inline ClosedFormR4 psne_closed_form_r4(const EffortShares& shares, const ModelParams& params,
                                        const RewardScheme& scheme) {
  if (classify_region(params, scheme, shares) != Region::R4)
    throw PreconditionViolation("closed form requires region R4");
  const double k = params.lambda_arrival * params.reward_cost_ratio(scheme.gamma());
  const double y = k * (shares.sum_f - 1.0) / (shares.sum_f * shares.sum_f);
  ClosedFormR4 out{EffortProfile(shares.f.size()), k * (shares.sum_f - 1.0) / shares.sum_f, y};
  for (std::size_t i = 0; i < shares.f.size(); ++i) out.profile[i] = y * shares.f[i];
  return out;
}

inline std::vector<double> uniform_beta(int n) {
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

// Constructive zone-Z3 equilibrium for region R3:
//   effort_i = lambda (1 - C/(gamma R)) f_i + beta_i (lambda - S)
// with S the f-weighted base total. Any nonnegative beta summing to 1
// yields a point of the equilibrium set.
inline EffortProfile construct_z3_profile(const EffortShares& shares, const ModelParams& params,
                                          const RewardScheme& scheme,
                                          const std::vector<double>& beta) {
  if (classify_region(params, scheme, shares) != Region::R3)
    throw PreconditionViolation("Z3 construction requires region R3");
  if (beta.size() != shares.f.size())
    throw InvalidBeta("beta has " + std::to_string(beta.size()) + " weights for " +
                      std::to_string(shares.f.size()) + " nodes");
  double beta_sum = 0.0;
  for (double b : beta) {
    if (!(b >= 0.0)) throw InvalidBeta("beta weights must be nonnegative");
    beta_sum += b;
  }
  if (std::abs(beta_sum - 1.0) > 1e-9) throw InvalidBeta("beta weights must sum to 1");

  const double base =
      params.lambda_arrival * (1.0 - params.cost / (scheme.gamma() * params.reward));
  const double base_total = base * shares.sum_f;
  const double surplus = std::max(0.0, params.lambda_arrival - base_total);
  EffortProfile profile(shares.f.size());
  for (std::size_t i = 0; i < shares.f.size(); ++i)
    profile[i] = base * shares.f[i] + beta[i] * surplus;
  return profile;
}

// Payoff the equilibrium analysis optimizes: the agent's own grab flow
// plus her subtree's share-weighted grab flow, priced at the direct reward
// gamma R. Its first-order conditions generate the effort-sharing
// recursion, the closed form and the Z3 inequality; it is continuous and
// concave in the agent's own effort, with its kink on the Z2 boundary.
// Deviation gains are measured against this payoff, not against the
// reported utility of game.hpp, which prices passive inflow at the full
// task reward.
inline double incentive_payoff(int i, const EffortProfile& profile, const ReferralTree& tree,
                               const RewardScheme& scheme, const ModelParams& params) {
  const double flow = profile[i] + weighted_descendant_sum(tree, scheme, i, profile);
  const double gamma_r = scheme.gamma() * params.reward;
  const double total = total_effort(profile);
  if (total > params.lambda_arrival)
    return gamma_r * params.lambda_arrival * flow / total - params.cost * profile[i];
  return gamma_r * flow - params.cost * profile[i];
}

// Exact maximizer of i's incentive payoff against fixed opponent efforts.
// The maximum is at zero, at the zone-boundary kink, or at the interior
// stationary point of the task-limited branch; ties resolve to the
// smaller effort.
inline double best_response(int i, const EffortProfile& profile, const ReferralTree& tree,
                            const RewardScheme& scheme, const ModelParams& params) {
  double others = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j)
    if (static_cast<int>(j) != i) others += profile[j];
  const double passive = weighted_descendant_sum(tree, scheme, i, profile);
  const double lambda = params.lambda_arrival;
  const double gamma_r = scheme.gamma() * params.reward;

  const auto value = [&](double effort) {
    const double total = others + effort;
    if (total > lambda)
      return gamma_r * lambda * (effort + passive) / total - params.cost * effort;
    return gamma_r * (effort + passive) - params.cost * effort;
  };

  const double kink = std::max(0.0, lambda - others);
  // Stationary point of the task-limited branch, clipped to its validity
  // range [kink, inf).
  const double stationary_total =
      std::sqrt(lambda * gamma_r * std::max(0.0, others - passive) / params.cost);
  const double interior = std::max(stationary_total - others, kink);

  double candidates[3] = {0.0, kink, interior};
  std::sort(candidates, candidates + 3);
  double best = candidates[0];
  double best_value = value(candidates[0]);
  for (int c = 1; c < 3; ++c) {
    const double v = value(candidates[c]);
    if (v > best_value) {
      best = candidates[c];
      best_value = v;
    }
  }
  return best;
}

struct BrOptions {
  double damping = 0.5;  // in (0, 1]
  int max_sweeps = 100000;
  double tol = 1e-12;  // sup-norm change per sweep
};

struct BrResult {
  EffortProfile profile;
  bool converged;
  int sweeps;
};

// Damped Gauss-Seidel best-response sweeps in ascending node order. Used
// as an independent oracle; callers should confirm the returned profile
// with is_psne before treating it as an equilibrium. Non-convergence is
// reported, not thrown.
inline BrResult best_response_dynamics(const EffortProfile& init, const ReferralTree& tree,
                                       const RewardScheme& scheme, const ModelParams& params,
                                       const BrOptions& options = {}) {
  validate_profile(tree, init);
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw OutOfRange("damping must lie in (0,1]");
  BrResult result{init, false, 0};
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < tree.size(); ++i) {
      const double target = best_response(i, result.profile, tree, scheme, params);
      const double next = (1.0 - options.damping) * result.profile[i] + options.damping * target;
      max_change = std::max(max_change, std::abs(next - result.profile[i]));
      result.profile[i] = next;
    }
    result.sweeps = sweep;
    if (max_change < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

struct VerificationReport {
  bool is_psne;
  int worst_agent;
  double max_gain;  // largest unilateral-deviation improvement
  std::vector<double> best_responses;
};

// Checks the equilibrium condition directly: for each agent, compare the
// incentive payoff at her best response against the payoff at the profile.
inline VerificationReport is_psne(const EffortProfile& profile, const ReferralTree& tree,
                                  const RewardScheme& scheme, const ModelParams& params,
                                  double tol = 1e-9) {
  validate_profile(tree, profile);
  VerificationReport report{true, 0, 0.0, std::vector<double>(profile.size(), 0.0)};
  EffortProfile work = profile;
  for (int i = 0; i < tree.size(); ++i) {
    const double response = best_response(i, work, tree, scheme, params);
    report.best_responses[i] = response;
    const double current = incentive_payoff(i, work, tree, scheme, params);
    const double saved = work[i];
    work[i] = response;
    const double improved = incentive_payoff(i, work, tree, scheme, params);
    work[i] = saved;
    const double gain = std::max(0.0, improved - current);
    if (gain > report.max_gain) {
      report.max_gain = gain;
      report.worst_agent = i;
    }
  }
  report.is_psne = report.max_gain <= tol;
  return report;
}

struct EquilibriumResult {
  Region region;
  EffortProfile profile;  // representative equilibrium
  Characterization characterization;
  double x;                // sum of equilibrium efforts
  std::optional<double> y; // per-unit effort level, region R4 only
  EffortShares shares;
  ZoneLabel zone;          // zone of the representative profile
  bool degenerate_shares;  // sum_f == 1; R3 upper bound treated as +inf
};

// Region dispatch. R1: unique all-zero profile. R2: every Z1 u Z2 profile
// is an equilibrium; the zero profile is the representative. R3: the
// equilibrium set is exactly Z3; the uniform-beta construction is the
// representative. R4: unique closed-form profile in Z4.
inline EquilibriumResult solve(const ReferralTree& tree, const RewardScheme& scheme,
                               const ModelParams& params) {
  const BudgetReport budget = validate_budget(scheme, tree);
  if (!budget.ok)
    throw BudgetViolation("scheme pays " + std::to_string(budget.worst_sum) +
                          " of the reward when node " + std::to_string(budget.worst_node) +
                          " grabs a task");

  EquilibriumResult result{Region::R1,
                           EffortProfile(static_cast<std::size_t>(tree.size()), 0.0),
                           Characterization::UniquePoint,
                           0.0,
                           std::nullopt,
                           effort_shares(tree, scheme),
                           ZoneLabel{Zone::Z1, false},
                           false};
  result.degenerate_shares = result.shares.sum_f - 1.0 <= 1e-12;
  result.region = classify_region(params, scheme, result.shares);

  switch (result.region) {
    case Region::R1:
      result.characterization = Characterization::UniquePoint;
      break;
    case Region::R2:
      result.characterization = Characterization::SetZ1UnionZ2;
      break;
    case Region::R3:
      result.profile = construct_z3_profile(result.shares, params, scheme,
                                            uniform_beta(tree.size()));
      result.characterization = Characterization::SetZ3;
      result.x = total_effort(result.profile);
      break;
    case Region::R4: {
      ClosedFormR4 closed = psne_closed_form_r4(result.shares, params, scheme);
      result.profile = std::move(closed.profile);
      result.characterization = Characterization::UniquePointZ4;
      result.x = closed.x;
      result.y = closed.y;
      break;
    }
  }
  result.zone = classify_zone(result.profile, params, tree, scheme);
  return result;
}

}  // namespace refgame
