#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "refgame/errors.hpp"
#include "refgame/game.hpp"
#include "refgame/rng.hpp"

namespace refgame {

struct SimConfig {
  double horizon;                // simulated time units
  std::uint64_t seed = 0;        // replication k runs with seed + k
  int replications = 1;
  double warmup_fraction = 0.1;  // slice of the horizon discarded up front
};

struct SimNodeStats {
  double grab_rate;        // tasks grabbed per unit time, mean over replications
  double direct_rate;      // gamma R times the grab rate
  double passive_rate;     // reward flowing up from the node's subtree
  double utility_rate;     // direct + passive - C * effort
  double utility_stderr;   // standard error of utility_rate over replications
  std::uint64_t grabs;     // post-warmup grabs, summed over replications
  double payout_per_grab;  // mean reward released per task this node grabbed
};

struct SimReport {
  std::vector<SimNodeStats> nodes;
  std::uint64_t arrivals = 0;      // whole-run arrivals, summed over replications
  std::uint64_t served = 0;        // whole-run grabs, summed over replications
  double mean_queue_length = 0.0;  // post-warmup time average, mean over replications
  double max_task_payout = 0.0;    // largest single-task payout observed
  double measured_time = 0.0;      // horizon minus warm-up, per replication
  int replications = 0;
};

namespace detail {

struct RepAccumulator {
  std::vector<std::uint64_t> grabs;
  std::vector<double> direct;   // reward amounts inside the measurement window
  std::vector<double> passive;
  std::vector<double> payout_by_grabber;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  double queue_area = 0.0;
  double max_task_payout = 0.0;
};

// One replication. Each stream (the arrival process and one attempt
// process per agent) draws its inter-event times from its own generator,
// so the merge order cannot change the sampled times. Ties break arrivals
// first, then lower agent index.
inline RepAccumulator run_replication(const ReferralTree& tree, const RewardScheme& scheme,
                                      const ModelParams& params, const EffortProfile& profile,
                                      double horizon, double warmup, std::uint64_t seed) {
  const int n = tree.size();
  RepAccumulator acc;
  acc.grabs.assign(n, 0);
  acc.direct.assign(n, 0.0);
  acc.passive.assign(n, 0.0);
  acc.payout_by_grabber.assign(n, 0.0);

  SplitMix64 seeder(seed);
  SplitMix64 arrival_rng(seeder.next());
  std::vector<SplitMix64> attempt_rng;
  attempt_rng.reserve(n);
  for (int i = 0; i < n; ++i) attempt_rng.emplace_back(seeder.next());

  // (time, stream): stream 0 is the arrival process, stream i+1 the
  // attempt process of agent i. Lexicographic order gives the tie-break.
  using Event = std::pair<double, int>;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
  events.emplace(arrival_rng.next_exponential(params.lambda_arrival), 0);
  for (int i = 0; i < n; ++i)
    if (profile[i] > 0.0) events.emplace(attempt_rng[i].next_exponential(profile[i]), i + 1);

  const auto limit = scheme.max_share_distance();
  std::int64_t queue = 0;
  double last_time = 0.0;
  const auto add_queue_area = [&](double upto) {
    const double lo = std::max(last_time, warmup);
    const double hi = std::min(upto, horizon);
    if (hi > lo) acc.queue_area += static_cast<double>(queue) * (hi - lo);
  };

  while (true) {
    const auto [time, stream] = events.top();
    events.pop();
    if (time > horizon) {
      add_queue_area(horizon);
      break;
    }
    add_queue_area(time);
    last_time = time;

    if (stream == 0) {
      ++acc.arrivals;
      ++queue;
      events.emplace(time + arrival_rng.next_exponential(params.lambda_arrival), 0);
    } else {
      const int grabber = stream - 1;
      if (queue > 0) {
        --queue;
        ++acc.served;
        if (time >= warmup) {
          ++acc.grabs[grabber];
          const double direct = scheme.gamma() * params.reward;
          acc.direct[grabber] += direct;
          double payout = direct;
          int d = 1;
          for (auto up = tree.parent(grabber); up; up = tree.parent(*up), ++d) {
            if (limit && d > *limit) break;
            const double amount = scheme.share_at(d) * params.reward;
            acc.passive[*up] += amount;
            payout += amount;
          }
          acc.payout_by_grabber[grabber] += payout;
          acc.max_task_payout = std::max(acc.max_task_payout, payout);
        }
      }
      events.emplace(time + attempt_rng[grabber].next_exponential(profile[grabber]), stream);
    }
  }
  return acc;
}

}  // namespace detail

// Event-driven simulation of the task queue: Poisson arrivals feed an
// unbounded FIFO queue, each agent attempts grabs at her own Poisson rate,
// a grab on a nonempty queue pays the grabber and her ancestor chain, and
// effort cost accrues continuously. Rates are measured after the warm-up.
// Identical inputs produce bit-identical reports.
inline SimReport simulate(const ReferralTree& tree, const RewardScheme& scheme,
                          const ModelParams& params, const EffortProfile& profile,
                          const SimConfig& config) {
  validate_profile(tree, profile);
  if (!(config.horizon > 0.0)) throw OutOfRange("horizon must be positive");
  if (config.replications < 1) throw OutOfRange("need at least one replication");
  if (!(config.warmup_fraction >= 0.0 && config.warmup_fraction <= 0.5))
    throw OutOfRange("warmup fraction must lie in [0, 0.5]");
  const BudgetReport budget = validate_budget(scheme, tree);
  if (!budget.ok)
    throw BudgetViolation("scheme pays " + std::to_string(budget.worst_sum) +
                          " of the reward when node " + std::to_string(budget.worst_node) +
                          " grabs a task");

  const int n = tree.size();
  const double warmup = config.horizon * config.warmup_fraction;
  const double window = config.horizon - warmup;

  SimReport report;
  report.nodes.assign(n, SimNodeStats{0, 0, 0, 0, 0, 0, 0});
  report.measured_time = window;
  report.replications = config.replications;

  std::vector<double> utility_sum(n, 0.0), utility_sumsq(n, 0.0);
  std::vector<double> payout_sum(n, 0.0);

  for (int rep = 0; rep < config.replications; ++rep) {
    const detail::RepAccumulator acc = detail::run_replication(
        tree, scheme, params, profile, config.horizon, warmup,
        config.seed + static_cast<std::uint64_t>(rep));
    report.arrivals += acc.arrivals;
    report.served += acc.served;
    report.mean_queue_length += acc.queue_area / window;
    report.max_task_payout = std::max(report.max_task_payout, acc.max_task_payout);
    for (int i = 0; i < n; ++i) {
      const double rate = (acc.direct[i] + acc.passive[i]) / window - params.cost * profile[i];
      utility_sum[i] += rate;
      utility_sumsq[i] += rate * rate;
      report.nodes[i].grab_rate += static_cast<double>(acc.grabs[i]) / window;
      report.nodes[i].direct_rate += acc.direct[i] / window;
      report.nodes[i].passive_rate += acc.passive[i] / window;
      report.nodes[i].grabs += acc.grabs[i];
      payout_sum[i] += acc.payout_by_grabber[i];
    }
  }

  const double reps = static_cast<double>(config.replications);
  report.mean_queue_length /= reps;
  for (int i = 0; i < n; ++i) {
    report.nodes[i].grab_rate /= reps;
    report.nodes[i].direct_rate /= reps;
    report.nodes[i].passive_rate /= reps;
    report.nodes[i].utility_rate = utility_sum[i] / reps;
    if (config.replications > 1) {
      const double var = std::max(
          0.0, (utility_sumsq[i] - utility_sum[i] * utility_sum[i] / reps) / (reps - 1.0));
      report.nodes[i].utility_stderr = std::sqrt(var / reps);
    }
    report.nodes[i].payout_per_grab =
        report.nodes[i].grabs > 0 ? payout_sum[i] / static_cast<double>(report.nodes[i].grabs)
                                  : 0.0;
  }
  return report;
}

// Per-node z-scores of the empirical utility rates against the analytic
// model; |z| > 3 marks disagreement.
inline std::vector<double> compare_analytic(const SimReport& report, const ReferralTree& tree,
                                            const RewardScheme& scheme, const ModelParams& params,
                                            const EffortProfile& profile) {
  if (report.replications < 2)
    throw PreconditionViolation("z-scores need at least two replications");
  bool any_variance = false;
  for (const auto& node : report.nodes)
    if (node.utility_stderr > 0.0) any_variance = true;
  if (!any_variance) throw ZeroVariance("all replications produced identical utilities");

  std::vector<double> z(report.nodes.size(), 0.0);
  for (std::size_t i = 0; i < report.nodes.size(); ++i) {
    const double expected = utility(static_cast<int>(i), profile, tree, scheme, params);
    const double residual = report.nodes[i].utility_rate - expected;
    if (report.nodes[i].utility_stderr > 0.0)
      z[i] = residual / report.nodes[i].utility_stderr;
    else
      z[i] = residual == 0.0 ? 0.0 : std::copysign(HUGE_VAL, residual);
  }
  return z;
}

}  // namespace refgame
