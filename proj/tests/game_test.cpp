#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace refgame;
using Catch::Matchers::WithinAbs;

TEST_CASE("model params validation") {
  CHECK_THROWS_AS(ModelParams(0.0, 15.0, 1.0), OutOfRange);
  CHECK_THROWS_AS(ModelParams(0.2, -1.0, 1.0), OutOfRange);
  CHECK_THROWS_AS(ModelParams(0.2, 15.0, 0.0), OutOfRange);
  const ModelParams params(0.2, 15.0, 1.0);
  CHECK(params.reward_cost_ratio(0.5) == 7.5);
}

TEST_CASE("effort shares") {
  const auto half = geometric_scheme(2.0);

  SECTION("three-node chain") {
    const auto shares = effort_shares(testutil::chain(3), half);
    CHECK(shares.f == std::vector<double>{0.6875, 0.75, 1.0});
    CHECK(shares.sum_f == 2.4375);
  }

  SECTION("star root is fully crowded out") {
    const auto shares = effort_shares(testutil::star(4), half);
    CHECK(shares.f[0] == 0.0);
    for (int leaf = 1; leaf <= 4; ++leaf) CHECK(shares.f[leaf] == 1.0);
    CHECK(shares.sum_f == 4.0);
  }

  SECTION("leaves are 1 and values stay in [0,1]") {
    SplitMix64 rng(202);
    for (int trial = 0; trial < 25; ++trial) {
      const auto tree = random_tree(1 + static_cast<int>(rng.next_below(40)), rng.next());
      const auto shares = effort_shares(tree, half);
      for (int i = 0; i < tree.size(); ++i) {
        CHECK(shares.f[i] >= 0.0);
        CHECK(shares.f[i] <= 1.0);
        if (tree.children(i).empty()) CHECK(shares.f[i] == 1.0);
        // f hits 1 exactly when the subtree contributes nothing
        const double contribution = weighted_descendant_sum(tree, half, i, shares.f);
        CHECK((shares.f[i] == 1.0) == (contribution == 0.0));
      }
    }
  }

  SECTION("direct-only scheme gives every node full share") {
    const auto tree = random_tree(30, 99);
    const auto shares = effort_shares(tree, anonymous_scheme(0.5, {}));
    for (double v : shares.f) CHECK(v == 1.0);
  }
}

TEST_CASE("utility evaluation") {
  const auto chain2 = testutil::chain(2);
  const auto half = geometric_scheme(2.0);
  const ModelParams params(0.2, 15.0, 1.0);

  SECTION("task-limited branch") {
    const EffortProfile profile{0.3, 0.4};
    CHECK_THAT(utility(0, profile, chain2, half, params), WithinAbs(27.0 / 35.0, 1e-12));
    CHECK_THAT(utility(1, profile, chain2, half, params), WithinAbs(16.0 / 35.0, 1e-12));
  }

  SECTION("attempt-limited branch") {
    const EffortProfile profile{0.05, 0.1};
    // gamma R effort + R share(1) child_effort - C effort
    CHECK_THAT(utility(0, profile, chain2, half, params), WithinAbs(0.7, 1e-12));
    CHECK_THAT(utility(1, profile, chain2, half, params), WithinAbs(0.65, 1e-12));
  }

  SECTION("zero profile earns nothing") {
    const EffortProfile zeros{0.0, 0.0};
    CHECK(utility(0, zeros, chain2, half, params) == 0.0);
    CHECK(utility(1, zeros, chain2, half, params) == 0.0);
  }
}

TEST_CASE("utility model invariants") {
  const auto half = geometric_scheme(2.0);
  const ModelParams params(0.2, 15.0, 1.0);
  SplitMix64 rng(7171);

  SECTION("branches agree on the zone boundary") {
    for (int trial = 0; trial < 25; ++trial) {
      const auto tree = random_tree(2 + static_cast<int>(rng.next_below(10)), rng.next());
      const auto profile = testutil::random_profile_with_total(
          tree.size(), rng, params.lambda_arrival);
      for (int i = 0; i < tree.size(); ++i) {
        const double task_limited = utility_task_limited(i, profile, tree, half, params);
        const double attempt_limited = utility_attempt_limited(i, profile, tree, half, params);
        CHECK_THAT(task_limited,
                   WithinAbs(attempt_limited, 1e-12 * std::max(1.0, std::abs(task_limited))));
      }
    }
  }

  SECTION("utility is the pointwise minimum of the two branches") {
    for (int trial = 0; trial < 25; ++trial) {
      const auto tree = random_tree(2 + static_cast<int>(rng.next_below(10)), rng.next());
      const auto profile = testutil::random_profile(tree.size(), rng, 0.4);
      for (int i = 0; i < tree.size(); ++i) {
        if (total_effort(profile) == 0.0) continue;
        const double expected = std::min(utility_task_limited(i, profile, tree, half, params),
                                         utility_attempt_limited(i, profile, tree, half, params));
        CHECK_THAT(utility(i, profile, tree, half, params), WithinAbs(expected, 1e-12));
      }
    }
  }

  SECTION("concavity: second central differences are nonpositive") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto tree = random_tree(2 + static_cast<int>(rng.next_below(8)), rng.next());
      auto profile = testutil::random_profile(tree.size(), rng, 0.4);
      const int i = static_cast<int>(rng.next_below(tree.size()));
      double others = 0.0;
      for (int j = 0; j < tree.size(); ++j)
        if (j != i) others += profile[j];
      const double kink = std::max(0.0, params.lambda_arrival - others);
      const double h = 1e-2;
      // probe a grid plus the kink neighborhood itself
      std::vector<double> probes{h, 0.05, 0.1, 0.3, 0.8, kink, kink + h / 2, kink + h};
      for (double probe : probes) {
        if (probe < h) continue;
        const auto eval = [&](double effort) {
          profile[i] = effort;
          return utility(i, profile, tree, half, params);
        };
        const double second_difference =
            (eval(probe + h) - 2.0 * eval(probe) + eval(probe - h)) / (h * h);
        CHECK(second_difference <= 1e-9);
      }
    }
  }
}

TEST_CASE("region classification") {
  const auto half = geometric_scheme(2.0);
  const auto chain3 = testutil::chain(3);
  const auto shares = effort_shares(chain3, half);

  CHECK(classify_region(ModelParams(0.2, 1.0, 1.0), half, shares) == Region::R1);
  CHECK(classify_region(ModelParams(0.2, 2.0, 1.0), half, shares) == Region::R2);
  CHECK(classify_region(ModelParams(0.2, 3.0, 1.0), half, shares) == Region::R3);
  CHECK(classify_region(ModelParams(0.2, 15.0, 1.0), half, shares) == Region::R4);

  SECTION("threshold between R3 and R4 sits at sum_f/(sum_f-1)") {
    // sum_f = 2.4375 so the boundary ratio is 39/23
    const double boundary_reward = 2.0 * (39.0 / 23.0);
    CHECK(classify_region(ModelParams(0.2, boundary_reward, 1.0), half, shares) == Region::R3);
    CHECK(classify_region(ModelParams(0.2, boundary_reward * 1.001, 1.0), half, shares) ==
          Region::R4);
  }

  SECTION("single-node tree never reaches R4") {
    const auto single = testutil::chain(1);
    const auto single_shares = effort_shares(single, half);
    CHECK(single_shares.sum_f == 1.0);
    CHECK(classify_region(ModelParams(0.2, 1000.0, 1.0), half, single_shares) == Region::R3);
  }
}

TEST_CASE("zone classification") {
  const auto half = geometric_scheme(2.0);
  const auto chain3 = testutil::chain(3);
  const ModelParams r3_params(0.2, 3.0, 1.0);

  SECTION("zero profile is Z1") {
    const auto label = classify_zone({0.0, 0.0, 0.0}, r3_params, chain3, half);
    CHECK(label.zone == Zone::Z1);
  }

  SECTION("constructed critical profile is Z2 and satisfies Z3") {
    // lambda (1 - C/(gamma R)) f_i + (lambda - S)/3
    const EffortProfile profile{7.0 / 120.0, 1.0 / 16.0, 19.0 / 240.0};
    const auto label = classify_zone(profile, r3_params, chain3, half);
    CHECK(label.zone == Zone::Z2);
    CHECK(label.in_z3);
  }

  SECTION("critical profile with a starved node is Z2 but not Z3") {
    // node 2 keeps half the required weighted effort; the root absorbs it
    const EffortProfile profile{25.0 / 240.0, 15.0 / 240.0, 8.0 / 240.0};
    const auto label = classify_zone(profile, r3_params, chain3, half);
    CHECK(label.zone == Zone::Z2);
    CHECK_FALSE(label.in_z3);
  }

  SECTION("oversupplied profile is Z4") {
    const auto label = classify_zone({0.3, 0.3, 0.3}, r3_params, chain3, half);
    CHECK(label.zone == Zone::Z4);
  }
}

TEST_CASE("joint reward-cost scaling leaves the game unchanged") {
  const auto half = geometric_scheme(2.0);
  SplitMix64 rng(4242);
  for (double kappa : {0.125, 3.0, 17.0}) {
    const auto tree = random_tree(8, rng.next());
    const auto shares = effort_shares(tree, half);
    const ModelParams params(0.2, 15.0, 1.0);
    const ModelParams scaled(0.2, 15.0 * kappa, kappa);
    CHECK(classify_region(params, half, shares) == classify_region(scaled, half, shares));
    const auto base = solve(tree, half, params);
    const auto rescaled = solve(tree, half, scaled);
    for (int i = 0; i < tree.size(); ++i)
      CHECK_THAT(rescaled.profile[i], WithinAbs(base.profile[i], 1e-12));
  }
}
