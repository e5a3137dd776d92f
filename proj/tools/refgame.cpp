#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <refgame/refgame.hpp>

namespace {

using namespace refgame;

struct SchemeOptions {
  double geometric_a = 0.0;
  int level_cap = 0;
  std::vector<double> shares;  // gamma first, then the per-distance shares
  CLI::Option* a_opt = nullptr;
  CLI::Option* cap_opt = nullptr;
  CLI::Option* shares_opt = nullptr;

  void attach(CLI::App& cmd) {
    a_opt = cmd.add_option("--geometric-a", geometric_a,
                           "geometric scheme base a > 1 (gamma = 1/a)");
    cap_opt = cmd.add_option("--level-cap", level_cap,
                             "zero the geometric shares beyond this distance");
    shares_opt = cmd.add_option("--shares", shares,
                                "explicit scheme as gamma,d1,d2,... fractions")
                     ->delimiter(',');
    cap_opt->needs(a_opt);
    a_opt->excludes(shares_opt);
  }

  RewardScheme build() const {
    if (a_opt->count() > 0) {
      std::optional<int> cap;
      if (cap_opt->count() > 0) cap = level_cap;
      return geometric_scheme(geometric_a, cap);
    }
    if (shares_opt->count() > 0) {
      if (shares.empty()) throw OutOfRange("--shares needs at least the gamma entry");
      return anonymous_scheme(shares.front(),
                              std::vector<double>(shares.begin() + 1, shares.end()));
    }
    throw OutOfRange("a reward scheme is required: --geometric-a or --shares");
  }
};

struct ParamOptions {
  double lambda = 0.0;
  double reward = 0.0;
  double cost = 0.0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--lambda", lambda, "task arrival rate")->required();
    cmd.add_option("--reward", reward, "total reward per task")->required();
    cmd.add_option("--cost", cost, "cost per unit attempt rate")->required();
  }

  ModelParams build() const { return ModelParams(lambda, reward, cost); }
};

void write_report(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  writer(out);
}

int run_oracle_check(const ReferralTree& tree, const RewardScheme& scheme,
                     const ModelParams& params, const EquilibriumResult& result,
                     std::uint64_t seed) {
  SplitMix64 rng(seed);
  EffortProfile init(static_cast<std::size_t>(tree.size()));
  for (auto& v : init) v = rng.next_double();
  const BrResult dynamics = best_response_dynamics(init, tree, scheme, params);
  if (!dynamics.converged) {
    std::cerr << "oracle: best-response dynamics did not converge\n";
    return 4;
  }
  double sup = 0.0;
  for (int i = 0; i < tree.size(); ++i)
    sup = std::max(sup, std::abs(dynamics.profile[i] - result.profile[i]));
  const bool set_valued = result.region == Region::R2 || result.region == Region::R3;
  if (!set_valued && sup > 1e-6) {
    std::cerr << "oracle: dynamics settled " << format_number(sup)
              << " away from the solution\n";
    return 4;
  }
  if (!is_psne(dynamics.profile, tree, scheme, params).is_psne) {
    std::cerr << "oracle: dynamics settled on a non-equilibrium profile\n";
    return 4;
  }
  std::cerr << "oracle: dynamics converged in " << dynamics.sweeps << " sweeps";
  if (!set_valued) std::cerr << ", sup-norm distance " << format_number(sup);
  std::cerr << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Referral-tree effort game: solver, verifier and queue simulator"};
  app.require_subcommand(1);

  // gen-tree
  auto* gen = app.add_subcommand("gen-tree", "generate a uniform-attachment referral tree");
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of nodes")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "tree file to write")->required();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "compute the equilibrium effort profile");
  std::string solve_tree_path, solve_out, solve_profile_out;
  SchemeOptions solve_scheme;
  ParamOptions solve_params;
  bool solve_oracle = false;
  std::uint64_t solve_oracle_seed = 1;
  solve_cmd->add_option("tree", solve_tree_path, "tree file")->required();
  solve_scheme.attach(*solve_cmd);
  solve_params.attach(*solve_cmd);
  solve_cmd->add_option("--out", solve_out, "CSV output path (default stdout)");
  solve_cmd->add_option("--profile-out", solve_profile_out,
                        "also write the profile as a profile file");
  solve_cmd->add_flag("--oracle-check", solve_oracle,
                      "cross-check with best-response dynamics");
  solve_cmd->add_option("--oracle-seed", solve_oracle_seed, "seed for the oracle start");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "check a profile for equilibrium");
  std::string verify_tree_path, verify_profile_path, verify_out;
  SchemeOptions verify_scheme;
  ParamOptions verify_params;
  double verify_tol = 1e-9;
  verify_cmd->add_option("tree", verify_tree_path, "tree file")->required();
  verify_cmd->add_option("profile", verify_profile_path, "profile file")->required();
  verify_scheme.attach(*verify_cmd);
  verify_params.attach(*verify_cmd);
  verify_cmd->add_option("--tol", verify_tol, "deviation-gain tolerance");
  verify_cmd->add_option("--out", verify_out, "report path (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run the discrete-event queue simulation");
  std::string sim_tree_path, sim_profile_path, sim_out;
  SchemeOptions sim_scheme;
  ParamOptions sim_params;
  SimConfig sim_config{0.0, 0, 1, 0.1};
  sim_cmd->add_option("tree", sim_tree_path, "tree file")->required();
  sim_cmd->add_option("profile", sim_profile_path, "profile file")->required();
  sim_scheme.attach(*sim_cmd);
  sim_params.attach(*sim_cmd);
  sim_cmd->add_option("--horizon", sim_config.horizon, "simulated time units")->required();
  sim_cmd->add_option("--seed", sim_config.seed, "base seed; replication k uses seed+k");
  sim_cmd->add_option("--replications", sim_config.replications, "independent runs");
  sim_cmd->add_option("--warmup-fraction", sim_config.warmup_fraction,
                      "horizon fraction discarded before measuring");
  sim_cmd->add_option("--out", sim_out, "CSV output path (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "mean equilibrium sum effort over random trees");
  SweepSpec sweep_spec{{}, 1, {}, ModelParams(1.0, 1.0, 1.0), 0};
  ParamOptions sweep_params;
  std::string sweep_out;
  sweep_cmd->add_option("--counts", sweep_spec.node_counts, "node counts, comma separated")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--samples", sweep_spec.samples, "random trees per cell")->required();
  sweep_cmd->add_option("--a-values", sweep_spec.a_values, "geometric bases, comma separated")
      ->delimiter(',')
      ->required();
  sweep_params.attach(*sweep_cmd);
  sweep_cmd->add_option("--seed", sweep_spec.base_seed, "base seed; sample s uses seed+s");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      write_tree(gen_out, random_tree(gen_n, gen_seed));
      return 0;
    }

    if (*solve_cmd) {
      const ReferralTree tree = read_tree(solve_tree_path);
      const RewardScheme scheme = solve_scheme.build();
      const ModelParams params = solve_params.build();
      const EquilibriumResult result = solve(tree, scheme, params);
      write_report(solve_out, [&](std::ostream& out) {
        write_solve_csv(out, result, tree, scheme, params);
      });
      if (!solve_profile_out.empty()) write_profile(solve_profile_out, result.profile);
      if (solve_oracle)
        return run_oracle_check(tree, scheme, params, result, solve_oracle_seed);
      return 0;
    }

    if (*verify_cmd) {
      const ReferralTree tree = read_tree(verify_tree_path);
      const EffortProfile profile = read_profile(verify_profile_path);
      const RewardScheme scheme = verify_scheme.build();
      const ModelParams params = verify_params.build();
      const VerificationReport report = is_psne(profile, tree, scheme, params, verify_tol);
      write_report(verify_out, [&](std::ostream& out) {
        write_verify_csv(out, report, profile);
      });
      return 0;
    }

    if (*sim_cmd) {
      const ReferralTree tree = read_tree(sim_tree_path);
      const EffortProfile profile = read_profile(sim_profile_path);
      const RewardScheme scheme = sim_scheme.build();
      const ModelParams params = sim_params.build();
      const SimReport report = simulate(tree, scheme, params, profile, sim_config);
      std::vector<double> z;
      if (sim_config.replications >= 2) {
        try {
          z = compare_analytic(report, tree, scheme, params, profile);
        } catch (const ZeroVariance& e) {
          std::cerr << "note: " << e.what() << "; z_score column left blank\n";
        }
      }
      write_report(sim_out, [&](std::ostream& out) { write_sim_csv(out, report, z); });
      return 0;
    }

    if (*sweep_cmd) {
      sweep_spec.params = sweep_params.build();
      const auto cells = run_sweep(sweep_spec);
      write_report(sweep_out, [&](std::ostream& out) { write_sweep_csv(out, cells); });
      return 0;
    }
  } catch (const BudgetViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidBeta& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
