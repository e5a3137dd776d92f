#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "refgame/equilibrium.hpp"
#include "refgame/errors.hpp"
#include "refgame/game.hpp"
#include "refgame/sim.hpp"
#include "refgame/sweep.hpp"
#include "refgame/tree.hpp"

namespace refgame {

// Pinned numeric format for all CSV output: 9 significant digits.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// --- tree files -----------------------------------------------------------
// {"n": <count>, "parents": [null, 0, ...]}; the null entry is the root.

inline ReferralTree tree_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("parents"))
    throw ParseError("tree document needs fields n and parents");
  if (!doc["n"].is_number_integer()) throw ParseError("field n must be an integer");
  if (!doc["parents"].is_array()) throw ParseError("field parents must be an array");
  const auto& entries = doc["parents"];
  if (doc["n"].get<std::int64_t>() != static_cast<std::int64_t>(entries.size()))
    throw ParseError("parents length disagrees with n");
  std::vector<std::optional<int>> parents;
  parents.reserve(entries.size());
  for (const auto& entry : entries) {
    if (entry.is_null())
      parents.emplace_back(std::nullopt);
    else if (entry.is_number_integer())
      parents.emplace_back(entry.get<int>());
    else
      throw ParseError("parents entries must be integers or null");
  }
  return ReferralTree::from_parents(parents);
}

inline ReferralTree read_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tree file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("tree file " + path + ": " + e.what());
  }
  return tree_from_json(doc);
}

inline void write_tree(const std::string& path, const ReferralTree& tree) {
  nlohmann::json doc;
  doc["n"] = tree.size();
  auto& parents = doc["parents"] = nlohmann::json::array();
  for (int i = 0; i < tree.size(); ++i) {
    const auto p = tree.parent(i);
    if (p)
      parents.push_back(*p);
    else
      parents.push_back(nullptr);
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write tree file " + path);
  out << doc.dump(2) << '\n';
}

// --- profile files --------------------------------------------------------
// {"efforts": [0.25, 0.0, ...]}

inline EffortProfile read_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("profile file " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("efforts") || !doc["efforts"].is_array())
    throw ParseError("profile document needs an efforts array");
  EffortProfile profile;
  for (const auto& entry : doc["efforts"]) {
    if (!entry.is_number()) throw ParseError("efforts entries must be numbers");
    const double v = entry.get<double>();
    if (!(v >= 0.0)) throw OutOfRange("efforts must be nonnegative");
    profile.push_back(v);
  }
  return profile;
}

inline void write_profile(const std::string& path, const EffortProfile& profile) {
  nlohmann::json doc;
  doc["efforts"] = profile;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write profile file " + path);
  out << doc.dump(2) << '\n';
}

// --- CSV reports ----------------------------------------------------------

inline void write_solve_csv(std::ostream& out, const EquilibriumResult& result,
                            const ReferralTree& tree, const RewardScheme& scheme,
                            const ModelParams& params) {
  out << "# region," << to_string(result.region) << '\n';
  out << "# characterization," << to_string(result.characterization) << '\n';
  out << "# zone," << to_string(result.zone.zone);
  if (result.zone.zone == Zone::Z2 && result.zone.in_z3) out << ",Z3";
  out << '\n';
  out << "# x," << format_number(result.x) << '\n';
  out << "# y," << (result.y ? format_number(*result.y) : "") << '\n';
  out << "# sum_f," << format_number(result.shares.sum_f) << '\n';
  out << "node,f,effort,utility\n";
  for (int i = 0; i < tree.size(); ++i) {
    out << i << ',' << format_number(result.shares.f[i]) << ','
        << format_number(result.profile[i]) << ','
        << format_number(utility(i, result.profile, tree, scheme, params)) << '\n';
  }
}

inline void write_verify_csv(std::ostream& out, const VerificationReport& report,
                             const EffortProfile& profile) {
  out << "# is_psne," << (report.is_psne ? "true" : "false") << '\n';
  out << "# max_gain," << format_number(report.max_gain) << '\n';
  out << "# worst_agent," << report.worst_agent << '\n';
  out << "node,effort,best_response\n";
  for (std::size_t i = 0; i < profile.size(); ++i)
    out << i << ',' << format_number(profile[i]) << ','
        << format_number(report.best_responses[i]) << '\n';
}

// z may be empty (single replication); the z_score column is then blank.
inline void write_sim_csv(std::ostream& out, const SimReport& report,
                          const std::vector<double>& z) {
  out << "node,grab_rate,direct_rate,passive_rate,utility_rate,stderr,z_score\n";
  for (std::size_t i = 0; i < report.nodes.size(); ++i) {
    const auto& node = report.nodes[i];
    out << i << ',' << format_number(node.grab_rate) << ',' << format_number(node.direct_rate)
        << ',' << format_number(node.passive_rate) << ',' << format_number(node.utility_rate)
        << ',' << format_number(node.utility_stderr) << ',';
    if (i < z.size()) out << format_number(z[i]);
    out << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "a,n,mean_sum_effort,stddev,samples,non_r4\n";
  for (const auto& cell : cells)
    out << format_number(cell.a) << ',' << cell.n << ',' << format_number(cell.mean_sum_effort)
        << ',' << format_number(cell.stddev) << ',' << cell.samples << ',' << cell.non_r4
        << '\n';
}

}  // namespace refgame
