#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "refgame/errors.hpp"
#include "refgame/rng.hpp"

namespace refgame {

// Rooted directed tree of agents, edges pointing from recruiter to recruit.
// Node ids are dense 0-based integers. Immutable after construction; safe
// to share across threads.
class ReferralTree {
 public:
  static constexpr int kNoParent = -1;

  // Validates the parent list and builds the tree. parents[i] is the
  // recruiter of i; exactly one entry (the root) must be empty.
  static ReferralTree from_parents(const std::vector<std::optional<int>>& parents) {
    const int n = static_cast<int>(parents.size());
    if (n == 0) throw ZeroNodes("parents list is empty");

    std::vector<int> parent(n, kNoParent);
    int root = kNoParent;
    for (int i = 0; i < n; ++i) {
      if (!parents[i].has_value()) {
        if (root != kNoParent)
          throw MultipleRoots("nodes " + std::to_string(root) + " and " +
                              std::to_string(i) + " both lack a parent");
        root = i;
        continue;
      }
      const int p = *parents[i];
      if (p < 0 || p >= n)
        throw IndexOutOfRange("parent of node " + std::to_string(i) + " is " +
                              std::to_string(p) + ", outside [0," +
                              std::to_string(n) + ")");
      parent[i] = p;
    }

    // Walk each node's ancestry. status: 0 unvisited, 1 reaches the root,
    // 2 on the current walk.
    std::vector<int> status(n, 0);
    if (root != kNoParent) status[root] = 1;
    for (int i = 0; i < n; ++i) {
      if (status[i] == 1) continue;
      std::vector<int> path;
      int cur = i;
      while (status[cur] != 1) {
        if (status[cur] == 2) {
          // cur repeats within this walk; the cycle starts at its first
          // occurrence. Nodes before it merely hang off the cycle.
          if (cur == i)
            throw Cycle("node " + std::to_string(i) + " is part of a referral cycle");
          throw DisconnectedNode("node " + std::to_string(i) +
                                 " cannot reach the root; its ancestry enters a cycle at node " +
                                 std::to_string(cur));
        }
        status[cur] = 2;
        path.push_back(cur);
        cur = parent[cur];
      }
      for (int v : path) status[v] = 1;
    }

    ReferralTree tree;
    tree.n_ = n;
    tree.root_ = root;
    tree.parents_ = std::move(parent);
    tree.children_.assign(n, {});
    for (int i = 0; i < n; ++i)
      if (tree.parents_[i] != kNoParent) tree.children_[tree.parents_[i]].push_back(i);

    tree.depth_.assign(n, 0);
    std::vector<int> frontier{root};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int v : frontier)
        for (int c : tree.children_[v]) {
          tree.depth_[c] = tree.depth_[v] + 1;
          next.push_back(c);
        }
      frontier = std::move(next);
    }
    return tree;
  }

  int size() const { return n_; }
  int root() const { return root_; }

  std::optional<int> parent(int i) const {
    check_index(i);
    return parents_[i] == kNoParent ? std::nullopt : std::optional<int>(parents_[i]);
  }

  const std::vector<int>& children(int i) const {
    check_index(i);
    return children_[i];
  }

  // Hop distance from the root.
  int depth(int i) const {
    check_index(i);
    return depth_[i];
  }

  // Nodes of the subtree rooted at i, ancestors before descendants;
  // iterate in reverse for bottom-up passes.
  std::vector<int> subtree(int i) const {
    check_index(i);
    std::vector<int> order;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      const auto& kids = children_[v];
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

  // Edge count of the downward path i -> j, or nullopt when j is not in
  // the subtree of i (ancestors and other branches included).
  std::optional<int> hop_distance(int i, int j) const {
    check_index(i);
    check_index(j);
    int cur = j;
    int d = 0;
    while (depth_[cur] > depth_[i]) {
      cur = parents_[cur];
      ++d;
    }
    if (cur != i) return std::nullopt;
    return d;
  }

 private:
  ReferralTree() = default;

  void check_index(int i) const {
    if (i < 0 || i >= n_)
      throw IndexOutOfRange("node " + std::to_string(i) + " outside [0," +
                            std::to_string(n_) + ")");
  }

  int n_ = 0;
  int root_ = 0;
  std::vector<int> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
};

// Uniform-attachment recruitment tree: node 0 is the root and node i picks
// its recruiter uniformly from {0, ..., i-1}. Deterministic per (n, seed).
inline ReferralTree random_tree(int n, std::uint64_t seed) {
  if (n < 1) throw ZeroNodes("tree needs at least one node");
  std::vector<std::optional<int>> parents(static_cast<std::size_t>(n));
  SplitMix64 rng(seed);
  for (int i = 1; i < n; ++i)
    parents[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
  return ReferralTree::from_parents(parents);
}

}  // namespace refgame
