#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "tree.hpp"

namespace lambdatree {

struct Labeling {
  std::vector<int> labels;

  int span() const { return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()); }
  int size() const { return static_cast<int>(labels.size()); }
};

struct LambdaBounds {
  int lower = 0;
  int upper = 0;
};

/// The first broken constraint found by validate_labeling.
struct Violation {
  int u = -1;
  int v = -1;
  int distance = 0;  // 1 = adjacent pair, 2 = distance-two pair
  std::string describe(const Labeling& f) const {
    return (distance == 1 ? "edge (" : "distance-2 pair (") + std::to_string(u) + "," + std::to_string(v) +
           ") labels " + std::to_string(f.labels[u]) + "," + std::to_string(f.labels[v]);
  }
};

/// Returns the first violated L(p,q) constraint, or nothing when f is valid.
inline std::optional<Violation> first_violation(const Tree& t, const Labeling& f, int p, int q) {
  if (f.size() != t.size())
    throw PreconditionError("labeling has " + std::to_string(f.size()) + " labels for " +
                            std::to_string(t.size()) + " vertices");
  for (int x : f.labels)
    if (x < 0) throw PreconditionError("negative label");
  for (auto [u, v] : t.edges())
    if (std::abs(f.labels[u] - f.labels[v]) < p) return Violation{std::min(u, v), std::max(u, v), 1};
  // distance-2 pairs are exactly pairs of neighbours of a common vertex
  std::vector<std::pair<int, int>> lab;
  for (int c = 0; c < t.size(); ++c) {
    auto nb = t.neighbors(c);
    if (nb.size() < 2) continue;
    lab.clear();
    for (int w : nb) lab.emplace_back(f.labels[w], w);
    std::sort(lab.begin(), lab.end());
    for (std::size_t i = 1; i < lab.size(); ++i)
      if (lab[i].first - lab[i - 1].first < q) {
        int a = lab[i - 1].second, b = lab[i].second;
        return Violation{std::min(a, b), std::max(a, b), 2};
      }
  }
  return std::nullopt;
}

inline bool validate_labeling(const Tree& t, const Labeling& f, int p, int q) {
  if (q > p) throw PreconditionError("validate_labeling expects q <= p");
  return !first_violation(t, f, p, q).has_value();
}

inline LambdaBounds lambda_bounds(const Tree& t, int p) {
  if (t.size() == 1) return {0, 0};
  int d = t.max_degree();
  return {d + p - 1, std::min(d + 2 * p - 2, 2 * d + p - 2)};
}

}  // namespace lambdatree
