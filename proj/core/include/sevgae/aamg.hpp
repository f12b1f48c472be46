#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sevgae/schema.hpp"

namespace sevgae {

inline constexpr int kNodeCapMax = 128;   // hard upper bound on node count
inline constexpr int kDefaultHopClip = 8;
inline constexpr double kAreaEps = 1e-6;

struct TypedEdge {
  int u = 0;
  int v = 0;  // invariant u < v
  int type = 0;
  auto operator<=>(const TypedEdge&) const = default;
};

/// Attributed adjacency multi-graph: undirected, no self-loops, at most one
/// edge per (pair, type). Node features are normalized to the unit square.
struct Aamg {
  std::string id;
  SchemaVariant schema = SchemaVariant::Six;
  int n = 0;
  std::vector<int> node_class;
  std::vector<double> node_area;
  std::vector<std::array<double, 2>> node_center;
  std::optional<std::vector<std::vector<std::array<double, 2>>>> node_poly;
  std::vector<TypedEdge> edges;

  bool operator==(const Aamg&) const = default;

  /// Simple-graph adjacency (multi-edges collapsed), n x n, 0/1.
  std::vector<std::vector<int>> simple_adjacency() const;
  /// Multiplicity adjacency: entry = number of typed edges between the pair.
  std::vector<std::vector<double>> multiplicity_adjacency() const;
  std::vector<int> degrees() const;  // simple-graph degrees
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate(const Aamg& g, const LabelSchema& schema);

enum class OrderingKind { DegreeDesc, AvgNeighborDegree, Closeness, Betweenness };

struct CanonicalOrdering {
  OrderingKind kind;
  std::vector<int> permutation;  // permutation[new_index] = old_index
};

CanonicalOrdering canonical_order(const Aamg& g, OrderingKind kind);
std::vector<CanonicalOrdering> ordering_family(const Aamg& g);

struct DistanceMatrix {
  int m = kDefaultHopClip;
  std::vector<std::vector<int>> entries;  // n x n, values in {0..m}
};

DistanceMatrix hop_distances(const Aamg& g, int m);

Aamg apply_permutation(const Aamg& g, const CanonicalOrdering& p);

/// Centrality statistics on the collapsed simple graph (used by the
/// canonical orderings; exposed for testing against brute-force oracles).
std::vector<double> closeness_centrality(const std::vector<std::vector<int>>& adj);
std::vector<double> betweenness_centrality(const std::vector<std::vector<int>>& adj);

}  // namespace sevgae
