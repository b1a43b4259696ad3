// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qviz/calculus/calculus.hpp"

namespace qviz::pattern {

struct CanonicalOptions {
  /// Replace every constant by a placeholder so `> 5` and `> 7` collide.
  bool abstractConstants = false;
};

/// Deterministic text of a query's labeled graph under a canonical
/// labeling: equal for queries that differ only in aliases, FROM order,
/// WHERE order, IN vs EXISTS phrasing, or the forall vs double-negation
/// phrasing.
struct CanonicalForm {
  std::string text;

  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

/// Lower-case hex SHA-256 of the canonical form text (64 characters).
struct PatternHash {
  std::string hex;

  friend bool operator==(const PatternHash&, const PatternHash&) = default;
  friend auto operator<=>(const PatternHash&, const PatternHash&) = default;
};

/// Canonical labeling by colour refinement on the query graph (tuple
/// variables, blocks, predicates and output columns as nodes), with
/// exhaustive individualization of every refinement tie. forall_transform
/// is applied first.
CanonicalForm canonicalize(const calculus::CalculusQuery& query, CanonicalOptions options = {});

PatternHash pattern_hash(const calculus::CalculusQuery& query, CanonicalOptions options = {});

/// SHA-256 of arbitrary text, lower-case hex.
std::string sha256_hex(std::string_view text);

struct Cluster {
  PatternHash hash;
  std::vector<std::string> members;
};

/// Groups queries by pattern hash. Clusters are ordered by size
/// (largest first) then hash; members by name.
std::vector<Cluster> cluster(const std::vector<std::pair<std::string, calculus::CalculusQuery>>& queries,
                             CanonicalOptions options = {});

}  // namespace qviz::pattern
