#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ktg/graph.hpp"

namespace ktg {

inline constexpr int kMaxRuleSize = 8;

/// One bit per fragment position (bit p = position p).
using Mask = std::uint8_t;

/// Row bitmasks: bit b of rows[a] is the edge a -> b.
using FragmentAdjacency = std::array<Mask, kMaxRuleSize>;

/// A KT-grammar rule: fragment F plus boundary indicators i (in_mask) and o
/// (out_mask). When the rule replaces a node x, every position with its
/// in_mask bit set receives all of x's incoming edges, and every position with
/// its out_mask bit set emits all of x's outgoing edges.
struct KTRule {
  int k = 0;
  FragmentAdjacency adj{};
  Mask in_mask = 0;
  Mask out_mask = 0;
  std::uint64_t frequency = 0;

  static KTRule from_edges(int k, std::span<const std::pair<int, int>> edges, Mask in_mask,
                           Mask out_mask);

  bool has_edge(int a, int b) const { return (adj[a] >> b) & 1u; }
  std::vector<std::pair<int, int>> edges() const;
  int edge_count() const;
  bool in_bit(int p) const { return (in_mask >> p) & 1u; }
  bool out_bit(int p) const { return (out_mask >> p) & 1u; }

  /// Checks k range, self-loops, unused mask bits and weak connectivity.
  bool is_valid() const;

  /// Structural equality (frequency is ignored).
  bool same_structure(const KTRule& other) const {
    return k == other.k && adj == other.adj && in_mask == other.in_mask &&
           out_mask == other.out_mask;
  }
};

/// Applies `perm` (old position -> new position) to the rule.
KTRule permute(const KTRule& rule, std::span<const int> perm);

/// Isomorphism-invariant identity of a rule: fragment code first, then masks.
/// Two rules get equal codes exactly when they are isomorphic as
/// (fragment, in_mask, out_mask) structures.
struct CanonicalCode {
  std::uint8_t k = 0;
  std::uint64_t adjacency = 0;
  std::uint8_t in_mask = 0;
  std::uint8_t out_mask = 0;

  std::vector<std::uint8_t> bytes() const;
  std::string hex() const;
  static std::optional<CanonicalCode> from_hex(std::string_view text);

  friend bool operator==(const CanonicalCode&, const CanonicalCode&) = default;
  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
};

struct CanonicalCodeHash {
  std::size_t operator()(const CanonicalCode& c) const noexcept;
};

/// Canonical labelings of one fragment shape. `labelings[l][v]` is the
/// canonical position of local node v; all labelings produce the same
/// canonical adjacency (they differ by a fragment automorphism).
struct FragmentForm {
  int k = 0;
  std::uint64_t code = 0;
  std::vector<std::array<std::uint8_t, kMaxRuleSize>> labelings;
};

/// Canonical form of a fragment. Node invariants are refined into ordered
/// cells, and the code is the minimal adjacency serialization over all
/// cell-respecting orderings.
FragmentForm canonical_fragment(int k, const FragmentAdjacency& adj);

/// Adjacency packed in the serialization order used by fragment codes.
std::uint64_t encode_fragment(int k, const FragmentAdjacency& adj);
FragmentAdjacency decode_fragment(int k, std::uint64_t code);

Mask map_mask(Mask mask, const std::array<std::uint8_t, kMaxRuleSize>& labeling, int k);

/// Smallest (in_mask, out_mask) pair reachable through any labeling of `form`,
/// packed as (in << 8 | out). Also reports the first labeling achieving it.
std::pair<std::uint16_t, std::size_t> canonical_masks(const FragmentForm& form, Mask in_mask,
                                                      Mask out_mask);

CanonicalCode canonical_code(const KTRule& rule);

/// Rule rebuilt from its code (positions in canonical order, frequency 0).
KTRule rule_from_code(const CanonicalCode& code);

/// Canonical rule plus the labeling (local position -> canonical position)
/// that maps `rule` onto it.
struct CanonicalRule {
  KTRule rule;
  CanonicalCode code;
  std::array<std::uint8_t, kMaxRuleSize> labeling{};
};

CanonicalRule canonicalize(const KTRule& rule);

/// Memoizes fragment canonicalization by local adjacency. Fragment shapes are
/// numbered in first-seen order.
class FragmentCanonicalizer {
 public:
  struct Entry {
    std::uint32_t shape_id = 0;
    std::shared_ptr<const FragmentForm> form;
  };

  const Entry& get(int k, const FragmentAdjacency& local_adj);
  std::size_t shape_count() const { return shapes_.size(); }

 private:
  std::unordered_map<std::uint64_t, Entry> memo_;
  std::unordered_map<std::uint64_t, std::uint32_t> shapes_;  // (k, code) -> id
};

using RuleId = std::uint32_t;

/// The rule library: isomorphism-deduplicated rules with stable ids, kept in
/// descending order of discovery count.
class RuleLibrary {
 public:
  struct InternResult {
    RuleId id = 0;
    bool is_new = false;
  };

  /// Canonicalizes `rule`, assigns an id on first sight and counts a discovery.
  InternResult intern(const KTRule& rule);
  /// Same as intern() for an already canonical code.
  InternResult intern(const CanonicalCode& code);

  std::optional<RuleId> find(const CanonicalCode& code) const;

  /// Adds a rule without counting a discovery (used when loading grammars).
  RuleId insert(const CanonicalCode& code, std::uint64_t frequency, std::uint64_t discoveries);

  std::size_t size() const { return rules_.size(); }
  const KTRule& rule(RuleId id) const { return rules_.at(id); }
  const CanonicalCode& code(RuleId id) const { return codes_.at(id); }
  std::uint64_t discovery_count(RuleId id) const { return discoveries_.at(id); }
  std::uint64_t frequency(RuleId id) const { return rules_.at(id).frequency; }
  void increment_frequency(RuleId id) { ++rules_.at(id).frequency; }

  /// Ids in library order: descending discovery count, ties by id.
  std::vector<RuleId> order() const;

  /// Ids of rules with frequency > 0, in library order.
  std::vector<RuleId> used_rules() const;

 private:
  std::vector<KTRule> rules_;
  std::vector<CanonicalCode> codes_;
  std::vector<std::uint64_t> discoveries_;
  std::unordered_map<CanonicalCode, RuleId, CanonicalCodeHash> index_;
};

/// Forward application: replaces `target` with the rule fragment, fragment
/// position p taking id `id_assignment[p]`. `target` must be one of the ids;
/// the others must be inactive. In-neighbors of the target are wired to every
/// in_mask position, out-neighbors from every out_mask position.
void apply_rule_in_place(DiGraph& graph, NodeId target, const KTRule& rule,
                         std::span<const NodeId> id_assignment);

DiGraph apply_rule(const DiGraph& graph, NodeId target, const KTRule& rule,
                   std::span<const NodeId> id_assignment);

}  // namespace ktg
