#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "ktg/enumeration.hpp"
#include "ktg/grammar.hpp"
#include "ktg/graph.hpp"
#include "ktg/mdl.hpp"

namespace ktg {

enum class EditDirection : std::uint8_t { In, Out };

/// One boundary edit, toggled: In is external -> fragment node, Out is
/// fragment node -> external.
struct RecordEdit {
  std::uint8_t position = 0;  // canonical fragment position
  NodeId external = 0;
  EditDirection direction = EditDirection::In;

  friend bool operator==(const RecordEdit&, const RecordEdit&) = default;
};

/// One extraction. `placement[p]` is the id that held canonical position p;
/// the survivor is the smallest of them and the rest were retired.
struct ApplicationRecord {
  RuleId rule = 0;
  NodeId survivor = 0;
  std::vector<NodeId> placement;
  std::vector<RecordEdit> edits;

  std::vector<NodeId> freed_ids() const;

  friend bool operator==(const ApplicationRecord&, const ApplicationRecord&) = default;
};

struct RuleStats {
  std::uint64_t frequency = 0;
  std::map<int, std::uint64_t> cost_histogram;
  std::uint64_t edges_edited = 0;
};

struct ExtractionResult {
  ExtractConfig config;
  std::uint64_t original_nodes = 0;
  std::uint64_t original_edges = 0;
  RuleLibrary grammar;
  std::vector<ApplicationRecord> records;
  DiGraph residual;
  BitAccount account;
  std::map<RuleId, RuleStats> stats;
};

/// Occurrence chosen for the next extraction.
struct Selection {
  RuleId rule = 0;
  std::uint32_t slot = 0;
  int cost = 0;
  NodeSet nodes;
  PcrResult pcr;
};

/// The greedy extraction loop over one graph.
class Extractor : private OccurrenceListener {
 public:
  Extractor(DiGraph graph, const ExtractConfig& config);
  ~Extractor() override;
  Extractor(const Extractor&) = delete;
  Extractor& operator=(const Extractor&) = delete;

  /// Highest-PCR rule and its cheapest occurrence, or nullopt.
  std::optional<Selection> select_best() const;

  /// Extracts the selected occurrence and updates the state.
  const ApplicationRecord& extract(const Selection& sel);

  /// Runs until nothing is left (or mdl-stop fires).
  void run();

  /// True when the marginal bits of `sel` exceed the raw bits it saves.
  bool exceeds_savings(const Selection& sel) const;

  const DiGraph& graph() const { return graph_; }
  const RuleLibrary& library() const { return library_; }
  const EnumState& state() const { return state_; }
  const std::vector<ApplicationRecord>& records() const { return records_; }

  /// Rule ids the given occurrence slot currently counts toward.
  const std::vector<RuleId>& rules_of(std::uint32_t slot) const { return occ_rules_.at(slot); }

  /// Costs of the stored occurrences of `rule`, ascending.
  std::vector<int> occurrence_costs(RuleId rule) const;

  ExtractionResult finish() &&;

 private:
  struct Entry {
    int cost;
    NodeSet nodes;
    std::uint32_t slot;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };
  struct Table {
    std::set<Entry> entries;
    std::map<int, std::int64_t> hist;
    mutable PcrResult pcr;
    mutable bool dirty = true;
  };
  struct Plan {
    Mask in = 0;
    Mask out = 0;
    std::size_t labeling = 0;
  };

  void on_added(std::uint32_t slot, const Occurrence& occ) override;
  void on_removed(std::uint32_t slot, const Occurrence& occ) override;

  void attach(std::uint32_t slot, RuleId rule);
  bool compatible(const Occurrence& occ, const CanonicalCode& code) const;
  Plan plan(const Occurrence& occ, RuleId rule) const;
  const PcrResult& table_pcr(RuleId rule) const;
  void refill();

  DiGraph graph_;
  ExtractConfig config_;
  std::uint64_t original_nodes_ = 0;
  std::uint64_t original_edges_ = 0;
  FragmentCanonicalizer canon_;
  RuleLibrary library_;
  EnumState state_;
  std::vector<Table> tables_;
  std::vector<std::vector<RuleId>> occ_rules_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> wild_by_shape_;
  std::unordered_map<std::uint64_t, std::vector<RuleId>> rules_by_shape_;
  std::vector<ApplicationRecord> records_;
  std::map<RuleId, RuleStats> stats_;
};

/// Full extraction. Throws ConfigInvalid.
ExtractionResult extract(const DiGraph& graph, const ExtractConfig& config);

struct ExtractOneResult {
  DiGraph graph;
  ApplicationRecord record;
};

/// Applies the candidate's edits, collapses it and records the application.
/// The candidate's rule uses local positions (j-th smallest node). Throws
/// StaleCandidate when the candidate no longer matches `graph`.
ExtractOneResult extract_one(const DiGraph& graph, const CandidateOccurrence& candidate,
                             RuleLibrary& library);

/// Replays records newest-first from `residual`. Throws CorruptRecord.
DiGraph decode(const DiGraph& residual, const RuleLibrary& grammar,
               std::span<const ApplicationRecord> records);
DiGraph decode(const ExtractionResult& result);

/// Realized bit account of a finished run.
BitAccount account_for(const ExtractionResult& result);

}  // namespace ktg
