#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "thex/prover.hpp"

namespace thex {

struct ExplorerConfig {
  int term_depth = 2;
  int rw_depth = 8;
  int example_depth = 2;
  int split_depth = 2;
  int ph_count = 2;
  std::map<std::string, int> ph_per_sort;
  double timeout = 0;  // seconds, 0 for none
  bool case_split = true;
  std::size_t node_cap = 150000;
  std::ostream* trace = nullptr;  // proof log and conjecture dump
  std::ostream* rule_trace = nullptr;
  std::ostream* diag = nullptr;

  SaturationConfig saturation() const;
};

struct PhaseTimes {
  double generation = 0;
  double inference = 0;
  double screening = 0;
  double proving = 0;
};

struct ConjectureCounts {
  std::size_t emitted = 0;
  std::size_t screened = 0;
  std::size_t proved = 0;
  std::size_t failed = 0;
  std::size_t retried = 0;
};

enum class EventKind { Emitted, Admitted, Failed, Redundant, GoalProved, GoalFailed };

struct Event {
  EventKind kind;
  int level = 0;
  Term lhs;
  Term rhs;
  std::string text;
};

struct GoalOutcome {
  std::string text;
  bool proved = false;
  double seconds = 0;
  std::size_t attempts = 0;
};

struct ExploreStats {
  PhaseTimes phase_times;
  ConjectureCounts conjectures;
  std::vector<Event> events;
  std::vector<GoalOutcome> goals;
  std::size_t soe_aborts = 0;
  bool truncated = false;
};

struct ExploreResult {
  Theory theory;  // owns the symbols referenced by lemmas and events
  std::vector<Lemma> lemmas;
  ExploreStats stats;

  std::vector<Equation> lemma_equations() const;
};

ExploreResult explore(const Theory& theory, const ExplorerConfig& cfg);
// Explores with goal attempts before the first and after every admission.
ExploreResult prove_goals(const Theory& theory, const ExplorerConfig& cfg);

// Fraction of `a` provable without induction from the base definitions plus `b`.
double subsumption_ratio(const std::vector<Equation>& a, const std::vector<Equation>& b, const Theory& base,
                         const ExplorerConfig& cfg);

// Goal variables become placeholders, numbered per sort in declaration order.
Conjecture goal_conjecture(Signature& sig, const Equation& goal);

const char* event_name(EventKind k);

}  // namespace thex
