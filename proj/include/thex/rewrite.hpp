#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thex/egraph.hpp"
#include "thex/lang.hpp"

namespace thex {

enum class RuleOrigin { Definition, Lemma, Hypothesis };

struct RewriteRule {
  std::string name;
  Term premise;
  Term conclusion;
  RuleOrigin origin = RuleOrigin::Definition;
  std::optional<std::vector<Op>> wf_guard;  // the only leaves allowed at the induction position
  Pattern lhs;
  Pattern rhs;
  // Premise with one constructor obligation replaced by a hole; used to find blocked splits.
  struct Relaxed {
    Pattern pattern;
    std::uint32_t hole = 0;
  };
  std::vector<Relaxed> relaxed;
};

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<RewriteRule> compile_equation(const Signature& sig, const Equation& eq, RuleOrigin origin,
                                          const std::string& name);
std::vector<RewriteRule> compile_equations(const Signature& sig, const std::vector<Equation>& eqs,
                                           RuleOrigin origin, const std::string& prefix);
// Definitions, match arms and eta rules of a theory.
std::vector<RewriteRule> theory_rules(const Theory& th);

struct RewriteOptions {
  std::size_t node_cap = 150000;
  Tick since = 0;
  std::ostream* trace = nullptr;
  std::optional<std::pair<ClassId, ClassId>> target;  // stop once these two merge
  std::size_t growth_limit = 1000;  // new nodes per rule and iteration before a ban, 0 for none
};

struct RewriteStats {
  std::size_t merges = 0;
  int iterations = 0;
  bool aborted = false;
};

RewriteStats run_rewrites(EGraph& g, const std::vector<RewriteRule>& rules, int d, const RewriteOptions& opt = {});

struct CaseSplit {
  ClassId scrutinee = 0;
  SortId datatype = 0;
  std::vector<Term> alternatives;
  int depth = 0;
};

struct SaturationConfig {
  int depth = 8;
  std::size_t node_cap = 150000;
  bool case_split = true;
  int max_split_depth = 2;
  std::ostream* trace = nullptr;
  std::optional<std::pair<ClassId, ClassId>> target;
  std::size_t growth_limit = 1000;
};

bool is_opaque(const EGraph& g, ClassId c);
std::vector<CaseSplit> detect_blocked_splits(const EGraph& g, Signature& sig, const std::vector<RewriteRule>& rules,
                                             int depth = 0);
// Returns the number of merges applied to g.
std::size_t apply_split(EGraph& g, Signature& sig, const CaseSplit& s, const std::vector<RewriteRule>& rules,
                        const SaturationConfig& cfg, const std::vector<ClassId>& excluded = {});
// Rewriting followed by case splits; `since` continues from an already rewritten graph.
RewriteStats saturate(EGraph& g, Signature& sig, const std::vector<RewriteRule>& rules, const SaturationConfig& cfg,
                      int split_depth = 0, Tick since = 0, const std::vector<ClassId>& excluded = {});

}  // namespace thex
