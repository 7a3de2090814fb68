#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thex/rewrite.hpp"
#include "thex/soe.hpp"

namespace thex {

struct Lemma {
  Equation equation;
  std::vector<RewriteRule> rules;
  Conjecture source;  // conjecture as screened
  Conjecture proved;  // the (possibly generalized) form that was proved
  std::size_t seq = 0;
};

struct ProofResult {
  bool proved = false;
  bool applicable = false;  // some datatype placeholder to induct on
  bool aborted = false;
  SortId datatype = 0;
  std::string failed_case;
};

// At most limit generalized variants, most general first, then the original.
std::vector<Conjecture> generalize(const Conjecture& c, Signature& sig, std::size_t limit = 16);

ProofResult prove_by_induction(const Conjecture& c, Signature& sig, const std::vector<RewriteRule>& rules,
                               const SaturationConfig& cfg, std::ostream* log = nullptr);

bool check_no_induction(const Term& lhs, const Term& rhs, Signature& sig, const std::vector<RewriteRule>& rules,
                        const SaturationConfig& cfg);

Lemma make_lemma(Signature& sig, const Conjecture& source, const Conjecture& proved, std::size_t seq);

// Induction hypothesis rules for one recursive leaf; other placeholders become pattern variables.
std::vector<RewriteRule> hypothesis_rules(Signature& sig, const Term& lhs, const Term& rhs, Op ph1, Op leaf,
                                          const std::string& name);

}  // namespace thex
