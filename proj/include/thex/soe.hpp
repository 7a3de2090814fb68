#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thex/order.hpp"
#include "thex/rewrite.hpp"
#include "thex/sygue.hpp"

namespace thex {

enum class ConjectureStatus { Pending, Proved, Failed, Redundant };

struct Conjecture {
  Term lhs;
  Term rhs;
  ConjectureStatus status = ConjectureStatus::Pending;
  OrderKey key;
};

// Orients the pair so that lhs precedes rhs and fills in the order key.
Conjecture make_conjecture(const Signature& sig, Term a, Term b);
std::string conjecture_text(const Signature& sig, const Conjecture& c);

bool term_order_leq(const Signature& sig, const Term& a, const Term& b);

std::vector<Term> make_examples(Signature& sig, SortId sort, int c);

struct InferStats {
  std::size_t copies = 0;
  std::size_t aborted = 0;
};

// Datatypes whose first placeholder is present in the enumeration.
std::vector<SortId> inducted_datatypes(const EnumState& st);

std::vector<Conjecture> infer_conjectures(EnumState& st, Signature& sig, const std::vector<RewriteRule>& rules,
                                          const SaturationConfig& cfg, int example_depth,
                                          InferStats* stats = nullptr);

std::vector<Conjecture> screen(const std::vector<Conjecture>& conjs, const EnumState& st,
                               const std::vector<RewriteRule>& rules, const SaturationConfig& cfg);

// Replays one example valuation: are both sides merged once ph1 is replaced by `example`?
bool merged_under_example(const EnumState& st, Signature& sig, const std::vector<RewriteRule>& rules,
                          const SaturationConfig& cfg, const Conjecture& c, SortId sort, const Term& example);

}  // namespace thex
