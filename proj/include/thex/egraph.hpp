#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "thex/signature.hpp"
#include "thex/term.hpp"

namespace thex {

using ClassId = std::uint32_t;
using Tick = std::uint64_t;
inline constexpr std::size_t kMaxArity = 8;
inline constexpr ClassId kNoClass = ~ClassId{0};

struct ENode {
  Op op = 0;
  std::uint32_t arity = 0;
  std::array<ClassId, kMaxArity> children{};

  std::span<const ClassId> kids() const { return {children.data(), arity}; }
  bool operator==(const ENode& o) const {
    if (op != o.op || arity != o.arity) return false;
    for (std::uint32_t i = 0; i < arity; ++i)
      if (children[i] != o.children[i]) return false;
    return true;
  }
  bool operator<(const ENode& o) const {
    if (op != o.op) return op < o.op;
    if (arity != o.arity) return arity < o.arity;
    for (std::uint32_t i = 0; i < arity; ++i)
      if (children[i] != o.children[i]) return children[i] < o.children[i];
    return false;
  }
  template <typename H>
  friend H AbslHashValue(H h, const ENode& n) {
    h = H::combine(std::move(h), n.op, n.arity);
    return H::combine_contiguous(std::move(h), n.children.data(), n.arity);
  }
};

class EGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compiled pattern: a flattened term whose leaves may be pattern variables.
struct Pattern {
  struct Node {
    bool is_var = false;
    std::uint32_t var = 0;
    Op op = 0;
    SortId sort = 0;
    std::vector<std::uint32_t> children;
  };
  std::vector<Node> nodes;
  std::uint32_t root = 0;
  std::vector<Op> vars;  // pattern variable index -> symbol
  std::size_t height = 0;

  // Leaves whose symbol is in var_ops become pattern variables; others are constants.
  static Pattern compile(const Signature& sig, const Term& t, std::vector<Op>& var_ops,
                         const std::function<bool(Op)>& is_var);
  SortId sort() const { return nodes[root].sort; }
};

struct Match {
  ClassId root = 0;
  std::vector<ClassId> subst;
};

class EGraph {
 public:
  explicit EGraph(const Signature* sig) : sig_(sig) {}

  const Signature& sig() const { return *sig_; }
  void set_signature(const Signature* sig) { sig_ = sig; }

  ClassId add(const Term& t, bool enumerated = false);
  ClassId add_node(ENode n, bool enumerated = false);
  // Both lookups require a rebuilt graph.
  std::optional<ClassId> lookup(const Term& t) const;
  std::optional<ClassId> lookup_node(ENode n) const;
  ClassId merge(ClassId a, ClassId b);
  std::size_t rebuild();

  ClassId find(ClassId a) const {
    while (parent_[a] != a) a = parent_[a];
    return a;
  }
  bool equiv(ClassId a, ClassId b) const { return find(a) == find(b); }

  // Matches with at least one visited class modified after `since`.
  std::vector<Match> ematch(const Pattern& p, Tick since = 0) const;
  std::vector<Match> ematch_roots(const Pattern& p, Tick since, const std::vector<ClassId>& roots) const;
  // Canonical classes holding at least one node with the given op.
  std::unordered_map<Op, std::vector<ClassId>> op_index() const;
  std::vector<Match> ematch_in(const Pattern& p, ClassId c) const;
  ClassId instantiate(const Pattern& p, const std::vector<ClassId>& subst);

  Tick tick() const { return tick_; }
  void advance_tick() { ++tick_; }

  std::size_t node_count() const { return node_count_; }
  std::size_t class_count() const { return class_count_; }
  std::size_t union_count() const { return unions_; }
  std::vector<ClassId> classes() const;  // canonical ids, ascending
  const std::vector<ENode>& nodes(ClassId c) const { return classes_[find(c)].nodes; }
  const std::vector<std::pair<ENode, ClassId>>& parents(ClassId c) const { return classes_[find(c)].parents; }
  // Canonical classes within `height` parent steps of a class modified after `since`.
  std::vector<ClassId> affected(Tick since, int height) const;
  SortId class_sort(ClassId c) const { return classes_[find(c)].sort; }
  bool enumerated(ClassId c) const { return classes_[find(c)].enumerated; }
  void set_enumerated(ClassId c) { classes_[find(c)].enumerated = true; }
  Tick class_tick(ClassId c) const { return classes_[find(c)].tick; }
  std::size_t id_bound() const { return classes_.size(); }
  bool clean() const { return pending_.empty(); }

  ENode canonicalize(ENode n) const {
    for (std::uint32_t i = 0; i < n.arity; ++i) n.children[i] = find(n.children[i]);
    return n;
  }

  // Minimal term per class under the preference order, restricted to allowed ops.
  std::optional<Term> extract_min(ClassId c, const std::function<bool(Op)>& allowed = nullptr) const;

  std::string dump() const;
  std::string dot() const;

 private:
  struct EClass {
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, ClassId>> parents;
    SortId sort = 0;
    Tick tick = 0;
    std::uint32_t size = 1;
    bool enumerated = false;
  };

  void touch(ClassId c) { classes_[c].tick = tick_; }

  const Signature* sig_;
  std::vector<ClassId> parent_;
  std::vector<EClass> classes_;
  absl::flat_hash_map<ENode, ClassId> memo_;
  std::vector<std::pair<ENode, ClassId>> pending_;
  std::vector<ClassId> dirty_;
  Tick tick_ = 1;
  std::size_t node_count_ = 0;
  std::size_t class_count_ = 0;
  std::size_t unions_ = 0;
};

// Extracts every class at once; shares work across many extract calls.
class Extractor {
 public:
  Extractor(const EGraph& g, std::function<bool(Op)> allowed);
  std::optional<Term> best(ClassId c) const;

 private:
  struct Best {
    std::size_t size = 0;
    bool has = false;
    Term term;
    std::size_t free_vars = 0;
    std::string text;
  };
  const EGraph& g_;
  std::vector<Best> best_;
};

}  // namespace thex
