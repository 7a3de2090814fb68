#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thex/term.hpp"

namespace thex {

// Syntactic sort as written in a datatype template, resolved per instantiation.
struct SortExpr {
  std::string name;
  std::vector<SortExpr> args;
};

enum class SortKind { Datatype, Opaque, Arrow };

struct SortInfo {
  std::string name;
  std::vector<SortId> params;
  SortKind kind = SortKind::Opaque;
  bool is_type_var = false;
  int template_index = -1;  // datatype template this sort instantiates
  std::vector<Op> constructors;
};

struct CtorTemplate {
  std::string name;
  std::vector<SortExpr> fields;
};

struct DatatypeTemplate {
  std::string name;
  std::vector<std::string> params;
  std::vector<CtorTemplate> ctors;
  bool builtin = false;
};

enum class SymbolKind {
  Constructor,
  Function,
  FunctionConstant,
  Apply,
  Match,
  Placeholder,
  Uninterpreted,
  Variable,
};

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Function;
  std::vector<SortId> args;
  SortId ret = 0;
  std::uint32_t index = 0;  // placeholder index, constructor position
  Op target = 0;            // function named by a FunctionConstant
};

// One arm of a lowered match: aux(ctor(binders), params...) = body.
struct MatchArm {
  Op ctor = 0;
  std::vector<Op> binders;
  Term body;
};

struct MatchInfo {
  Term scrutinee;  // for printing only; params are its free variables
  std::vector<Op> params;
  std::vector<MatchArm> arms;
};

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Signature {
 public:
  Signature();

  // sorts
  SortId opaque_sort(const std::string& name, bool type_var);
  std::optional<SortId> find_opaque(const std::string& name) const;
  SortId arrow_sort(const std::vector<SortId>& params);  // last entry is the result
  int add_template(DatatypeTemplate t);
  std::optional<int> find_template(const std::string& name) const;
  const DatatypeTemplate& datatype_template(int i) const { return templates_[i]; }
  SortId instantiate(int template_index, const std::vector<SortId>& args);
  SortId resolve(const SortExpr& e, const std::map<std::string, SortId>& env);

  SortId bool_sort() const { return bool_sort_; }
  Op true_op() const { return sorts_[bool_sort_].constructors[0]; }
  Op false_op() const { return sorts_[bool_sort_].constructors[1]; }

  const SortInfo& sort(SortId s) const { return sorts_.at(s); }
  std::size_t sort_count() const { return sorts_.size(); }
  bool is_datatype(SortId s) const { return sorts_.at(s).kind == SortKind::Datatype; }
  bool is_arrow(SortId s) const { return sorts_.at(s).kind == SortKind::Arrow; }
  const std::vector<Op>& constructors(SortId s) const { return sorts_.at(s).constructors; }
  std::string sort_name(SortId s) const;

  // symbols
  Op add_function(const std::string& name, std::vector<SortId> args, SortId ret);
  std::optional<Op> find_function(const std::string& name) const;
  std::vector<Op> find_constructors(const std::string& name) const;
  Op function_constant(Op f);
  std::optional<Op> existing_function_constant(Op f) const;
  Op apply_op(SortId arrow);
  Op placeholder(SortId s, std::uint32_t index);
  Op variable(const std::string& name, SortId s);
  Op fresh(SortId s, const std::string& prefix);
  Op example_leaf(SortId s, std::uint32_t index);
  Op add_match(std::vector<SortId> args, SortId ret, MatchInfo info);

  const Symbol& symbol(Op op) const { return symbols_.at(op); }
  std::size_t symbol_count() const { return symbols_.size(); }
  SymbolKind kind(Op op) const { return symbols_.at(op).kind; }
  SortId sort_of(Op op) const { return symbols_.at(op).ret; }
  SortId sort_of(const Term& t) const { return symbols_.at(t.op).ret; }
  const MatchInfo& match_info(Op op) const { return matches_.at(op); }
  bool is_constructor(Op op) const { return kind(op) == SymbolKind::Constructor; }
  bool is_var_like(Op op) const {
    auto k = kind(op);
    return k == SymbolKind::Placeholder || k == SymbolKind::Variable;
  }
  bool is_leaf_symbol(Op op) const {
    auto k = kind(op);
    return k == SymbolKind::Placeholder || k == SymbolKind::Variable ||
           k == SymbolKind::Uninterpreted;
  }
  // Constructor field indices whose sort equals the constructor's own sort.
  std::vector<std::size_t> recursive_fields(Op ctor) const;

  std::string to_string(const Term& t) const;

 private:
  Op push_symbol(Symbol s);

  std::vector<SortInfo> sorts_;
  std::map<std::pair<std::string, std::vector<SortId>>, SortId> sort_index_;
  std::vector<DatatypeTemplate> templates_;
  std::map<std::string, int> template_index_;
  std::vector<Symbol> symbols_;
  std::map<std::string, Op> functions_;
  std::map<std::string, std::vector<Op>> constructors_by_name_;
  std::map<Op, Op> function_constants_;
  std::map<SortId, Op> apply_ops_;
  std::map<std::pair<SortId, std::uint32_t>, Op> placeholders_;
  std::map<std::pair<SortId, std::uint32_t>, Op> example_leaves_;
  std::map<std::pair<std::string, SortId>, Op> variables_;
  std::map<Op, MatchInfo> matches_;
  std::uint32_t fresh_counter_ = 0;
  SortId bool_sort_ = 0;
};

}  // namespace thex
