#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "thex/sexpr.hpp"
#include "thex/signature.hpp"
#include "thex/term.hpp"

namespace thex {

// Typed surface expression, before matches are lowered to auxiliary symbols.
struct MatchCase {
  Op ctor = 0;
  std::vector<Op> binders;
};

struct Expr {
  enum class Kind { Var, App, Ite, Match };
  Kind kind = Kind::App;
  Op op = 0;                     // Var: variable symbol, App: head symbol
  std::vector<Expr> args;        // Ite: cond, then, else; Match: scrutinee, bodies...
  std::vector<MatchCase> cases;  // Match only, parallel to bodies
  SortId sort = 0;
};

struct Equation {
  Term lhs;
  Term rhs;
  std::vector<Op> vars;  // Variable symbols

  bool operator==(const Equation& o) const { return lhs == o.lhs && rhs == o.rhs; }
};

struct Theory {
  Signature sig;
  std::vector<SortId> datatypes;
  std::vector<Op> functions;
  std::vector<Op> vocabulary;    // enumeration symbols: functions, constructors, function constants
  std::vector<Equation> eqs;     // definitions (one per arm) and asserted equations
  std::vector<Equation> aux_eqs; // lowered match arms and eta equations
  std::vector<Equation> goals;
};

Theory parse_theory(std::string_view text);
// Parses more declarations into an existing theory. On error the theory is unchanged.
void parse_into(Theory& theory, std::string_view text);
// Parses assertions in the context of base and returns only the new equations.
// Symbols they introduce are added to base; its equations are left alone.
std::vector<Equation> parse_lemmas(Theory& base, std::string_view text);

Expr desugar(const Expr& e);
bool has_ite(const Expr& e);

std::string equation_to_string(const Signature& sig, const Equation& eq);
std::string serialize_lemma(const Signature& sig, const Equation& eq);
std::string serialize_lemmas(const Signature& sig, const std::vector<Equation>& lemmas);

// Turns placeholders/leaves into named variables: sort initial, indexed when shared.
Equation name_variables(Signature& sig, const Term& lhs, const Term& rhs);
std::vector<Op> collect_vars(const Signature& sig, const Term& lhs, const Term& rhs);

Term substitute(const Term& t, const std::vector<std::pair<Op, Term>>& sub);

}  // namespace thex
