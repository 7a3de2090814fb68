#include <doctest.h>

#include "../support/oracles.hpp"
#include "thex/explorer.hpp"
#include "thex/prover.hpp"

using namespace thex;

namespace {

struct Goal {
  Theory th;
  Conjecture c;
  std::vector<RewriteRule> rules;
  Goal(const char* file, const std::string& goal)
      : th(parse_theory(oracle::read_file(oracle::corpus(file)) + goal)) {
    c = goal_conjecture(th.sig, th.goals.at(0));
    rules = theory_rules(th);
  }
  ProofResult prove(const SaturationConfig& cfg = {}) { return prove_by_induction(c, th.sig, rules, cfg); }
};

}  // namespace

TEST_CASE("right identity of append is proved by induction") {
  Goal g("theories/lists_rev.smt2", "(prove (forall ((l (List T))) (= (++ l nil) l)))");
  auto r = g.prove();
  CHECK(r.applicable);
  CHECK(r.proved);
}

TEST_CASE("a false conjecture is not proved") {
  Goal g("theories/lists_rev.smt2", "(prove (forall ((l (List T))) (= (rev l) l)))");
  auto r = g.prove();
  CHECK_FALSE(r.proved);
  CHECK_FALSE(r.failed_case.empty());
}

TEST_CASE("induction needs a datatype placeholder") {
  Goal g("theories/lists_rev.smt2", "(prove (forall ((x T)) (= (cons x nil) (cons x nil))))");
  CHECK_FALSE(g.prove().applicable);
}

TEST_CASE("rewriting alone settles base facts but not inductive ones") {
  Goal base("theories/nat.smt2", "(prove (forall ((n Nat)) (= (plus zero n) n)))");
  CHECK(check_no_induction(base.c.lhs, base.c.rhs, base.th.sig, base.rules, SaturationConfig{}));
  Goal ind("theories/nat.smt2", "(prove (forall ((n Nat)) (= (plus n zero) n)))");
  CHECK_FALSE(check_no_induction(ind.c.lhs, ind.c.rhs, ind.th.sig, ind.rules, SaturationConfig{}));
  CHECK(ind.prove().proved);
}

TEST_CASE("commutativity needs its auxiliary lemmas") {
  Goal g("theories/nat.smt2", "(prove (forall ((x Nat) (y Nat)) (= (plus x y) (plus y x))))");
  CHECK_FALSE(g.prove().proved);
  for (const char* aux : {"(assert (forall ((n Nat)) (= (plus n zero) n)))",
                          "(assert (forall ((x Nat) (y Nat)) (= (plus x (succ y)) (succ (plus x y)))))"}) {
    for (const auto& e : parse_lemmas(g.th, aux)) {
      auto rs = compile_equation(g.th.sig, e, RuleOrigin::Lemma, "aux");
      g.rules.insert(g.rules.end(), rs.begin(), rs.end());
    }
  }
  CHECK(g.prove().proved);
}

TEST_CASE("take and drop recombine only with case splits") {
  Goal g("theories/take_drop.smt2",
         "(prove (forall ((n Nat) (xs (List T))) (= (++ (take n xs) (drop n xs)) xs)))");
  CHECK(g.prove().proved);
  SaturationConfig no_split;
  no_split.case_split = false;
  CHECK_FALSE(g.prove(no_split).proved);
}

TEST_CASE("generalization renames repeated placeholders, most general first") {
  Goal g("theories/nat.smt2", "(prove (forall ((x Nat) (y Nat)) (= (plus (plus x y) x) (plus x (plus y x)))))");
  auto vs = generalize(g.c, g.th.sig);
  REQUIRE(vs.size() >= 2);
  CHECK(vs.back().key == g.c.key);
  CHECK(free_var_count(g.th.sig, vs.front().lhs, vs.front().rhs) == 3);
  auto one = generalize(g.c, g.th.sig, 1);
  REQUIRE(one.size() == 2);  // the limit bounds variants; the original is always last
  CHECK(one.front().key == vs.front().key);
  CHECK(one.back().key == g.c.key);
}

TEST_CASE("hypothesis rules are guarded to the recursive leaf") {
  Goal g("theories/lists_rev.smt2", "(prove (forall ((l (List T))) (= (++ l nil) l)))");
  SortId list = g.th.sig.sort_of(g.c.lhs);
  Op ph1 = g.th.sig.placeholder(list, 1);
  Op leaf = g.th.sig.fresh(list, "xs");
  auto rs = hypothesis_rules(g.th.sig, g.c.lhs, g.c.rhs, ph1, leaf, "ih");
  REQUIRE_FALSE(rs.empty());
  for (const auto& r : rs) {
    CHECK(r.origin == RuleOrigin::Hypothesis);
    REQUIRE(r.wf_guard.has_value());
    CHECK(std::find(r.wf_guard->begin(), r.wf_guard->end(), leaf) != r.wf_guard->end());
  }
}

TEST_CASE("a proved conjecture becomes a named lemma with lemma rules") {
  Goal g("theories/lists_rev.smt2", "(prove (forall ((l (List T))) (= (++ l nil) l)))");
  Lemma l = make_lemma(g.th.sig, g.c, g.c, 1);
  CHECK(equation_to_string(g.th.sig, l.equation) == "(= (++ l nil) l)");
  REQUIRE_FALSE(l.rules.empty());
  for (const auto& r : l.rules) CHECK(r.origin == RuleOrigin::Lemma);
}
