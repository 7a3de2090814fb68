#include <doctest.h>

#include "../support/properties.hpp"

using namespace thex;

namespace {

// take_drop at the default split depth explores for many minutes; one level of splits keeps it short.
ExplorerConfig config_for(const std::string& file) {
  ExplorerConfig cfg;
  if (file == "theories/take_drop.smt2") cfg.split_depth = 1;
  return cfg;
}

const ExploreResult& explored(const std::string& file) {
  static std::map<std::string, ExploreResult> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, explore(oracle::load_theory(file), config_for(file))).first;
  return it->second;
}

void check(const props::Tally& t) {
  INFO(t.first);
  CHECK(t.checked > 0);
  CHECK(t.violations == 0);
}

}  // namespace

TEST_CASE("e-graph congruence matches naive closure on 200 random instances") {
  check(props::egraph_vs_naive(200, 2024));
}

TEST_CASE("e-graph congruence holds on larger instances") {
  check(props::egraph_vs_naive(40, 99, 120));
}

TEST_CASE("rewriting merges only ground terms with equal values") {
  for (const char* f : {"theories/nat.smt2", "theories/lists_rev.smt2", "theories/take_drop.smt2",
                        "theories/lists_filter.smt2", "theories/trees.smt2", "theories/fold.smt2"}) {
    INFO(f);
    check(props::rewrite_soundness(f, 100, 11));
  }
}

TEST_CASE("admitted lemmas hold on ground instances") {
  for (const char* f : {"theories/nat.smt2", "theories/lists_rev.smt2", "theories/take_drop.smt2",
                        "theories/trees.smt2"}) {
    INFO(f);
    const auto& r = explored(f);
    CHECK_FALSE(r.lemmas.empty());
    check(props::lemmas_hold(r));
  }
}

TEST_CASE("emitted conjectures replay under every symbolic example") {
  for (const char* f : {"theories/nat.smt2", "theories/lists_rev.smt2"}) {
    INFO(f);
    check(props::soe_replay(explored(f), ExplorerConfig{}));
  }
}

TEST_CASE("exploration is deterministic") {
  for (const char* f : {"theories/nat.smt2", "theories/lists_rev.smt2", "theories/take_drop.smt2"}) {
    auto a = explore(oracle::load_theory(f), config_for(f));
    auto b = explore(oracle::load_theory(f), config_for(f));
    CHECK(serialize_lemmas(a.theory.sig, a.lemma_equations()) == serialize_lemmas(b.theory.sig, b.lemma_equations()));
    REQUIRE(a.stats.events.size() == b.stats.events.size());
    for (std::size_t i = 0; i < a.stats.events.size(); ++i) CHECK(a.stats.events[i].text == b.stats.events[i].text);
  }
}

TEST_CASE("the ground interpreter agrees with hand evaluation") {
  Theory th = parse_theory(oracle::read_file(oracle::corpus("theories/nat.smt2")) +
                           "(prove (= (plus (succ zero) (succ zero)) (succ (succ zero))))");
  oracle::Interpreter in(th);
  CHECK(in.eval(th.goals[0].lhs) == th.goals[0].rhs);
}

TEST_CASE("alpha equivalence renames variables consistently") {
  Theory th = oracle::load_theory("theories/lists_rev.smt2");
  auto a = parse_lemmas(th, "(assert (forall ((x (List T)) (y (List T))) (= (++ x y) (++ y x))))");
  auto b = parse_lemmas(th, "(assert (forall ((p (List T)) (q (List T))) (= (++ q p) (++ p q))))");
  auto c = parse_lemmas(th, "(assert (forall ((p (List T)) (q (List T))) (= (++ p p) (++ q q))))");
  CHECK(oracle::alpha_equal(th.sig, a[0], th.sig, b[0]));
  CHECK_FALSE(oracle::alpha_equal(th.sig, a[0], th.sig, c[0]));
}
