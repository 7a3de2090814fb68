#pragma once

// Property checks shared by the property suite and the acceptance binary.
// Each returns a tally of checked cases and violations.

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "thex/explorer.hpp"

namespace thex::props {

struct Tally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first;
  void fail(const std::string& why) {
    if (violations++ == 0) first = why;
  }
  void add(const Tally& o) {
    checked += o.checked;
    if (o.violations && !violations) first = o.first;
    violations += o.violations;
  }
};

// E-graph equivalence against naive congruence closure on random instances.
inline Tally egraph_vs_naive(int instances, unsigned seed, std::size_t max_nodes = 60) {
  Tally t;
  Signature sig;
  SortId s = sig.opaque_sort("S", false);
  std::vector<Op> leaves{sig.add_function("a", {}, s), sig.add_function("b", {}, s), sig.add_function("c", {}, s)};
  Op f = sig.add_function("f", {s}, s);
  Op g2 = sig.add_function("g", {s, s}, s);
  std::mt19937 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::function<Term(int)> gen = [&](int h) -> Term {
    std::size_t r = pick(h == 0 ? 3 : 6);
    if (r < 3) return Term(leaves[r]);
    if (r < 5) return Term(f, {gen(h - 1)});
    return Term(g2, {gen(h - 1), gen(h - 1)});
  };
  for (int inst = 0; inst < instances; ++inst) {
    EGraph g(&sig);
    oracle::NaiveCC cc;
    std::vector<std::pair<int, ClassId>> roots;
    const std::size_t target = 8 + pick(max_nodes - 15);
    while (cc.size() < target) {
      Term x = gen(static_cast<int>(pick(4)));
      if (cc.size() + term_size(x) > max_nodes) continue;
      roots.push_back({cc.add(x), g.add(x)});
    }
    std::size_t merges = pick(6);
    for (std::size_t m = 0; m < merges; ++m) {
      auto [ia, ca] = roots[pick(roots.size())];
      auto [ib, cb] = roots[pick(roots.size())];
      cc.merge(ia, ib);
      g.merge(ca, cb);
      if (pick(2)) g.rebuild();
    }
    g.rebuild();
    cc.close();
    std::vector<ClassId> ids;
    for (std::size_t i = 0; i < cc.size(); ++i) {
      auto c = g.lookup(cc.term(static_cast<int>(i)));
      if (!c) {
        t.fail("term lost from e-graph: " + sig.to_string(cc.term(static_cast<int>(i))));
        ids.push_back(kNoClass);
        continue;
      }
      ids.push_back(*c);
    }
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (ids[i] == kNoClass || ids[j] == kNoClass) continue;
        ++t.checked;
        if (cc.equiv(static_cast<int>(i), static_cast<int>(j)) != g.equiv(ids[i], ids[j]))
          t.fail("instance " + std::to_string(inst) + ": " + sig.to_string(cc.term(static_cast<int>(i))) + " vs " +
                 sig.to_string(cc.term(static_cast<int>(j))));
      }
  }
  return t;
}

// Random ground terms over a theory's functions and constructors; leaves are
// ground values so every term evaluates.
class GroundGen {
 public:
  GroundGen(Theory& th, oracle::Interpreter& in, unsigned seed) : th_(th), vals_(th, in), rng_(seed) {
    for (Op f : th.functions) by_ret_[th.sig.sort_of(f)].push_back(f);
    for (SortId d : th.datatypes)
      for (Op c : th.sig.constructors(d)) by_ret_[d].push_back(c);
  }
  Term gen(SortId s, int h) {
    auto& ops = by_ret_[s];
    if (h == 0 || ops.empty() || pick(3) == 0) {
      auto vs = vals_.of(s, 2);
      if (vs.empty()) throw std::runtime_error("no values of sort " + th_.sig.sort_name(s));
      return vs[pick(vs.size())];
    }
    Op o = ops[pick(ops.size())];
    Term t(o);
    for (SortId a : th_.sig.symbol(o).args) t.args.push_back(gen(a, h - 1));
    return t;
  }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  Theory& th_;
  oracle::Values vals_;
  std::mt19937 rng_;
  std::map<SortId, std::vector<Op>> by_ret_;
};

// Rewriting never merges two ground terms with different values.
inline Tally rewrite_soundness(const std::string& theory_file, std::size_t terms, unsigned seed,
                               std::size_t per_graph = 25) {
  Tally t;
  Theory th = oracle::load_theory(theory_file);
  oracle::Interpreter in(th);
  GroundGen gen(th, in, seed);
  const auto rules = theory_rules(th);
  SaturationConfig cfg;
  for (std::size_t done = 0; done < terms;) {
    EGraph g(&th.sig);
    std::vector<Term> subterms;
    for (std::size_t i = 0; i < per_graph && done < terms; ++i, ++done) {
      SortId s = th.datatypes[gen.pick(th.datatypes.size())];
      Term x = gen.gen(s, 4);
      g.add(x);
      visit_ops(x, [&](const Term& y) { subterms.push_back(y); });
    }
    saturate(g, th.sig, rules, cfg);
    std::map<ClassId, std::vector<std::pair<Term, Term>>> by_class;
    for (const auto& x : subterms) {
      in.reset_fuel();
      Term v;
      try {
        v = in.eval(x);
      } catch (const oracle::Stuck& e) {
        t.fail(std::string("interpreter stuck: ") + e.what());
        continue;
      }
      by_class[g.find(*g.lookup(x))].push_back({x, v});
    }
    for (const auto& [c, members] : by_class)
      for (std::size_t i = 1; i < members.size(); ++i) {
        ++t.checked;
        if (members[i].second != members[0].second)
          t.fail(th.sig.to_string(members[i].first) + " merged with " + th.sig.to_string(members[0].first));
      }
  }
  return t;
}

// Every lemma holds on all ground instances built from constructor trees of
// bounded depth. Large instance spaces are sampled with a fixed stride.
inline Tally lemmas_hold(const ExploreResult& r, int depth = 3, std::size_t max_instances = 4000) {
  Tally t;
  Theory th = r.theory;
  oracle::Interpreter in(th);
  oracle::Values vals(th, in);
  for (const auto& l : r.lemmas) {
    const Equation& e = l.equation;
    std::vector<std::vector<Term>> sets;
    std::size_t total = 1;
    for (Op v : e.vars) {
      sets.push_back(vals.of(th.sig.sort_of(v), depth));
      total *= std::max<std::size_t>(1, sets.back().size());
    }
    const std::size_t stride = std::max<std::size_t>(1, total / max_instances);
    std::size_t k = 0;
    oracle::Values::product(sets, [&](const std::vector<Term>& xs) {
      if (k++ % stride) return;
      std::map<Op, Term> b;
      for (std::size_t i = 0; i < xs.size(); ++i) b[e.vars[i]] = xs[i];
      ++t.checked;
      try {
        in.reset_fuel();
        Term lv = in.eval(oracle::apply_subst(e.lhs, b));
        Term rv = in.eval(oracle::apply_subst(e.rhs, b));
        if (lv != rv) t.fail(equation_to_string(th.sig, e) + " fails at " + th.sig.to_string(lv) + " vs " +
                             th.sig.to_string(rv));
      } catch (const oracle::Stuck& ex) {
        t.fail(equation_to_string(th.sig, e) + ": interpreter stuck: " + ex.what());
      }
    });
  }
  return t;
}

// Replays every emitted conjecture against each symbolic example of some
// datatype placeholder it mentions, with the rules in force when it was emitted.
inline Tally soe_replay(const ExploreResult& r, const ExplorerConfig& cfg) {
  Tally t;
  Theory th = r.theory;
  EnumConfig ec;
  ec.max_level = 0;
  ec.ph_count = cfg.ph_count;
  ec.ph_per_sort = cfg.ph_per_sort;
  EnumState st = init_enum(th, ec);
  auto rules = theory_rules(th);
  const SaturationConfig sat = cfg.saturation();
  std::size_t admitted = 0;
  for (const auto& e : r.stats.events) {
    if (e.kind == EventKind::Admitted) {
      const auto& rs = r.lemmas.at(admitted++).rules;
      rules.insert(rules.end(), rs.begin(), rs.end());
      continue;
    }
    if (e.kind != EventKind::Emitted) continue;
    ++t.checked;
    Conjecture c = make_conjecture(th.sig, e.lhs, e.rhs);
    bool ok = false;
    for (SortId tau : inducted_datatypes(st)) {
      Op ph = *st.first_placeholder(tau);
      bool mentions = false;
      for (const Term* side : {&c.lhs, &c.rhs})
        visit_ops(*side, [&](const Term& x) { mentions = mentions || x.op == ph; });
      if (!mentions) continue;
      bool all = true;
      for (const auto& ex : make_examples(th.sig, tau, cfg.example_depth))
        all = all && merged_under_example(st, th.sig, rules, sat, c, tau, ex);
      ok = ok || all;
    }
    if (!ok) t.fail(e.text);
  }
  return t;
}

}  // namespace thex::props
