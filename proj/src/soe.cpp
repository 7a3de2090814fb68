#include "thex/soe.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <set>

namespace thex {

Conjecture make_conjecture(const Signature& sig, Term a, Term b) {
  Conjecture c;
  if (term_key(sig, b) < term_key(sig, a)) std::swap(a, b);
  c.lhs = std::move(a);
  c.rhs = std::move(b);
  c.key = equation_key(sig, c.lhs, c.rhs);
  return c;
}

std::string conjecture_text(const Signature& sig, const Conjecture& c) {
  return sig.to_string(c.lhs) + " = " + sig.to_string(c.rhs);
}

bool term_order_leq(const Signature& sig, const Term& a, const Term& b) {
  OrderKey ka = term_key(sig, a);
  OrderKey kb = term_key(sig, b);
  return !(kb < ka);
}

std::vector<Term> make_examples(Signature& sig, SortId sort, int c) {
  if (!sig.is_datatype(sort)) throw SignatureError("examples need a datatype");
  // Depth counts constructor nesting through recursive fields only.
  std::vector<std::vector<Term>> by_depth;
  std::vector<Term> all;
  for (int d = 0; d <= c; ++d) {
    std::vector<Term> level;
    for (Op ctor : sig.constructors(sort)) {
      const auto rec = sig.recursive_fields(ctor);
      const std::size_t arity = sig.symbol(ctor).args.size();
      if (rec.empty()) {
        if (d == 0) {
          Term t(ctor);
          t.args.resize(arity, Term(kNoClass));
          level.push_back(std::move(t));
        }
        continue;
      }
      if (d == 0) continue;
      // children from depths < d, at least one child at exactly d-1
      std::vector<Term> pool;
      std::vector<int> pool_depth;
      for (int e = 0; e < d; ++e)
        for (const auto& t : by_depth[e]) {
          pool.push_back(t);
          pool_depth.push_back(e);
        }
      if (pool.empty()) continue;
      std::vector<std::size_t> idx(rec.size(), 0);
      while (true) {
        bool exact = false;
        Term t(ctor);
        t.args.resize(arity, Term(kNoClass));
        for (std::size_t i = 0; i < rec.size(); ++i) {
          t.args[rec[i]] = pool[idx[i]];
          exact = exact || pool_depth[idx[i]] == d - 1;
        }
        if (exact) level.push_back(std::move(t));
        // first recursive field varies fastest
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == pool.size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    by_depth.push_back(level);
    all.insert(all.end(), level.begin(), level.end());
  }
  if (all.empty()) throw SignatureError("uninhabited datatype " + sig.sort_name(sort));
  // Name leaves bottom-up: recursive children first, then the node's own fields.
  for (auto& ex : all) {
    std::uint32_t next = 0;
    std::function<void(Term&)> name = [&](Term& t) {
      const auto rec = sig.recursive_fields(t.op);
      for (std::size_t i : rec) name(t.args[i]);
      const auto fields = sig.symbol(t.op).args;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (std::find(rec.begin(), rec.end(), i) != rec.end()) continue;
        t.args[i] = Term(sig.example_leaf(fields[i], ++next));
      }
    };
    name(ex);
  }
  return all;
}

std::vector<SortId> inducted_datatypes(const EnumState& st) {
  std::vector<SortId> out;
  const Signature& sig = st.graph.sig();
  for (const auto& [s, phs] : st.placeholders)
    if (!phs.empty() && sig.is_datatype(s) && !sig.constructors(s).empty()) out.push_back(s);
  return out;
}

std::vector<Conjecture> infer_conjectures(EnumState& st, Signature& sig, const std::vector<RewriteRule>& rules,
                                          const SaturationConfig& cfg, int example_depth, InferStats* stats) {
  EGraph& g = st.graph;
  g.rebuild();
  std::vector<ClassId> enumerated;
  for (ClassId c : g.classes())
    if (g.enumerated(c)) enumerated.push_back(c);
  Extractor reps(g, representative_filter(st));
  const Tick base = g.tick();

  std::vector<Conjecture> out;
  std::set<std::string> seen;
  for (SortId tau : inducted_datatypes(st)) {
    const Op ph1 = *st.first_placeholder(tau);
    const ClassId ph_class = g.add(Term(ph1), true);
    const auto examples = make_examples(sig, tau, example_depth);
    std::vector<std::vector<ClassId>> keys(enumerated.size());
    for (const auto& ex : examples) {
      EGraph copy = g;
      copy.advance_tick();
      ClassId a = copy.add(ex);
      copy.merge(a, ph_class);
      copy.rebuild();
      RewriteStats rs = saturate(copy, sig, rules, cfg, 0, base);
      if (stats) {
        ++stats->copies;
        if (rs.aborted) ++stats->aborted;
      }
      for (std::size_t i = 0; i < enumerated.size(); ++i) keys[i].push_back(copy.find(enumerated[i]));
    }
    std::map<std::vector<ClassId>, std::vector<ClassId>> cells;
    for (std::size_t i = 0; i < enumerated.size(); ++i) cells[keys[i]].push_back(enumerated[i]);
    std::vector<std::vector<ClassId>> ordered;
    for (auto& [k, members] : cells)
      if (members.size() > 1) ordered.push_back(members);
    std::sort(ordered.begin(), ordered.end());
    for (const auto& members : ordered) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        auto ti = reps.best(members[i]);
        if (!ti) continue;
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          auto tj = reps.best(members[j]);
          if (!tj || *ti == *tj) continue;
          Conjecture c = make_conjecture(sig, *ti, *tj);
          if (seen.insert(c.key.text).second) out.push_back(std::move(c));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Conjecture& a, const Conjecture& b) { return a.key < b.key; });
  return out;
}

std::vector<Conjecture> screen(const std::vector<Conjecture>& conjs, const EnumState& st,
                               const std::vector<RewriteRule>& rules, const SaturationConfig& cfg) {
  if (conjs.empty()) return {};
  const Signature& sig = st.graph.sig();
  EGraph copy = st.graph;
  const Tick base = copy.tick();
  copy.advance_tick();
  std::vector<std::pair<ClassId, ClassId>> sides;
  for (const auto& c : conjs) sides.push_back({copy.add(c.lhs), copy.add(c.rhs)});
  RewriteOptions opt{cfg.node_cap, base, nullptr, std::nullopt, cfg.growth_limit};
  run_rewrites(copy, rules, cfg.depth, opt);
  Extractor reps(copy, representative_filter(st));
  std::vector<Conjecture> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < conjs.size(); ++i) {
    auto [a, b] = sides[i];
    if (copy.equiv(a, b)) continue;
    auto ta = reps.best(a);
    auto tb = reps.best(b);
    Conjecture c = (ta && tb) ? make_conjecture(sig, *ta, *tb) : conjs[i];
    c.status = ConjectureStatus::Pending;
    if (seen.insert(c.key.text).second) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Conjecture& a, const Conjecture& b) { return a.key < b.key; });
  return out;
}

bool merged_under_example(const EnumState& st, Signature& sig, const std::vector<RewriteRule>& rules,
                          const SaturationConfig& cfg, const Conjecture& c, SortId sort, const Term& example) {
  EGraph copy = st.graph;
  const Tick base = copy.tick();
  copy.advance_tick();
  ClassId l = copy.add(c.lhs);
  ClassId r = copy.add(c.rhs);
  if (auto ph = st.first_placeholder(sort)) {
    ClassId a = copy.add(example);
    copy.merge(a, copy.add(Term(*ph)));
  }
  copy.rebuild();
  saturate(copy, sig, rules, cfg, 0, base);
  return copy.equiv(l, r);
}

}  // namespace thex
