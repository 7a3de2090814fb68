#include "thex/sygue.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace thex {

std::optional<Op> EnumState::first_placeholder(SortId s) const {
  auto it = placeholders.find(s);
  if (it == placeholders.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

std::vector<SortId> placeholder_sorts(const Theory& th) {
  std::set<SortId> out;
  for (Op f : th.vocabulary)
    for (SortId a : th.sig.symbol(f).args) out.insert(a);
  return {out.begin(), out.end()};
}

EnumState init_enum(Theory& th, const EnumConfig& cfg) {
  EnumState st(&th.sig);
  st.config = cfg;
  st.vocabulary = th.vocabulary;
  for (Op f : th.vocabulary)
    if (th.sig.symbol(f).args.empty()) st.frontier.push_back(st.graph.add(Term(f), true));
  for (SortId s : placeholder_sorts(th)) {
    int n = cfg.ph_count;
    if (auto it = cfg.ph_per_sort.find(th.sig.sort_name(s)); it != cfg.ph_per_sort.end()) n = it->second;
    for (int i = 1; i <= n; ++i) {
      Op ph = th.sig.placeholder(s, static_cast<std::uint32_t>(i));
      st.placeholders[s].push_back(ph);
      st.frontier.push_back(st.graph.add(Term(ph), true));
    }
  }
  st.graph.rebuild();
  if (cfg.diag)
    *cfg.diag << "level=0 classes=" << st.graph.class_count() << " nodes=" << st.graph.node_count() << "\n";
  return st;
}

std::size_t grow(EnumState& st) {
  if (st.level >= st.config.max_level) throw EnumError("term depth bound reached");
  EGraph& g = st.graph;
  g.rebuild();
  const Signature& sig = g.sig();
  std::map<SortId, std::vector<ClassId>> by_sort;
  for (ClassId c : g.classes())
    if (g.enumerated(c)) by_sort[g.class_sort(c)].push_back(c);
  std::set<ClassId> frontier;
  for (ClassId c : st.frontier) frontier.insert(g.find(c));
  if (!frontier.empty()) {
    for (Op f : st.vocabulary) {
      const std::vector<SortId> args = sig.symbol(f).args;
      if (args.empty()) continue;
      std::vector<const std::vector<ClassId>*> pools;
      for (SortId a : args) {
        auto it = by_sort.find(a);
        pools.push_back(it == by_sort.end() ? nullptr : &it->second);
      }
      if (std::any_of(pools.begin(), pools.end(), [](auto* p) { return p == nullptr; })) continue;
      std::vector<std::size_t> idx(args.size(), 0);
      while (true) {
        bool fresh = false;
        ENode n;
        n.op = f;
        n.arity = static_cast<std::uint32_t>(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
          n.children[i] = (*pools[i])[idx[i]];
          fresh = fresh || frontier.count(n.children[i]);
        }
        if (fresh) g.add_node(n, true);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == pools[k]->size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
  }
  g.rebuild();
  std::set<ClassId> old;
  for (const auto& [s, cs] : by_sort)
    for (ClassId c : cs) old.insert(g.find(c));
  std::set<ClassId> next;
  for (ClassId c : g.classes())
    if (g.enumerated(c) && !old.count(c)) next.insert(c);
  st.frontier.assign(next.begin(), next.end());
  ++st.level;
  if (st.config.diag)
    *st.config.diag << "level=" << st.level << " classes=" << g.class_count() << " nodes=" << g.node_count() << "\n";
  return next.size();
}

std::function<bool(Op)> representative_filter(const EnumState& st) {
  std::set<Op> allowed(st.vocabulary.begin(), st.vocabulary.end());
  const Signature* sig = &st.graph.sig();
  return [allowed = std::move(allowed), sig](Op op) {
    return allowed.count(op) > 0 || sig->kind(op) == SymbolKind::Placeholder;
  };
}

std::map<ClassId, Term> representatives(const EnumState& st) {
  Extractor ex(st.graph, representative_filter(st));
  std::map<ClassId, Term> out;
  for (ClassId c : st.graph.classes()) {
    if (!st.graph.enumerated(c)) continue;
    if (auto t = ex.best(c)) out.emplace(c, std::move(*t));
  }
  return out;
}

}  // namespace thex
