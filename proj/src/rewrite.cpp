#include "thex/rewrite.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

namespace thex {

namespace {

std::set<Op> vars_of(const Signature& sig, const Term& t) {
  std::set<Op> out;
  visit_ops(t, [&](const Term& s) {
    if (sig.kind(s.op) == SymbolKind::Variable) out.insert(s.op);
  });
  return out;
}

RewriteRule make_rule(const Signature& sig, const Term& from, const Term& to, RuleOrigin origin,
                      const std::string& name, bool forward) {
  RewriteRule r;
  r.name = name;
  r.premise = from;
  r.conclusion = to;
  r.origin = origin;
  auto is_var = [&](Op op) { return sig.kind(op) == SymbolKind::Variable; };
  std::vector<Op> vars;
  r.lhs = Pattern::compile(sig, from, vars, is_var);
  r.rhs = Pattern::compile(sig, to, vars, is_var);
  r.lhs.vars = vars;

  std::vector<std::uint32_t> obligations;
  for (std::uint32_t i = 0; i < r.lhs.nodes.size(); ++i) {
    const auto& n = r.lhs.nodes[i];
    if (i != r.lhs.root && !n.is_var && sig.is_constructor(n.op)) obligations.push_back(i);
  }
  bool arm = !r.lhs.nodes[r.lhs.root].is_var && sig.kind(r.lhs.nodes[r.lhs.root].op) == SymbolKind::Match;
  // Only the matching side of a definition gets split triggers; lemma and hypothesis rules never do.
  if (forward && origin == RuleOrigin::Definition && (obligations.size() >= 2 || (arm && !obligations.empty()))) {
    for (std::uint32_t o : obligations) {
      if (arm && o != r.lhs.nodes[r.lhs.root].children[0]) continue;
      RewriteRule::Relaxed rx;
      rx.pattern = r.lhs;
      auto& n = rx.pattern.nodes[o];
      n.is_var = true;
      n.var = static_cast<std::uint32_t>(rx.pattern.vars.size());
      n.children.clear();
      rx.pattern.vars.push_back(0);
      rx.hole = n.var;
      r.relaxed.push_back(std::move(rx));
    }
  }
  return r;
}

}  // namespace

std::vector<RewriteRule> compile_equation(const Signature& sig, const Equation& eq, RuleOrigin origin,
                                          const std::string& name) {
  if (sig.sort_of(eq.lhs) != sig.sort_of(eq.rhs)) throw RuleError("sides of '" + name + "' have different sorts");
  auto l = vars_of(sig, eq.lhs);
  auto r = vars_of(sig, eq.rhs);
  bool fwd = std::includes(l.begin(), l.end(), r.begin(), r.end());
  bool bwd = std::includes(r.begin(), r.end(), l.begin(), l.end());
  if (!fwd && !bwd) throw RuleError("no admissible direction for '" + name + "'");
  // A bare variable premise matches every class of its sort and only grows the graph.
  auto bare = [&](const Term& t) { return t.args.empty() && sig.kind(t.op) == SymbolKind::Variable; };
  std::vector<RewriteRule> out;
  if (fwd && !bare(eq.lhs)) out.push_back(make_rule(sig, eq.lhs, eq.rhs, origin, name + ">", true));
  if (bwd && !bare(eq.rhs)) out.push_back(make_rule(sig, eq.rhs, eq.lhs, origin, name + "<", false));
  return out;
}

std::vector<RewriteRule> compile_equations(const Signature& sig, const std::vector<Equation>& eqs,
                                           RuleOrigin origin, const std::string& prefix) {
  std::vector<RewriteRule> out;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    auto rs = compile_equation(sig, eqs[i], origin, prefix + std::to_string(i));
    out.insert(out.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }
  return out;
}

std::vector<RewriteRule> theory_rules(const Theory& th) {
  auto out = compile_equations(th.sig, th.eqs, RuleOrigin::Definition, "def");
  auto aux = compile_equations(th.sig, th.aux_eqs, RuleOrigin::Definition, "aux");
  out.insert(out.end(), std::make_move_iterator(aux.begin()), std::make_move_iterator(aux.end()));
  return out;
}

RewriteStats run_rewrites(EGraph& g, const std::vector<RewriteRule>& rules, int d, const RewriteOptions& opt) {
  RewriteStats st;
  if (d <= 0) return st;
  g.rebuild();
  auto reached = [&] { return opt.target && g.equiv(opt.target->first, opt.target->second); };
  if (reached()) return st;
  const std::size_t unions_start = g.union_count();
  const std::size_t limit = g.node_count() + opt.node_cap;
  std::vector<Tick> since(rules.size(), opt.since);
  // Backoff: a rule that adds more than its growth budget in one iteration is
  // banned for a while and later re-matches everything it skipped.
  struct Ban {
    int until = 0;
    int times = 0;
  };
  std::vector<Ban> bans(rules.size());
  bool var_roots = std::any_of(rules.begin(), rules.end(), [](const RewriteRule& r) {
    return r.lhs.nodes[r.lhs.root].is_var;
  });
  std::vector<std::pair<std::size_t, Match>> found;
  for (int it = 0; it < d; ++it) {
    const std::size_t nodes0 = g.node_count();
    const std::size_t unions0 = g.union_count();
    auto idx = g.op_index();
    std::unordered_map<SortId, std::vector<ClassId>> by_sort;
    if (var_roots)
      for (ClassId c : g.classes()) by_sort[g.class_sort(c)].push_back(c);
    found.clear();
    const Tick now = g.tick();
    static const std::vector<ClassId> none;
    std::vector<Tick> prev = since;
    std::map<std::pair<Tick, std::size_t>, std::vector<ClassId>> affected;
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      if (it < bans[ri].until) continue;
      const auto& lhs = rules[ri].lhs;
      const auto& root = lhs.nodes[lhs.root];
      const std::vector<ClassId>* roots = &none;
      std::vector<ClassId> near;
      if (since[ri] > 0) {
        // A new match visits a modified class, so its root lies at most `height` parents above one.
        auto key = std::make_pair(since[ri], lhs.height);
        auto a = affected.find(key);
        if (a == affected.end()) a = affected.emplace(key, g.affected(since[ri], static_cast<int>(lhs.height))).first;
        for (ClassId c : a->second)
          if (!root.is_var || g.class_sort(c) == root.sort) near.push_back(c);
        roots = &near;
      } else if (root.is_var) {
        if (auto s = by_sort.find(root.sort); s != by_sort.end()) roots = &s->second;
      } else if (auto s = idx.find(root.op); s != idx.end()) {
        roots = &s->second;
      }
      for (auto& m : g.ematch_roots(rules[ri].lhs, since[ri], *roots)) found.push_back({ri, std::move(m)});
      since[ri] = now;
    }
    g.advance_tick();
    std::vector<std::size_t> grown(rules.size(), 0);
    for (const auto& [ri, m] : found) {
      if (it < bans[ri].until) continue;
      const std::size_t n0 = g.node_count();
      ClassId c = g.instantiate(rules[ri].rhs, m.subst);
      grown[ri] += g.node_count() - n0;
      if (opt.growth_limit && grown[ri] > (opt.growth_limit << bans[ri].times)) {
        bans[ri].until = it + 1 + (2 << bans[ri].times);
        ++bans[ri].times;
        since[ri] = prev[ri];
      }
      if (opt.trace && !g.equiv(c, m.root))
        *opt.trace << "iter=" << it << " rule=" << rules[ri].name << " root=" << m.root << "\n";
      g.merge(c, m.root);
      if (g.node_count() > limit) {
        st.aborted = true;
        break;
      }
    }
    g.rebuild();
    ++st.iterations;
    if (st.aborted || reached()) break;
    if (g.node_count() == nodes0 && g.union_count() == unions0) {
      bool banned = false;
      for (auto& b : bans) {
        banned = banned || b.until > it + 1;
        b.until = 0;
      }
      if (!banned) break;
    }
  }
  st.merges = g.union_count() - unions_start;
  return st;
}

bool is_opaque(const EGraph& g, ClassId c) {
  const Signature& sig = g.sig();
  if (!sig.is_datatype(g.class_sort(c))) return false;
  for (const auto& n : g.nodes(c))
    if (sig.is_constructor(n.op)) return false;
  return true;
}

std::vector<CaseSplit> detect_blocked_splits(const EGraph& g, Signature& sig, const std::vector<RewriteRule>& rules,
                                             int depth) {
  std::set<Op> defined;
  for (const auto& r : rules) {
    const auto& root = r.lhs.nodes[r.lhs.root];
    if (r.origin == RuleOrigin::Definition && !root.is_var) defined.insert(root.op);
  }
  // A class built only from defined calls is unblocked by splitting the values beneath it.
  auto stuck_value = [&](ClassId c) {
    for (const auto& n : g.nodes(c)) {
      SymbolKind k = sig.kind(n.op);
      if (k == SymbolKind::Constructor || k == SymbolKind::FunctionConstant || k == SymbolKind::Match) continue;
      if (k == SymbolKind::Apply) {
        const auto& fs = g.nodes(n.children[0]);
        if (std::none_of(fs.begin(), fs.end(),
                         [&](const ENode& f) { return sig.kind(f.op) == SymbolKind::FunctionConstant; }))
          return true;
        continue;
      }
      if (n.arity == 0 || !defined.count(n.op)) return true;
    }
    return false;
  };
  std::set<ClassId> seen;
  for (const auto& r : rules) {
    for (const auto& rx : r.relaxed) {
      for (const auto& m : g.ematch(rx.pattern)) {
        ClassId h = g.find(m.subst[rx.hole]);
        if (is_opaque(g, h) && stuck_value(h)) seen.insert(h);
      }
    }
  }
  std::vector<CaseSplit> out;
  for (ClassId c : seen) {
    CaseSplit s;
    s.scrutinee = c;
    s.datatype = g.class_sort(c);
    s.depth = depth;
    for (Op ctor : sig.constructors(s.datatype)) {
      Term alt(ctor);
      const auto fields = sig.symbol(ctor).args;
      for (SortId f : fields) alt.args.push_back(Term(sig.fresh(f, "u")));
      s.alternatives.push_back(std::move(alt));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t apply_split(EGraph& g, Signature& sig, const CaseSplit& s, const std::vector<RewriteRule>& rules,
                        const SaturationConfig& cfg, const std::vector<ClassId>& excluded) {
  if (s.depth >= cfg.max_split_depth) return 0;
  g.rebuild();
  const std::vector<ClassId> orig = g.classes();
  std::vector<std::vector<ClassId>> keys(orig.size());
  const Tick base = g.tick();
  std::vector<ClassId> inner_excluded = excluded;
  inner_excluded.push_back(g.find(s.scrutinee));
  for (const auto& alt : s.alternatives) {
    EGraph copy = g;
    copy.advance_tick();
    ClassId a = copy.add(alt);
    copy.merge(a, s.scrutinee);
    copy.rebuild();
    saturate(copy, sig, rules, cfg, s.depth + 1, base, inner_excluded);
    for (std::size_t i = 0; i < orig.size(); ++i) keys[i].push_back(copy.find(orig[i]));
  }
  std::map<std::vector<ClassId>, ClassId> cells;
  const std::size_t before = g.union_count();
  g.advance_tick();
  for (std::size_t i = 0; i < orig.size(); ++i) {
    auto [it, inserted] = cells.emplace(std::move(keys[i]), orig[i]);
    if (!inserted) g.merge(it->second, orig[i]);
  }
  g.rebuild();
  return g.union_count() - before;
}

RewriteStats saturate(EGraph& g, Signature& sig, const std::vector<RewriteRule>& rules, const SaturationConfig& cfg,
                      int split_depth, Tick since, const std::vector<ClassId>& excluded) {
  RewriteOptions opt{cfg.node_cap, since, cfg.trace, cfg.target, cfg.growth_limit};
  auto reached = [&] { return cfg.target && g.equiv(cfg.target->first, cfg.target->second); };
  RewriteStats st = run_rewrites(g, rules, cfg.depth, opt);
  if (st.aborted || reached() || !cfg.case_split || split_depth >= cfg.max_split_depth) return st;
  const Tick before = g.tick();
  auto splits = detect_blocked_splits(g, sig, rules, split_depth);
  std::vector<ClassId> tried = excluded;
  std::size_t merged = 0;
  for (const auto& s : splits) {
    ClassId c = g.find(s.scrutinee);
    bool skip = std::any_of(tried.begin(), tried.end(), [&](ClassId t) { return g.find(t) == c; });
    if (skip || !is_opaque(g, c)) continue;
    merged += apply_split(g, sig, s, rules, cfg, tried);
    tried.push_back(c);
    if (reached()) break;
  }
  st.merges += merged;
  if (merged > 0) {
    opt.since = before;
    RewriteStats again = run_rewrites(g, rules, cfg.depth, opt);
    st.merges += again.merges;
    st.iterations += again.iterations;
    st.aborted = again.aborted;
  }
  return st;
}

}  // namespace thex
