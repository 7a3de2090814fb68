#include "thex/prover.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

namespace thex {

namespace {

void occurrences(const Signature& sig, const Term& t, std::vector<Op>& out) {
  if (sig.kind(t.op) == SymbolKind::Placeholder) out.push_back(t.op);
  for (const auto& a : t.args) occurrences(sig, a, out);
}

// Replaces the i-th occurrence of `ph` (preorder) with `with` when mask bit i is set.
Term rename_occurrences(const Term& t, Op ph, Op with, const std::vector<bool>& mask, std::size_t& i) {
  if (t.args.empty() && t.op == ph) return Term(mask[i++] ? with : ph);
  Term out(t.op);
  for (const auto& a : t.args) out.args.push_back(rename_occurrences(a, ph, with, mask, i));
  return out;
}

struct Choice {
  Op ph;
  Op fresh;
  std::vector<bool> lmask;
  std::vector<bool> rmask;
};

}  // namespace

std::vector<Conjecture> generalize(const Conjecture& c, Signature& sig, std::size_t limit) {
  std::vector<Op> lo, ro;
  occurrences(sig, c.lhs, lo);
  occurrences(sig, c.rhs, ro);
  std::vector<Op> order;
  for (Op p : lo)
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
  std::map<SortId, std::uint32_t> next_index;
  for (Op p : lo) next_index[sig.sort_of(p)] = std::max(next_index[sig.sort_of(p)], sig.symbol(p).index);
  for (Op p : ro) next_index[sig.sort_of(p)] = std::max(next_index[sig.sort_of(p)], sig.symbol(p).index);

  // Per placeholder: every split of its occurrences into two non-empty groups on both sides.
  std::vector<std::vector<Choice>> options;
  for (Op p : order) {
    std::size_t nl = std::count(lo.begin(), lo.end(), p);
    std::size_t nr = std::count(ro.begin(), ro.end(), p);
    if (nl < 2 || nr < 2 || nl > 6 || nr > 6) continue;
    SortId s = sig.sort_of(p);
    Op fresh = sig.placeholder(s, ++next_index[s]);
    std::vector<Choice> cs;
    for (std::size_t lm = 1; lm + 1 < (std::size_t{1} << nl); ++lm) {
      if (lm & 1) continue;  // the first lhs occurrence keeps the original name
      // the rhs mask mirroring the lhs mask goes first
      std::vector<std::size_t> rms;
      if (nl == nr) rms.push_back(lm);
      for (std::size_t rm = 1; rm + 1 < (std::size_t{1} << nr); ++rm)
        if (nl != nr || rm != lm) rms.push_back(rm);
      for (std::size_t rm : rms) {
        Choice ch{p, fresh, {}, {}};
        for (std::size_t i = 0; i < nl; ++i) ch.lmask.push_back((lm >> i) & 1);
        for (std::size_t i = 0; i < nr; ++i) ch.rmask.push_back((rm >> i) & 1);
        cs.push_back(std::move(ch));
      }
    }
    if (!cs.empty()) options.push_back(std::move(cs));
  }

  std::vector<std::pair<std::size_t, Conjecture>> variants;
  std::set<std::string> seen{c.key.text};
  std::vector<std::size_t> pick(options.size(), 0);  // 0 = untouched, i+1 = options[k][i]
  while (!options.empty()) {
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == options[k].size() + 1) pick[k++] = 0;
    if (k == pick.size()) break;
    Term l = c.lhs, r = c.rhs;
    std::size_t touched = 0;
    for (std::size_t j = 0; j < options.size(); ++j) {
      if (pick[j] == 0) continue;
      const Choice& ch = options[j][pick[j] - 1];
      std::size_t i = 0;
      l = rename_occurrences(l, ch.ph, ch.fresh, ch.lmask, i);
      i = 0;
      r = rename_occurrences(r, ch.ph, ch.fresh, ch.rmask, i);
      ++touched;
    }
    Conjecture v = make_conjecture(sig, l, r);
    if (seen.insert(v.key.text).second) variants.push_back({touched, std::move(v)});
  }
  std::stable_sort(variants.begin(), variants.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Conjecture> out;
  for (auto& [n, v] : variants) {
    if (out.size() >= limit) break;
    out.push_back(std::move(v));
  }
  out.push_back(c);
  return out;
}

std::vector<RewriteRule> hypothesis_rules(Signature& sig, const Term& lhs, const Term& rhs, Op ph1, Op leaf,
                                          const std::string& name) {
  std::vector<std::pair<Op, Term>> sub{{ph1, Term(leaf)}};
  std::set<Op> others;
  auto collect = [&](const Term& t) {
    if (sig.kind(t.op) == SymbolKind::Placeholder && t.op != ph1) others.insert(t.op);
  };
  visit_ops(lhs, collect);
  visit_ops(rhs, collect);
  for (Op p : others) sub.push_back({p, Term(sig.variable("?" + sig.symbol(p).name, sig.sort_of(p)))});
  Equation eq{substitute(lhs, sub), substitute(rhs, sub), {}};
  std::vector<RewriteRule> rules;
  try {
    rules = compile_equation(sig, eq, RuleOrigin::Hypothesis, name);
  } catch (const RuleError&) {
    return {};
  }
  for (auto& r : rules) r.wf_guard = std::vector<Op>{leaf};
  return rules;
}

ProofResult prove_by_induction(const Conjecture& c, Signature& sig, const std::vector<RewriteRule>& rules,
                               const SaturationConfig& cfg, std::ostream* log) {
  ProofResult res;
  std::vector<Op> firsts;
  auto collect = [&](const Term& t) {
    const Symbol& s = sig.symbol(t.op);
    if (s.kind == SymbolKind::Placeholder && s.index == 1 && sig.is_datatype(s.ret) &&
        std::find(firsts.begin(), firsts.end(), t.op) == firsts.end())
      firsts.push_back(t.op);
  };
  visit_ops(c.lhs, collect);
  visit_ops(c.rhs, collect);
  for (Op ph1 : firsts) {
    res.applicable = true;
    const SortId tau = sig.sort_of(ph1);
    bool all = true;
    const auto ctors = sig.constructors(tau);
    for (Op ctor : ctors) {
      const auto fields = sig.symbol(ctor).args;
      Term inst(ctor);
      std::vector<Op> leaves;
      for (SortId f : fields) {
        leaves.push_back(sig.fresh(f, "w"));
        inst.args.push_back(Term(leaves.back()));
      }
      std::vector<RewriteRule> active = rules;
      for (std::size_t j : sig.recursive_fields(ctor)) {
        auto ih = hypothesis_rules(sig, c.lhs, c.rhs, ph1, leaves[j], "ih" + std::to_string(j));
        active.insert(active.end(), ih.begin(), ih.end());
      }
      Term l = substitute(c.lhs, {{ph1, inst}});
      Term r = substitute(c.rhs, {{ph1, inst}});
      EGraph g(&sig);
      ClassId a = g.add(l);
      ClassId b = g.add(r);
      SaturationConfig local = cfg;
      local.target = {a, b};
      RewriteStats st = saturate(g, sig, active, local);
      bool merged = g.equiv(a, b);
      if (log) *log << "case=" << sig.symbol(ctor).name << " result=" << (merged ? "merged" : "stuck") << "\n";
      if (st.aborted) res.aborted = true;
      if (!merged) {
        all = false;
        res.failed_case = sig.symbol(ctor).name;
        break;
      }
    }
    if (all) {
      res.proved = true;
      res.datatype = tau;
      return res;
    }
  }
  return res;
}

bool check_no_induction(const Term& lhs, const Term& rhs, Signature& sig, const std::vector<RewriteRule>& rules,
                        const SaturationConfig& cfg) {
  EGraph g(&sig);
  ClassId a = g.add(lhs);
  ClassId b = g.add(rhs);
  if (g.equiv(a, b)) return true;
  SaturationConfig local = cfg;
  local.target = {a, b};
  saturate(g, sig, rules, local);
  return g.equiv(a, b);
}

Lemma make_lemma(Signature& sig, const Conjecture& source, const Conjecture& proved, std::size_t seq) {
  Lemma l;
  l.source = source;
  l.proved = proved;
  l.seq = seq;
  l.equation = name_variables(sig, proved.lhs, proved.rhs);
  l.rules = compile_equation(sig, l.equation, RuleOrigin::Lemma, "lemma" + std::to_string(seq));
  return l;
}

}  // namespace thex
