#include "thex/egraph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "thex/order.hpp"

namespace thex {

namespace {

template <typename Sig>
class FnRef;

template <typename R, typename... A>
class FnRef<R(A...)> {
 public:
  template <typename F>
  FnRef(F& f) : obj_(&f), cb_([](void* o, A... a) -> R { return (*static_cast<F*>(o))(a...); }) {}
  R operator()(A... a) const { return cb_(obj_, a...); }

 private:
  void* obj_;
  R (*cb_)(void*, A...);
};

using Cont = FnRef<void(Tick)>;

struct Matcher {
  const EGraph& g;
  const Pattern& p;
  std::vector<ClassId> subst;

  void node(std::uint32_t pi, ClassId c, Tick seen, Cont k) {
    c = g.find(c);
    seen = std::max(seen, g.class_tick(c));
    const Pattern::Node& pn = p.nodes[pi];
    if (pn.is_var) {
      if (g.class_sort(c) != pn.sort) return;
      ClassId& slot = subst[pn.var];
      if (slot == kNoClass) {
        slot = c;
        k(seen);
        slot = kNoClass;
      } else if (slot == c) {
        k(seen);
      }
      return;
    }
    const auto& ns = g.nodes(c);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const ENode& n = ns[i];
      if (n.op != pn.op || n.arity != pn.children.size()) continue;
      children(pn, n, 0, seen, k);
    }
  }

  void children(const Pattern::Node& pn, const ENode& n, std::uint32_t i, Tick seen, Cont k) {
    if (i == n.arity) {
      k(seen);
      return;
    }
    auto next = [&](Tick s) { children(pn, n, i + 1, s, k); };
    node(pn.children[i], n.children[i], seen, Cont(next));
  }
};

}  // namespace

Pattern Pattern::compile(const Signature& sig, const Term& t, std::vector<Op>& var_ops,
                         const std::function<bool(Op)>& is_var) {
  Pattern p;
  std::function<std::uint32_t(const Term&)> go = [&](const Term& s) -> std::uint32_t {
    Node n;
    n.sort = sig.sort_of(s);
    if (s.args.empty() && is_var(s.op)) {
      n.is_var = true;
      auto it = std::find(var_ops.begin(), var_ops.end(), s.op);
      if (it == var_ops.end()) {
        var_ops.push_back(s.op);
        it = var_ops.end() - 1;
      }
      n.var = static_cast<std::uint32_t>(it - var_ops.begin());
    } else {
      n.op = s.op;
      for (const auto& a : s.args) n.children.push_back(go(a));
    }
    p.nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(p.nodes.size() - 1);
  };
  p.root = go(t);
  p.vars = var_ops;
  p.height = term_height(t);
  return p;
}

ClassId EGraph::add(const Term& t, bool enumerated) {
  ENode n;
  n.op = t.op;
  if (t.args.size() > kMaxArity) throw EGraphError("arity above limit");
  n.arity = static_cast<std::uint32_t>(t.args.size());
  for (std::size_t i = 0; i < t.args.size(); ++i) n.children[i] = add(t.args[i], enumerated);
  return add_node(n, enumerated);
}

std::optional<ClassId> EGraph::lookup_node(ENode n) const {
  if (!pending_.empty()) throw EGraphError("lookup before rebuild");
  n = canonicalize(n);
  auto it = memo_.find(n);
  if (it == memo_.end()) return std::nullopt;
  return find(it->second);
}

std::optional<ClassId> EGraph::lookup(const Term& t) const {
  ENode n;
  n.op = t.op;
  if (t.args.size() > kMaxArity) return std::nullopt;
  n.arity = static_cast<std::uint32_t>(t.args.size());
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    auto c = lookup(t.args[i]);
    if (!c) return std::nullopt;
    n.children[i] = *c;
  }
  return lookup_node(n);
}

ClassId EGraph::add_node(ENode n, bool enumerated) {
  n = canonicalize(n);
  if (auto it = memo_.find(n); it != memo_.end()) {
    ClassId c = find(it->second);
    if (enumerated) classes_[c].enumerated = true;
    return c;
  }
  const Symbol& sym = sig_->symbol(n.op);
  if (sym.args.size() != n.arity) throw EGraphError("arity mismatch for '" + sym.name + "'");
  for (std::uint32_t i = 0; i < n.arity; ++i)
    if (classes_[n.children[i]].sort != sym.args[i])
      throw EGraphError("sort clash in argument " + std::to_string(i) + " of '" + sym.name + "'");
  ClassId id = static_cast<ClassId>(classes_.size());
  parent_.push_back(id);
  EClass cls;
  cls.nodes.push_back(n);
  cls.sort = sym.ret;
  cls.tick = tick_;
  cls.enumerated = enumerated;
  classes_.push_back(std::move(cls));
  for (std::uint32_t i = 0; i < n.arity; ++i) {
    bool dup = false;
    for (std::uint32_t j = 0; j < i; ++j) dup |= n.children[j] == n.children[i];
    if (!dup) classes_[n.children[i]].parents.push_back({n, id});
  }
  memo_.emplace(n, id);
  ++node_count_;
  ++class_count_;
  return id;
}

ClassId EGraph::merge(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  if (classes_[a].sort != classes_[b].sort)
    throw EGraphError("sort mismatch merging " + sig_->sort_name(classes_[a].sort) + " and " +
                      sig_->sort_name(classes_[b].sort));
  if (classes_[a].size < classes_[b].size) std::swap(a, b);
  parent_[b] = a;
  EClass& A = classes_[a];
  EClass& B = classes_[b];
  A.size += B.size;
  A.enumerated = A.enumerated || B.enumerated;
  A.nodes.insert(A.nodes.end(), B.nodes.begin(), B.nodes.end());
  pending_.insert(pending_.end(), B.parents.begin(), B.parents.end());
  A.parents.insert(A.parents.end(), B.parents.begin(), B.parents.end());
  std::vector<ENode>().swap(B.nodes);
  std::vector<std::pair<ENode, ClassId>>().swap(B.parents);
  touch(a);
  dirty_.push_back(a);
  ++unions_;
  --class_count_;
  return a;
}

std::size_t EGraph::rebuild() {
  std::size_t start = unions_;
  while (!pending_.empty()) {
    auto todo = std::move(pending_);
    pending_.clear();
    for (const auto& [node, owner] : todo) {
      ENode cn = canonicalize(node);
      ClassId c = find(owner);
      auto [it, inserted] = memo_.try_emplace(cn, c);
      if (!inserted) {
        ClassId other = find(it->second);
        if (other != c) c = merge(other, c);
        it->second = c;
      }
      dirty_.push_back(c);
    }
  }
  std::sort(dirty_.begin(), dirty_.end());
  dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
  for (ClassId d : dirty_) {
    if (find(d) != d) continue;
    EClass& cls = classes_[d];
    std::size_t before = cls.nodes.size();
    for (auto& n : cls.nodes) n = canonicalize(n);
    std::sort(cls.nodes.begin(), cls.nodes.end());
    cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()), cls.nodes.end());
    node_count_ -= before - cls.nodes.size();
    for (auto& [n, o] : cls.parents) {
      n = canonicalize(n);
      o = find(o);
    }
    std::sort(cls.parents.begin(), cls.parents.end(),
              [](const auto& x, const auto& y) { return x.first < y.first || (x.first == y.first && x.second < y.second); });
    cls.parents.erase(std::unique(cls.parents.begin(), cls.parents.end()), cls.parents.end());
  }
  dirty_.clear();
  if (memo_.size() > 2 * node_count_ + 4096) {
    absl::flat_hash_map<ENode, ClassId> fresh;
    fresh.reserve(node_count_);
    for (ClassId c = 0; c < classes_.size(); ++c) {
      if (parent_[c] != c) continue;
      for (const auto& n : classes_[c].nodes) fresh.emplace(n, c);
    }
    memo_ = std::move(fresh);
  }
  return unions_ - start;
}

std::vector<ClassId> EGraph::affected(Tick since, int height) const {
  std::vector<char> mark(classes_.size(), 0);
  std::vector<ClassId> out, layer;
  for (ClassId c = 0; c < classes_.size(); ++c)
    if (parent_[c] == c && classes_[c].tick > since) {
      mark[c] = 1;
      layer.push_back(c);
    }
  out = layer;
  for (int h = 0; h < height && !layer.empty(); ++h) {
    std::vector<ClassId> next;
    for (ClassId c : layer)
      for (const auto& pn : classes_[c].parents) {
        ClassId p = find(pn.second);
        if (!mark[p]) {
          mark[p] = 1;
          next.push_back(p);
        }
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ClassId> EGraph::classes() const {
  std::vector<ClassId> out;
  out.reserve(class_count_);
  for (ClassId c = 0; c < classes_.size(); ++c)
    if (parent_[c] == c) out.push_back(c);
  return out;
}

std::unordered_map<Op, std::vector<ClassId>> EGraph::op_index() const {
  std::unordered_map<Op, std::vector<ClassId>> idx;
  for (ClassId c = 0; c < classes_.size(); ++c) {
    if (parent_[c] != c) continue;
    Op last = std::numeric_limits<Op>::max();
    for (const auto& n : classes_[c].nodes) {
      if (n.op == last) continue;
      auto& v = idx[n.op];
      if (v.empty() || v.back() != c) v.push_back(c);
      last = n.op;
    }
  }
  return idx;
}

std::vector<Match> EGraph::ematch_roots(const Pattern& p, Tick since, const std::vector<ClassId>& roots) const {
  std::vector<Match> out;
  Matcher m{*this, p, std::vector<ClassId>(p.vars.size(), kNoClass)};
  for (ClassId r : roots) {
    ClassId root = find(r);
    auto done = [&](Tick seen) {
      if (seen > since) out.push_back({root, m.subst});
    };
    m.node(p.root, root, 0, Cont(done));
  }
  return out;
}

std::vector<Match> EGraph::ematch(const Pattern& p, Tick since) const {
  std::vector<ClassId> roots;
  const auto& rn = p.nodes[p.root];
  for (ClassId c = 0; c < classes_.size(); ++c) {
    if (parent_[c] != c) continue;
    if (rn.is_var) {
      if (classes_[c].sort == rn.sort) roots.push_back(c);
      continue;
    }
    for (const auto& n : classes_[c].nodes)
      if (n.op == rn.op) {
        roots.push_back(c);
        break;
      }
  }
  return ematch_roots(p, since, roots);
}

std::vector<Match> EGraph::ematch_in(const Pattern& p, ClassId c) const { return ematch_roots(p, 0, {c}); }

ClassId EGraph::instantiate(const Pattern& p, const std::vector<ClassId>& subst) {
  std::function<ClassId(std::uint32_t)> go = [&](std::uint32_t i) -> ClassId {
    const auto& n = p.nodes[i];
    if (n.is_var) return find(subst.at(n.var));
    ENode e;
    e.op = n.op;
    e.arity = static_cast<std::uint32_t>(n.children.size());
    for (std::size_t j = 0; j < n.children.size(); ++j) e.children[j] = go(n.children[j]);
    return add_node(e);
  };
  return go(p.root);
}

std::optional<Term> EGraph::extract_min(ClassId c, const std::function<bool(Op)>& allowed) const {
  return Extractor(*this, allowed).best(c);
}

std::string EGraph::dump() const {
  std::ostringstream os;
  for (ClassId c : classes()) {
    std::vector<ENode> ns = classes_[c].nodes;
    for (auto& n : ns) n = canonicalize(n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    os << "c" << c << " " << sig_->sort_name(classes_[c].sort) << ":";
    for (const auto& n : ns) {
      os << " " << sig_->symbol(n.op).name;
      if (n.arity) {
        os << "(";
        for (std::uint32_t i = 0; i < n.arity; ++i) os << (i ? " " : "") << "c" << n.children[i];
        os << ")";
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string EGraph::dot() const {
  std::ostringstream os;
  os << "digraph egraph {\n  compound=true;\n";
  for (ClassId c : classes()) {
    os << "  subgraph cluster_" << c << " {\n    label=\"c" << c << "\";\n";
    for (std::size_t i = 0; i < classes_[c].nodes.size(); ++i)
      os << "    n" << c << "_" << i << " [label=\"" << sig_->symbol(classes_[c].nodes[i].op).name << "\"];\n";
    os << "  }\n";
  }
  for (ClassId c : classes())
    for (std::size_t i = 0; i < classes_[c].nodes.size(); ++i) {
      const ENode& n = classes_[c].nodes[i];
      for (std::uint32_t k = 0; k < n.arity; ++k) {
        ClassId t = find(n.children[k]);
        os << "  n" << c << "_" << i << " -> n" << t << "_0 [lhead=cluster_" << t << "];\n";
      }
    }
  os << "}\n";
  return os.str();
}

Extractor::Extractor(const EGraph& g, std::function<bool(Op)> allowed) : g_(g), best_(g.id_bound()) {
  const Signature& sig = g.sig();
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> size(g.id_bound(), inf);
  auto ok = [&](Op op) { return !allowed || allowed(op); };
  std::vector<ClassId> cls = g.classes();
  bool changed = true;
  while (changed) {
    changed = false;
    for (ClassId c : cls) {
      for (const auto& n : g.nodes(c)) {
        if (!ok(n.op)) continue;
        std::size_t s = 1;
        for (ClassId k : n.kids()) {
          std::size_t ks = size[g.find(k)];
          if (ks == inf) {
            s = inf;
            break;
          }
          s += ks;
        }
        if (s < size[c]) {
          size[c] = s;
          changed = true;
        }
      }
    }
  }
  std::vector<ClassId> order;
  for (ClassId c : cls)
    if (size[c] != inf) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](ClassId a, ClassId b) { return size[a] < size[b]; });
  for (ClassId c : order) {
    Best& b = best_[c];
    for (const auto& n : g.nodes(c)) {
      if (!ok(n.op)) continue;
      std::size_t s = 1;
      bool good = true;
      for (ClassId k : n.kids()) {
        const Best& kb = best_[g.find(k)];
        if (!kb.has) {
          good = false;
          break;
        }
        s += kb.size;
      }
      if (!good || s != size[c]) continue;
      Term t(n.op);
      for (ClassId k : n.kids()) t.args.push_back(best_[g.find(k)].term);
      std::size_t fv = free_var_count(sig, t);
      std::string text = sig.to_string(t);
      if (!b.has || fv > b.free_vars || (fv == b.free_vars && text < b.text)) {
        b.has = true;
        b.size = s;
        b.term = std::move(t);
        b.free_vars = fv;
        b.text = std::move(text);
      }
    }
  }
}

std::optional<Term> Extractor::best(ClassId c) const {
  const Best& b = best_.at(g_.find(c));
  if (!b.has) return std::nullopt;
  return b.term;
}

}  // namespace thex
