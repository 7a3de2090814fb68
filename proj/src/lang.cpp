#include "thex/lang.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "thex/order.hpp"

namespace thex {

namespace {

class Ambiguous : public ParseError {
 public:
  using ParseError::ParseError;
};

using Env = std::vector<std::pair<std::string, Expr>>;
using TEnv = std::map<std::string, SortId>;

Expr var_expr(const Signature& sig, Op v) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.op = v;
  e.sort = sig.sort_of(v);
  return e;
}

Expr subst_expr(const Expr& e, Op v, const Expr& with) {
  if (e.kind == Expr::Kind::Var) return e.op == v ? with : e;
  Expr out = e;
  if (e.kind == Expr::Kind::Match) {
    out.args[0] = subst_expr(e.args[0], v, with);
    for (std::size_t i = 0; i < e.cases.size(); ++i) {
      const auto& b = e.cases[i].binders;
      if (std::find(b.begin(), b.end(), v) == b.end())
        out.args[i + 1] = subst_expr(e.args[i + 1], v, with);
    }
    return out;
  }
  for (auto& a : out.args) a = subst_expr(a, v, with);
  return out;
}

void free_vars(const Expr& e, std::vector<Op>& out) {
  auto push = [&](Op v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (e.kind) {
    case Expr::Kind::Var:
      push(e.op);
      return;
    case Expr::Kind::Match: {
      free_vars(e.args[0], out);
      for (std::size_t i = 0; i < e.cases.size(); ++i) {
        std::vector<Op> inner;
        free_vars(e.args[i + 1], inner);
        for (Op v : inner) {
          const auto& b = e.cases[i].binders;
          if (std::find(b.begin(), b.end(), v) == b.end()) push(v);
        }
      }
      return;
    }
    default:
      for (const auto& a : e.args) free_vars(a, out);
  }
}

bool occurs_leaf(const Term& t, Op v) {
  if (t.op == v && t.args.empty()) return true;
  for (const auto& a : t.args)
    if (occurs_leaf(a, v)) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(Theory& th) : th_(th), sig_(th.sig) {}

  void command(const SExpr& c) {
    if (!c.is_list() || c.items.empty() || !c.items[0].is_atom)
      throw ParseError("expected a command", c.line, c.col);
    const std::string& h = c.items[0].atom;
    try {
      if (h == "declare-sort") {
        need(c, 2);
        sig_.opaque_sort(atom(c.items[1]), false);
      } else if (h == "declare-datatype") {
        need(c, 3);
        declare_datatypes({{atom(c.items[1]), &c.items[2]}});
      } else if (h == "declare-datatypes") {
        declare_datatypes_cmd(c);
      } else if (h == "declare-fun" || h == "declare-const") {
        declare_fun(c);
      } else if (h == "define-fun" || h == "define-fun-rec") {
        define_fun(c);
      } else if (h == "assert") {
        need(c, 2);
        assertion(c.items[1], false);
      } else if (h == "assert-not") {
        need(c, 2);
        assertion(c.items[1], true);
      } else if (h == "prove") {
        need(c, 2);
        assertion(c.items[1], true);
      } else if (h == "check-sat" || h == "set-logic" || h == "set-info" || h == "set-option" ||
                 h == "exit" || h == "get-model") {
        // no-op
      } else {
        throw ParseError("unsupported command '" + h + "'", c.line, c.col);
      }
    } catch (const SignatureError& e) {
      throw ParseError(e.what(), c.line, c.col);
    }
  }

 private:
  static void need(const SExpr& c, std::size_t n) {
    if (c.items.size() < n) throw ParseError("malformed '" + c.items[0].str() + "'", c.line, c.col);
  }
  static const std::string& atom(const SExpr& s) {
    if (!s.is_atom) throw ParseError("expected a symbol", s.line, s.col);
    return s.atom;
  }
  static bool is_par(const SExpr& s) {
    return s.is_list() && s.items.size() == 3 && s.items[0].is("par") && s.items[1].is_list();
  }

  TEnv bind_type_params(const SExpr& params) {
    TEnv env = tenv_;
    for (const auto& p : params.items) env[atom(p)] = sig_.opaque_sort(atom(p), true);
    return env;
  }

  SortExpr sort_expr(const SExpr& s) {
    if (s.is_atom) return {s.atom, {}};
    if (s.items.empty() || !s.items[0].is_atom) throw ParseError("malformed sort", s.line, s.col);
    SortExpr e{s.items[0].atom, {}};
    for (std::size_t i = 1; i < s.items.size(); ++i) e.args.push_back(sort_expr(s.items[i]));
    return e;
  }

  SortId parse_sort(const SExpr& s) {
    try {
      return sig_.resolve(sort_expr(s), tenv_);
    } catch (const SignatureError& e) {
      throw ParseError(e.what(), s.line, s.col);
    }
  }

  // ---- datatypes ----
  struct DtDecl {
    std::string name;
    const SExpr* body;
  };

  void declare_datatypes_cmd(const SExpr& c) {
    need(c, 3);
    const SExpr& heads = c.items[1];
    const SExpr& bodies = c.items[2];
    if (!heads.is_list() || !bodies.is_list()) throw ParseError("malformed declare-datatypes", c.line, c.col);
    bool new_style = heads.items.empty() || heads.items[0].is_list();
    std::vector<DtDecl> decls;
    if (new_style) {
      if (heads.items.size() != bodies.items.size())
        throw ParseError("declare-datatypes arity mismatch", c.line, c.col);
      for (std::size_t i = 0; i < heads.items.size(); ++i) {
        const SExpr& h = heads.items[i];
        if (!h.is_list() || h.items.empty()) throw ParseError("malformed datatype head", h.line, h.col);
        decls.push_back({atom(h.items[0]), &bodies.items[i]});
      }
      declare_datatypes(decls);
    } else {
      // (declare-datatypes (T..) ((Name ctor...) ...))
      std::vector<std::string> params;
      for (const auto& p : heads.items) params.push_back(atom(p));
      std::vector<std::pair<std::string, std::vector<const SExpr*>>> old;
      for (const auto& b : bodies.items) {
        if (!b.is_list() || b.items.empty()) throw ParseError("malformed datatype", b.line, b.col);
        std::vector<const SExpr*> ctors;
        for (std::size_t i = 1; i < b.items.size(); ++i) ctors.push_back(&b.items[i]);
        old.push_back({atom(b.items[0]), ctors});
      }
      declare_group(params, old, c);
    }
  }

  void declare_datatypes(const std::vector<DtDecl>& decls) {
    // Each body is either a constructor list or (par (T..) ctor-list); params must agree per group.
    std::vector<std::pair<std::string, std::vector<const SExpr*>>> group;
    std::vector<std::string> params;
    bool first = true;
    const SExpr* pos = decls.empty() ? nullptr : decls[0].body;
    for (const auto& d : decls) {
      const SExpr* ctors = d.body;
      std::vector<std::string> ps;
      if (is_par(*d.body)) {
        for (const auto& p : d.body->items[1].items) ps.push_back(atom(p));
        ctors = &d.body->items[2];
      }
      if (!ctors->is_list()) throw ParseError("expected constructor list", ctors->line, ctors->col);
      if (!first && ps != params)
        throw ParseError("mutually recursive datatypes must share parameters", ctors->line, ctors->col);
      params = ps;
      first = false;
      std::vector<const SExpr*> cs;
      for (const auto& ct : ctors->items) cs.push_back(&ct);
      group.push_back({d.name, cs});
    }
    if (pos) declare_group(params, group, *pos);
  }

  void declare_group(const std::vector<std::string>& params,
                     const std::vector<std::pair<std::string, std::vector<const SExpr*>>>& group,
                     const SExpr& pos) {
    TEnv saved = tenv_;
    for (const auto& p : params) tenv_[p] = sig_.opaque_sort(p, true);
    std::vector<int> ids;
    for (const auto& [name, ctors] : group) {
      DatatypeTemplate t;
      t.name = name;
      t.params = params;
      for (const SExpr* c : ctors) {
        CtorTemplate ct;
        if (c->is_atom) {
          ct.name = c->atom;
        } else {
          if (c->items.empty()) throw ParseError("empty constructor", c->line, c->col);
          ct.name = atom(c->items[0]);
          for (std::size_t i = 1; i < c->items.size(); ++i) {
            const SExpr& f = c->items[i];
            if (!f.is_list() || f.items.size() != 2) throw ParseError("malformed field", f.line, f.col);
            ct.fields.push_back(sort_expr(f.items[1]));
          }
        }
        if (sig_.find_function(ct.name) || !sig_.find_constructors(ct.name).empty())
          throw ParseError("symbol '" + ct.name + "' already declared", c->line, c->col);
        for (const auto& other : t.ctors)
          if (other.name == ct.name) throw ParseError("duplicate constructor '" + ct.name + "'", c->line, c->col);
        t.ctors.push_back(std::move(ct));
      }
      if (t.ctors.empty()) throw ParseError("datatype '" + name + "' has no constructors", pos.line, pos.col);
      ids.push_back(sig_.add_template(std::move(t)));
    }
    // Inhabitation: fixpoint over the group, other sorts count as inhabited.
    std::set<std::string> names;
    for (const auto& g : group) names.insert(g.first);
    std::set<std::string> inhabited;
    std::function<bool(const SortExpr&)> mentions = [&](const SortExpr& e) {
      if (names.count(e.name) && !inhabited.count(e.name)) return true;
      for (const auto& a : e.args)
        if (mentions(a)) return true;
      return false;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (int id : ids) {
        const auto& t = sig_.datatype_template(id);
        if (inhabited.count(t.name)) continue;
        for (const auto& c : t.ctors) {
          bool ok = std::none_of(c.fields.begin(), c.fields.end(), mentions);
          if (ok) {
            inhabited.insert(t.name);
            changed = true;
            break;
          }
        }
      }
    }
    for (const auto& g : group)
      if (!inhabited.count(g.first))
        throw ParseError("datatype '" + g.first + "' has no base constructor", pos.line, pos.col);
    try {
      for (int id : ids) {
        std::vector<SortId> args;
        for (const auto& p : params) args.push_back(tenv_.at(p));
        sig_.instantiate(id, args);
      }
    } catch (const SignatureError& e) {
      throw ParseError(e.what(), pos.line, pos.col);
    }
    tenv_ = saved;
  }

  // ---- functions ----
  void declare_fun(const SExpr& c) {
    TEnv saved = tenv_;
    std::string name;
    const SExpr* args = nullptr;
    const SExpr* ret = nullptr;
    bool is_const = c.items[0].is("declare-const");
    if (c.items.size() == 2 && is_par(c.items[1])) {
      tenv_ = bind_type_params(c.items[1].items[1]);
      const SExpr& inner = c.items[1].items[2];
      if (!inner.is_list() || inner.items.size() != (is_const ? 2u : 3u))
        throw ParseError("malformed declaration", inner.line, inner.col);
      name = atom(inner.items[0]);
      if (is_const) {
        ret = &inner.items[1];
      } else {
        args = &inner.items[1];
        ret = &inner.items[2];
      }
    } else if (c.items.size() == 3 && is_par(c.items[2])) {
      name = atom(c.items[1]);
      tenv_ = bind_type_params(c.items[2].items[1]);
      const SExpr& inner = c.items[2].items[2];
      if (is_const) {
        ret = &inner;
      } else {
        if (!inner.is_list() || inner.items.size() != 2) throw ParseError("malformed declaration", inner.line, inner.col);
        args = &inner.items[0];
        ret = &inner.items[1];
      }
    } else if (is_const && c.items.size() == 3) {
      name = atom(c.items[1]);
      ret = &c.items[2];
    } else if (!is_const && c.items.size() == 4) {
      name = atom(c.items[1]);
      args = &c.items[2];
      ret = &c.items[3];
    } else {
      throw ParseError("malformed declaration", c.line, c.col);
    }
    std::vector<SortId> arg_sorts;
    if (args) {
      if (!args->is_list()) throw ParseError("expected argument sorts", args->line, args->col);
      for (const auto& a : args->items) arg_sorts.push_back(parse_sort(a));
    }
    SortId r = parse_sort(*ret);
    th_.functions.push_back(sig_.add_function(name, arg_sorts, r));
    tenv_ = saved;
  }

  void define_fun(const SExpr& c) {
    TEnv saved = tenv_;
    std::string name;
    const SExpr* params = nullptr;
    const SExpr* ret = nullptr;
    const SExpr* body = nullptr;
    if (c.items.size() == 2 && is_par(c.items[1])) {
      tenv_ = bind_type_params(c.items[1].items[1]);
      const SExpr& inner = c.items[1].items[2];
      if (!inner.is_list() || inner.items.size() != 4) throw ParseError("malformed definition", inner.line, inner.col);
      name = atom(inner.items[0]);
      params = &inner.items[1];
      ret = &inner.items[2];
      body = &inner.items[3];
    } else if (c.items.size() == 3 && is_par(c.items[2])) {
      name = atom(c.items[1]);
      tenv_ = bind_type_params(c.items[2].items[1]);
      const SExpr& inner = c.items[2].items[2];
      if (!inner.is_list() || inner.items.size() != 3) throw ParseError("malformed definition", inner.line, inner.col);
      params = &inner.items[0];
      ret = &inner.items[1];
      body = &inner.items[2];
    } else if (c.items.size() == 5) {
      name = atom(c.items[1]);
      params = &c.items[2];
      ret = &c.items[3];
      body = &c.items[4];
    } else {
      throw ParseError("malformed definition", c.line, c.col);
    }
    if (!params->is_list()) throw ParseError("expected parameter list", params->line, params->col);
    Env env;
    std::vector<SortId> arg_sorts;
    std::vector<Op> vars;
    for (const auto& p : params->items) {
      if (!p.is_list() || p.items.size() != 2) throw ParseError("malformed parameter", p.line, p.col);
      SortId s = parse_sort(p.items[1]);
      arg_sorts.push_back(s);
      Op v = sig_.variable(atom(p.items[0]), s);
      vars.push_back(v);
      env.push_back({atom(p.items[0]), var_expr(sig_, v)});
    }
    SortId r = parse_sort(*ret);
    Op f = sig_.add_function(name, arg_sorts, r);
    th_.functions.push_back(f);
    Expr e = desugar(check(*body, env, r));
    std::vector<Term> lhs_args;
    for (Op v : vars) lhs_args.push_back(Term(v));
    split_definition(f, lhs_args, e);
    tenv_ = saved;
  }

  void split_definition(Op f, const std::vector<Term>& lhs_args, const Expr& body) {
    if (body.kind == Expr::Kind::Match && body.args[0].kind == Expr::Kind::Var) {
      Op v = body.args[0].op;
      bool on_param = std::any_of(lhs_args.begin(), lhs_args.end(),
                                  [&](const Term& t) { return occurs_leaf(t, v); });
      if (on_param) {
        for (std::size_t i = 0; i < body.cases.size(); ++i) {
          const MatchCase& mc = body.cases[i];
          Term pat(mc.ctor);
          Expr pat_expr;
          pat_expr.kind = Expr::Kind::App;
          pat_expr.op = mc.ctor;
          pat_expr.sort = sig_.sort_of(mc.ctor);
          for (Op b : mc.binders) {
            pat.args.push_back(Term(b));
            pat_expr.args.push_back(var_expr(sig_, b));
          }
          std::vector<Term> args;
          for (const auto& a : lhs_args) args.push_back(substitute(a, {{v, pat}}));
          split_definition(f, args, subst_expr(body.args[i + 1], v, pat_expr));
        }
        return;
      }
    }
    Equation eq;
    eq.lhs = Term(f, lhs_args);
    eq.rhs = lower(body);
    eq.vars = collect_vars(sig_, eq.lhs, eq.rhs);
    th_.eqs.push_back(std::move(eq));
  }

  // ---- assertions ----
  void assertion(const SExpr& s, bool goal) {
    TEnv saved = tenv_;
    const SExpr* body = &s;
    if (is_par(*body)) {
      tenv_ = bind_type_params(body->items[1]);
      body = &body->items[2];
    }
    if (!goal && body->is_list() && body->items.size() == 2 && body->items[0].is("not")) {
      goal = true;
      body = &body->items[1];
      if (is_par(*body)) {
        tenv_ = bind_type_params(body->items[1]);
        body = &body->items[2];
      }
    }
    Env env;
    std::vector<Op> vars;
    if (body->is_list() && body->items.size() == 3 && body->items[0].is("forall")) {
      const SExpr& binds = body->items[1];
      if (!binds.is_list()) throw ParseError("malformed forall", binds.line, binds.col);
      for (const auto& b : binds.items) {
        if (!b.is_list() || b.items.size() != 2) throw ParseError("malformed binder", b.line, b.col);
        Op v = sig_.variable(atom(b.items[0]), parse_sort(b.items[1]));
        vars.push_back(v);
        env.push_back({atom(b.items[0]), var_expr(sig_, v)});
      }
      body = &body->items[2];
    }
    if (!body->is_list() || body->items.size() != 3 || !body->items[0].is("=")) {
      throw ParseError("non-equational assertion", body->line, body->col);
    }
    Expr lhs, rhs;
    try {
      lhs = check(body->items[1], env, std::nullopt);
      rhs = check(body->items[2], env, lhs.sort);
    } catch (const Ambiguous&) {
      rhs = check(body->items[2], env, std::nullopt);
      lhs = check(body->items[1], env, rhs.sort);
    }
    Equation eq;
    eq.lhs = lower(desugar(lhs));
    eq.rhs = lower(desugar(rhs));
    for (Op v : collect_vars(sig_, eq.lhs, eq.rhs))
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    eq.vars = vars;
    (goal ? th_.goals : th_.eqs).push_back(std::move(eq));
    tenv_ = saved;
  }

  // ---- expressions ----
  void expect(const Expr& e, std::optional<SortId> exp, const SExpr& at) {
    if (exp && e.sort != *exp)
      throw ParseError("ill-sorted: expected " + sig_.sort_name(*exp) + " but got " + sig_.sort_name(e.sort),
                       at.line, at.col);
  }

  std::optional<int> ctor_template(const std::string& name) {
    auto ops = sig_.find_constructors(name);
    if (ops.empty()) return std::nullopt;
    return sig_.sort(sig_.sort_of(ops[0])).template_index;
  }

  Op ctor_at(const std::string& name, SortId s, const SExpr& at) {
    if (!sig_.is_datatype(s)) throw ParseError("'" + name + "' does not build " + sig_.sort_name(s), at.line, at.col);
    for (Op c : sig_.constructors(s))
      if (sig_.symbol(c).name == name) return c;
    throw ParseError("'" + name + "' does not build " + sig_.sort_name(s), at.line, at.col);
  }

  bool unify(const SortExpr& e, SortId s, const std::vector<std::string>& params, TEnv& b) {
    if (e.args.empty() && std::find(params.begin(), params.end(), e.name) != params.end()) {
      auto it = b.find(e.name);
      if (it != b.end()) return it->second == s;
      b[e.name] = s;
      return true;
    }
    const SortInfo& info = sig_.sort(s);
    if (e.name == "=>") {
      if (info.kind != SortKind::Arrow || info.params.size() != e.args.size()) return false;
    } else if (auto t = sig_.find_template(e.name)) {
      if (info.kind != SortKind::Datatype || info.template_index != *t) return false;
    } else {
      return e.args.empty() && info.kind == SortKind::Opaque && info.name == e.name;
    }
    for (std::size_t i = 0; i < e.args.size(); ++i)
      if (!unify(e.args[i], sig_.sort(s).params[i], params, b)) return false;
    return true;
  }

  Expr app(Op op, std::vector<Expr> args) {
    Expr e;
    e.kind = Expr::Kind::App;
    e.op = op;
    e.args = std::move(args);
    e.sort = sig_.sort_of(op);
    return e;
  }

  Expr function_value(Op f) {
    bool existed = sig_.existing_function_constant(f).has_value();
    Op fc = sig_.function_constant(f);
    if (!existed) add_eta(th_, f, fc);
    return app(fc, {});
  }

 public:
  static void add_eta(Theory& th, Op f, Op fc) {
    Signature& sig = th.sig;
    const Symbol fs = sig.symbol(f);
    Op ap = sig.apply_op(sig.sort_of(fc));
    Equation eq;
    eq.lhs = Term(ap, {Term(fc)});
    eq.rhs = Term(f);
    for (std::size_t i = 0; i < fs.args.size(); ++i) {
      Op v = sig.variable("x" + std::to_string(i + 1), fs.args[i]);
      eq.lhs.args.push_back(Term(v));
      eq.rhs.args.push_back(Term(v));
      eq.vars.push_back(v);
    }
    th.aux_eqs.push_back(std::move(eq));
  }

 private:
  Expr check_ctor(const std::string& name, const SExpr& s, const std::vector<const SExpr*>& args, const Env& env,
                  std::optional<SortId> exp) {
    int ti = *ctor_template(name);
    Op op = 0;
    if (exp) {
      op = ctor_at(name, *exp, s);
    } else {
      const DatatypeTemplate& t = sig_.datatype_template(ti);
      const CtorTemplate* ct = nullptr;
      for (const auto& c : t.ctors)
        if (c.name == name) ct = &c;
      if (ct->fields.size() != args.size())
        throw ParseError("'" + name + "' expects " + std::to_string(ct->fields.size()) + " arguments", s.line, s.col);
      TEnv b;
      std::vector<std::optional<Expr>> done(args.size());
      bool progress = true;
      while (b.size() < t.params.size() && progress) {
        progress = false;
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (done[i]) continue;
          try {
            done[i] = check(*args[i], env, std::nullopt);
          } catch (const Ambiguous&) {
            continue;
          }
          if (!unify(ct->fields[i], done[i]->sort, t.params, b))
            throw ParseError("ill-sorted argument to '" + name + "'", args[i]->line, args[i]->col);
          progress = true;
        }
      }
      if (b.size() < t.params.size())
        throw Ambiguous("cannot infer the sort of '" + name + "'", s.line, s.col);
      std::vector<SortId> targs;
      for (const auto& p : t.params) targs.push_back(b.at(p));
      op = ctor_at(name, sig_.instantiate(ti, targs), s);
    }
    const Symbol sym = sig_.symbol(op);
    if (sym.args.size() != args.size())
      throw ParseError("'" + name + "' expects " + std::to_string(sym.args.size()) + " arguments", s.line, s.col);
    std::vector<Expr> out;
    for (std::size_t i = 0; i < args.size(); ++i) out.push_back(check(*args[i], env, sym.args[i]));
    return app(op, std::move(out));
  }

  Expr check_apply(const Expr& fn, const std::vector<const SExpr*>& args, const Env& env, const SExpr& at) {
    if (!sig_.is_arrow(fn.sort)) throw ParseError("applying a non-function", at.line, at.col);
    const auto params = sig_.sort(fn.sort).params;
    if (params.size() != args.size() + 1)
      throw ParseError("wrong number of arguments in application", at.line, at.col);
    Expr e;
    e.kind = Expr::Kind::App;
    e.op = sig_.apply_op(fn.sort);
    e.sort = params.back();
    e.args.push_back(fn);
    for (std::size_t i = 0; i < args.size(); ++i) e.args.push_back(check(*args[i], env, params[i]));
    return e;
  }

  const Expr* lookup(const Env& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  Expr check(const SExpr& s, const Env& env, std::optional<SortId> exp) {
    if (s.is_atom) {
      if (const Expr* v = lookup(env, s.atom)) {
        expect(*v, exp, s);
        return *v;
      }
      if (auto f = sig_.find_function(s.atom)) {
        Expr e = sig_.symbol(*f).args.empty() ? app(*f, {}) : function_value(*f);
        expect(e, exp, s);
        return e;
      }
      if (ctor_template(s.atom)) {
        Expr e = check_ctor(s.atom, s, {}, env, exp);
        expect(e, exp, s);
        return e;
      }
      throw ParseError("unknown symbol '" + s.atom + "'", s.line, s.col);
    }
    if (s.items.empty() || !s.items[0].is_atom) throw ParseError("malformed expression", s.line, s.col);
    const std::string& h = s.items[0].atom;
    std::vector<const SExpr*> rest;
    for (std::size_t i = 1; i < s.items.size(); ++i) rest.push_back(&s.items[i]);

    if (h == "ite") {
      if (rest.size() != 3) throw ParseError("ite expects 3 arguments", s.line, s.col);
      Expr e;
      e.kind = Expr::Kind::Ite;
      Expr c = check(*rest[0], env, sig_.bool_sort());
      Expr a, b;
      if (exp) {
        a = check(*rest[1], env, exp);
        b = check(*rest[2], env, exp);
      } else {
        try {
          a = check(*rest[1], env, std::nullopt);
          b = check(*rest[2], env, a.sort);
        } catch (const Ambiguous&) {
          b = check(*rest[2], env, std::nullopt);
          a = check(*rest[1], env, b.sort);
        }
      }
      e.sort = a.sort;
      e.args = {std::move(c), std::move(a), std::move(b)};
      return e;
    }
    if (h == "match") return check_match(s, env, exp);
    if (h == "let") {
      if (rest.size() != 2 || !rest[0]->is_list()) throw ParseError("malformed let", s.line, s.col);
      Env inner = env;
      for (const auto& b : rest[0]->items) {
        if (!b.is_list() || b.items.size() != 2) throw ParseError("malformed let binding", b.line, b.col);
        inner.push_back({atom(b.items[0]), check(b.items[1], env, std::nullopt)});
      }
      return check(*rest[1], inner, exp);
    }
    if (h == "as") {
      if (rest.size() != 2) throw ParseError("malformed 'as'", s.line, s.col);
      SortId t = parse_sort(*rest[1]);
      Expr e = check(*rest[0], env, t);
      expect(e, exp, s);
      return e;
    }
    if (h == "@") {
      if (rest.empty()) throw ParseError("malformed application", s.line, s.col);
      Expr fn = check(*rest[0], env, std::nullopt);
      Expr e = check_apply(fn, {rest.begin() + 1, rest.end()}, env, s);
      expect(e, exp, s);
      return e;
    }
    if (const Expr* v = lookup(env, h)) {
      Expr e = check_apply(*v, rest, env, s);
      expect(e, exp, s);
      return e;
    }
    if (auto f = sig_.find_function(h)) {
      const Symbol sym = sig_.symbol(*f);
      if (sym.args.size() != rest.size())
        throw ParseError("'" + h + "' expects " + std::to_string(sym.args.size()) + " arguments", s.line, s.col);
      std::vector<Expr> args;
      for (std::size_t i = 0; i < rest.size(); ++i) args.push_back(check(*rest[i], env, sym.args[i]));
      Expr e = app(*f, std::move(args));
      expect(e, exp, s);
      return e;
    }
    if (ctor_template(h)) {
      Expr e = check_ctor(h, s, rest, env, exp);
      expect(e, exp, s);
      return e;
    }
    throw ParseError("unknown symbol '" + h + "'", s.line, s.col);
  }

  Expr check_match(const SExpr& s, const Env& env, std::optional<SortId> exp) {
    if (s.items.size() != 3 || !s.items[2].is_list()) throw ParseError("malformed match", s.line, s.col);
    Expr scrut = check(s.items[1], env, std::nullopt);
    if (!sig_.is_datatype(scrut.sort)) throw ParseError("match on a non-datatype", s.line, s.col);
    const auto ctors = sig_.constructors(scrut.sort);
    Expr e;
    e.kind = Expr::Kind::Match;
    e.args.push_back(scrut);
    std::vector<Env> envs;
    std::vector<const SExpr*> bodies;
    std::set<Op> seen;
    for (const auto& arm : s.items[2].items) {
      if (!arm.is_list() || arm.items.size() != 2) throw ParseError("malformed match case", arm.line, arm.col);
      const SExpr& pat = arm.items[0];
      MatchCase mc;
      std::string cname = pat.is_atom ? pat.atom : (pat.items.empty() ? "" : pat.items[0].str());
      auto it = std::find_if(ctors.begin(), ctors.end(), [&](Op c) { return sig_.symbol(c).name == cname; });
      if (it == ctors.end()) throw ParseError("match with non-constructor pattern", pat.line, pat.col);
      mc.ctor = *it;
      if (!seen.insert(mc.ctor).second) throw ParseError("duplicate match case", pat.line, pat.col);
      const auto fields = sig_.symbol(mc.ctor).args;
      std::size_t nb = pat.is_atom ? 0 : pat.items.size() - 1;
      if (nb != fields.size()) throw ParseError("wrong number of pattern variables", pat.line, pat.col);
      Env inner = env;
      for (std::size_t i = 0; i < nb; ++i) {
        const std::string& bn = atom(pat.items[i + 1]);
        Op b = sig_.variable(bn, fields[i]);
        mc.binders.push_back(b);
        inner.push_back({bn, var_expr(sig_, b)});
      }
      e.cases.push_back(std::move(mc));
      envs.push_back(std::move(inner));
      bodies.push_back(&arm.items[1]);
    }
    if (seen.size() != ctors.size()) throw ParseError("non-exhaustive match", s.line, s.col);
    std::optional<SortId> sort = exp;
    if (!sort) {
      for (std::size_t i = 0; i < bodies.size() && !sort; ++i) {
        try {
          sort = check(*bodies[i], envs[i], std::nullopt).sort;
        } catch (const Ambiguous&) {
        }
      }
      if (!sort) throw Ambiguous("cannot infer the sort of match", s.line, s.col);
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) e.args.push_back(check(*bodies[i], envs[i], sort));
    e.sort = *sort;
    return e;
  }

  // ---- lowering ----
  Term lower(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Var:
        return Term(e.op);
      case Expr::Kind::Ite:
        return lower(desugar(e));
      case Expr::Kind::App: {
        Term t(e.op);
        for (const auto& a : e.args) t.args.push_back(lower(a));
        return t;
      }
      case Expr::Kind::Match:
        break;
    }
    std::vector<Op> params;
    for (std::size_t i = 0; i < e.cases.size(); ++i) {
      std::vector<Op> inner;
      free_vars(e.args[i + 1], inner);
      for (Op v : inner) {
        const auto& b = e.cases[i].binders;
        if (std::find(b.begin(), b.end(), v) == b.end() &&
            std::find(params.begin(), params.end(), v) == params.end())
          params.push_back(v);
      }
    }
    MatchInfo info;
    info.scrutinee = lower(e.args[0]);
    info.params = params;
    std::vector<SortId> args{e.args[0].sort};
    for (Op v : params) args.push_back(sig_.sort_of(v));
    for (std::size_t i = 0; i < e.cases.size(); ++i)
      info.arms.push_back({e.cases[i].ctor, e.cases[i].binders, lower(e.args[i + 1])});
    const auto arms = info.arms;
    Term scrut = info.scrutinee;
    Op aux = sig_.add_match(args, e.sort, std::move(info));
    for (const auto& arm : arms) {
      Equation eq;
      Term pat(arm.ctor);
      for (Op b : arm.binders) pat.args.push_back(Term(b));
      eq.lhs = Term(aux, {pat});
      for (Op v : params) eq.lhs.args.push_back(Term(v));
      eq.rhs = arm.body;
      eq.vars = collect_vars(sig_, eq.lhs, eq.rhs);
      th_.aux_eqs.push_back(std::move(eq));
    }
    Term t(aux, {scrut});
    for (Op v : params) t.args.push_back(Term(v));
    return t;
  }

  Theory& th_;
  Signature& sig_;
  TEnv tenv_;
};

void compute_vocabulary(Theory& th) {
  Signature& sig = th.sig;
  std::vector<SortId> used;
  std::function<void(SortId)> use = [&](SortId s) {
    if (std::find(used.begin(), used.end(), s) != used.end()) return;
    used.push_back(s);
    if (sig.is_datatype(s))
      for (Op c : sig.constructors(s))
        for (SortId a : sig.symbol(c).args) use(a);
  };
  for (Op f : th.functions) {
    for (SortId a : sig.symbol(f).args) use(a);
    use(sig.symbol(f).ret);
  }
  if (th.functions.empty()) {
    for (SortId s = 0; s < sig.sort_count(); ++s) {
      const auto& info = sig.sort(s);
      if (info.kind == SortKind::Datatype && !sig.datatype_template(info.template_index).builtin) use(s);
    }
  }
  std::sort(used.begin(), used.end());
  th.datatypes.clear();
  th.vocabulary.clear();
  for (SortId s : used) {
    if (!sig.is_datatype(s)) continue;
    th.datatypes.push_back(s);
    for (Op c : sig.constructors(s)) th.vocabulary.push_back(c);
  }
  for (Op f : th.functions) th.vocabulary.push_back(f);
  // Function constants for every declared function whose arrow sort is an argument sort.
  std::vector<Op> constants;
  for (Op f : th.functions)
    for (SortId a : sig.symbol(f).args) {
      if (!sig.is_arrow(a)) continue;
      for (Op g : th.functions) {
        const Symbol& gs = sig.symbol(g);
        if (gs.args.empty()) continue;
        std::vector<SortId> ps = gs.args;
        ps.push_back(gs.ret);
        if (sig.sort(a).params != ps) continue;
        bool existed = sig.existing_function_constant(g).has_value();
        Op fc = sig.function_constant(g);
        if (!existed) Parser::add_eta(th, g, fc);
        if (std::find(constants.begin(), constants.end(), fc) == constants.end()) constants.push_back(fc);
      }
    }
  for (Op fc : constants) th.vocabulary.push_back(fc);
}

}  // namespace

Expr desugar(const Expr& e) {
  Expr out = e;
  for (auto& a : out.args) a = desugar(a);
  if (e.kind != Expr::Kind::Ite) return out;
  // Bool match needs the signature's true/false ops; they are the first two symbols ever created.
  Expr m;
  m.kind = Expr::Kind::Match;
  m.sort = e.sort;
  m.args = std::move(out.args);
  m.cases = {{0, {}}, {1, {}}};
  return m;
}

bool has_ite(const Expr& e) {
  if (e.kind == Expr::Kind::Ite) return true;
  return std::any_of(e.args.begin(), e.args.end(), has_ite);
}

Theory parse_theory(std::string_view text) {
  Theory th;
  parse_into(th, text);
  return th;
}

void parse_into(Theory& theory, std::string_view text) {
  auto cmds = read_sexprs(text);
  Theory work = theory;
  Parser p(work);
  for (const auto& c : cmds) p.command(c);
  compute_vocabulary(work);
  theory = std::move(work);
}

std::vector<Equation> parse_lemmas(Theory& base, std::string_view text) {
  Theory work = base;
  std::size_t before = work.eqs.size();
  auto cmds = read_sexprs(text);
  Parser p(work);
  for (const auto& c : cmds) {
    if (!c.is_list() || c.items.empty() || !c.items[0].is("assert"))
      throw ParseError("lemma files contain only assertions", c.line, c.col);
    p.command(c);
  }
  std::vector<Equation> out(work.eqs.begin() + static_cast<std::ptrdiff_t>(before), work.eqs.end());
  // keep the symbols the lemmas introduced (variables, function constants and their eta rules)
  base.sig = std::move(work.sig);
  base.aux_eqs = std::move(work.aux_eqs);
  return out;
}

Term substitute(const Term& t, const std::vector<std::pair<Op, Term>>& sub) {
  if (t.args.empty()) {
    for (const auto& [op, with] : sub)
      if (op == t.op) return with;
    return t;
  }
  Term out(t.op);
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute(a, sub));
  return out;
}

std::vector<Op> collect_vars(const Signature& sig, const Term& lhs, const Term& rhs) {
  std::vector<Op> out;
  auto f = [&](const Term& t) {
    if (sig.is_var_like(t.op) && std::find(out.begin(), out.end(), t.op) == out.end()) out.push_back(t.op);
  };
  visit_ops(lhs, f);
  visit_ops(rhs, f);
  return out;
}

Equation name_variables(Signature& sig, const Term& lhs, const Term& rhs) {
  std::vector<Op> order = collect_vars(sig, lhs, rhs);
  auto base_of = [&](Op v) {
    SortId s = sig.sort_of(v);
    if (sig.is_arrow(s)) return std::string("f");
    std::string n = sig.sort(s).name;
    char c = n.empty() ? 'x' : n[0];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (!((c >= 'a' && c <= 'z'))) c = 'x';
    return std::string(1, c);
  };
  std::map<std::string, int> total, seen;
  for (Op v : order) ++total[base_of(v)];
  std::vector<std::pair<Op, Term>> sub;
  Equation eq;
  for (Op v : order) {
    std::string b = base_of(v);
    std::string name = total[b] == 1 ? b : b + std::to_string(++seen[b]);
    while (sig.find_function(name) || !sig.find_constructors(name).empty()) name += "_";
    Op nv = sig.variable(name, sig.sort_of(v));
    sub.push_back({v, Term(nv)});
    eq.vars.push_back(nv);
  }
  eq.lhs = substitute(lhs, sub);
  eq.rhs = substitute(rhs, sub);
  return eq;
}

std::string equation_to_string(const Signature& sig, const Equation& eq) {
  return "(= " + sig.to_string(eq.lhs) + " " + sig.to_string(eq.rhs) + ")";
}

std::string serialize_lemma(const Signature& sig, const Equation& eq) {
  std::vector<Op> vars = collect_vars(sig, eq.lhs, eq.rhs);
  if (vars.empty()) return "(assert " + equation_to_string(sig, eq) + ")";
  std::string binds;
  for (Op v : vars) {
    if (!binds.empty()) binds += " ";
    binds += "(" + sig.symbol(v).name + " " + sig.sort_name(sig.sort_of(v)) + ")";
  }
  return "(assert (forall (" + binds + ") " + equation_to_string(sig, eq) + "))";
}

std::string serialize_lemmas(const Signature& sig, const std::vector<Equation>& lemmas) {
  std::vector<std::pair<OrderKey, std::string>> lines;
  for (const auto& eq : lemmas) lines.push_back({equation_key(sig, eq.lhs, eq.rhs), serialize_lemma(sig, eq)});
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l.second + "\n";
  return out;
}

}  // namespace thex
