#include "thex/signature.hpp"

#include <algorithm>

namespace thex {

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& a : t.args) n += term_size(a);
  return n;
}

std::size_t term_height(const Term& t) {
  std::size_t h = 0;
  for (const auto& a : t.args) h = std::max(h, term_height(a) + 1);
  return h;
}

Signature::Signature() {
  DatatypeTemplate b;
  b.name = "Bool";
  b.builtin = true;
  b.ctors = {{"true", {}}, {"false", {}}};
  bool_sort_ = instantiate(add_template(std::move(b)), {});
}

SortId Signature::opaque_sort(const std::string& name, bool type_var) {
  auto key = std::make_pair(name, std::vector<SortId>{});
  if (auto it = sort_index_.find(key); it != sort_index_.end()) return it->second;
  if (template_index_.count(name)) throw SignatureError("sort '" + name + "' already declared");
  SortInfo info;
  info.name = name;
  info.kind = SortKind::Opaque;
  info.is_type_var = type_var;
  SortId id = static_cast<SortId>(sorts_.size());
  sorts_.push_back(std::move(info));
  sort_index_.emplace(key, id);
  return id;
}

std::optional<SortId> Signature::find_opaque(const std::string& name) const {
  auto it = sort_index_.find({name, {}});
  if (it == sort_index_.end() || sorts_[it->second].kind != SortKind::Opaque) return std::nullopt;
  return it->second;
}

SortId Signature::arrow_sort(const std::vector<SortId>& params) {
  if (params.size() < 2) throw SignatureError("arrow sort needs at least one argument");
  auto key = std::make_pair(std::string("=>"), params);
  if (auto it = sort_index_.find(key); it != sort_index_.end()) return it->second;
  SortInfo info;
  info.name = "=>";
  info.params = params;
  info.kind = SortKind::Arrow;
  SortId id = static_cast<SortId>(sorts_.size());
  sorts_.push_back(std::move(info));
  sort_index_.emplace(key, id);
  return id;
}

int Signature::add_template(DatatypeTemplate t) {
  if (template_index_.count(t.name) || find_opaque(t.name))
    throw SignatureError("sort '" + t.name + "' already declared");
  int idx = static_cast<int>(templates_.size());
  template_index_.emplace(t.name, idx);
  templates_.push_back(std::move(t));
  return idx;
}

std::optional<int> Signature::find_template(const std::string& name) const {
  auto it = template_index_.find(name);
  if (it == template_index_.end()) return std::nullopt;
  return it->second;
}

SortId Signature::instantiate(int ti, const std::vector<SortId>& args) {
  const std::string name = templates_[ti].name;
  if (args.size() != templates_[ti].params.size())
    throw SignatureError("sort '" + name + "' expects " +
                         std::to_string(templates_[ti].params.size()) + " parameters");
  auto key = std::make_pair(name, args);
  if (auto it = sort_index_.find(key); it != sort_index_.end()) return it->second;
  SortInfo info;
  info.name = name;
  info.params = args;
  info.kind = SortKind::Datatype;
  info.template_index = ti;
  SortId id = static_cast<SortId>(sorts_.size());
  sorts_.push_back(std::move(info));
  sort_index_.emplace(key, id);

  std::map<std::string, SortId> env;
  for (std::size_t i = 0; i < args.size(); ++i) env[templates_[ti].params[i]] = args[i];
  const auto ctors = templates_[ti].ctors;  // resolve() may grow templates_
  std::uint32_t pos = 0;
  for (const auto& c : ctors) {
    Symbol s;
    s.name = c.name;
    s.kind = SymbolKind::Constructor;
    for (const auto& f : c.fields) s.args.push_back(resolve(f, env));
    s.ret = id;
    s.index = pos++;
    Op op = push_symbol(std::move(s));
    sorts_[id].constructors.push_back(op);
    constructors_by_name_[c.name].push_back(op);
  }
  return id;
}

SortId Signature::resolve(const SortExpr& e, const std::map<std::string, SortId>& env) {
  if (e.args.empty()) {
    if (auto it = env.find(e.name); it != env.end()) return it->second;
  }
  std::vector<SortId> args;
  for (const auto& a : e.args) args.push_back(resolve(a, env));
  if (e.name == "=>") return arrow_sort(args);
  if (auto t = find_template(e.name)) return instantiate(*t, args);
  if (args.empty()) {
    if (auto o = find_opaque(e.name)) return *o;
  }
  throw SignatureError("unknown sort '" + e.name + "'");
}

std::string Signature::sort_name(SortId s) const {
  const auto& info = sorts_.at(s);
  if (info.params.empty()) return info.name;
  std::string out = "(" + info.name;
  for (SortId p : info.params) out += " " + sort_name(p);
  return out + ")";
}

Op Signature::push_symbol(Symbol s) {
  Op op = static_cast<Op>(symbols_.size());
  symbols_.push_back(std::move(s));
  return op;
}

Op Signature::add_function(const std::string& name, std::vector<SortId> args, SortId ret) {
  if (functions_.count(name) || constructors_by_name_.count(name))
    throw SignatureError("symbol '" + name + "' already declared");
  Symbol s;
  s.name = name;
  s.kind = SymbolKind::Function;
  s.args = std::move(args);
  s.ret = ret;
  Op op = push_symbol(std::move(s));
  functions_.emplace(name, op);
  return op;
}

std::optional<Op> Signature::find_function(const std::string& name) const {
  auto it = functions_.find(name);
  if (it == functions_.end()) return std::nullopt;
  return it->second;
}

std::vector<Op> Signature::find_constructors(const std::string& name) const {
  auto it = constructors_by_name_.find(name);
  if (it == constructors_by_name_.end()) return {};
  return it->second;
}

Op Signature::function_constant(Op f) {
  if (auto it = function_constants_.find(f); it != function_constants_.end()) return it->second;
  const Symbol fs = symbols_.at(f);
  if (fs.args.empty()) throw SignatureError("'" + fs.name + "' is not a function");
  std::vector<SortId> params = fs.args;
  params.push_back(fs.ret);
  Symbol s;
  s.name = fs.name;
  s.kind = SymbolKind::FunctionConstant;
  s.ret = arrow_sort(params);
  s.target = f;
  Op op = push_symbol(std::move(s));
  function_constants_.emplace(f, op);
  return op;
}

std::optional<Op> Signature::existing_function_constant(Op f) const {
  auto it = function_constants_.find(f);
  if (it == function_constants_.end()) return std::nullopt;
  return it->second;
}

Op Signature::apply_op(SortId arrow) {
  if (auto it = apply_ops_.find(arrow); it != apply_ops_.end()) return it->second;
  const auto params = sorts_.at(arrow).params;
  if (sorts_.at(arrow).kind != SortKind::Arrow) throw SignatureError("applying a non-function");
  Symbol s;
  s.name = "@";
  s.kind = SymbolKind::Apply;
  s.args.push_back(arrow);
  s.args.insert(s.args.end(), params.begin(), params.end() - 1);
  s.ret = params.back();
  Op op = push_symbol(std::move(s));
  apply_ops_.emplace(arrow, op);
  return op;
}

namespace {
std::string sanitize(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '(' || ch == ')') continue;
    out += ch == ' ' ? '_' : ch;
  }
  return out;
}
}  // namespace

Op Signature::placeholder(SortId s, std::uint32_t index) {
  auto key = std::make_pair(s, index);
  if (auto it = placeholders_.find(key); it != placeholders_.end()) return it->second;
  Symbol sym;
  sym.name = "ph" + std::to_string(index) + "_" + sanitize(sort_name(s));
  sym.kind = SymbolKind::Placeholder;
  sym.ret = s;
  sym.index = index;
  Op op = push_symbol(std::move(sym));
  placeholders_.emplace(key, op);
  return op;
}

Op Signature::variable(const std::string& name, SortId s) {
  auto key = std::make_pair(name, s);
  if (auto it = variables_.find(key); it != variables_.end()) return it->second;
  Symbol sym;
  sym.name = name;
  sym.kind = SymbolKind::Variable;
  sym.ret = s;
  Op op = push_symbol(std::move(sym));
  variables_.emplace(key, op);
  return op;
}

Op Signature::fresh(SortId s, const std::string& prefix) {
  Symbol sym;
  sym.name = prefix + std::to_string(++fresh_counter_);
  sym.kind = SymbolKind::Uninterpreted;
  sym.ret = s;
  sym.index = fresh_counter_;
  return push_symbol(std::move(sym));
}

Op Signature::example_leaf(SortId s, std::uint32_t index) {
  auto key = std::make_pair(s, index);
  if (auto it = example_leaves_.find(key); it != example_leaves_.end()) return it->second;
  Symbol sym;
  sym.name = "v" + std::to_string(index);
  sym.kind = SymbolKind::Uninterpreted;
  sym.ret = s;
  sym.index = index;
  Op op = push_symbol(std::move(sym));
  example_leaves_.emplace(key, op);
  return op;
}

Op Signature::add_match(std::vector<SortId> args, SortId ret, MatchInfo info) {
  Symbol s;
  s.name = "match_" + std::to_string(matches_.size());
  s.kind = SymbolKind::Match;
  s.args = std::move(args);
  s.ret = ret;
  Op op = push_symbol(std::move(s));
  matches_.emplace(op, std::move(info));
  return op;
}

std::vector<std::size_t> Signature::recursive_fields(Op ctor) const {
  std::vector<std::size_t> out;
  const auto& s = symbols_.at(ctor);
  for (std::size_t i = 0; i < s.args.size(); ++i)
    if (s.args[i] == s.ret) out.push_back(i);
  return out;
}

namespace {

Term substitute_ops(const Term& t, const std::map<Op, Term>& sub) {
  if (t.args.empty()) {
    if (auto it = sub.find(t.op); it != sub.end()) return it->second;
    return t;
  }
  Term out(t.op);
  out.args.reserve(t.args.size());
  for (const auto& a : t.args) out.args.push_back(substitute_ops(a, sub));
  return out;
}

}  // namespace

std::string Signature::to_string(const Term& t) const {
  const Symbol& s = symbols_.at(t.op);
  if (s.kind == SymbolKind::Match) {
    const MatchInfo& m = matches_.at(t.op);
    std::map<Op, Term> sub;
    for (std::size_t i = 0; i < m.params.size() && i + 1 < t.args.size(); ++i)
      sub.emplace(m.params[i], t.args[i + 1]);
    const std::string scrut = to_string(t.args.at(0));
    if (s.args.at(0) == bool_sort_ && m.arms.size() == 2) {
      const MatchArm& yes = m.arms[0].ctor == true_op() ? m.arms[0] : m.arms[1];
      const MatchArm& no = m.arms[0].ctor == true_op() ? m.arms[1] : m.arms[0];
      return "(ite " + scrut + " " + to_string(substitute_ops(yes.body, sub)) + " " +
             to_string(substitute_ops(no.body, sub)) + ")";
    }
    std::string out = "(match " + scrut + " (";
    bool first = true;
    for (const auto& arm : m.arms) {
      if (!first) out += " ";
      first = false;
      std::string pat = symbols_.at(arm.ctor).name;
      if (!arm.binders.empty()) {
        pat = "(" + pat;
        for (Op b : arm.binders) pat += " " + symbols_.at(b).name;
        pat += ")";
      }
      out += "(" + pat + " " + to_string(substitute_ops(arm.body, sub)) + ")";
    }
    return out + "))";
  }
  if (t.args.empty()) return s.name;
  std::string out = "(" + s.name;
  for (const auto& a : t.args) out += " " + to_string(a);
  return out + ")";
}

}  // namespace thex
