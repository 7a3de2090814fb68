#include "thex/order.hpp"

#include <set>

namespace thex {

namespace {
void collect(const Signature& sig, const Term& t, std::set<Op>& out) {
  if (sig.is_var_like(t.op)) out.insert(t.op);
  for (const auto& a : t.args) collect(sig, a, out);
}
}  // namespace

std::size_t free_var_count(const Signature& sig, const Term& t) {
  std::set<Op> s;
  collect(sig, t, s);
  return s.size();
}

std::size_t free_var_count(const Signature& sig, const Term& a, const Term& b) {
  std::set<Op> s;
  collect(sig, a, s);
  collect(sig, b, s);
  return s.size();
}

OrderKey term_key(const Signature& sig, const Term& t) {
  return {term_size(t), free_var_count(sig, t), sig.to_string(t)};
}

OrderKey equation_key(const Signature& sig, const Term& lhs, const Term& rhs) {
  return {term_size(lhs) + term_size(rhs), free_var_count(sig, lhs, rhs),
          sig.to_string(lhs) + " = " + sig.to_string(rhs)};
}

std::string OrderKey::str() const {
  return "(" + std::to_string(size) + "," + std::to_string(free_vars) + ")";
}

}  // namespace thex
