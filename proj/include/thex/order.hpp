#pragma once

#include <string>

#include "thex/signature.hpp"

namespace thex {

// Preference order: smaller size first, then more free variables, then text.
struct OrderKey {
  std::size_t size = 0;
  std::size_t free_vars = 0;
  std::string text;

  bool operator<(const OrderKey& o) const {
    if (size != o.size) return size < o.size;
    if (free_vars != o.free_vars) return free_vars > o.free_vars;
    return text < o.text;
  }
  bool operator==(const OrderKey& o) const = default;
  std::string str() const;
};

std::size_t free_var_count(const Signature& sig, const Term& t);
std::size_t free_var_count(const Signature& sig, const Term& a, const Term& b);
OrderKey term_key(const Signature& sig, const Term& t);
OrderKey equation_key(const Signature& sig, const Term& lhs, const Term& rhs);

}  // namespace thex
