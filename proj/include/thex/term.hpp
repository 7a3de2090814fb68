#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace thex {

using SortId = std::uint32_t;
using Op = std::uint32_t;

struct Term {
  Op op = 0;
  std::vector<Term> args;

  Term() = default;
  explicit Term(Op o) : op(o) {}
  Term(Op o, std::vector<Term> a) : op(o), args(std::move(a)) {}

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term& o) const {
    if (op != o.op) return op <=> o.op;
    return args <=> o.args;
  }
};

std::size_t term_size(const Term& t);
std::size_t term_height(const Term& t);

template <typename F>
void visit_ops(const Term& t, F&& f) {
  f(t);
  for (const auto& a : t.args) visit_ops(a, f);
}

}  // namespace thex
