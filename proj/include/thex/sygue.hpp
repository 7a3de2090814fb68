#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <vector>

#include "thex/egraph.hpp"
#include "thex/lang.hpp"

namespace thex {

struct EnumConfig {
  int max_level = 2;
  int ph_count = 2;
  std::map<std::string, int> ph_per_sort;  // by sort name
  std::ostream* diag = nullptr;
};

class EnumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumState {
  EGraph graph;
  int level = 0;
  std::vector<ClassId> frontier;
  EnumConfig config;
  std::vector<Op> vocabulary;                 // symbols applied by grow
  std::map<SortId, std::vector<Op>> placeholders;  // per argument sort, ph1 first

  explicit EnumState(const Signature* sig) : graph(sig) {}
  std::optional<Op> first_placeholder(SortId s) const;
};

// Sorts that occur as an argument of some vocabulary symbol, ascending.
std::vector<SortId> placeholder_sorts(const Theory& th);
EnumState init_enum(Theory& th, const EnumConfig& cfg);
std::size_t grow(EnumState& st);
// Symbols a representative may use: vocabulary and placeholders.
std::function<bool(Op)> representative_filter(const EnumState& st);
std::map<ClassId, Term> representatives(const EnumState& st);

}  // namespace thex
