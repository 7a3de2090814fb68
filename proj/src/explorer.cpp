#include "thex/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <ostream>
#include <set>

namespace thex {

SaturationConfig ExplorerConfig::saturation() const {
  SaturationConfig s;
  s.depth = rw_depth;
  s.node_cap = node_cap;
  s.case_split = case_split;
  s.max_split_depth = split_depth;
  s.trace = rule_trace;
  return s;
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::Emitted: return "emitted";
    case EventKind::Admitted: return "admitted";
    case EventKind::Failed: return "failed";
    case EventKind::Redundant: return "redundant";
    case EventKind::GoalProved: return "goal-proved";
    case EventKind::GoalFailed: return "goal-failed";
  }
  return "?";
}

std::vector<Equation> ExploreResult::lemma_equations() const {
  std::vector<Equation> out;
  for (const auto& l : lemmas) out.push_back(l.equation);
  return out;
}

Conjecture goal_conjecture(Signature& sig, const Equation& goal) {
  std::vector<Op> vars = goal.vars;
  for (Op v : collect_vars(sig, goal.lhs, goal.rhs))
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  std::map<SortId, std::uint32_t> count;
  std::vector<std::pair<Op, Term>> sub;
  for (Op v : vars) {
    SortId s = sig.sort_of(v);
    sub.push_back({v, Term(sig.placeholder(s, ++count[s]))});
  }
  Conjecture c;
  c.lhs = substitute(goal.lhs, sub);
  c.rhs = substitute(goal.rhs, sub);
  c.key = equation_key(sig, c.lhs, c.rhs);
  return c;
}

namespace {

struct Timeout {};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool admissible(const Signature& sig, const Conjecture& c) {
  // placeholders count as variables for the direction check
  std::set<Op> l, r;
  visit_ops(c.lhs, [&](const Term& t) {
    if (sig.is_var_like(t.op)) l.insert(t.op);
  });
  visit_ops(c.rhs, [&](const Term& t) {
    if (sig.is_var_like(t.op)) r.insert(t.op);
  });
  return std::includes(l.begin(), l.end(), r.begin(), r.end()) ||
         std::includes(r.begin(), r.end(), l.begin(), l.end());
}

class Session {
 public:
  Session(const Theory& theory, const ExplorerConfig& cfg, bool with_goals)
      : th_(theory), cfg_(cfg), sat_(cfg.saturation()), with_goals_(with_goals), st_(&th_.sig) {
    rules_ = theory_rules(th_);
    start_ = Clock::now();
    if (with_goals_)
      for (const auto& g : th_.goals) {
        GoalState gs;
        gs.conj = goal_conjecture(th_.sig, g);
        gs.outcome.text = equation_to_string(th_.sig, g);
        goals_.push_back(std::move(gs));
      }
  }

  ExploreResult run() {
    try {
      explore_levels();
    } catch (const Timeout&) {
      stats_.truncated = true;
    }
    for (const auto& g : goals_) stats_.goals.push_back(g.outcome);
    ExploreResult res{th_, std::move(lemmas_), std::move(stats_)};
    return res;
  }

 private:
  struct GoalState {
    Conjecture conj;
    GoalOutcome outcome;
  };

  void check_time() {
    if (cfg_.timeout > 0 && seconds_since(start_) > cfg_.timeout) throw Timeout{};
  }

  bool goals_done() const {
    return with_goals_ && std::all_of(goals_.begin(), goals_.end(), [](const GoalState& g) { return g.outcome.proved; });
  }

  void event(EventKind k, const Term& l, const Term& r) {
    Event e{k, level_, l, r, th_.sig.to_string(l) + " = " + th_.sig.to_string(r)};
    if (cfg_.trace) *cfg_.trace << "event=" << event_name(k) << " level=" << level_ << " " << e.text << "\n";
    stats_.events.push_back(std::move(e));
  }

  void rewrite_master(Tick since) {
    RewriteOptions opt{cfg_.node_cap, since, cfg_.rule_trace, std::nullopt, sat_.growth_limit};
    run_rewrites(st_.graph, rules_, cfg_.rw_depth, opt);
  }

  void explore_levels() {
    auto t0 = Clock::now();
    EnumConfig ec;
    ec.max_level = cfg_.term_depth;
    ec.ph_count = cfg_.ph_count;
    ec.ph_per_sort = cfg_.ph_per_sort;
    ec.diag = cfg_.diag;
    st_ = init_enum(th_, ec);
    rewrite_master(0);
    stats_.phase_times.generation += seconds_since(t0);
    if (with_goals_) {
      attempt_goals();
      if (goals_done()) return;
    }
    for (level_ = 1; level_ <= cfg_.term_depth; ++level_) {
      check_time();
      t0 = Clock::now();
      Tick before = st_.graph.tick();
      st_.graph.advance_tick();
      grow(st_);
      rewrite_master(before);
      stats_.phase_times.generation += seconds_since(t0);
      // New lemmas go back to inference first; failed conjectures are retried once it dries up.
      while (true) {
        check_time();
        bool admitted = batch();
        if (goals_done()) return;
        if (!admitted && !process_retry()) break;
        if (goals_done()) return;
      }
      if (goals_done()) return;
    }
  }

  // One inference/screening/proving round; true if a lemma was admitted.
  bool batch() {
    auto t0 = Clock::now();
    InferStats is;
    auto conjs = infer_conjectures(st_, th_.sig, rules_, sat_, cfg_.example_depth, &is);
    stats_.soe_aborts += is.aborted;
    stats_.phase_times.inference += seconds_since(t0);
    check_time();
    t0 = Clock::now();
    conjs = screen(conjs, st_, rules_, sat_);
    stats_.phase_times.screening += seconds_since(t0);
    std::vector<Conjecture> fresh;
    for (auto& c : conjs) {
      if (known_.count(c.key.text)) continue;
      known_.insert(c.key.text);
      fresh.push_back(std::move(c));
    }
    stats_.conjectures.emitted += fresh.size();
    for (const auto& c : fresh) {
      event(EventKind::Emitted, c.lhs, c.rhs);
      if (cfg_.trace)
        *cfg_.trace << "conjecture " << c.key.str() << " " << conjecture_text(th_.sig, c) << "\n";
    }
    bool admitted = false;
    for (auto& c : fresh) {
      check_time();
      auto tp = Clock::now();
      if (redundant(c)) {
        stats_.conjectures.screened += 1;
        event(EventKind::Redundant, c.lhs, c.rhs);
        stats_.phase_times.proving += seconds_since(tp);
        continue;
      }
      auto lemma = attempt(c);
      stats_.phase_times.proving += seconds_since(tp);
      if (lemma) {
        admit(std::move(*lemma));
        admitted = true;
        if (goals_done()) return true;
      } else {
        stats_.conjectures.failed += 1;
        c.status = ConjectureStatus::Failed;
        event(EventKind::Failed, c.lhs, c.rhs);
        retry_.push_back(c);
      }
    }
    return admitted;
  }

  bool redundant(const Conjecture& c) {
    auto a = st_.graph.lookup(c.lhs);
    auto b = st_.graph.lookup(c.rhs);
    if (a && b && st_.graph.equiv(*a, *b)) return true;
    return check_no_induction(c.lhs, c.rhs, th_.sig, rules_, sat_);
  }

  std::optional<Lemma> attempt(const Conjecture& c) {
    if (!admissible(th_.sig, c)) return std::nullopt;
    for (const auto& v : generalize(c, th_.sig)) {
      check_time();
      if (cfg_.trace) *cfg_.trace << "prove " << conjecture_text(th_.sig, v) << "\n";
      ProofResult r = prove_by_induction(v, th_.sig, rules_, sat_, cfg_.trace);
      if (r.proved) return make_lemma(th_.sig, c, v, lemmas_.size() + 1);
    }
    return std::nullopt;
  }

  void admit(Lemma l) {
    stats_.conjectures.proved += 1;
    event(EventKind::Admitted, l.proved.lhs, l.proved.rhs);
    rules_.insert(rules_.end(), l.rules.begin(), l.rules.end());
    EGraph& g = st_.graph;
    ClassId a = g.add(l.source.lhs);
    ClassId b = g.add(l.source.rhs);
    g.advance_tick();
    g.merge(a, b);
    g.rebuild();
    lemmas_.push_back(std::move(l));
    rewrite_master(0);
    if (with_goals_) attempt_goals();
  }

  // True if some retried conjecture was admitted.
  bool process_retry() {
    bool any = false;
    bool progress = true;
    while (progress && !retry_.empty()) {
      progress = false;
      for (std::size_t i = 0; i < retry_.size(); ++i) {
        check_time();
        auto tp = Clock::now();
        if (redundant(retry_[i])) {
          stats_.conjectures.screened += 1;
          event(EventKind::Redundant, retry_[i].lhs, retry_[i].rhs);
          retry_.erase(retry_.begin() + static_cast<std::ptrdiff_t>(i));
          --i;
          stats_.phase_times.proving += seconds_since(tp);
          continue;
        }
        stats_.conjectures.retried += 1;
        auto lemma = attempt(retry_[i]);
        stats_.phase_times.proving += seconds_since(tp);
        if (lemma) {
          retry_.erase(retry_.begin() + static_cast<std::ptrdiff_t>(i));
          stats_.conjectures.failed -= 1;
          admit(std::move(*lemma));
          progress = any = true;
          if (goals_done()) return true;
          break;
        }
      }
    }
    return any;
  }

  void attempt_goals() {
    for (auto& g : goals_) {
      if (g.outcome.proved) continue;
      check_time();
      auto tp = Clock::now();
      g.outcome.attempts += 1;
      bool ok = check_no_induction(g.conj.lhs, g.conj.rhs, th_.sig, rules_, sat_);
      if (!ok && admissible(th_.sig, g.conj)) {
        for (const auto& v : generalize(g.conj, th_.sig)) {
          if (prove_by_induction(v, th_.sig, rules_, sat_, cfg_.trace).proved) {
            ok = true;
            break;
          }
        }
      }
      double dt = seconds_since(tp);
      stats_.phase_times.proving += dt;
      g.outcome.seconds = seconds_since(start_);
      if (ok) {
        g.outcome.proved = true;
        event(EventKind::GoalProved, g.conj.lhs, g.conj.rhs);
      } else {
        event(EventKind::GoalFailed, g.conj.lhs, g.conj.rhs);
      }
    }
  }

  Theory th_;
  ExplorerConfig cfg_;
  SaturationConfig sat_;
  bool with_goals_;
  EnumState st_;
  std::vector<RewriteRule> rules_;
  std::vector<Lemma> lemmas_;
  std::vector<Conjecture> retry_;
  std::set<std::string> known_;
  std::vector<GoalState> goals_;
  ExploreStats stats_;
  Clock::time_point start_;
  int level_ = 0;
};

}  // namespace

ExploreResult explore(const Theory& theory, const ExplorerConfig& cfg) {
  auto s = std::make_unique<Session>(theory, cfg, false);
  return s->run();
}

ExploreResult prove_goals(const Theory& theory, const ExplorerConfig& cfg) {
  auto s = std::make_unique<Session>(theory, cfg, true);
  return s->run();
}

double subsumption_ratio(const std::vector<Equation>& a, const std::vector<Equation>& b, const Theory& base,
                         const ExplorerConfig& cfg) {
  if (a.empty()) return 1.0;
  Theory th = base;
  auto rules = theory_rules(th);
  for (std::size_t i = 0; i < b.size(); ++i) {
    try {
      auto rs = compile_equation(th.sig, b[i], RuleOrigin::Lemma, "known" + std::to_string(i));
      rules.insert(rules.end(), rs.begin(), rs.end());
    } catch (const RuleError&) {
    }
  }
  SaturationConfig sat = cfg.saturation();
  std::size_t proved = 0;
  for (const auto& eq : a) {
    Conjecture c = goal_conjecture(th.sig, eq);
    if (check_no_induction(c.lhs, c.rhs, th.sig, rules, sat)) ++proved;
  }
  return static_cast<double>(proved) / static_cast<double>(a.size());
}

}  // namespace thex
