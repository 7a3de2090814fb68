// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "../support/properties.hpp"
#include "thex/cli.hpp"

using namespace thex;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Timed {
  ExploreResult result;
  double seconds = 0;
  ExplorerConfig cfg;
};

Timed run_explore(const std::string& file, ExplorerConfig cfg, bool goals = false) {
  Theory th = oracle::load_theory(file);
  auto t0 = Clock::now();
  Timed t{goals ? prove_goals(th, cfg) : explore(th, cfg), 0, cfg};
  t.seconds = since(t0);
  return t;
}

ExplorerConfig with_timeout(double s) {
  ExplorerConfig cfg;
  cfg.timeout = s;
  return cfg;
}

std::vector<Equation> expected(Theory& th, const std::string& text) { return parse_lemmas(th, text); }

bool event_is(const ExploreResult& r, const Event& e, EventKind k, const Theory& th, const Equation& eq) {
  return e.kind == k && oracle::alpha_equal(r.theory.sig, Equation{e.lhs, e.rhs, {}}, th.sig, eq);
}

// Rev distributivity over two distinct lists, in either orientation.
const char* kRevApp =
    "(assert (forall ((a (List T)) (b (List T))) (= (rev (++ a b)) (++ (rev b) (rev a)))))";
const char* kAppAssoc =
    "(assert (forall ((a (List T)) (b (List T)) (c (List T))) (= (++ (++ a b) c) (++ a (++ b c)))))";
const char* kRevRev = "(assert (forall ((a (List T))) (= (rev (rev a)) a)))";

Outcome criterion1(const Timed& t) {
  Theory th = oracle::load_theory("theories/lists_filter.smt2");
  auto golden = expected(th, oracle::read_file(oracle::corpus("golden/lists_filter.lemmas.smt2")));
  auto found = t.result.lemma_equations();
  std::size_t hit = 0;
  for (const auto& g : golden) hit += oracle::contains_alpha(t.result.theory.sig, found, th.sig, g);
  bool ok = golden.size() == 3 && hit == golden.size() && t.seconds <= 300 && !t.result.stats.truncated;
  return {ok, std::to_string(hit) + "/" + std::to_string(golden.size()) + " golden lemmas, " + fmt(t.seconds) + "s"};
}

Outcome criterion2(const Timed& t) {
  Theory th = oracle::load_theory("theories/lists_rev.smt2");
  auto rev_app = expected(th, kRevApp).at(0);
  auto assoc = expected(th, kAppAssoc).at(0);
  auto rev_rev = expected(th, kRevRev).at(0);
  const auto& r = t.result;
  auto found = r.lemma_equations();
  bool discovered = oracle::contains_alpha(r.theory.sig, found, th.sig, rev_app) &&
                    oracle::contains_alpha(r.theory.sig, found, th.sig, rev_rev);
  long assoc_at = -1, emit_at = -1;
  for (std::size_t i = 0; i < r.stats.events.size(); ++i) {
    const auto& e = r.stats.events[i];
    if (assoc_at < 0 && event_is(r, e, EventKind::Admitted, th, assoc)) assoc_at = static_cast<long>(i);
    if (emit_at < 0 && event_is(r, e, EventKind::Emitted, th, rev_app)) emit_at = static_cast<long>(i);
  }
  bool ordered = assoc_at >= 0 && emit_at >= 0 && assoc_at < emit_at;
  bool ok = discovered && ordered && t.seconds <= 600;
  return {ok, std::string("discovered=") + (discovered ? "yes" : "no") + " assoc admitted at event " +
                  std::to_string(assoc_at) + ", rev distributivity emitted at event " + std::to_string(emit_at) +
                  ", " + fmt(t.seconds) + "s"};
}

Outcome criterion3(const Timed& t) {
  Theory th = oracle::load_theory("theories/nat.smt2");
  auto comm = expected(th, "(assert (forall ((x Nat) (y Nat)) (= (plus x y) (plus y x))))").at(0);
  auto assoc =
      expected(th, "(assert (forall ((x Nat) (y Nat) (z Nat)) (= (plus x (plus y z)) (plus (plus x y) z))))").at(0);
  auto special = expected(th, "(assert (forall ((x Nat) (y Nat)) (= (plus x (plus y x)) (plus (plus x y) x))))").at(0);
  const auto& r = t.result;
  auto found = r.lemma_equations();
  bool both = oracle::contains_alpha(r.theory.sig, found, th.sig, comm) &&
              oracle::contains_alpha(r.theory.sig, found, th.sig, assoc);
  bool special_admitted = oracle::contains_alpha(r.theory.sig, found, th.sig, special);
  for (const auto& e : r.stats.events) special_admitted = special_admitted || event_is(r, e, EventKind::Admitted, th, special);
  bool ok = both && !special_admitted && t.seconds <= 300;
  return {ok, std::string("comm+assoc=") + (both ? "yes" : "no") +
                  " specialized admitted=" + (special_admitted ? "yes" : "no") + ", " + fmt(t.seconds) + "s"};
}

// A fold lemma whose accumulator is a variable.
bool general_fold_lemma(const Signature& sig, const Term& lhs, const Term& rhs) {
  bool found = false;
  for (const Term* side : {&lhs, &rhs})
    visit_ops(*side, [&](const Term& x) {
      if (sig.symbol(x.op).name == "fold" && x.args.size() == 3 && x.args[1].args.empty() &&
          sig.is_var_like(x.args[1].op))
        found = true;
    });
  return found;
}

Outcome criterion4(const Timed& t) {
  const auto& r = t.result;
  if (r.stats.goals.size() != 1) return {false, "expected one goal"};
  const auto& g = r.stats.goals[0];
  long failed_at = -1, lemma_at = -1, proved_at = -1;
  for (std::size_t i = 0; i < r.stats.events.size(); ++i) {
    const auto& e = r.stats.events[i];
    long at = static_cast<long>(i);
    if (e.kind == EventKind::GoalFailed && failed_at < 0) failed_at = at;
    if (e.kind == EventKind::Admitted && lemma_at < 0 && general_fold_lemma(r.theory.sig, e.lhs, e.rhs)) lemma_at = at;
    if (e.kind == EventKind::GoalProved) proved_at = at;
  }
  bool retried = g.attempts >= 2 && failed_at >= 0 && lemma_at > failed_at && proved_at > lemma_at;
  bool ok = g.proved && retried && t.seconds <= 600;
  return {ok, std::string("proved=") + (g.proved ? "yes" : "no") + " attempts=" + std::to_string(g.attempts) +
                  " goal failed at event " + std::to_string(failed_at) + ", fold lemma admitted at " +
                  std::to_string(lemma_at) + ", goal proved at " + std::to_string(proved_at) + ", " +
                  fmt(t.seconds) + "s"};
}

Outcome criterion5(const Timed& with, const Timed& without) {
  bool a = !with.result.stats.goals.empty() && with.result.stats.goals[0].proved;
  bool b = !without.result.stats.goals.empty() && without.result.stats.goals[0].proved;
  bool ok = a && !b && !without.result.stats.truncated && with.seconds <= 600 && without.seconds <= 600;
  return {ok, std::string("with splits ") + (a ? "proved" : "failed") + " in " + fmt(with.seconds) +
                  "s, without splits " + (b ? "proved" : "failed") + " in " + fmt(without.seconds) + "s"};
}

std::string serialized(const ExploreResult& r) { return serialize_lemmas(r.theory.sig, r.lemma_equations()); }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thex");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome criterion6(const std::vector<const Timed*>& soe_runs, const std::vector<const Timed*>& lemma_runs,
                   const Timed& first_filter) {
  std::ostringstream d;
  bool ok = true;
  auto report = [&](const char* name, const props::Tally& t) {
    bool good = t.checked > 0 && t.violations == 0;
    ok = ok && good;
    d << name << " " << t.violations << "/" << t.checked;
    if (!good) d << " [" << t.first << "]";
    d << "; ";
  };
  report("(a) congruence mismatches", props::egraph_vs_naive(200, 2024));

  props::Tally b;
  for (const char* f : {"theories/nat.smt2", "theories/lists_rev.smt2", "theories/take_drop.smt2",
                        "theories/lists_filter.smt2"})
    b.add(props::rewrite_soundness(f, 125, 5));
  report("(b) unsound merges", b);

  props::Tally c;
  for (const Timed* t : soe_runs) c.add(props::soe_replay(t->result, t->cfg));
  report("(c) unreplayable conjectures", c);

  props::Tally l;
  for (const Timed* t : lemma_runs) l.add(props::lemmas_hold(t->result));
  report("(d) lemma counterexamples", l);

  fs::path dir = fs::temp_directory_path() / "thex_acceptance";
  fs::create_directories(dir);
  const std::string in = oracle::corpus("theories/lists_filter.smt2");
  int c1 = cli({"explore", in, "--out", (dir / "run1.smt2").string()});
  int c2 = cli({"explore", in, "--out", (dir / "run2.smt2").string()});
  std::string a = oracle::read_file((dir / "run1.smt2").string());
  std::string bb = oracle::read_file((dir / "run2.smt2").string());
  bool same = c1 == kExitOk && c2 == kExitOk && a == bb && a == serialized(first_filter.result);
  ok = ok && same;
  d << "(e) consecutive runs " << (same ? "byte-identical" : "differ");
  return {ok, d.str()};
}

Outcome criterion7() {
  Theory base = oracle::load_theory("theories/lists_rev.smt2");
  auto a = parse_lemmas(base, kRevRev);
  auto b = parse_lemmas(base, "(assert (forall ((l1 (List T)) (l2 (List T))) (= (rev (++ l1 (rev l2))) (++ l2 (rev l1)))))");
  ExplorerConfig cfg;
  double ab = subsumption_ratio(a, b, base, cfg);

  // Replay: is rev (rev l) = l derivable from the definitions and B without induction?
  Theory replay = base;
  auto rules = theory_rules(replay);
  auto rb = compile_equations(replay.sig, b, RuleOrigin::Lemma, "b");
  rules.insert(rules.end(), rb.begin(), rb.end());
  bool derivable = check_no_induction(a[0].lhs, a[0].rhs, replay.sig, rules, cfg.saturation());
  bool consistent = (ab == 1.0) == derivable;

  auto a2 = parse_lemmas(base, "(assert (forall ((x (List T))) (= x (rev (rev x)))))");
  double s1 = subsumption_ratio(a, a2, base, cfg);
  double s2 = subsumption_ratio(a2, a, base, cfg);
  bool symmetric = s1 == 1.0 && s2 == 1.0;
  return {consistent && symmetric, "ratio=" + fmt(ab) + " derivable=" + (derivable ? "yes" : "no") +
                                       ", trivially equal sets (" + fmt(s1) + ", " + fmt(s2) + ")"};
}

Outcome criterion8() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(oracle::corpus("benchmarks")))
    if (e.path().extension() == ".smt2") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::size_t solved = 0;
  std::ostringstream failed;
  for (const auto& f : files) {
    Theory th = parse_theory(oracle::read_file(f.string()));
    auto t0 = Clock::now();
    auto r = prove_goals(th, with_timeout(300));
    bool ok = !r.stats.goals.empty() && since(t0) <= 300;
    for (const auto& g : r.stats.goals) ok = ok && g.proved;
    solved += ok;
    if (!ok) failed << " " << f.stem().string();
  }
  bool ok = files.size() == 12 && solved >= 9;
  std::string d = std::to_string(solved) + "/" + std::to_string(files.size()) + " solved";
  if (!failed.str().empty()) d += ", unsolved:" + failed.str();
  return {ok, d};
}

}  // namespace

int main() {
  const char* names[] = {"",
                         "running-example lemmas",
                         "lemma seeding",
                         "nat theory with three placeholders",
                         "auxiliary lemma chain",
                         "case-split lemma",
                         "property suites",
                         "knowledge metric",
                         "mini benchmark corpus"};
  bool all = true;
  auto emit = [&](int n, const Outcome& o) {
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " " << names[n] << " (" << o.detail
              << ")" << std::endl;
  };
  auto guarded = [&](int n, auto&& f) {
    try {
      emit(n, f());
    } catch (const std::exception& e) {
      emit(n, {false, std::string("exception: ") + e.what()});
    }
  };

  std::optional<Timed> filter, rev, nat3, fold, td, td_plain;
  guarded(1, [&] {
    filter = run_explore("theories/lists_filter.smt2", with_timeout(300));
    return criterion1(*filter);
  });
  guarded(2, [&] {
    rev = run_explore("theories/lists_rev.smt2", with_timeout(600));
    return criterion2(*rev);
  });
  guarded(3, [&] {
    ExplorerConfig cfg = with_timeout(300);
    cfg.ph_count = 3;
    nat3 = run_explore("theories/nat.smt2", cfg);
    return criterion3(*nat3);
  });
  guarded(4, [&] {
    fold = run_explore("benchmarks/fold_sum.smt2", with_timeout(600), true);
    return criterion4(*fold);
  });
  guarded(5, [&] {
    td = run_explore("benchmarks/take_drop.smt2", with_timeout(600), true);
    ExplorerConfig plain = with_timeout(600);
    plain.case_split = false;
    td_plain = run_explore("benchmarks/take_drop.smt2", plain, true);
    return criterion5(*td, *td_plain);
  });
  guarded(6, [&] {
    if (!filter || !rev || !nat3 || !fold || !td) return Outcome{false, "an earlier run did not complete"};
    return criterion6({&*filter, &*rev, &*nat3}, {&*filter, &*rev, &*nat3, &*fold, &*td}, *filter);
  });
  guarded(7, [&] { return criterion7(); });
  guarded(8, [&] { return criterion8(); });
  return all ? 0 : 1;
}
