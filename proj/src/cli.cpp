#include "thex/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "thex/explorer.hpp"

namespace thex {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lemma files from THESY_SEED_DIR, one assertion per line. Lines that do not
// parse against this theory are skipped.
std::size_t load_seeds(Theory& th, std::ostream& err) {
  const char* dir = std::getenv("THESY_SEED_DIR");
  if (!dir || !*dir) return 0;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    err << "warning: THESY_SEED_DIR " << dir << " is not a directory\n";
    return 0;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 12 && name.ends_with(".lemmas.smt2")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t n = 0;
  for (const auto& f : files) {
    std::istringstream in(read_file(f.string()));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        parse_into(th, line);
        ++n;
      } catch (const std::exception&) {
      }
    }
  }
  return n;
}

ordered_json stats_json(const ExploreResult& r) {
  const auto& s = r.stats;
  ordered_json j;
  j["phase_times"] = {{"generation", s.phase_times.generation},
                      {"inference", s.phase_times.inference},
                      {"screening", s.phase_times.screening},
                      {"proving", s.phase_times.proving}};
  ordered_json lemmas = ordered_json::array();
  for (const auto& l : r.lemmas) lemmas.push_back(equation_to_string(r.theory.sig, l.equation));
  j["lemmas"] = lemmas;
  j["conjectures"] = {{"emitted", s.conjectures.emitted},
                      {"screened", s.conjectures.screened},
                      {"proved", s.conjectures.proved},
                      {"failed", s.conjectures.failed},
                      {"retried", s.conjectures.retried}};
  ordered_json goals = ordered_json::array();
  for (const auto& g : s.goals)
    goals.push_back({{"goal", g.text}, {"proved", g.proved}, {"attempts", g.attempts}, {"seconds", g.seconds}});
  j["goals"] = goals;
  ordered_json events = ordered_json::array();
  for (const auto& e : s.events) events.push_back({{"kind", event_name(e.kind)}, {"level", e.level}, {"text", e.text}});
  j["events"] = events;
  j["soe_aborts"] = s.soe_aborts;
  j["truncated"] = s.truncated;
  return j;
}

std::string default_out(const std::string& input) {
  fs::path p(input);
  std::string stem = p.filename().string();
  if (stem.ends_with(".smt2")) stem.resize(stem.size() - 5);
  return (p.parent_path() / (stem + ".lemmas.smt2")).string();
}

std::string ratio_str(double x) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << x;
  return ss.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"thex: theory exploration for algebraic datatypes"};
  app.require_subcommand(1);
  ExplorerConfig cfg;
  std::string stats_path, out_path;
  bool trace = false;
  int placeholders = cfg.ph_count;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-k,--term-depth", cfg.term_depth, "enumeration depth")->capture_default_str();
    sub->add_option("-d,--rw-depth", cfg.rw_depth, "rewrite iterations per saturation")->capture_default_str();
    sub->add_option("-c,--example-depth", cfg.example_depth, "symbolic example depth")->capture_default_str();
    sub->add_option("--split-depth", cfg.split_depth, "nested case split depth")->capture_default_str();
    sub->add_option("--placeholders", placeholders, "placeholders per sort")->capture_default_str();
    sub->add_option("--timeout", cfg.timeout, "seconds, 0 for none")->capture_default_str();
    sub->add_flag("--no-case-split", [&](std::int64_t) { cfg.case_split = false; }, "disable case splitting");
    sub->add_option("--node-cap", cfg.node_cap, "e-node cap per saturation")->capture_default_str();
    sub->add_option("--stats", stats_path, "write JSON stats here");
    sub->add_flag("--trace", trace, "log conjectures and proof cases to stderr");
  };

  std::string input;
  auto* ex = app.add_subcommand("explore", "discover lemmas");
  ex->add_option("input", input, "theory file")->required()->check(CLI::ExistingFile);
  ex->add_option("--out", out_path, "lemma file (default <input>.lemmas.smt2)");
  add_common(ex);

  auto* pr = app.add_subcommand("prove", "prove the goals of a file");
  pr->add_option("input", input, "theory file with goals")->required()->check(CLI::ExistingFile);
  add_common(pr);

  std::string base_path, a_path, b_path;
  auto* cmp = app.add_subcommand("compare", "subsumption ratios of two lemma files");
  cmp->add_option("base", base_path, "base theory")->required()->check(CLI::ExistingFile);
  cmp->add_option("a", a_path, "lemma file A")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", b_path, "lemma file B")->required()->check(CLI::ExistingFile);
  add_common(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int rc = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (cfg.term_depth < 0 || cfg.rw_depth < 0 || cfg.example_depth < 0 || cfg.split_depth < 0 || placeholders < 1) {
    err << "error: depths must be non-negative and --placeholders at least 1\n";
    return kExitUsage;
  }
  cfg.ph_count = placeholders;
  if (trace) {
    cfg.trace = &err;
    cfg.diag = &err;
  }

  try {
    if (*cmp) {
      Theory base = parse_theory(read_file(base_path));
      auto a = parse_lemmas(base, read_file(a_path));
      auto b = parse_lemmas(base, read_file(b_path));
      double ab = subsumption_ratio(a, b, base, cfg);
      double ba = subsumption_ratio(b, a, base, cfg);
      out << "ratio A<B: " << ratio_str(ab) << " ratio B<A: " << ratio_str(ba) << "\n";
      return kExitOk;
    }

    Theory th = parse_theory(read_file(input));
    load_seeds(th, err);

    if (*ex) {
      ExploreResult r = explore(th, cfg);
      std::string path = out_path.empty() ? default_out(input) : out_path;
      std::ofstream f(path, std::ios::binary);
      if (!f) {
        err << "error: cannot write " << path << "\n";
        return kExitUsage;
      }
      f << serialize_lemmas(r.theory.sig, r.lemma_equations());
      if (!stats_path.empty()) std::ofstream(stats_path) << stats_json(r).dump(2) << "\n";
      if (r.stats.truncated) {
        err << "timeout: exploration truncated after " << r.lemmas.size() << " lemmas\n";
        return kExitTimeout;
      }
      return kExitOk;
    }

    if (th.goals.empty()) {
      err << "error: no goals in " << input << "\n";
      return kExitUsage;
    }
    ExploreResult r = prove_goals(th, cfg);
    bool all = true;
    for (const auto& g : r.stats.goals) {
      out << (g.proved ? "PROVED " : "FAILED ") << g.text << "\n";
      all = all && g.proved;
    }
    if (!stats_path.empty()) std::ofstream(stats_path) << stats_json(r).dump(2) << "\n";
    if (all) return kExitOk;
    return r.stats.truncated ? kExitTimeout : kExitGoalFailed;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SignatureError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const RuleError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace thex
