#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>

#include "../support/oracles.hpp"
#include "thex/cli.hpp"

using namespace thex;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thex");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "thex_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("missing subcommand and bad flags are usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"explore"}).code == kExitUsage);
  CHECK(cli({"explore", oracle::corpus("theories/nat.smt2"), "--bogus"}).code == kExitUsage);
  CHECK(cli({"explore", oracle::corpus("theories/nat.smt2"), "--placeholders", "0"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("malformed input is a parse error") {
  auto bad = scratch("bad.smt2");
  write(bad, "(declare-datatype Nat ((zero) (succ (pred Nat)))");
  auto r = cli({"explore", bad.string()});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("parse error") != std::string::npos);
}

TEST_CASE("explore writes lemmas next to the input by default") {
  auto in = scratch("nat.smt2");
  fs::copy_file(oracle::corpus("theories/nat.smt2"), in, fs::copy_options::overwrite_existing);
  auto stats = scratch("nat.json");
  auto r = cli({"explore", in.string(), "--stats", stats.string()});
  CHECK(r.code == kExitOk);
  auto out = scratch("nat.lemmas.smt2");
  REQUIRE(fs::exists(out));
  std::string text = oracle::read_file(out.string());
  CHECK(text.find("(assert (forall ((n1 Nat) (n2 Nat)) (= (plus n1 n2) (plus n2 n1))))") != std::string::npos);
  auto j = nlohmann::json::parse(oracle::read_file(stats.string()));
  for (const char* key : {"phase_times", "lemmas", "conjectures", "goals", "events", "soe_aborts", "truncated"})
    CHECK(j.contains(key));
  CHECK(j["conjectures"]["proved"].get<std::size_t>() == j["lemmas"].size());
}

TEST_CASE("prove exits by goal outcome") {
  auto r = cli({"prove", oracle::corpus("benchmarks/rev_rev.smt2")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("PROVED ", 0) == 0);
  auto f = scratch("false.smt2");
  write(f, oracle::read_file(oracle::corpus("theories/lists_rev.smt2")) +
               "(prove (forall ((l (List T))) (= (rev l) l)))\n");
  auto bad = cli({"prove", f.string(), "-k", "1"});
  CHECK(bad.code == kExitGoalFailed);
  CHECK(bad.out.rfind("FAILED ", 0) == 0);
  CHECK(cli({"prove", oracle::corpus("theories/nat.smt2")}).code == kExitUsage);
}

TEST_CASE("a timeout exits with its own code") {
  auto r = cli({"explore", oracle::corpus("theories/lists_filter.smt2"), "--out", scratch("t.smt2").string(),
                "--timeout", "0.000001"});
  CHECK(r.code == kExitTimeout);
}

TEST_CASE("compare prints both ratios") {
  auto a = scratch("a.lemmas.smt2");
  write(a, "(assert (forall ((l (List T))) (= (rev (rev l)) l)))\n");
  auto r = cli({"compare", oracle::corpus("theories/lists_rev.smt2"), a.string(), a.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "ratio A<B: 1.000 ratio B<A: 1.000\n");
}

TEST_CASE("seed lemmas load from the seed directory and bad lines are skipped") {
  auto dir = scratch("seeds");
  fs::create_directories(dir);
  write(dir / "x.lemmas.smt2",
        "(assert (forall ((l (List T))) (= (++ l nil) l)))\n(assert (= (undefined) nil))\n");
  setenv("THESY_SEED_DIR", dir.string().c_str(), 1);
  auto r = cli({"explore", oracle::corpus("theories/lists_rev.smt2"), "--out", scratch("s.smt2").string(), "-k",
                "1"});
  unsetenv("THESY_SEED_DIR");
  CHECK(r.code == kExitOk);
  // The seed already covers the only level one lemma.
  CHECK(oracle::read_file(scratch("s.smt2").string()).empty());
}

TEST_CASE("trace logs levels and conjectures to stderr") {
  auto r = cli({"explore", oracle::corpus("theories/nat.smt2"), "--out", scratch("tr.smt2").string(), "--trace"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("level=1") != std::string::npos);
  CHECK(r.err.find("event=admitted") != std::string::npos);
  CHECK(r.err.find("case=") != std::string::npos);
}
