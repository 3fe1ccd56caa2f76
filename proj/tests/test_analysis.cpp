#include <doctest.h>

#include <regex>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"
#include "voila/analysis.hpp"
#include "voila/parser.hpp"
#include "voila/printer.hpp"

using namespace voila;
using namespace voila::testing;

namespace {

AnalysisResult analyzeText(const std::string& src, const AnalysisConfig& cfg = {}) {
  ParseResult pr = parseProgram(src);
  for (const auto& d : pr.diags.items()) INFO(d.toText());
  REQUIRE(pr.ok());
  return analyze(std::move(pr.program), cfg);
}

bool hasDiag(const Diagnostics& ds, const std::string& code, const std::string& fragment) {
  for (const auto& d : ds.items())
    if (d.severity == Severity::Error && d.code == code && d.message.find(fragment) != std::string::npos) return true;
  return false;
}

std::string allText(const Diagnostics& ds) {
  std::string s;
  for (const auto& d : ds.items()) s += d.toText() + "\n";
  return s;
}

std::string lockWithout(const std::string& drop) {
  std::string src = readFile(dataPath("programs/lock.vl"));
  auto at = src.find(drop);
  REQUIRE(at != std::string::npos);
  return src.erase(at, drop.size());
}

}  // namespace

TEST_CASE("running example resolves with an int state") {
  AnalysisResult ar = analyzeText(readFile(dataPath("programs/lock.vl")));
  INFO(allText(ar.diags));
  REQUIRE(ar.ok());
  const RegionInfo* lock = ar.program->region("Lock");
  REQUIRE(lock);
  CHECK(lock->stateType == Type::integer());
  CHECK(lock->vars.at("v") == Type::integer());
  CHECK(lock->domainFromLiterals);
  CHECK(toInts(lock->domain) == std::set<int>{0, 1});
  const CallableInfo* l = ar.program->callable("lock");
  REQUIRE(l);
  CHECK(l->interferenceVars.count("s"));
  CHECK(l->vars.at("s") == Type::integer());
  CHECK(l->vars.at("b") == Type::boolean());
}

TEST_CASE("unbound state name") {
  AnalysisResult ar = analyzeText("region R(id r)\n  interpretation { true }\n  state { z }\n");
  CHECK(hasDiag(ar.diags, "resolve", "unbound name z"));
}

TEST_CASE("nested region state is typed through its binder") {
  AnalysisResult ar = analyzeText(readFile(dataPath("programs/caplock.vl")));
  INFO(allText(ar.diags));
  REQUIRE(ar.ok());
  const RegionInfo* cap = ar.program->region("CAPLock");
  REQUIRE(cap);
  CHECK(cap->vars.at("v") == Type::integer());
  CHECK(cap->stateType == Type::integer());
  CHECK(cap->nested == std::vector<std::string>{"Lock"});
  CHECK(cap->levelParam == std::optional<std::size_t>(1));
}

TEST_CASE("atomicity classification") {
  AnalysisResult ar = analyzeText(readFile(dataPath("programs/lock.vl")));
  REQUIRE(ar.ok());
  const ResolvedProgram& rp = *ar.program;
  const StmtList& body = *rp.program.findProcedure("lock")->body;
  const Stmt& make = *body[1];
  CHECK(classifyAtomicity(rp, make) == Atomicity::Atomic);
  const Stmt& loop = *make.body[0];
  CHECK(loop.kind == StmtKind::DoWhile);
  CHECK(classifyAtomicity(rp, loop) == Atomicity::NonAtomic);
  const Stmt& update = *loop.body[0];
  CHECK(classifyAtomicity(rp, update) == Atomicity::Atomic);
  const Stmt& cas = *update.body[0];
  CHECK(cas.kind == StmtKind::Call);
  CHECK(classifyAtomicity(rp, cas) == Atomicity::Atomic);
  // Every statement received exactly one kind.
  CHECK(rp.atomicity.count(&cas));
  CHECK(rp.atomicity.count(&loop));
  // A declaration without initializer binds no value and is ghost-like.
  CHECK(classifyAtomicity(rp, *body[0]) == Atomicity::Atomic);
}

TEST_CASE("non-atomic statement inside an atomic context") {
  std::string src = readFile(dataPath("programs/lock.vl"));
  src += R"(
procedure bad(id r, cell x)
  requires Lock(r, x, _);
  ensures Lock(r, x, _);
{
  open_region using Lock(r, x) {
    while (true) { }
  }
}
)";
  AnalysisResult ar = analyzeText(src);
  CHECK(hasDiag(ar.diags, "atomicity", "non-atomic statement in atomic context"));
}

TEST_CASE("closure of the lock protocol") {
  AnalysisResult ar = analyzeText(readFile(dataPath("programs/lock.vl")));
  REQUIRE(ar.ok());
  const RegionDecl& lock = *ar.program->program.findRegion("Lock");
  CHECK(checkRegionWellformed(*ar.program, lock).empty());
}

TEST_CASE("non-closed protocol reports its counterexample") {
  const char* src = R"(
struct cell { int val; }
region R(id r, cell x)
  guards { unique G; }
  interpretation { x.val |-> ?v }
  state { v }
  actions { G: 0 ~> 1; G: 1 ~> 2; }
)";
  AnalysisResult ar = analyzeText(src);
  CHECK(hasDiag(ar.diags, "closure", "counterexample (0, 1, 2)"));
  AnalysisConfig cfg;
  cfg.stateDomains["R"] = {Value::integer(0), Value::integer(1), Value::integer(2)};
  CHECK(hasDiag(analyzeText(src, cfg).diags, "closure", "not transitively closed"));
}

TEST_CASE("strict order actions are closed") {
  AnalysisResult ar = analyzeText(readFile(dataPath("programs/counter_client.vl")));
  CHECK_FALSE(hasDiag(ar.diags, "closure", ""));
}

TEST_CASE("undeclared guard and self-framing") {
  AnalysisResult ar = analyzeText(R"(
struct cell { int val; }
region R(id r, cell x)
  guards { unique G; }
  interpretation { x.val == 0 && x.val |-> ?v }
  state { v }
  actions { H: 0 ~> 1; }
)");
  CHECK(hasDiag(ar.diags, "region", "undeclared guard H"));
  CHECK(hasDiag(ar.diags, "region", "not self-framing"));
}

TEST_CASE("procedure signatures") {
  SUBCASE("interference binds the precondition state") {
    AnalysisResult ar = analyzeText(readFile(dataPath("programs/lock.vl")));
    REQUIRE(ar.ok());
    CHECK(checkProcedureSignature(*ar.program, *ar.program->program.findProcedure("lock")).empty());
  }
  SUBCASE("missing interference clause") {
    AnalysisResult ar = analyzeText(lockWithout("  interference ?s in Set(0, 1);\n"));
    CHECK(hasDiag(ar.diags, "resolve", "unbound region state s"));
  }
  SUBCASE("non-atomic acquire needs none") {
    AnalysisResult ar = analyzeText(readFile(dataPath("programs/caplock.vl")));
    REQUIRE(ar.ok());
    CHECK(checkProcedureSignature(*ar.program, *ar.program->program.findProcedure("acquire")).empty());
  }
  SUBCASE("interference on a non-atomic procedure") {
    std::string src = readFile(dataPath("programs/lock.vl"));
    src += "\nprocedure na(id r, cell x)\n  interference ?t in Set(0);\n  requires Lock(r, x, t);\n{\n}\n";
    AnalysisResult ar = analyzeText(src);
    CHECK(hasDiag(ar.diags, "signature", "interference clause on non-atomic procedure na"));
  }
}

TEST_CASE("duplicate declarations") {
  AnalysisResult ar = analyzeText("procedure p() {}\nprocedure p() {}\n");
  CHECK(hasDiag(ar.diags, "resolve", "duplicate declaration"));
}

TEST_CASE("type errors") {
  AnalysisResult ar = analyzeText("procedure p() { int a := true; }");
  CHECK_FALSE(ar.ok());
  ar = analyzeText("procedure p(int a) { bool b := a + 1; }");
  CHECK_FALSE(ar.ok());
}

TEST_CASE("analysis is idempotent") {
  for (const char* f : {"programs/lock.vl", "programs/caplock.vl", "programs/counter_client.vl",
                        "programs/caplock_badlevel.vl"}) {
    CAPTURE(f);
    std::string src = readFile(dataPath(f));
    AnalysisResult a = analyzeText(src);
    REQUIRE(a.program);
    // Analyze the already resolved program again.
    AnalysisResult b = analyze(a.program->program, {});
    CHECK(allText(a.diags) == allText(b.diags));
    REQUIRE(b.program);
    CHECK(a.program->regions.size() == b.program->regions.size());
    for (const auto& [n, r] : a.program->regions) {
      CHECK(r.domain == b.program->regions.at(n).domain);
      CHECK(r.stateType == b.program->regions.at(n).stateType);
    }
    CHECK(a.program->atomicity.size() == b.program->atomicity.size());
    CHECK(prettyPrint(a.program->program) == prettyPrint(b.program->program));
  }
}

TEST_CASE("closure verdict agrees with the brute-force oracle") {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    TransitionSystem ts = randomTransitionSystem(rng);
    AnalysisConfig cfg;
    cfg.stateDomains["R"] = stateDomain(ts);
    AnalysisResult ar = analyzeText(regionSource(ts), cfg);
    oracle::Closure want = oracle::closure(ts);
    bool reported = hasDiag(ar.diags, "closure", "");
    CAPTURE(regionSource(ts));
    REQUIRE(reported == !want.closed);
    if (reported) {
      // The reported triple is a genuine violation for the named guard.
      std::smatch m;
      std::string text = allText(ar.diags);
      REQUIRE(std::regex_search(text, m, std::regex(R"(guard G(\d+) .*counterexample \((\d+), (\d+), (\d+)\))")));
      CHECK(oracle::violates(ts, std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4])));
    }
  }
}
