#include <doctest.h>

#include <algorithm>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"
#include "voila/parser.hpp"
#include "voila/regions.hpp"

using namespace voila;
using namespace voila::testing;

namespace {

struct Fixture {
  std::shared_ptr<const ResolvedProgram> rp;

  explicit Fixture(const std::string& src, const AnalysisConfig& cfg = {}) {
    ParseResult pr = parseProgram(src);
    REQUIRE(pr.ok());
    rp = analyze(std::move(pr.program), cfg).program;
    REQUIRE(rp);
  }

  RegionConfig config(const std::string& region, ValueEnv params, std::vector<int> domain) const {
    RegionConfig c;
    c.decl = rp->program.findRegion(region);
    REQUIRE(c.decl);
    c.params = std::move(params);
    for (int d : domain) c.domain.push_back(Value::integer(d));
    return c;
  }
};

Value I(int v) { return Value::integer(v); }

GuardHolding held(const std::string& g, std::int64_t region = 1) {
  GuardHolding h;
  h.addUnchecked({g, Value::ref(region), {}, GuardKind::Unique});
  return h;
}

std::set<int> ints(const std::vector<Value>& vs) { return toInts(vs); }

const char* kTwoStep = R"(
struct cell { int val; }
region R(id r, cell x)
  guards { unique G; }
  interpretation { x.val |-> ?v }
  state { v }
  actions { G: 0 ~> 1; G: 1 ~> 2; }
region Still(id r, cell x)
  interpretation { x.val |-> ?v }
  state { v }
)";

const char* kSum = R"(
struct cell { int val; }
region Cnt(id r, cell x)
  guards { unique G; }
  interpretation { x.val |-> ?v }
  state { v }
  actions { ?n, ?m | n < m | G: n ~> m; }
region Sum(id r, id r1, id r2, cell x1, cell x2)
  interpretation { Cnt(r1, x1, ?a) && Cnt(r2, x2, ?b) }
  state { a + b }
)";

}  // namespace

TEST_CASE("action permission") {
  Fixture f(readFile(dataPath("programs/lock.vl")));
  RegionConfig lock = f.config("Lock", {{"r", Value::ref(1)}, {"x", Value::ref(2)}}, {0, 1});
  CHECK(actionPermitted(lock, I(0), I(1), held("G")));
  CHECK_FALSE(actionPermitted(lock, I(0), I(1), {}));
  CHECK_FALSE(actionPermitted(lock, I(0), I(1), held("G", 7)));
  for (int s : {0, 1}) CHECK(actionPermitted(lock, I(s), I(s), {}));
}

TEST_CASE("interference permission") {
  Fixture f(readFile(dataPath("programs/lock.vl")));
  RegionConfig lock = f.config("Lock", {{"r", Value::ref(1)}, {"x", Value::ref(2)}}, {0, 1, 2});
  lock.local = held("G");
  CHECK_FALSE(interferencePermitted(lock, I(0), I(1)));
  lock.local = {};
  CHECK(interferencePermitted(lock, I(0), I(1)));
  lock.pending = true;
  lock.updateDomain = {I(0), I(1)};
  CHECK_FALSE(interferencePermitted(lock, I(1), I(2)));
  CHECK(interferencePermitted(lock, I(1), I(0)));
}

TEST_CASE("stabilization of the lock") {
  Fixture f(readFile(dataPath("programs/lock.vl")));
  RegionConfig lock = f.config("Lock", {{"r", Value::ref(1)}, {"x", Value::ref(2)}}, {0, 1});
  lock.local = held("G");
  CHECK(ints(stabilizeStates(lock, {I(0)})) == std::set<int>{0});
  lock.local = {};
  CHECK(ints(stabilizeStates(lock, {I(0)})) == std::set<int>{0, 1});
  CHECK(stabilizeStates(lock, {}).empty());
}

TEST_CASE("transitive closure checking") {
  Fixture lockF(readFile(dataPath("programs/lock.vl")));
  CHECK(checkTransitiveClosure(*lockF.rp->program.findRegion("Lock"), {I(0), I(1)}).closed);

  Fixture f(kTwoStep);
  ClosureResult c = checkTransitiveClosure(*f.rp->program.findRegion("R"), {I(0), I(1), I(2)});
  CHECK_FALSE(c.closed);
  REQUIRE(c.counterexample);
  CHECK((*c.counterexample)[0] == I(0));
  CHECK((*c.counterexample)[1] == I(1));
  CHECK((*c.counterexample)[2] == I(2));
  CHECK(c.guard == "G");

  CHECK(checkTransitiveClosure(*f.rp->program.findRegion("Still"), {I(0), I(1), I(2)}).closed);

  std::vector<Value> big;
  for (int i = 0; i < 65; ++i) big.push_back(I(i));
  CHECK(checkTransitiveClosure(*f.rp->program.findRegion("R"), big).tooLarge);
}

TEST_CASE("interference inference") {
  Fixture f(readFile(dataPath("programs/lock.vl")));
  RegionConfig lock = f.config("Lock", {{"r", Value::ref(1)}, {"x", Value::ref(2)}}, {0, 1});
  lock.local = held("G");
  CHECK(ints(inferInterference(lock, I(0))) == std::set<int>{0});
  lock.local = {};
  CHECK(ints(inferInterference(lock, I(1))) == std::set<int>{0, 1});

  Fixture g(kTwoStep);
  RegionConfig still = g.config("Still", {{"r", Value::ref(1)}, {"x", Value::ref(2)}}, {0, 1, 2});
  CHECK(ints(inferInterference(still, I(2))) == std::set<int>{2});
}

TEST_CASE("linking interference through a sum state") {
  Fixture f(kSum);
  ValueEnv ps{{"r", Value::ref(1)}, {"r1", Value::ref(2)}, {"r2", Value::ref(3)}, {"x1", Value::ref(4)},
              {"x2", Value::ref(5)}};
  RegionConfig sum = f.config("Sum", ps, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  RegionConfig c1 = f.config("Cnt", {{"r", Value::ref(2)}, {"x", Value::ref(4)}}, {0, 1, 2, 3, 4, 5});
  RegionConfig c2 = f.config("Cnt", {{"r", Value::ref(3)}, {"x", Value::ref(5)}}, {0, 1, 2, 3, 4, 5});
  LinkResult lr = linkInterference(sum, {I(5)}, {c1, c2});
  std::set<std::pair<int, int>> got;
  for (const auto& t : lr.tuples) got.insert({static_cast<int>(t[0].i), static_cast<int>(t[1].i)});
  std::set<std::pair<int, int>> want;
  for (int m = 0; m <= 5; ++m) want.insert({m, 5 - m});
  CHECK(got == want);
  CHECK_FALSE(lr.product);

  std::vector<Value> all;
  for (int i = 0; i <= 10; ++i) all.push_back(I(i));
  LinkResult full = linkInterference(sum, all, {c1, c2});
  CHECK(full.product);
  CHECK(full.projections[0] == c1.domain);
  CHECK(full.projections[1] == c2.domain);
}

TEST_CASE("linking interference of the nested lock of CAPLock") {
  Fixture f(readFile(dataPath("programs/caplock.vl")));
  ValueEnv ps{{"a", Value::ref(1)}, {"lvl", I(1)}, {"r", Value::ref(2)}, {"x", Value::ref(3)}};
  RegionConfig cap = f.config("CAPLock", ps, {0, 1});
  RegionConfig lock = f.config("Lock", {{"r", Value::ref(2)}, {"lvl", I(0)}, {"x", Value::ref(3)}}, {0, 1});
  for (std::vector<int> x : {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 1}}) {
    std::vector<Value> xs;
    for (int v : x) xs.push_back(I(v));
    LinkResult lr = linkInterference(cap, xs, {lock});
    CHECK(lr.projections[0] == xs);
  }
  CHECK(nestedStateBinders(*cap.decl) == std::vector<std::pair<std::string, std::string>>{{"v", "Lock"}});
}

TEST_CASE("library stabilization matches the oracle on random systems") {
  Rng rng(23);
  for (int i = 0; i < 150; ++i) {
    TransitionSystem ts = randomTransitionSystem(rng);
    StabilizeCase c = randomStabilizeCase(rng, ts);
    RegionFixture fx = regionFixture(ts, c);
    std::vector<Value> start;
    for (int s : c.start) start.push_back(I(s));
    CAPTURE(regionSource(ts));
    CHECK(ints(stabilizeStates(fx.config, start)) == oracle::stabilize(ts, c, c.start));
    for (int s = 0; s < ts.states; ++s)
      for (int t = 0; t < ts.states; ++t)
        CHECK(interferencePermitted(fx.config, I(s), I(t)) == oracle::interferencePermitted(ts, c, s, t));
    ClosureResult cr = checkTransitiveClosure(*fx.config.decl, fx.config.domain);
    CHECK(cr.closed == oracle::closure(ts).closed);
  }
}

TEST_CASE("region properties") {
  Rng rng(29);
  TsOptions opt;
  opt.closedChain = true;
  for (int i = 0; i < 150; ++i) {
    TransitionSystem ts = randomTransitionSystem(rng, opt);
    StabilizeCase c = randomStabilizeCase(rng, ts);
    RegionFixture fx = regionFixture(ts, c);
    const RegionConfig& rc = fx.config;
    CAPTURE(regionSource(ts));
    for (const auto& s : rc.domain) {
      if (!rc.pending || std::find(rc.updateDomain.begin(), rc.updateDomain.end(), s) != rc.updateDomain.end())
        CHECK(interferencePermitted(rc, s, s));
      CHECK(actionPermitted(rc, s, s, {}));
      if (!rc.pending) CHECK(inferInterference(rc, s) == stabilizeStates(rc, {s}));
    }
    std::vector<Value> start;
    for (int s : c.start) start.push_back(I(s));
    auto once = stabilizeStates(rc, start);
    std::set<int> onceSet = ints(once);
    for (int s : c.start) CHECK(onceSet.count(s));
    CHECK(stabilizeStates(rc, once) == once);

    // Holding an additional unique guard never enlarges the result.
    for (std::size_t g = 0; g < ts.guards.size(); ++g) {
      if (ts.guards[g].kind != GuardKind::Unique || c.held[g] != Rational(0)) continue;
      RegionConfig more = rc;
      more.local.addUnchecked({ts.guards[g].name, Value::ref(1), {}, GuardKind::Unique});
      std::set<int> shrunk = ints(stabilizeStates(more, start));
      for (int s : shrunk) CHECK(onceSet.count(s));
    }
  }
}
