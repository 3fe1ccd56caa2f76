// Acceptance criteria. One PASS/FAIL line per criterion; the exit status is
// the number of failed criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"
#include "voila/encoder.hpp"
#include "voila/parser.hpp"
#include "voila/printer.hpp"

using namespace voila;
using namespace voila::testing;

namespace {

// Wall-clock limits, pinned.
constexpr double kGoldenSeconds = 1.0;
constexpr double kLockSeconds = 30.0;

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failed = 0;

void criterion(const std::string& name, const std::function<Outcome()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.ok) ++failed;
  std::printf("%s  %-66s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), s, o.detail.c_str());
  std::fflush(stdout);
}

double secondsOf(const std::function<void()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ivlcheck::MethodResult> verify(const Pipeline& p, std::int64_t lo = -8, std::int64_t hi = 8) {
  ivlcheck::DomainConfig dc = domainsFor(*p.program);
  dc.intLo = lo;
  dc.intHi = hi;
  return ivlcheck::verifyProgram(p.ivl, dc);
}

const ProcedureCandidate* candidateOf(const Pipeline& p, const std::string& name) {
  for (const auto& pc : p.candidate.procedures)
    if (pc.proc->name == name) return &pc;
  return nullptr;
}

bool hasError(const Diagnostics& ds, const std::string& code) {
  for (const auto& d : ds.items())
    if (d.severity == Severity::Error && d.code == code) return true;
  return false;
}

std::string verdicts(const std::vector<ivlcheck::MethodResult>& rs) {
  std::ostringstream o;
  for (const auto& r : rs) {
    o << r.method << "=" << ivlcheck::verdictName(r.verdict);
    if (!r.failures.empty()) o << "@" << r.failures[0].line;
    o << " ";
  }
  return o.str();
}

}  // namespace

int main() {
  criterion("running example encoding matches golden (< 1 s)", [] {
    std::string why;
    bool eq = false;
    double s = secondsOf([&] {
      Pipeline p = runFile("programs/lock.vl");
      if (!p.encoded) return;
      ivl::Program golden = ivl::parse(readFile(dataPath("golden/lock.vpr")));
      ivl::Program emitted = ivl::parse(emitProgram(p.candidate));
      eq = ivl::structurallyEqual(ivl::normalizeFreshNames(golden), ivl::normalizeFreshNames(emitted), &why);
    });
    return Outcome{eq && s < kGoldenSeconds, why.empty() ? "structurally equal" : why};
  });

  criterion("running example verifies, 20 inferred / 2 annotated (< 30 s)", [] {
    std::vector<ivlcheck::MethodResult> rs;
    const ProcedureCandidate* pc = nullptr;
    Pipeline p;
    double s = secondsOf([&] {
      p = runFile("programs/lock.vl");
      if (p.encoded) rs = verify(p);
      pc = candidateOf(p, "lock");
    });
    const auto* r = findResult(rs, "lock");
    bool ok = r && r->verdict == ivlcheck::Verdict::Pass && pc && pc->inferredSteps == 20 &&
              pc->annotatedSteps == 2 && s < kLockSeconds;
    std::string d = verdicts(rs);
    if (pc) d += "steps " + std::to_string(pc->inferredSteps) + "/" + std::to_string(pc->annotatedSteps);
    return Outcome{ok, d};
  });

  criterion("faulty lock variants rejected at the faulty line (4/4)", [] {
    std::pair<const char*, int> vs[] = {{"programs/lock_badaction.vl", 19},
                                        {"programs/lock_badcode.vl", 20},
                                        {"programs/lock_badinv.vl", 20},
                                        {"programs/lock_badpost.vl", 16}};
    int rejected = 0;
    std::string d;
    for (auto [f, line] : vs) {
      Pipeline p = runFile(f);
      if (!p.encoded) continue;
      auto rs = verify(p);
      const auto* r = findResult(rs, "lock");
      if (r && r->verdict == ivlcheck::Verdict::Fail && !r->failures.empty() && r->failures[0].line == line)
        ++rejected;
      d += verdicts(rs);
    }
    return Outcome{rejected == 4, std::to_string(rejected) + "/4 " + d};
  });

  criterion("nested CAPLock verifies; bad level rejected by the level check", [] {
    Pipeline p = runFile("programs/caplock.vl");
    auto rs = p.encoded ? verify(p) : std::vector<ivlcheck::MethodResult>{};
    bool ok = rs.size() == 2;
    for (const auto& r : rs) ok = ok && r.verdict == ivlcheck::Verdict::Pass;
    Pipeline bad = runFile("programs/caplock_badlevel.vl");
    bool rejected = !bad.encoded && hasError(bad.diags, "level");
    return Outcome{ok && rejected, verdicts(rs) + (rejected ? "badlevel=level-error" : "badlevel=accepted")};
  });

  criterion("closure check agrees with brute force (1000 random regions)", [] {
    Rng rng(1001);
    int agree = 0;
    for (int i = 0; i < 1000; ++i) {
      TransitionSystem ts = randomTransitionSystem(rng);
      AnalysisConfig cfg;
      cfg.stateDomains["R"] = stateDomain(ts);
      ParseResult pr = parseProgram(regionSource(ts));
      if (!pr.ok()) continue;
      AnalysisResult ar = analyze(std::move(pr.program), cfg);
      bool reported = hasError(ar.diags, "closure");
      if (reported == !oracle::closure(ts).closed) ++agree;
    }
    return Outcome{agree == 1000, std::to_string(agree) + "/1000 agree"};
  });

  criterion("stabilization: extensive, idempotent, encoding = oracle (500)", [] {
    Rng rng(5003);
    TsOptions opt;
    opt.closedChain = true;
    int good = 0;
    std::string first;
    for (int i = 0; i < 500; ++i) {
      TransitionSystem ts = randomTransitionSystem(rng, opt);
      StabilizeCase c = randomStabilizeCase(rng, ts);
      RegionFixture fx = regionFixture(ts, c);
      std::vector<Value> start;
      for (int s : c.start) start.push_back(Value::integer(s));
      auto once = stabilizeStates(fx.config, start);
      std::set<int> onceSet = toInts(once);
      bool extensive = true;
      for (int s : c.start) extensive = extensive && onceSet.count(s);
      bool idempotent = stabilizeStates(fx.config, once) == once;
      std::set<int> want = oracle::stabilize(ts, c, c.start);
      auto enc = ivlStabilize(ts, c);
      bool ok = extensive && idempotent && onceSet == want && enc && *enc == want;
      if (ok)
        ++good;
      else if (first.empty())
        first = "first failure at case " + std::to_string(i);
    }
    return Outcome{good == 500, std::to_string(good) + "/500 " + first};
  });

  criterion("counter client verifies; missing equality fails (ints 0..8)", [] {
    AnalysisConfig cfg;
    cfg.intLo = 0;
    cfg.intHi = 8;
    Pipeline p = runFile("programs/counter_client.vl", cfg);
    auto rs = p.encoded ? verify(p, 0, 8) : std::vector<ivlcheck::MethodResult>{};
    bool ok = !rs.empty();
    for (const auto& r : rs) ok = ok && r.verdict == ivlcheck::Verdict::Pass;
    Pipeline bad = runFile("programs/counter_client_noeq.vl", cfg);
    auto brs = bad.encoded ? verify(bad, 0, 8) : std::vector<ivlcheck::MethodResult>{};
    const auto* client = findResult(brs, "client");
    bool rejected = client && client->verdict == ivlcheck::Verdict::Fail;
    return Outcome{ok && rejected, verdicts(rs) + "| " + verdicts(brs)};
  });

  criterion("printer round-trips 200 random programs; emission repeatable", [] {
    Rng rng(2024);
    int trips = 0;
    for (int i = 0; i < 200; ++i) {
      Program p = randomProgram(rng);
      ParseResult r = parseProgram(prettyPrint(p));
      if (r.ok() && equalModuloSpans(p, r.program)) ++trips;
    }
    bool same = true;
    for (const char* f : {"programs/lock.vl", "programs/caplock.vl", "programs/counter_client.vl"}) {
      Pipeline a = runFile(f), b = runFile(f);
      same = same && a.encoded && b.encoded && emitProgram(a.candidate) == emitProgram(b.candidate);
    }
    return Outcome{trips == 200 && same,
                   std::to_string(trips) + "/200 round-trips, emission " + (same ? "identical" : "differs")};
  });

  std::printf("%d criteria failed\n", failed);
  return failed;
}
