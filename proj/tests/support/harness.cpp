#include "support/harness.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "voila/encoder.hpp"
#include "voila/parser.hpp"

#ifndef VOILA_TEST_DATA
#error "VOILA_TEST_DATA must name the tests directory"
#endif

namespace voila::testing {

std::string dataPath(const std::string& rel) { return std::string(VOILA_TEST_DATA) + "/" + rel; }

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Pipeline runPipeline(const std::string& source, const AnalysisConfig& cfg) {
  Pipeline out;
  ParseResult pr = parseProgram(source);
  out.diags.append(pr.diags);
  if (!pr.ok()) return out;
  AnalysisResult ar = analyze(std::move(pr.program), cfg);
  out.diags.append(ar.diags);
  out.program = ar.program;
  if (!ar.ok()) return out;
  ExpandResult ex = expand(ar.program);
  out.diags.append(ex.diags);
  out.candidate = std::move(ex.candidate);
  if (out.diags.hasErrors()) return out;
  out.ivl = encode(out.candidate);
  out.encoded = true;
  return out;
}

Pipeline runFile(const std::string& rel, const AnalysisConfig& cfg) {
  return runPipeline(readFile(dataPath(rel)), cfg);
}

ivlcheck::DomainConfig domainsFor(const ResolvedProgram& rp) {
  ivlcheck::DomainConfig d;
  d.intLo = rp.config.intLo;
  d.intHi = rp.config.intHi;
  for (const auto& [n, r] : rp.regions) d.regionDomains[n] = r.domain;
  return d;
}

const ivlcheck::MethodResult* findResult(const std::vector<ivlcheck::MethodResult>& rs, const std::string& m) {
  for (const auto& r : rs)
    if (r.method == m) return &r;
  return nullptr;
}

namespace {

std::shared_ptr<const ResolvedProgram> analyzeRegion(const TransitionSystem& ts) {
  ParseResult pr = parseProgram(regionSource(ts));
  if (!pr.ok()) throw std::runtime_error("generated region does not parse:\n" + regionSource(ts));
  AnalysisConfig cfg;
  cfg.stateDomains["R"] = stateDomain(ts);
  // Closure diagnostics are expected for open systems; the resolved program
  // is still complete.
  AnalysisResult ar = analyze(std::move(pr.program), cfg);
  if (!ar.program) throw std::runtime_error("generated region does not resolve");
  return ar.program;
}

ivl::SPtr stmt(ivl::SK kind, ivl::EPtr e) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = kind;
  s->expr = std::move(e);
  return s;
}

ivl::EPtr intSet(const std::set<int>& xs) {
  std::vector<ivl::EPtr> es;
  for (int x : xs) es.push_back(ivl::e::intLit(x));
  return ivl::e::setLit(ivl::Type::integer(), es);
}

}  // namespace

RegionFixture regionFixture(const TransitionSystem& ts, const StabilizeCase& c) {
  RegionFixture f;
  f.program = analyzeRegion(ts);
  RegionConfig& rc = f.config;
  rc.decl = f.program->program.findRegion("R");
  rc.params = {{"r", Value::ref(1)}, {"x", Value::ref(2)}};
  rc.domain = stateDomain(ts);
  rc.pending = c.pending;
  for (int a : c.updateDomain) rc.updateDomain.push_back(Value::integer(a));
  for (std::size_t g = 0; g < ts.guards.size(); ++g) {
    if (c.held[g] == Rational(0)) continue;
    GuardTerm t;
    t.name = ts.guards[g].name;
    t.region = Value::ref(1);
    t.kind = ts.guards[g].kind;
    if (t.kind == GuardKind::Fractional) t.args.push_back(Value::frac(c.held[g]));
    rc.local.addUnchecked(t);
  }
  return f;
}

std::optional<std::set<int>> ivlStabilize(const TransitionSystem& ts, const StabilizeCase& c, std::string* why) {
  using namespace ivl;
  auto rp = analyzeRegion(ts);
  ExpandResult ex = expand(rp);
  ivl::Program p = encode(ex.candidate);

  MethodEncoder enc(*rp, "probe");
  RegionInstance inst{"R", {mk::var("r"), mk::var("x")}};
  enc.setInstances({inst});
  EPtr r = e::var("r");
  EPtr state = enc.regionState(inst);

  MethodDecl m;
  m.name = "stabilize_probe";
  m.params = {{"r", ivl::Type::ref()}, {"x", ivl::Type::ref()}};
  Block body;
  body.push_back(stmt(SK::Inhale, enc.regionPred(inst)));
  body.push_back(stmt(SK::Inhale, e::binary(Op::In, state, intSet(c.start))));
  for (std::size_t g = 0; g < ts.guards.size(); ++g) {
    if (c.held[g] == Rational(0)) continue;
    EPtr pred = e::pred(mangle::guard("R", ts.guards[g].name), {r});
    EPtr amount = ts.guards[g].kind == GuardKind::Fractional ? e::permLit(c.held[g]) : nullptr;
    body.push_back(stmt(SK::Inhale, e::acc(pred, amount)));
  }
  if (c.pending) {
    EPtr ctx = e::field(r, mangle::acontext("R"));
    body.push_back(stmt(SK::Inhale, e::conj({e::acc(e::field(r, mangle::diamond())), e::acc(ctx),
                                             e::eq(ctx, intSet(c.updateDomain))})));
  }
  for (auto& s : enc.stabilize()) body.push_back(s);
  m.body = body;

  ivlcheck::DomainConfig cfg;
  cfg.regionDomains["R"] = stateDomain(ts);
  ivlcheck::Collected got = ivlcheck::collectValues(p, m, {state}, cfg);
  if (got.result.verdict != ivlcheck::Verdict::Pass) {
    if (why) {
      *why = std::string(ivlcheck::verdictName(got.result.verdict)) + " " + got.result.note;
      for (const auto& f : got.result.failures) *why += "; " + f.check + ": " + f.reason;
    }
    return std::nullopt;
  }
  std::set<int> out;
  for (const auto& row : got.rows) out.insert(static_cast<int>(row.at(0).i));
  return out;
}

std::set<int> toInts(const std::vector<Value>& vs) {
  std::set<int> out;
  for (const auto& v : vs) out.insert(static_cast<int>(v.i));
  return out;
}

}  // namespace voila::testing
