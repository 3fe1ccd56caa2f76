#include <doctest.h>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "voila/parser.hpp"
#include "voila/printer.hpp"

using namespace voila;
using namespace voila::testing;

namespace {

Program parseOk(const std::string& src) {
  ParseResult r = parseProgram(src);
  for (const auto& d : r.diags.items()) INFO(d.toText());
  REQUIRE(r.ok());
  return std::move(r.program);
}

ExprPtr expr(const std::string& src) {
  ExprPtr e;
  ParseResult r = parseAssertion(src, e);
  REQUIRE(r.ok());
  REQUIRE(e);
  return e;
}

bool roundTrips(const Program& p, std::string* text = nullptr) {
  std::string printed = prettyPrint(p);
  if (text) *text = printed;
  ParseResult r = parseProgram(printed);
  return r.ok() && equalModuloSpans(p, r.program);
}

}  // namespace

TEST_CASE("running example parses into its declarations") {
  Program p = parseOk(readFile(dataPath("programs/lock.vl")));
  CHECK(p.structs().size() == 1);
  CHECK(p.structs()[0]->name == "cell");
  REQUIRE(p.regions().size() == 1);
  const RegionDecl& lock = *p.regions()[0];
  CHECK(lock.name == "Lock");
  CHECK(lock.guards.size() == 1);
  CHECK(lock.guards[0].kind == GuardKind::Unique);
  CHECK(lock.actions.size() == 2);
  const ProcDecl* l = p.findProcedure("lock");
  REQUIRE(l);
  CHECK(l->abstractAtomic);
  CHECK(l->interference.size() == 1);
  REQUIRE(l->body);
  CHECK(l->body->size() == 2);
  CHECK((*l->body)[1]->kind == StmtKind::MakeAtomic);
  const ProcDecl* cas = p.findProcedure("CAS");
  REQUIRE(cas);
  CHECK_FALSE(cas->body);
}

TEST_CASE("minimal procedure") {
  Program p = parseOk("procedure p() {}");
  REQUIRE(p.procedures().size() == 1);
  const ProcDecl& d = *p.procedures()[0];
  CHECK_FALSE(d.abstractAtomic);
  REQUIRE(d.body);
  CHECK(d.body->empty());
  CHECK(d.params.empty());
}

TEST_CASE("counter client has lemmas and ghost statements") {
  Program p = parseOk(readFile(dataPath("programs/counter_client.vl")));
  CHECK(p.regions().size() == 2);
  CHECK(p.lemmas().size() == 4);
  const ProcDecl* c = p.findProcedure("client");
  REQUIRE(c);
  REQUIRE(c->body);
  std::set<StmtKind> kinds;
  for (const auto& s : *c->body) kinds.insert(s->kind);
  CHECK(kinds.count(StmtKind::Use));
  CHECK(kinds.count(StmtKind::Unfold));
  CHECK(kinds.count(StmtKind::Assert));
  CHECK(kinds.count(StmtKind::Fold));
  const Stmt& split = *(*c->body)[0];
  CHECK(split.name == "INC_split");
  REQUIRE(split.args.size() == 5);
  CHECK(split.args[3]->kind == ExprKind::FracLit);
  CHECK(split.args[3]->den == 2);
}

TEST_CASE("pretty printing round-trips the example programs") {
  for (const char* f : {"programs/lock.vl", "programs/caplock.vl", "programs/counter_client.vl"}) {
    CAPTURE(f);
    Program p = parseOk(readFile(dataPath(f)));
    std::string text;
    CHECK(roundTrips(p, &text));
    // Printing is a fixpoint after one round.
    CHECK(prettyPrint(parseOk(text)) == text);
  }
}

TEST_CASE("empty program prints as empty text") {
  Program p;
  CHECK(prettyPrint(p).empty());
  CHECK(parseOk("").decls.empty());
}

TEST_CASE("random programs round-trip") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    Program p = randomProgram(rng);
    std::string text;
    bool ok = roundTrips(p, &text);
    if (!ok) {
      ParseResult r = parseProgram(text);
      for (const auto& d : r.diags.items()) INFO(d.toText());
      INFO(text);
      CHECK(ok);
      break;
    }
  }
}

TEST_CASE("parsing is deterministic") {
  std::string src = readFile(dataPath("programs/caplock.vl"));
  CHECK(equalModuloSpans(parseOk(src), parseOk(src)));
  CHECK(prettyPrint(parseOk(src)) == prettyPrint(parseOk(src)));
}

TEST_CASE("binders are rejected outside their two positions") {
  ExprPtr e;
  CHECK(parseAssertion("x.f |-> ?v", e).ok());
  CHECK(parseAssertion("R(r, ?s)", e).ok());
  CHECK(parseAssertion("R(r, _)", e).ok());
  CHECK_FALSE(parseAssertion("?v == 1", e).ok());
  CHECK_FALSE(parseAssertion("R(?s, r)", e).ok());
  CHECK_FALSE(parseAssertion("R(_, r)", e).ok());
  CHECK_FALSE(parseAssertion("x.f |-> _", e).ok());
  CHECK_FALSE(parseAssertion("G(?k)@r", e).ok());
}

TEST_CASE("operator precedence is C-like") {
  ExprPtr e = expr("a || b && c");
  CHECK(e->bop == BinOp::Or);
  CHECK(e->args[1]->bop == BinOp::And);
  e = expr("a ==> b ==> c");
  CHECK(e->bop == BinOp::Implies);
  CHECK(e->args[1]->bop == BinOp::Implies);
  e = expr("!a && b");
  CHECK(e->bop == BinOp::And);
  CHECK(e->args[0]->kind == ExprKind::Unary);
  e = expr("a + b * c < d");
  CHECK(e->bop == BinOp::Lt);
  CHECK(e->args[0]->bop == BinOp::Add);
  CHECK(e->args[0]->args[1]->bop == BinOp::Mul);
  e = expr("x.val |-> ?v && v == 0");
  CHECK(e->bop == BinOp::And);
  CHECK(e->args[0]->kind == ExprKind::PointsTo);
}

TEST_CASE("fraction literals") {
  ExprPtr e = expr("1/2");
  CHECK(e->kind == ExprKind::FracLit);
  CHECK(e->num == 1);
  CHECK(e->den == 2);
  e = expr("1f");
  CHECK(e->kind == ExprKind::FracLit);
  CHECK(e->den == 1);
  e = expr("a / 2");
  CHECK(e->kind == ExprKind::Binary);
  CHECK(e->bop == BinOp::Div);
  // Integer division of literals survives printing.
  ExprPtr div = mk::binary(BinOp::Div, mk::intLit(1), mk::fracLit(1, 2));
  CHECK(equalModuloSpans(*expr(printExpr(*div)), *div));
}

TEST_CASE("tracking resources and guards") {
  ExprPtr e = expr("r |=> <D>");
  CHECK(e->kind == ExprKind::Diamond);
  e = expr("r |=> (0, 1)");
  CHECK(e->kind == ExprKind::Witness);
  CHECK(e->args.size() == 2);
  e = expr("INC(k, 1/2)@s");
  CHECK(e->kind == ExprKind::GuardAssn);
  CHECK(e->target->name == "s");
  CHECK(e->args.size() == 2);
}

TEST_CASE("comments are stripped") {
  Program p = parseOk("// leading\nprocedure p() // trailing\n{ // inside\n}\n");
  CHECK(p.procedures().size() == 1);
}

TEST_CASE("errors carry positions and recovery continues per declaration") {
  ParseResult r = parseProgram("procedure p( { }\n\nprocedure q() { x := ; }\n\nprocedure ok() {}\n");
  CHECK(r.diags.size() >= 2);
  for (const auto& d : r.diags.items()) {
    CHECK(d.span.line > 0);
    CHECK(d.span.col > 0);
  }
  CHECK(r.diags.items()[0].message.find("expected") != std::string::npos);
  CHECK(r.program.findProcedure("ok"));
}

TEST_CASE("lex errors are reported") {
  ParseResult r = parseProgram("procedure p() { x := 1 # 2; }");
  CHECK_FALSE(r.ok());
}

TEST_CASE("diagnostics serialize to JSON records") {
  ParseResult r = parseProgram("procedure p(");
  REQUIRE_FALSE(r.ok());
  auto j = r.diags.items()[0].toJson();
  CHECK(j.contains("severity"));
  CHECK(j.contains("span"));
  CHECK(j.contains("code"));
  CHECK(j.contains("message"));
}
