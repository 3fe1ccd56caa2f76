#include "voila/parser.hpp"

#include <set>
#include <stdexcept>

#include "voila/lexer.hpp"

namespace voila {

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kDeclStarts = {"struct", "region", "procedure", "abstract_atomic", "lemma"};
const std::set<std::string> kGuardMods = {"unique", "duplicable", "fractional", "indexed", "manual"};

class Parser {
 public:
  Parser(std::vector<Token> toks, Diagnostics& diags) : toks_(std::move(toks)), diags_(diags) {}

  Program program() {
    Program p;
    while (!at(Tok::End)) {
      std::size_t start = pos_;
      try {
        p.decls.push_back(declaration());
      } catch (const ParseError&) {
        resync(start);
      }
    }
    return p;
  }

  ExprPtr standaloneAssertion() {
    try {
      auto e = assertion();
      expect(Tok::End);
      validateBinders(e, true);
      return e;
    } catch (const ParseError&) {
      return nullptr;
    }
  }

 private:
  std::vector<Token> toks_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;
  std::set<std::string> expected_;
  std::size_t expectedAt_ = 0;

  // ------------------------------------------------------------ tokens

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  void note(const std::string& what) {
    if (expectedAt_ != pos_) {
      expected_.clear();
      expectedAt_ = pos_;
    }
    expected_.insert(what);
  }
  bool at(Tok t) {
    note(tokName(t));
    return cur().kind == t;
  }
  bool atKw(const char* kw) {
    note(std::string("'") + kw + "'");
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  bool accept(Tok t) {
    if (!at(t)) return false;
    ++pos_;
    return true;
  }
  bool acceptKw(const char* kw) {
    if (!atKw(kw)) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok t) {
    if (!at(t)) fail();
    return toks_[pos_++];
  }
  void expectKw(const char* kw) {
    if (!acceptKw(kw)) fail();
  }
  std::string ident() {
    if (!at(Tok::Ident)) fail();
    return toks_[pos_++].text;
  }

  [[noreturn]] void fail() {
    std::string msg = "expected one of {";
    bool first = true;
    if (expectedAt_ == pos_) {
      for (const auto& e : expected_) {
        if (!first) msg += ", ";
        msg += e;
        first = false;
      }
    }
    msg += "} but found ";
    msg += cur().kind == Tok::End ? std::string("end of input") : "'" + cur().text + "'";
    diags_.error(cur().span, "parse", msg);
    throw ParseError(msg);
  }

  [[noreturn]] void failAt(Span s, const std::string& msg) {
    diags_.error(s, "parse", msg);
    throw ParseError(msg);
  }

  void resync(std::size_t start) {
    if (pos_ == start) ++pos_;
    while (!at(Tok::End)) {
      if (cur().kind == Tok::Ident && kDeclStarts.count(cur().text)) {
        // A declaration keyword directly after ';' or '}' starts a fresh declaration.
        Tok prev = pos_ > 0 ? toks_[pos_ - 1].kind : Tok::Semi;
        if (prev == Tok::Semi || prev == Tok::RBrace || pos_ == 0) return;
      }
      ++pos_;
    }
  }

  Span spanFrom(const Span& start) const {
    const Token& last = toks_[pos_ > 0 ? pos_ - 1 : 0];
    return Span{start.line, start.col, last.span.endLine, last.span.endCol};
  }

  // ------------------------------------------------------------- types

  bool atTypeStart() {
    if (cur().kind != Tok::Ident) return false;
    const auto& t = cur().text;
    if (t == "id" || t == "bool" || t == "int" || t == "frac") return true;
    if ((t == "Set" || t == "Seq" || t == "set" || t == "seq") && peek().kind == Tok::Lt) return true;
    return false;
  }

  Type type() {
    note("type");
    std::string t = ident();
    if (t == "id") return Type::id();
    if (t == "bool") return Type::boolean();
    if (t == "int") return Type::integer();
    if (t == "frac") return Type::frac();
    if (t == "Set" || t == "set" || t == "Seq" || t == "seq") {
      expect(Tok::Lt);
      Type e = type();
      expect(Tok::Gt);
      return (t == "Set" || t == "set") ? Type::set(e) : Type::seq(e);
    }
    return Type::structType(t);
  }

  std::vector<Param> params(Tok close, bool namesOptional = false) {
    std::vector<Param> ps;
    if (accept(close)) return ps;
    do {
      Param p;
      p.span = cur().span;
      p.type = type();
      if (!namesOptional || at(Tok::Ident)) p.name = ident();
      p.span = spanFrom(p.span);
      ps.push_back(std::move(p));
    } while (accept(Tok::Comma));
    expect(close);
    return ps;
  }

  // ------------------------------------------------------ declarations

  Declaration declaration() {
    if (atKw("struct")) return structDecl();
    if (atKw("region")) return regionDecl();
    if (atKw("lemma")) return lemmaDecl();
    if (atKw("procedure") || atKw("abstract_atomic")) return procDecl();
    fail();
  }

  StructDecl structDecl() {
    StructDecl d;
    d.span = cur().span;
    expectKw("struct");
    d.name = ident();
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) {
      Param p;
      p.span = cur().span;
      p.type = type();
      p.name = ident();
      p.span = spanFrom(p.span);
      expect(Tok::Semi);
      d.fields.push_back(std::move(p));
    }
    d.span = spanFrom(d.span);
    return d;
  }

  RegionDecl regionDecl() {
    RegionDecl d;
    d.span = cur().span;
    expectKw("region");
    d.name = ident();
    expect(Tok::LParen);
    d.params = params(Tok::RParen);
    for (;;) {
      if (acceptKw("interpretation")) {
        expect(Tok::LBrace);
        d.interpretation = assertion();
        expect(Tok::RBrace);
      } else if (acceptKw("state")) {
        expect(Tok::LBrace);
        d.state = expression();
        expect(Tok::RBrace);
      } else if (acceptKw("guards")) {
        expect(Tok::LBrace);
        while (!accept(Tok::RBrace)) d.guards.push_back(guardDecl());
      } else if (acceptKw("actions")) {
        expect(Tok::LBrace);
        while (!accept(Tok::RBrace)) d.actions.push_back(actionDecl());
      } else {
        break;
      }
    }
    if (!d.interpretation) failAt(d.span, "region " + d.name + " lacks an interpretation clause");
    if (!d.state) failAt(d.span, "region " + d.name + " lacks a state clause");
    d.span = spanFrom(d.span);
    validateBinders(d.interpretation, true);
    return d;
  }

  GuardDecl guardDecl() {
    GuardDecl g;
    g.span = cur().span;
    note("guard modifier");
    std::string mod = ident();
    if (!kGuardMods.count(mod)) failAt(g.span, "unknown guard modifier '" + mod + "'");
    if (mod == "unique") g.kind = GuardKind::Unique;
    if (mod == "duplicable") g.kind = GuardKind::Duplicable;
    if (mod == "fractional") g.kind = GuardKind::Fractional;
    if (mod == "indexed") g.kind = GuardKind::Indexed;
    if (mod == "manual") g.kind = GuardKind::Manual;
    g.name = ident();
    if (accept(Tok::LParen)) g.params = params(Tok::RParen, true);
    expect(Tok::Semi);
    g.span = spanFrom(g.span);
    return g;
  }

  // Guard head `G:` or `G(args):` lies ahead.
  bool atGuardHead() const {
    if (cur().kind != Tok::Ident) return false;
    if (peek().kind == Tok::Colon) return true;
    if (peek().kind != Tok::LParen) return false;
    int depth = 0;
    for (std::size_t k = pos_ + 1; k < toks_.size(); ++k) {
      if (toks_[k].kind == Tok::LParen) ++depth;
      if (toks_[k].kind == Tok::RParen && --depth == 0)
        return k + 1 < toks_.size() && toks_[k + 1].kind == Tok::Colon;
      if (toks_[k].kind == Tok::Semi || toks_[k].kind == Tok::End) return false;
    }
    return false;
  }

  ActionDecl actionDecl() {
    ActionDecl a;
    a.span = cur().span;
    if (at(Tok::Question)) {
      do {
        expect(Tok::Question);
        a.binders.push_back(ident());
      } while (accept(Tok::Comma));
      expect(Tok::Bar);
      if (!atGuardHead()) {
        a.condition = expression();
        expect(Tok::Bar);
      }
    }
    a.guard = ident();
    if (accept(Tok::LParen)) a.guardArgs = arguments(Tok::RParen);
    expect(Tok::Colon);
    a.from = additive();
    expect(Tok::Leadsto);
    a.to = additive();
    expect(Tok::Semi);
    a.span = spanFrom(a.span);
    return a;
  }

  void specClauses(std::vector<ExprPtr>& req, std::vector<ExprPtr>& ens,
                   std::vector<InterferenceClause>* inter) {
    for (;;) {
      if (inter && atKw("interference")) {
        InterferenceClause ic;
        ic.span = cur().span;
        ++pos_;
        expect(Tok::Question);
        ic.binder = ident();
        expectKw("in");
        ic.set = expression();
        expect(Tok::Semi);
        ic.span = spanFrom(ic.span);
        inter->push_back(std::move(ic));
      } else if (acceptKw("requires")) {
        req.push_back(assertion());
        expect(Tok::Semi);
        validateBinders(req.back(), true);
      } else if (acceptKw("ensures")) {
        ens.push_back(assertion());
        expect(Tok::Semi);
        validateBinders(ens.back(), true);
      } else {
        return;
      }
    }
  }

  ProcDecl procDecl() {
    ProcDecl d;
    d.span = cur().span;
    if (acceptKw("abstract_atomic")) d.abstractAtomic = true;
    expectKw("procedure");
    d.name = ident();
    expect(Tok::LParen);
    d.params = params(Tok::RParen);
    if (acceptKw("returns")) {
      expect(Tok::LParen);
      d.returns = params(Tok::RParen);
    }
    specClauses(d.pres, d.posts, &d.interference);
    if (accept(Tok::LBrace)) d.body = statements();
    d.span = spanFrom(d.span);
    return d;
  }

  LemmaDecl lemmaDecl() {
    LemmaDecl d;
    d.span = cur().span;
    expectKw("lemma");
    d.name = ident();
    expect(Tok::LParen);
    d.params = params(Tok::RParen);
    specClauses(d.pres, d.posts, nullptr);
    d.span = spanFrom(d.span);
    return d;
  }

  // -------------------------------------------------------- statements

  // Parses statements up to and including the closing brace.
  StmtList statements() {
    StmtList out;
    while (!accept(Tok::RBrace)) out.push_back(statement());
    return out;
  }

  StmtList block() {
    expect(Tok::LBrace);
    return statements();
  }

  std::shared_ptr<Stmt> make(StmtKind k, Span s) {
    auto st = std::make_shared<Stmt>();
    st->kind = k;
    st->span = s;
    return st;
  }

  ExprPtr regionUse() {
    Span s = cur().span;
    auto r = postfix();
    if (r->kind != ExprKind::RegionAssn) failAt(s, "expected a region assertion");
    validateBinders(r, true);
    return r;
  }

  ExprPtr guardUse() {
    Span s = cur().span;
    auto g = assertion();
    validateBinders(g, false);
    if (!isSpatial(*g)) failAt(s, "expected a guard assertion");
    return g;
  }

  StmtPtr statement() {
    Span s = cur().span;
    if (atKw("if")) return ifStmt();
    if (acceptKw("while")) {
      auto st = make(StmtKind::While, s);
      expect(Tok::LParen);
      st->expr = expression();
      expect(Tok::RParen);
      st->invariants = invariants();
      st->body = block();
      st->span = spanFrom(s);
      return st;
    }
    if (acceptKw("do")) {
      auto st = make(StmtKind::DoWhile, s);
      st->invariants = invariants();
      st->body = block();
      expectKw("while");
      expect(Tok::LParen);
      st->expr = expression();
      expect(Tok::RParen);
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (atKw("make_atomic") || atKw("use_atomic")) {
      bool make_ = cur().text == "make_atomic";
      ++pos_;
      auto st = make(make_ ? StmtKind::MakeAtomic : StmtKind::UseAtomic, s);
      expectKw("using");
      st->region = regionUse();
      expectKw("with");
      st->guard = guardUse();
      accept(Tok::Semi);
      st->body = block();
      st->span = spanFrom(s);
      return st;
    }
    if (atKw("update_region") || atKw("open_region")) {
      bool upd = cur().text == "update_region";
      ++pos_;
      auto st = make(upd ? StmtKind::UpdateRegion : StmtKind::OpenRegion, s);
      expectKw("using");
      st->region = regionUse();
      accept(Tok::Semi);
      st->body = block();
      st->span = spanFrom(s);
      return st;
    }
    if (acceptKw("use")) {
      auto st = make(StmtKind::Use, s);
      st->name = ident();
      expect(Tok::LParen);
      st->args = arguments(Tok::RParen);
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (atKw("fold") || atKw("unfold")) {
      bool fold = cur().text == "fold";
      ++pos_;
      auto st = make(fold ? StmtKind::Fold : StmtKind::Unfold, s);
      st->region = regionUse();
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (atKw("inhale") || atKw("exhale") || atKw("assert")) {
      std::string kw = cur().text;
      ++pos_;
      auto st = make(kw == "inhale" ? StmtKind::Inhale : kw == "exhale" ? StmtKind::Exhale : StmtKind::Assert, s);
      st->expr = assertion();
      validateBinders(st->expr, true);
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (acceptKw("parallel")) {
      auto st = make(StmtKind::Parallel, s);
      st->body = block();
      for (const auto& c : st->body)
        if (c->kind != StmtKind::Call) failAt(c->span, "parallel blocks may only contain calls");
      st->span = spanFrom(s);
      return st;
    }
    if (atTypeStart() || (cur().kind == Tok::Ident && peek().kind == Tok::Ident)) {
      auto st = make(StmtKind::VarDecl, s);
      st->declType = type();
      st->name = ident();
      if (accept(Tok::Assign)) st->expr = expression();
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    return simpleStatement(s);
  }

  StmtPtr simpleStatement(Span s) {
    std::string first = ident();
    if (accept(Tok::LParen)) {
      auto st = make(StmtKind::Call, s);
      st->name = first;
      st->args = arguments(Tok::RParen);
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (accept(Tok::Dot)) {
      auto st = make(StmtKind::FieldWrite, s);
      st->recv = mk::var(first, s);
      st->field = ident();
      expect(Tok::Assign);
      st->expr = expression();
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    std::vector<std::string> targets{first};
    while (accept(Tok::Comma)) targets.push_back(ident());
    expect(Tok::Assign);
    if (cur().kind == Tok::Ident && peek().kind == Tok::LParen && !isExprCallName(cur().text)) {
      auto st = make(StmtKind::Call, s);
      st->targets = targets;
      st->name = ident();
      expect(Tok::LParen);
      st->args = arguments(Tok::RParen);
      expect(Tok::Semi);
      st->span = spanFrom(s);
      return st;
    }
    if (targets.size() != 1) failAt(s, "multiple assignment targets need a call on the right");
    auto rhs = expression();
    expect(Tok::Semi);
    if (rhs->kind == ExprKind::FieldRead && rhs->args[0]->kind == ExprKind::Var) {
      auto st = make(StmtKind::FieldRead, s);
      st->name = first;
      st->recv = rhs->args[0];
      st->field = rhs->name;
      st->span = spanFrom(s);
      return st;
    }
    auto st = make(StmtKind::Assign, s);
    st->name = first;
    st->expr = rhs;
    st->span = spanFrom(s);
    return st;
  }

  static bool isExprCallName(const std::string& n) { return n == "Set" || n == "Seq"; }

  StmtPtr ifStmt() {
    Span s = cur().span;
    expectKw("if");
    auto st = make(StmtKind::If, s);
    expect(Tok::LParen);
    st->expr = expression();
    expect(Tok::RParen);
    st->body = block();
    if (acceptKw("else")) {
      st->hasElse = true;
      if (atKw("if"))
        st->elseBody.push_back(ifStmt());
      else
        st->elseBody = block();
    }
    st->span = spanFrom(s);
    return st;
  }

  std::vector<ExprPtr> invariants() {
    std::vector<ExprPtr> out;
    while (acceptKw("invariant")) {
      out.push_back(assertion());
      validateBinders(out.back(), true);
      expect(Tok::Semi);
    }
    return out;
  }

  // ------------------------------------------------------- expressions

  std::vector<ExprPtr> arguments(Tok close) {
    std::vector<ExprPtr> out;
    if (accept(close)) return out;
    do out.push_back(expression());
    while (accept(Tok::Comma));
    expect(close);
    return out;
  }

  ExprPtr assertion() { return implication(); }
  ExprPtr expression() { return implication(); }

  ExprPtr implication() {
    Span s = cur().span;
    auto lhs = disjunction();
    if (accept(Tok::Implies)) {
      auto rhs = implication();
      return mk::binary(BinOp::Implies, lhs, rhs, spanFrom(s));
    }
    return lhs;
  }

  ExprPtr disjunction() {
    Span s = cur().span;
    auto lhs = conjunction();
    while (accept(Tok::OrOr)) lhs = mk::binary(BinOp::Or, lhs, conjunction(), spanFrom(s));
    return lhs;
  }

  ExprPtr conjunction() {
    Span s = cur().span;
    auto lhs = comparison();
    while (accept(Tok::AndAnd)) lhs = mk::binary(BinOp::And, lhs, comparison(), spanFrom(s));
    return lhs;
  }

  ExprPtr comparison() {
    Span s = cur().span;
    auto lhs = additive();
    if (accept(Tok::PointsTo)) {
      if (lhs->kind != ExprKind::FieldRead) failAt(s, "left side of |-> must be a field location");
      auto value = additive();
      return mk::pointsTo(lhs->args[0], lhs->name, value, spanFrom(s));
    }
    if (accept(Tok::Tracks)) {
      if (accept(Tok::Lt)) {
        std::string d = ident();
        if (d != "D") failAt(s, "expected <D> after |=>");
        expect(Tok::Gt);
        return mk::diamond(lhs, spanFrom(s));
      }
      expect(Tok::LParen);
      auto from = expression();
      expect(Tok::Comma);
      auto to = expression();
      expect(Tok::RParen);
      return mk::witness(lhs, from, to, spanFrom(s));
    }
    struct Rel {
      Tok t;
      BinOp op;
    };
    static const Rel rels[] = {{Tok::Eq, BinOp::Eq}, {Tok::Ne, BinOp::Ne}, {Tok::Le, BinOp::Le},
                               {Tok::Ge, BinOp::Ge}, {Tok::Lt, BinOp::Lt}, {Tok::Gt, BinOp::Gt}};
    for (const auto& r : rels)
      if (accept(r.t)) return mk::binary(r.op, lhs, additive(), spanFrom(s));
    if (acceptKw("in")) return mk::binary(BinOp::In, lhs, additive(), spanFrom(s));
    if (acceptKw("subset")) return mk::binary(BinOp::Subset, lhs, additive(), spanFrom(s));
    return lhs;
  }

  ExprPtr additive() {
    Span s = cur().span;
    auto lhs = multiplicative();
    for (;;) {
      if (accept(Tok::Plus))
        lhs = mk::binary(BinOp::Add, lhs, multiplicative(), spanFrom(s));
      else if (accept(Tok::Minus))
        lhs = mk::binary(BinOp::Sub, lhs, multiplicative(), spanFrom(s));
      else if (acceptKw("union"))
        lhs = mk::binary(BinOp::Union, lhs, multiplicative(), spanFrom(s));
      else if (acceptKw("setminus"))
        lhs = mk::binary(BinOp::SetMinus, lhs, multiplicative(), spanFrom(s));
      else if (acceptKw("intersection"))
        lhs = mk::binary(BinOp::Inter, lhs, multiplicative(), spanFrom(s));
      else
        return lhs;
    }
  }

  ExprPtr multiplicative() {
    Span s = cur().span;
    auto lhs = unary();
    for (;;) {
      if (accept(Tok::Star))
        lhs = mk::binary(BinOp::Mul, lhs, unary(), spanFrom(s));
      else if (accept(Tok::Slash))
        lhs = mk::binary(BinOp::Div, lhs, unary(), spanFrom(s));
      else if (accept(Tok::Percent))
        lhs = mk::binary(BinOp::Mod, lhs, unary(), spanFrom(s));
      else
        return lhs;
    }
  }

  ExprPtr unary() {
    Span s = cur().span;
    if (accept(Tok::Bang)) return mk::unary(UnOp::Not, unary(), spanFrom(s));
    if (accept(Tok::Minus)) return mk::unary(UnOp::Neg, unary(), spanFrom(s));
    return postfix();
  }

  ExprPtr postfix() {
    Span s = cur().span;
    auto e = primary();
    while (accept(Tok::Dot)) e = mk::fieldRead(e, ident(), spanFrom(s));
    return e;
  }

  ExprPtr guardTarget() {
    Span s = cur().span;
    if (accept(Tok::LParen)) {
      auto e = expression();
      expect(Tok::RParen);
      return e;
    }
    return mk::var(ident(), s);
  }

  ExprPtr primary() {
    Span s = cur().span;
    if (at(Tok::Int)) {
      std::int64_t v = cur().value;
      ++pos_;
      // n/d between two integer literals is a fraction literal.
      if (cur().kind == Tok::Slash && peek().kind == Tok::Int) {
        pos_ += 1;
        std::int64_t d = cur().value;
        ++pos_;
        if (d == 0) failAt(s, "fraction with zero denominator");
        return mk::fracLit(v, d, spanFrom(s));
      }
      return mk::intLit(v, spanFrom(s));
    }
    if (at(Tok::FracInt)) {
      std::int64_t v = cur().value;
      ++pos_;
      return mk::fracLit(v, 1, spanFrom(s));
    }
    if (accept(Tok::LParen)) {
      auto e = expression();
      expect(Tok::RParen);
      return e;
    }
    if (accept(Tok::Question)) return mk::binder(ident(), spanFrom(s));
    if (!at(Tok::Ident)) fail();
    std::string name = ident();
    if (name == "true" || name == "false") return mk::boolLit(name == "true", spanFrom(s));
    if (name == "_") return mk::wildcard(spanFrom(s));
    if (name == "Int" || name == "Bool") return mk::typeSet(name, spanFrom(s));
    if ((name == "Set" || name == "Seq") && accept(Tok::LParen)) {
      auto elems = arguments(Tok::RParen);
      return name == "Set" ? mk::setLit(std::move(elems), spanFrom(s)) : mk::seqLit(std::move(elems), spanFrom(s));
    }
    if (accept(Tok::LParen)) {
      auto args = arguments(Tok::RParen);
      if (accept(Tok::At)) return mk::guard(name, std::move(args), guardTarget(), spanFrom(s));
      return mk::region(name, std::move(args), spanFrom(s));
    }
    if (accept(Tok::At)) return mk::guard(name, {}, guardTarget(), spanFrom(s));
    return mk::var(name, spanFrom(s));
  }

  // ?x may appear only as a points-to value or last region argument; _ only
  // as the last region argument.
  void validateBinders(const ExprPtr& e, bool allowed) {
    (void)allowed;
    checkBinders(*e, false);
  }

  void checkBinders(const Expr& e, bool legalHere) {
    if (e.kind == ExprKind::Binder && !legalHere)
      failAt(e.span, "binder ?" + e.name + " is only allowed as a points-to value or the last region argument");
    if (e.kind == ExprKind::Wildcard && !legalHere)
      failAt(e.span, "wildcard _ is only allowed as the region state argument");
    switch (e.kind) {
      case ExprKind::PointsTo:
        checkBinders(*e.args[0], false);
        if (e.args[1]->kind == ExprKind::Wildcard)
          failAt(e.args[1]->span, "wildcard _ is only allowed as the region state argument");
        if (e.args[1]->kind != ExprKind::Binder) checkBinders(*e.args[1], false);
        return;
      case ExprKind::RegionAssn:
        for (std::size_t i = 0; i < e.args.size(); ++i) checkBinders(*e.args[i], i + 1 == e.args.size());
        return;
      default:
        for (const auto& a : e.args) checkBinders(*a, false);
        if (e.target) checkBinders(*e.target, false);
    }
  }
};

}  // namespace

ParseResult parseProgram(std::string_view source, const std::string& file) {
  ParseResult r;
  auto toks = lex(source, r.diags);
  Parser p(std::move(toks), r.diags);
  r.program = p.program();
  for (auto& d : r.diags.items()) d.file = file;
  return r;
}

ParseResult parseAssertion(std::string_view source, ExprPtr& out) {
  ParseResult r;
  auto toks = lex(source, r.diags);
  Parser p(std::move(toks), r.diags);
  out = p.standaloneAssertion();
  return r;
}

}  // namespace voila
