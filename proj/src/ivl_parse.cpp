#include <cctype>
#include <functional>
#include <set>

#include "voila/ivl.hpp"

namespace voila::ivl {

namespace {

struct Tok {
  enum Kind { Ident, Num, Sym, End } kind = End;
  std::string text;
  int line = 0;
};

std::vector<Tok> lex(const std::string& s) {
  static const char* syms[] = {"<==>", "==>", "==", "!=", "<=", ">=", "&&", "||", ":=", "::", "(", ")", "[",
                               "]",    "{",   "}",  ",",  ":",  ".",  "!",  "-",  "+",  "*",  "/",  "%", "<", ">"};
  std::vector<Tok> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '$')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Num, s.substr(i, j - i), line});
      i = j;
    } else {
      bool ok = false;
      for (const char* sym : syms) {
        std::size_t n = std::char_traits<char>::length(sym);
        if (s.compare(i, n, sym) == 0) {
          out.push_back({Tok::Sym, sym, line});
          i += n;
          ok = true;
          break;
        }
      }
      if (!ok) throw ParseError("line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) + "'");
    }
  }
  out.push_back({Tok::End, "", line});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Tok> t) : t_(std::move(t)) {}

  Program program() {
    Program p;
    while (!at(Tok::End)) {
      std::string kw = expectIdent();
      if (kw == "field") {
        FieldDecl f;
        f.name = expectIdent();
        expect(":");
        f.type = type();
        p.fields.push_back(f);
      } else if (kw == "predicate") {
        PredicateDecl d;
        d.name = expectIdent();
        d.params = params();
        if (accept("{")) {
          d.body = expr();
          expect("}");
        }
        p.predicates.push_back(d);
      } else if (kw == "function") {
        FunctionDecl f;
        f.name = expectIdent();
        f.params = params();
        expect(":");
        f.ret = type();
        while (acceptIdent("requires")) f.pres.push_back(expr());
        if (accept("{")) {
          f.body = expr();
          expect("}");
        }
        p.functions.push_back(f);
      } else if (kw == "method") {
        MethodDecl m;
        m.name = expectIdent();
        m.params = params();
        if (acceptIdent("returns")) m.returns = params();
        while (true) {
          if (acceptIdent("requires"))
            m.pres.push_back(expr());
          else if (acceptIdent("ensures"))
            m.posts.push_back(expr());
          else
            break;
        }
        if (peekSym("{")) m.body = block();
        p.methods.push_back(m);
      } else {
        fail("declaration expected, got '" + kw + "'");
      }
    }
    resolve(p);
    return p;
  }

 private:
  std::vector<Tok> t_;
  std::size_t k_ = 0;

  const Tok& cur() const { return t_[k_]; }
  bool at(Tok::Kind k) const { return cur().kind == k; }
  bool peekSym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool peekIdent(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }
  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError("line " + std::to_string(cur().line) + ": " + m);
  }
  bool accept(const char* s) {
    if (!peekSym(s)) return false;
    ++k_;
    return true;
  }
  bool acceptIdent(const char* s) {
    if (!peekIdent(s)) return false;
    ++k_;
    return true;
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected '") + s + "', got '" + cur().text + "'");
  }
  std::string expectIdent() {
    if (!at(Tok::Ident)) fail("identifier expected, got '" + cur().text + "'");
    return t_[k_++].text;
  }

  Type type() {
    std::string n = expectIdent();
    if (n == "Int") return Type::integer();
    if (n == "Bool") return Type::boolean();
    if (n == "Perm") return Type::perm();
    if (n == "Ref") return Type::ref();
    if (n == "Set" || n == "Seq") {
      expect("[");
      Type el = type();
      expect("]");
      return n == "Set" ? Type::set(el) : Type::seq(el);
    }
    fail("unknown type " + n);
  }

  std::vector<QVar> params() {
    expect("(");
    std::vector<QVar> out;
    if (!peekSym(")")) {
      do {
        QVar v;
        v.name = expectIdent();
        expect(":");
        v.type = type();
        out.push_back(v);
      } while (accept(","));
    }
    expect(")");
    return out;
  }

  std::vector<QVar> qvarList() {
    std::vector<QVar> out;
    do {
      QVar v;
      v.name = expectIdent();
      expect(":");
      v.type = type();
      out.push_back(v);
    } while (accept(","));
    return out;
  }

  Block block() {
    expect("{");
    Block b;
    while (!accept("}")) b.push_back(stmt());
    return b;
  }

  SPtr stmt() {
    auto s = std::make_shared<Stmt>();
    if (acceptIdent("inhale")) {
      s->kind = SK::Inhale;
      s->expr = expr();
    } else if (acceptIdent("exhale")) {
      s->kind = SK::Exhale;
      s->expr = expr();
    } else if (acceptIdent("assert")) {
      s->kind = SK::Assert;
      s->expr = expr();
    } else if (acceptIdent("label")) {
      s->kind = SK::Label;
      s->name = expectIdent();
    } else if (acceptIdent("var")) {
      s->kind = SK::VarDecl;
      s->name = expectIdent();
      expect(":");
      s->type = type();
      if (accept(":=")) s->expr = expr();
    } else if (acceptIdent("fold")) {
      s->kind = SK::Fold;
      s->expr = expr();
    } else if (acceptIdent("unfold")) {
      s->kind = SK::Unfold;
      s->expr = expr();
    } else if (acceptIdent("if")) {
      s->kind = SK::If;
      expect("(");
      s->expr = expr();
      expect(")");
      s->body = block();
      if (acceptIdent("else")) s->elseBody = block();
    } else if (acceptIdent("while")) {
      s->kind = SK::While;
      expect("(");
      s->expr = expr();
      expect(")");
      while (acceptIdent("invariant")) s->invariants.push_back(expr());
      s->body = block();
    } else {
      EPtr lhs = expr();
      if (accept(",")) {
        std::vector<std::string> ts = {lhs->name};
        do ts.push_back(expectIdent());
        while (accept(","));
        expect(":=");
        EPtr rhs = expr();
        s->kind = SK::Call;
        s->targets = ts;
        s->name = rhs->name;
        s->args = rhs->args;
      } else if (accept(":=")) {
        EPtr rhs = expr();
        if (lhs->kind == EK::Field) {
          s->kind = SK::FieldAssign;
          s->target = lhs;
        } else if (lhs->kind == EK::Var) {
          s->kind = SK::Assign;
          s->name = lhs->name;
        } else {
          fail("bad assignment target");
        }
        s->expr = rhs;
      } else if (lhs->kind == EK::App) {
        s->kind = SK::Call;
        s->name = lhs->name;
        s->args = lhs->args;
      } else {
        fail("statement expected");
      }
    }
    return s;
  }

  // Precedence levels match the printer.
  EPtr expr() { return iff(); }

  EPtr iff() {
    EPtr l = implies();
    if (accept("<==>")) return e::binary(Op::Iff, l, implies());
    return l;
  }
  EPtr implies() {
    EPtr l = orE();
    if (accept("==>")) return e::binary(Op::Implies, l, implies());
    return l;
  }
  EPtr orE() {
    EPtr l = andE();
    while (accept("||")) l = e::binary(Op::Or, l, andE());
    return l;
  }
  EPtr andE() {
    EPtr l = eqE();
    while (accept("&&")) l = e::binary(Op::And, l, eqE());
    return l;
  }
  EPtr eqE() {
    EPtr l = rel();
    if (accept("==")) return e::binary(Op::Eq, l, rel());
    if (accept("!=")) return e::binary(Op::Ne, l, rel());
    return l;
  }
  EPtr rel() {
    EPtr l = setE();
    if (accept("<")) return e::binary(Op::Lt, l, setE());
    if (accept("<=")) return e::binary(Op::Le, l, setE());
    if (accept(">")) return e::binary(Op::Gt, l, setE());
    if (accept(">=")) return e::binary(Op::Ge, l, setE());
    if (acceptIdent("in")) return e::binary(Op::In, l, setE());
    if (acceptIdent("subset")) return e::binary(Op::Subset, l, setE());
    return l;
  }
  EPtr setE() {
    EPtr l = add();
    while (true) {
      if (acceptIdent("union"))
        l = e::binary(Op::Union, l, add());
      else if (acceptIdent("intersection"))
        l = e::binary(Op::Inter, l, add());
      else if (acceptIdent("setminus"))
        l = e::binary(Op::Minus, l, add());
      else
        return l;
    }
  }
  EPtr add() {
    EPtr l = mul();
    while (true) {
      if (accept("+"))
        l = e::binary(Op::Add, l, mul());
      else if (accept("-"))
        l = e::binary(Op::Sub, l, mul());
      else
        return l;
    }
  }
  EPtr mul() {
    EPtr l = unary();
    while (true) {
      if (accept("*")) {
        l = e::binary(Op::Mul, l, unary());
      } else if (accept("/")) {
        EPtr r = unary();
        if (l->kind == EK::IntLit && r->kind == EK::IntLit && r->i != 0)
          l = e::permLit(Rational(l->i, r->i));
        else
          l = e::binary(Op::Div, l, r);
      } else if (accept("%")) {
        l = e::binary(Op::Mod, l, unary());
      } else {
        return l;
      }
    }
  }
  EPtr unary() {
    if (accept("!")) return e::unary(Op::Not, unary());
    if (accept("-")) {
      EPtr x = unary();
      if (x->kind == EK::IntLit) return e::intLit(-x->i);
      return e::unary(Op::Neg, x);
    }
    return postfix();
  }
  EPtr postfix() {
    EPtr x = primary();
    while (accept(".")) x = e::field(x, expectIdent());
    return x;
  }
  std::vector<EPtr> callArgs() {
    expect("(");
    std::vector<EPtr> out;
    if (!peekSym(")")) {
      do out.push_back(expr());
      while (accept(","));
    }
    expect(")");
    return out;
  }
  EPtr primary() {
    if (at(Tok::Num)) return e::intLit(std::stoll(t_[k_++].text));
    if (accept("(")) {
      EPtr x = expr();
      expect(")");
      return x;
    }
    std::string n = expectIdent();
    if (n == "true") return e::boolLit(true);
    if (n == "false") return e::boolLit(false);
    if (n == "null") return e::null();
    if (n == "none") return e::permLit(0);
    if (n == "write") return e::permLit(1);
    if (n == "acc") {
      expect("(");
      EPtr loc = expr();
      EPtr amt;
      if (accept(",")) amt = expr();
      expect(")");
      return e::acc(loc, amt);
    }
    if (n == "perm") {
      expect("(");
      EPtr loc = expr();
      expect(")");
      return e::perm(loc);
    }
    if (n == "old") {
      std::string label;
      if (accept("[")) {
        label = expectIdent();
        expect("]");
      }
      expect("(");
      EPtr x = expr();
      expect(")");
      return e::old(label, x);
    }
    if (n == "forall" || n == "exists") {
      auto vs = qvarList();
      expect("::");
      EPtr body = expr();
      return n == "forall" ? e::forall(vs, body) : e::exists(vs, body);
    }
    if (n == "unfolding") {
      EPtr p = postfix();
      if (!acceptIdent("in")) fail("expected 'in'");
      return e::unfolding(p, expr());
    }
    if (n == "Set" || n == "Seq") {
      Type el = Type::integer();
      if (accept("[")) {
        el = type();
        expect("]");
      }
      auto xs = callArgs();
      return n == "Set" ? e::setLit(el, xs) : e::seqLit(el, xs);
    }
    if (peekSym("(")) return e::app(n, callArgs());
    return e::var(n);
  }

  // Applications of predicate names become predicate instances; assignments
  // of method applications become calls.
  static void resolve(Program& p) {
    std::set<std::string> preds, methods;
    for (const auto& d : p.predicates) preds.insert(d.name);
    for (const auto& m : p.methods) methods.insert(m.name);
    std::function<EPtr(const EPtr&)> fx = [&](const EPtr& x) -> EPtr {
      if (!x) return x;
      auto y = std::make_shared<Expr>(*x);
      if (y->kind == EK::App && preds.count(y->name)) y->kind = EK::Pred;
      for (auto& a : y->args) a = fx(a);
      return y;
    };
    std::function<Block(const Block&)> fb = [&](const Block& b) {
      Block out;
      for (const auto& s : b) {
        auto t = std::make_shared<Stmt>(*s);
        if (t->kind == SK::Assign && t->expr->kind == EK::App && methods.count(t->expr->name)) {
          t->kind = SK::Call;
          t->targets = {t->name};
          t->name = t->expr->name;
          t->args = t->expr->args;
          t->expr = nullptr;
        }
        t->expr = fx(t->expr);
        t->target = fx(t->target);
        for (auto& i : t->invariants) i = fx(i);
        for (auto& a : t->args) a = fx(a);
        t->body = fb(t->body);
        t->elseBody = fb(t->elseBody);
        out.push_back(t);
      }
      return out;
    };
    for (auto& d : p.predicates) d.body = fx(d.body);
    for (auto& f : p.functions) {
      for (auto& r : f.pres) r = fx(r);
      f.body = fx(f.body);
    }
    for (auto& m : p.methods) {
      for (auto& r : m.pres) r = fx(r);
      for (auto& r : m.posts) r = fx(r);
      if (m.body) m.body = fb(*m.body);
    }
  }
};

}  // namespace

Program parse(const std::string& text) { return Parser(lex(text)).program(); }

}  // namespace voila::ivl
