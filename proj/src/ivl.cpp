#include "voila/ivl.hpp"

#include <functional>
#include <sstream>

namespace voila::ivl {

std::string Type::str() const {
  switch (kind) {
    case Kind::Int: return "Int";
    case Kind::Bool: return "Bool";
    case Kind::Perm: return "Perm";
    case Kind::Ref: return "Ref";
    case Kind::Set: return "Set[" + elem->str() + "]";
    case Kind::Seq: return "Seq[" + elem->str() + "]";
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (!a.elem || !b.elem) return !a.elem && !b.elem;
  return *a.elem == *b.elem;
}

const char* opText(Op op) {
  switch (op) {
    case Op::Not: return "!";
    case Op::Neg: return "-";
    case Op::Implies: return "==>";
    case Op::Iff: return "<==>";
    case Op::Or: return "||";
    case Op::And: return "&&";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::In: return "in";
    case Op::Union: return "union";
    case Op::Inter: return "intersection";
    case Op::Minus: return "setminus";
    case Op::Subset: return "subset";
  }
  return "?";
}

namespace e {
namespace {
std::shared_ptr<Expr> node(EK k) {
  auto x = std::make_shared<Expr>();
  x->kind = k;
  return x;
}
}  // namespace

EPtr intLit(std::int64_t v) {
  auto x = node(EK::IntLit);
  x->i = v;
  return x;
}
EPtr boolLit(bool v) {
  auto x = node(EK::BoolLit);
  x->b = v;
  return x;
}
EPtr permLit(Rational q) {
  auto x = node(EK::PermLit);
  x->q = q;
  return x;
}
EPtr null() { return node(EK::Null); }
EPtr var(std::string n) {
  auto x = node(EK::Var);
  x->name = std::move(n);
  return x;
}
EPtr field(EPtr recv, std::string f) {
  auto x = node(EK::Field);
  x->name = std::move(f);
  x->args = {std::move(recv)};
  return x;
}
EPtr app(std::string f, std::vector<EPtr> args) {
  auto x = node(EK::App);
  x->name = std::move(f);
  x->args = std::move(args);
  return x;
}
EPtr pred(std::string p, std::vector<EPtr> args) {
  auto x = node(EK::Pred);
  x->name = std::move(p);
  x->args = std::move(args);
  return x;
}
EPtr acc(EPtr loc, EPtr amount) {
  auto x = node(EK::Acc);
  x->args = {std::move(loc)};
  if (amount) x->args.push_back(std::move(amount));
  return x;
}
EPtr perm(EPtr loc, std::string label) {
  auto x = node(EK::Perm);
  x->args = {std::move(loc)};
  x->name = std::move(label);
  return x;
}
EPtr old(std::string label, EPtr y) {
  auto x = node(EK::Old);
  x->name = std::move(label);
  x->args = {std::move(y)};
  return x;
}
EPtr unary(Op op, EPtr y) {
  auto x = node(EK::Unary);
  x->op = op;
  x->args = {std::move(y)};
  return x;
}
EPtr binary(Op op, EPtr l, EPtr r) {
  auto x = node(EK::Binary);
  x->op = op;
  x->args = {std::move(l), std::move(r)};
  return x;
}
EPtr setLit(Type elem, std::vector<EPtr> xs) {
  auto x = node(EK::SetLit);
  x->elemType = std::move(elem);
  x->args = std::move(xs);
  return x;
}
EPtr seqLit(Type elem, std::vector<EPtr> xs) {
  auto x = node(EK::SeqLit);
  x->elemType = std::move(elem);
  x->args = std::move(xs);
  return x;
}
EPtr forall(std::vector<QVar> vars, EPtr body, std::string tag) {
  auto x = node(EK::Forall);
  x->vars = std::move(vars);
  x->args = {std::move(body)};
  x->tag = std::move(tag);
  return x;
}
EPtr exists(std::vector<QVar> vars, EPtr body, std::string tag) {
  auto x = node(EK::Exists);
  x->vars = std::move(vars);
  x->args = {std::move(body)};
  x->tag = std::move(tag);
  return x;
}
EPtr unfolding(EPtr p, EPtr body) {
  auto x = node(EK::Unfolding);
  x->args = {std::move(p), std::move(body)};
  return x;
}
EPtr conj(const std::vector<EPtr>& xs) {
  if (xs.empty()) return boolLit(true);
  EPtr r = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) r = binary(Op::And, r, xs[i]);
  return r;
}
EPtr disj(const std::vector<EPtr>& xs) {
  if (xs.empty()) return boolLit(false);
  EPtr r = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) r = binary(Op::Or, r, xs[i]);
  return r;
}
EPtr implies(EPtr l, EPtr r) { return binary(Op::Implies, std::move(l), std::move(r)); }
EPtr eq(EPtr l, EPtr r) { return binary(Op::Eq, std::move(l), std::move(r)); }
EPtr noneLt(EPtr loc) { return binary(Op::Lt, permLit(0), perm(std::move(loc))); }
}  // namespace e

std::vector<EPtr> conjuncts(const EPtr& x) {
  std::vector<EPtr> out;
  std::function<void(const EPtr&)> go = [&](const EPtr& y) {
    if (y->kind == EK::Binary && y->op == Op::And) {
      go(y->args[0]);
      go(y->args[1]);
    } else {
      out.push_back(y);
    }
  };
  go(x);
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.i != b.i || a.b != b.b || !(a.q == b.q) || a.name != b.name || a.op != b.op ||
      a.tag != b.tag || a.args.size() != b.args.size() || a.vars.size() != b.vars.size())
    return false;
  if ((a.kind == EK::SetLit || a.kind == EK::SeqLit) && !(a.elemType == b.elemType)) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].name != b.vars[i].name || !(a.vars[i].type == b.vars[i].type)) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

EPtr substitute(const EPtr& x, const std::map<std::string, EPtr>& sub) {
  if (sub.empty()) return x;
  if (x->kind == EK::Var) {
    auto it = sub.find(x->name);
    return it == sub.end() ? x : it->second;
  }
  if (x->args.empty()) return x;
  const std::map<std::string, EPtr>* s = &sub;
  std::map<std::string, EPtr> inner;
  if (!x->vars.empty()) {
    inner = sub;
    for (const auto& v : x->vars) inner.erase(v.name);
    s = &inner;
  }
  auto y = std::make_shared<Expr>(*x);
  for (auto& a : y->args) a = substitute(a, *s);
  return y;
}

EPtr relabelOld(const EPtr& x, const std::string& label) {
  if (x->args.empty()) return x;
  auto y = std::make_shared<Expr>(*x);
  if (y->kind == EK::Old && y->name.empty()) y->name = label;
  for (auto& a : y->args) a = relabelOld(a, label);
  return y;
}

const FieldDecl* Program::field(const std::string& n) const {
  for (const auto& f : fields)
    if (f.name == n) return &f;
  return nullptr;
}
const PredicateDecl* Program::predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}
const FunctionDecl* Program::function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}
const MethodDecl* Program::method(const std::string& n) const {
  for (const auto& m : methods)
    if (m.name == n) return &m;
  return nullptr;
}

namespace {

std::string stripIndex(const std::string& n) {
  std::size_t u = n.rfind('_');
  if (u == std::string::npos || u == 0 || u + 1 == n.size()) return n;
  for (std::size_t i = u + 1; i < n.size(); ++i)
    if (n[i] < '0' || n[i] > '9') return n;
  return n.substr(0, u);
}

EPtr normExpr(const EPtr& x) {
  auto y = std::make_shared<Expr>(*x);
  if (y->kind == EK::Var || y->kind == EK::Old || y->kind == EK::Perm) y->name = stripIndex(y->name);
  for (auto& v : y->vars) v.name = stripIndex(v.name);
  for (auto& a : y->args) a = normExpr(a);
  return y;
}

Block normBlock(const Block& b) {
  Block out;
  for (const auto& s : b) {
    auto t = std::make_shared<Stmt>(*s);
    if (t->expr) t->expr = normExpr(t->expr);
    if (t->target) t->target = normExpr(t->target);
    for (auto& i : t->invariants) i = normExpr(i);
    for (auto& a : t->args) a = normExpr(a);
    for (auto& n : t->targets) n = stripIndex(n);
    if (t->kind != SK::Call) t->name = stripIndex(t->name);
    t->body = normBlock(t->body);
    t->elseBody = normBlock(t->elseBody);
    out.push_back(t);
  }
  return out;
}

}  // namespace

Program normalizeFreshNames(const Program& p) {
  Program q = p;
  for (auto& m : q.methods) {
    for (auto& x : m.pres) x = normExpr(x);
    for (auto& x : m.posts) x = normExpr(x);
    if (m.body) m.body = normBlock(*m.body);
  }
  for (auto& f : q.functions) {
    for (auto& x : f.pres) x = normExpr(x);
    if (f.body) f.body = normExpr(f.body);
  }
  for (auto& pr : q.predicates)
    if (pr.body) pr.body = normExpr(pr.body);
  return q;
}

bool structurallyEqual(const Program& a, const Program& b, std::string* why) {
  std::istringstream sa(print(a)), sb(print(b));
  std::string la, lb;
  int line = 0;
  while (true) {
    bool ga = static_cast<bool>(std::getline(sa, la));
    bool gb = static_cast<bool>(std::getline(sb, lb));
    ++line;
    if (!ga && !gb) return true;
    if (!ga || !gb || la != lb) {
      if (why)
        *why = "canonical line " + std::to_string(line) + ": got '" + (ga ? la : std::string("<end>")) +
               "', expected '" + (gb ? lb : std::string("<end>")) + "'";
      return false;
    }
  }
}

}  // namespace voila::ivl
