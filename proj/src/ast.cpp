#include "voila/ast.hpp"

#include <algorithm>

namespace voila {

std::string Type::str() const {
  switch (kind) {
    case Kind::Unknown: return "?";
    case Kind::Id: return "id";
    case Kind::Bool: return "bool";
    case Kind::Int: return "int";
    case Kind::Frac: return "frac";
    case Kind::Set: return "Set<" + elem->str() + ">";
    case Kind::Seq: return "Seq<" + elem->str() + ">";
    case Kind::Struct: return name;
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Struct) return a.name == b.name;
  if (a.kind == Type::Kind::Set || a.kind == Type::Kind::Seq) return *a.elem == *b.elem;
  return true;
}

bool Expr::isAssertionForm() const {
  switch (kind) {
    case ExprKind::PointsTo:
    case ExprKind::RegionAssn:
    case ExprKind::GuardAssn:
    case ExprKind::Diamond:
    case ExprKind::Witness: return true;
    default: return false;
  }
}

bool isSpatial(const Expr& e) {
  if (e.isAssertionForm()) return true;
  if (e.kind == ExprKind::Binary && (e.bop == BinOp::And || e.bop == BinOp::Implies))
    return std::any_of(e.args.begin(), e.args.end(), [](const ExprPtr& a) { return isSpatial(*a); });
  return false;
}

namespace mk {
namespace {
std::shared_ptr<Expr> make(ExprKind k, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  return e;
}
}  // namespace

ExprPtr intLit(std::int64_t v, Span s) {
  auto e = make(ExprKind::IntLit, s);
  e->num = v;
  return e;
}
ExprPtr boolLit(bool v, Span s) {
  auto e = make(ExprKind::BoolLit, s);
  e->bval = v;
  return e;
}
ExprPtr fracLit(std::int64_t n, std::int64_t d, Span s) {
  auto e = make(ExprKind::FracLit, s);
  e->num = n;
  e->den = d;
  return e;
}
ExprPtr var(std::string n, Span s) {
  auto e = make(ExprKind::Var, s);
  e->name = std::move(n);
  return e;
}
ExprPtr binder(std::string n, Span s) {
  auto e = make(ExprKind::Binder, s);
  e->name = std::move(n);
  return e;
}
ExprPtr wildcard(Span s) { return make(ExprKind::Wildcard, s); }
ExprPtr unary(UnOp op, ExprPtr x, Span s) {
  auto e = make(ExprKind::Unary, s);
  e->uop = op;
  e->args = {std::move(x)};
  return e;
}
ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, Span s) {
  auto e = make(ExprKind::Binary, s);
  e->bop = op;
  e->args = {std::move(l), std::move(r)};
  return e;
}
ExprPtr setLit(std::vector<ExprPtr> elems, Span s) {
  auto e = make(ExprKind::SetLit, s);
  e->args = std::move(elems);
  return e;
}
ExprPtr seqLit(std::vector<ExprPtr> elems, Span s) {
  auto e = make(ExprKind::SeqLit, s);
  e->args = std::move(elems);
  return e;
}
ExprPtr fieldRead(ExprPtr recv, std::string field, Span s) {
  auto e = make(ExprKind::FieldRead, s);
  e->args = {std::move(recv)};
  e->name = std::move(field);
  return e;
}
ExprPtr typeSet(std::string typeName, Span s) {
  auto e = make(ExprKind::TypeSet, s);
  e->name = std::move(typeName);
  return e;
}
ExprPtr pointsTo(ExprPtr recv, std::string field, ExprPtr value, Span s) {
  auto e = make(ExprKind::PointsTo, s);
  e->args = {std::move(recv), std::move(value)};
  e->name = std::move(field);
  return e;
}
ExprPtr region(std::string n, std::vector<ExprPtr> args, Span s) {
  auto e = make(ExprKind::RegionAssn, s);
  e->name = std::move(n);
  e->args = std::move(args);
  return e;
}
ExprPtr guard(std::string n, std::vector<ExprPtr> args, ExprPtr target, Span s) {
  auto e = make(ExprKind::GuardAssn, s);
  e->name = std::move(n);
  e->args = std::move(args);
  e->target = std::move(target);
  return e;
}
ExprPtr diamond(ExprPtr target, Span s) {
  auto e = make(ExprKind::Diamond, s);
  e->target = std::move(target);
  return e;
}
ExprPtr witness(ExprPtr target, ExprPtr from, ExprPtr to, Span s) {
  auto e = make(ExprKind::Witness, s);
  e->target = std::move(target);
  e->args = {std::move(from), std::move(to)};
  return e;
}
}  // namespace mk

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  if (!e) return e;
  if (e->kind == ExprKind::Var) {
    auto it = sub.find(e->name);
    return it == sub.end() ? e : it->second;
  }
  if (e->args.empty() && !e->target) return e;
  auto out = std::make_shared<Expr>(*e);
  for (auto& a : out->args) a = substitute(a, sub);
  out->target = substitute(e->target, sub);
  return out;
}

bool isKeyRule(StmtKind k) {
  return k == StmtKind::MakeAtomic || k == StmtKind::UpdateRegion || k == StmtKind::OpenRegion ||
         k == StmtKind::UseAtomic;
}

bool isGhost(StmtKind k) {
  switch (k) {
    case StmtKind::Use:
    case StmtKind::Fold:
    case StmtKind::Unfold:
    case StmtKind::Inhale:
    case StmtKind::Exhale:
    case StmtKind::Assert: return true;
    default: return false;
  }
}

const char* guardKindName(GuardKind k) {
  switch (k) {
    case GuardKind::Unique: return "unique";
    case GuardKind::Duplicable: return "duplicable";
    case GuardKind::Fractional: return "fractional";
    case GuardKind::Indexed: return "indexed";
    case GuardKind::Manual: return "manual";
  }
  return "unique";
}

const GuardDecl* RegionDecl::findGuard(const std::string& g) const {
  for (const auto& gd : guards)
    if (gd.name == g) return &gd;
  return nullptr;
}

std::optional<std::size_t> RegionDecl::levelParam() const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == "lvl" && params[i].type.kind == Type::Kind::Int) return i;
  return std::nullopt;
}

namespace {
template <typename T>
std::vector<const T*> collect(const std::vector<Declaration>& decls) {
  std::vector<const T*> out;
  for (const auto& d : decls)
    if (const auto* p = std::get_if<T>(&d)) out.push_back(p);
  return out;
}

template <typename T>
const T* findNamed(const std::vector<Declaration>& decls, const std::string& n) {
  for (const auto& d : decls)
    if (const auto* p = std::get_if<T>(&d); p && p->name == n) return p;
  return nullptr;
}
}  // namespace

std::vector<const StructDecl*> Program::structs() const { return collect<StructDecl>(decls); }
std::vector<const RegionDecl*> Program::regions() const { return collect<RegionDecl>(decls); }
std::vector<const ProcDecl*> Program::procedures() const { return collect<ProcDecl>(decls); }
std::vector<const LemmaDecl*> Program::lemmas() const { return collect<LemmaDecl>(decls); }
const StructDecl* Program::findStruct(const std::string& n) const { return findNamed<StructDecl>(decls, n); }
const RegionDecl* Program::findRegion(const std::string& n) const { return findNamed<RegionDecl>(decls, n); }
const ProcDecl* Program::findProcedure(const std::string& n) const { return findNamed<ProcDecl>(decls, n); }
const LemmaDecl* Program::findLemma(const std::string& n) const { return findNamed<LemmaDecl>(decls, n); }

const std::string& declName(const Declaration& d) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

Span declSpan(const Declaration& d) {
  return std::visit([](const auto& x) { return x.span; }, d);
}

// ------------------------------------------------------------- equality

namespace {

bool eqPtr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equalModuloSpans(*a, *b);
}

bool eqExprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eqPtr(a[i], b[i])) return false;
  return true;
}

bool eqStmts(const StmtList& a, const StmtList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equalModuloSpans(*a[i], *b[i])) return false;
  return true;
}

bool eqParams(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].type == b[i].type) || a[i].name != b[i].name) return false;
  return true;
}

bool eqDecl(const StructDecl& a, const StructDecl& b) { return a.name == b.name && eqParams(a.fields, b.fields); }

bool eqDecl(const RegionDecl& a, const RegionDecl& b) {
  if (a.name != b.name || !eqParams(a.params, b.params)) return false;
  if (!eqPtr(a.interpretation, b.interpretation) || !eqPtr(a.state, b.state)) return false;
  if (a.guards.size() != b.guards.size() || a.actions.size() != b.actions.size()) return false;
  for (std::size_t i = 0; i < a.guards.size(); ++i) {
    const auto& x = a.guards[i];
    const auto& y = b.guards[i];
    if (x.name != y.name || x.kind != y.kind || !eqParams(x.params, y.params)) return false;
  }
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    const auto& x = a.actions[i];
    const auto& y = b.actions[i];
    if (x.binders != y.binders || !eqPtr(x.condition, y.condition) || x.guard != y.guard ||
        !eqExprs(x.guardArgs, y.guardArgs) || !eqPtr(x.from, y.from) || !eqPtr(x.to, y.to))
      return false;
  }
  return true;
}

bool eqDecl(const ProcDecl& a, const ProcDecl& b) {
  if (a.abstractAtomic != b.abstractAtomic || a.name != b.name) return false;
  if (!eqParams(a.params, b.params) || !eqParams(a.returns, b.returns)) return false;
  if (a.interference.size() != b.interference.size()) return false;
  for (std::size_t i = 0; i < a.interference.size(); ++i)
    if (a.interference[i].binder != b.interference[i].binder || !eqPtr(a.interference[i].set, b.interference[i].set))
      return false;
  if (!eqExprs(a.pres, b.pres) || !eqExprs(a.posts, b.posts)) return false;
  if (a.body.has_value() != b.body.has_value()) return false;
  return !a.body || eqStmts(*a.body, *b.body);
}

bool eqDecl(const LemmaDecl& a, const LemmaDecl& b) {
  return a.name == b.name && eqParams(a.params, b.params) && eqExprs(a.pres, b.pres) &&
         eqExprs(a.posts, b.posts);
}

}  // namespace

bool equalModuloSpans(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::IntLit: return a.num == b.num;
    case ExprKind::BoolLit: return a.bval == b.bval;
    case ExprKind::FracLit: return a.num == b.num && a.den == b.den;
    case ExprKind::Var:
    case ExprKind::Binder:
    case ExprKind::TypeSet: return a.name == b.name;
    case ExprKind::Wildcard: return true;
    case ExprKind::Unary: return a.uop == b.uop && eqExprs(a.args, b.args);
    case ExprKind::Binary: return a.bop == b.bop && eqExprs(a.args, b.args);
    default: return a.name == b.name && eqExprs(a.args, b.args) && eqPtr(a.target, b.target);
  }
}

bool equalModuloSpans(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == StmtKind::VarDecl && !(a.declType == b.declType)) return false;
  return a.name == b.name && a.targets == b.targets && eqPtr(a.expr, b.expr) && eqPtr(a.recv, b.recv) &&
         a.field == b.field && eqExprs(a.args, b.args) && eqExprs(a.invariants, b.invariants) &&
         eqPtr(a.region, b.region) && eqPtr(a.guard, b.guard) && eqStmts(a.body, b.body) &&
         eqStmts(a.elseBody, b.elseBody) && a.hasElse == b.hasElse;
}

bool equalModuloSpans(const Program& a, const Program& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i) {
    if (a.decls[i].index() != b.decls[i].index()) return false;
    bool same = std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          return eqDecl(x, std::get<T>(b.decls[i]));
        },
        a.decls[i]);
    if (!same) return false;
  }
  return true;
}

}  // namespace voila
