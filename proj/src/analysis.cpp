#include "voila/analysis.hpp"

#include <algorithm>
#include <functional>

namespace voila {

const char* atomicityName(Atomicity a) { return a == Atomicity::Atomic ? "Atomic" : "NonAtomic"; }

const RegionInfo* ResolvedProgram::region(const std::string& n) const {
  auto it = regions.find(n);
  return it == regions.end() ? nullptr : &it->second;
}

const CallableInfo* ResolvedProgram::callable(const std::string& n) const {
  auto it = callables.find(n);
  return it == callables.end() ? nullptr : &it->second;
}

const RegionInfo* ResolvedProgram::guardRegion(const Expr& g) const {
  auto it = guardOwner.find(&g);
  return it == guardOwner.end() ? nullptr : region(it->second);
}

const GuardDecl* ResolvedProgram::guardDecl(const Expr& g) const {
  const RegionInfo* ri = guardRegion(g);
  return ri ? ri->decl->findGuard(g.name) : nullptr;
}

namespace {

using Scope = std::map<std::string, Type>;

bool compatible(const Type& a, const Type& b) {
  if (!a.known() || !b.known()) return true;
  auto numeric = [](const Type& t) { return t.kind == Type::Kind::Int || t.kind == Type::Kind::Frac; };
  if (numeric(a) && numeric(b)) return true;
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Struct) return a.name == b.name;
  if (a.kind == Type::Kind::Set || a.kind == Type::Kind::Seq) return compatible(*a.elem, *b.elem);
  return true;
}

Type joinNumeric(const Type& a, const Type& b) {
  if (a.kind == Type::Kind::Frac || b.kind == Type::Kind::Frac) return Type::frac();
  if (!a.known()) return b;
  return a;
}

class Checker {
 public:
  Checker(ResolvedProgram& rp, Diagnostics& d) : rp_(rp), d_(d) {}

  void run();

 private:
  ResolvedProgram& rp_;
  Diagnostics& d_;
  std::map<std::string, std::string> idContext_;  // region id variable to region name
  std::set<std::string> visitingRegions_;
  std::set<std::string>* binderSink_ = nullptr;  // records binders introduced while typing
  std::map<std::string, Type>* allVars_ = nullptr;

  void error(Span s, const std::string& code, const std::string& msg) { d_.error(s, code, msg); }

  void checkType(const Type& t, Span s) {
    if (t.kind == Type::Kind::Struct && !rp_.program.findStruct(t.name)) error(s, "resolve", "unknown type " + t.name);
    if (t.elem) checkType(*t.elem, s);
  }

  void bind(Scope& sc, const std::string& n, const Type& t, Span s) {
    if (sc.count(n)) {
      error(s, "resolve", "duplicate declaration of " + n);
      return;
    }
    sc[n] = t;
    if (allVars_) (*allVars_)[n] = t;
    if (binderSink_) binderSink_->insert(n);
  }

  void collectIds(const Expr& e) {
    if (e.kind == ExprKind::RegionAssn && !e.args.empty() && e.args[0]->kind == ExprKind::Var)
      idContext_.emplace(e.args[0]->name, e.name);
    for (const auto& a : e.args) collectIds(*a);
    if (e.target) collectIds(*e.target);
  }

  void collectIds(const StmtList& body) {
    for (const auto& s : body) {
      for (const ExprPtr& e : {s->expr, s->region, s->guard})
        if (e) collectIds(*e);
      for (const auto& e : s->invariants) collectIds(*e);
      collectIds(s->body);
      collectIds(s->elseBody);
    }
  }

  // ---------------------------------------------------------- regions

  RegionInfo* regionInfo(const std::string& name, Span use) {
    auto it = rp_.regions.find(name);
    if (it == rp_.regions.end()) {
      const RegionDecl* rd = rp_.program.findRegion(name);
      if (!rd) return nullptr;
      resolveRegion(*rd);
      it = rp_.regions.find(name);
      if (it == rp_.regions.end()) {
        error(use, "resolve", "cyclic region nesting through " + name);
        return nullptr;
      }
    }
    return &it->second;
  }

  void resolveRegion(const RegionDecl& r) {
    if (rp_.regions.count(r.name) || visitingRegions_.count(r.name)) return;
    visitingRegions_.insert(r.name);
    RegionInfo info;
    info.decl = &r;
    info.levelParam = r.levelParam();
    Scope sc;
    if (r.params.empty() || r.params[0].type.kind != Type::Kind::Id)
      error(r.span, "resolve", "region " + r.name + " must declare an id parameter first");
    for (const auto& p : r.params) {
      checkType(p.type, p.span);
      bind(sc, p.name, p.type, p.span);
    }
    std::set<std::string> gnames;
    for (const auto& g : r.guards) {
      if (!gnames.insert(g.name).second) error(g.span, "resolve", "duplicate guard " + g.name + " in region " + r.name);
      for (const auto& p : g.params) checkType(p.type, p.span);
      checkGuardShape(g);
    }
    auto saved = idContext_;
    idContext_.clear();
    for (const auto& p : r.params)
      if (p.type.kind == Type::Kind::Id && &p == &r.params[0]) idContext_[p.name] = r.name;
    collectIds(*r.interpretation);
    assertion(*r.interpretation, sc);
    info.stateType = expr(*r.state, sc);
    int lvl = -1;
    std::function<void(const Expr&)> nested = [&](const Expr& e) {
      if (e.kind == ExprKind::RegionAssn) {
        if (std::find(info.nested.begin(), info.nested.end(), e.name) == info.nested.end()) info.nested.push_back(e.name);
        const RegionInfo* ni = rp_.region(e.name);
        int l = 0;
        if (ni && ni->levelParam) {
          std::size_t k = *ni->levelParam;
          if (k < e.args.size() && e.args[k]->kind == ExprKind::IntLit) l = static_cast<int>(e.args[k]->num);
        } else if (ni) {
          l = ni->staticLevel;
        }
        lvl = std::max(lvl, l);
      }
      for (const auto& a : e.args) nested(*a);
    };
    nested(*r.interpretation);
    info.staticLevel = lvl + 1;
    info.vars = sc;
    idContext_ = saved;
    bool lit = false;
    auto ov = rp_.config.stateDomains.find(r.name);
    if (ov != rp_.config.stateDomains.end()) {
      info.domain = Value::set(ov->second).elems;
    } else {
      info.domain = defaultStateDomain(r, info.stateType, rp_.types, &lit);
    }
    info.domainFromLiterals = lit;
    visitingRegions_.erase(r.name);
    rp_.regions.emplace(r.name, std::move(info));
  }

  void checkGuardShape(const GuardDecl& g) {
    switch (g.kind) {
      case GuardKind::Fractional:
        if (g.params.empty() || g.params.back().type.kind != Type::Kind::Frac)
          error(g.span, "type", "fractional guard " + g.name + " needs a trailing frac parameter");
        break;
      case GuardKind::Indexed:
        if (g.params.size() != 1) error(g.span, "arity", "indexed guard " + g.name + " takes exactly one index");
        break;
      case GuardKind::Unique:
      case GuardKind::Duplicable:
        for (const auto& p : g.params)
          if (p.type.kind == Type::Kind::Frac)
            error(g.span, "type", std::string(guardKindName(g.kind)) + " guard " + g.name + " takes no amount");
        break;
      case GuardKind::Manual: break;
    }
  }

  void actions(const RegionDecl& r, const RegionInfo& info) {
    for (const auto& a : r.actions) {
      Scope sc = info.vars;
      // Binders shadow nothing: they live in their own action scope.
      for (const auto& b : a.binders) {
        if (std::count(a.binders.begin(), a.binders.end(), b) > 1) error(a.span, "resolve", "duplicate binder ?" + b);
        sc[b] = Type::unknown();
      }
      // An undeclared guard is reported by checkRegionWellformed.
      if (const GuardDecl* gd = r.findGuard(a.guard)) {
        if (gd->params.size() != a.guardArgs.size())
          error(a.span, "arity", "guard " + a.guard + " expects " + std::to_string(gd->params.size()) + " arguments");
        for (std::size_t i = 0; i < a.guardArgs.size() && i < gd->params.size(); ++i)
          typeBinderOrExpr(*a.guardArgs[i], gd->params[i].type, sc);
      }
      typeBinderOrExpr(*a.from, info.stateType, sc);
      typeBinderOrExpr(*a.to, info.stateType, sc);
      if (a.condition) expectType(*a.condition, Type::boolean(), sc, "action condition");
      for (auto& [n, t] : sc)
        if (!t.known() && std::count(a.binders.begin(), a.binders.end(), n)) t = Type::integer();
    }
  }

  // Binders in actions get their type from the position they first occupy.
  void typeBinderOrExpr(const Expr& e, const Type& want, Scope& sc) {
    if (e.kind == ExprKind::Var) {
      auto it = sc.find(e.name);
      if (it != sc.end() && !it->second.known()) {
        it->second = want;
        return;
      }
    }
    Type t = expr(e, sc);
    if (!compatible(t, want)) error(e.span, "type", "expected " + want.str() + " but found " + t.str());
  }

  // ------------------------------------------------------ expressions

  void expectType(const Expr& e, const Type& want, Scope& sc, const std::string& what) {
    Type t = expr(e, sc);
    if (!compatible(t, want)) error(e.span, "type", what + ": expected " + want.str() + " but found " + t.str());
  }

  void assertion(const Expr& e, Scope& sc) { expectType(e, Type::boolean(), sc, "assertion"); }

  Type lookup(const std::string& n, Span s, Scope& sc) {
    auto it = sc.find(n);
    if (it == sc.end()) {
      error(s, "resolve", "unbound name " + n);
      return Type::unknown();
    }
    return it->second;
  }

  Type fieldType(const std::string& f, Span s) {
    auto it = rp_.fields.find(f);
    if (it == rp_.fields.end()) {
      error(s, "resolve", "unknown field " + f);
      return Type::unknown();
    }
    return it->second;
  }

  void expectRef(const Expr& e, Scope& sc) {
    Type t = expr(e, sc);
    if (t.known() && !t.isRef()) error(e.span, "type", "expected a reference but found " + t.str());
  }

  Type regionAssertion(const Expr& e, Scope& sc, bool allowState) {
    RegionInfo* ri = regionInfo(e.name, e.span);
    if (!ri) {
      error(e.span, "resolve", "unknown region " + e.name);
      for (const auto& a : e.args)
        if (a->kind != ExprKind::Binder && a->kind != ExprKind::Wildcard) expr(*a, sc);
      return Type::boolean();
    }
    const auto& ps = ri->decl->params;
    bool withState = e.args.size() == ps.size() + 1;
    if (e.args.size() != ps.size() && !(withState && allowState)) {
      error(e.span, "arity",
            "region " + e.name + " expects " + std::to_string(ps.size()) +
                (allowState ? " or " + std::to_string(ps.size() + 1) : std::string()) + " arguments but got " +
                std::to_string(e.args.size()));
      return Type::boolean();
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Type t = expr(*e.args[i], sc);
      if (!compatible(t, ps[i].type))
        error(e.args[i]->span, "type",
              "argument " + std::to_string(i + 1) + " of " + e.name + ": expected " + ps[i].type.str() + " but found " +
                  t.str());
    }
    if (withState) {
      const Expr& st = *e.args.back();
      if (st.kind == ExprKind::Var && !sc.count(st.name))
        error(st.span, "resolve", "unbound region state " + st.name);
      else if (st.kind == ExprKind::Binder)
        bind(sc, st.name, ri->stateType, st.span);
      else if (st.kind != ExprKind::Wildcard)
        expectType(st, ri->stateType, sc, "region state of " + e.name);
    }
    return Type::boolean();
  }

  Type guardAssertion(const Expr& e, Scope& sc) {
    std::vector<const RegionDecl*> owners;
    for (const auto* r : rp_.program.regions())
      if (r->findGuard(e.name)) owners.push_back(r);
    const RegionDecl* owner = nullptr;
    if (owners.size() == 1) {
      owner = owners[0];
    } else if (owners.size() > 1 && e.target->kind == ExprKind::Var) {
      auto it = idContext_.find(e.target->name);
      if (it != idContext_.end())
        for (const auto* r : owners)
          if (r->name == it->second) owner = r;
      if (!owner) error(e.span, "resolve", "ambiguous guard " + e.name + "@" + e.target->name);
    } else if (owners.empty()) {
      error(e.span, "resolve", "unknown guard " + e.name);
    } else {
      error(e.span, "resolve", "ambiguous guard " + e.name);
    }
    expectRef(*e.target, sc);
    if (!owner) {
      for (const auto& a : e.args) expr(*a, sc);
      return Type::boolean();
    }
    rp_.guardOwner[&e] = owner->name;
    const GuardDecl* gd = owner->findGuard(e.name);
    if (gd->params.size() != e.args.size()) {
      error(e.span, "arity",
            "guard " + e.name + " expects " + std::to_string(gd->params.size()) + " arguments but got " +
                std::to_string(e.args.size()));
      return Type::boolean();
    }
    for (std::size_t i = 0; i < e.args.size(); ++i) expectType(*e.args[i], gd->params[i].type, sc, "guard argument");
    return Type::boolean();
  }

  Type expr(const Expr& e, Scope& sc) {
    switch (e.kind) {
      case ExprKind::IntLit: return Type::integer();
      case ExprKind::BoolLit: return Type::boolean();
      case ExprKind::FracLit: return Type::frac();
      case ExprKind::Var: return lookup(e.name, e.span, sc);
      case ExprKind::Binder:
        error(e.span, "resolve", "binder ?" + e.name + " in an illegal position");
        return Type::unknown();
      case ExprKind::Wildcard:
        error(e.span, "resolve", "wildcard in an illegal position");
        return Type::unknown();
      case ExprKind::TypeSet:
        if (e.name == "Int") return Type::set(Type::integer());
        return Type::set(Type::boolean());
      case ExprKind::Unary: {
        Type t = expr(*e.args[0], sc);
        if (e.uop == UnOp::Not) {
          if (!compatible(t, Type::boolean())) error(e.span, "type", "'!' expects bool but found " + t.str());
          return Type::boolean();
        }
        if (t.known() && t.kind != Type::Kind::Int && t.kind != Type::Kind::Frac)
          error(e.span, "type", "'-' expects a number but found " + t.str());
        return t;
      }
      case ExprKind::Binary: return binary(e, sc);
      case ExprKind::SetLit:
      case ExprKind::SeqLit: {
        Type elem = Type::unknown();
        for (const auto& a : e.args) {
          Type t = expr(*a, sc);
          if (!compatible(elem, t)) error(a->span, "type", "mixed element types " + elem.str() + " and " + t.str());
          if (!elem.known()) elem = t;
        }
        return e.kind == ExprKind::SetLit ? Type::set(elem) : Type::seq(elem);
      }
      case ExprKind::FieldRead:
        expectRef(*e.args[0], sc);
        return fieldType(e.name, e.span);
      case ExprKind::PointsTo: {
        expectRef(*e.args[0], sc);
        Type ft = fieldType(e.name, e.span);
        const Expr& v = *e.args[1];
        if (v.kind == ExprKind::Binder)
          bind(sc, v.name, ft, v.span);
        else
          expectType(v, ft, sc, "points-to value");
        return Type::boolean();
      }
      case ExprKind::RegionAssn: return regionAssertion(e, sc, true);
      case ExprKind::GuardAssn: return guardAssertion(e, sc);
      case ExprKind::Diamond:
        expectType(*e.target, Type::id(), sc, "tracking target");
        return Type::boolean();
      case ExprKind::Witness: {
        expectType(*e.target, Type::id(), sc, "tracking target");
        Type a = expr(*e.args[0], sc), b = expr(*e.args[1], sc);
        if (!compatible(a, b)) error(e.span, "type", "witness endpoints have types " + a.str() + " and " + b.str());
        return Type::boolean();
      }
    }
    return Type::unknown();
  }

  Type binary(const Expr& e, Scope& sc) {
    Type a = expr(*e.args[0], sc);
    Type b = expr(*e.args[1], sc);
    auto want = [&](bool ok, const std::string& what) {
      if (!ok) error(e.span, "type", what + " but found " + a.str() + " and " + b.str());
    };
    auto isNum = [](const Type& t) {
      return !t.known() || t.kind == Type::Kind::Int || t.kind == Type::Kind::Frac;
    };
    auto isColl = [](const Type& t) {
      return !t.known() || t.kind == Type::Kind::Set || t.kind == Type::Kind::Seq;
    };
    switch (e.bop) {
      case BinOp::Implies:
      case BinOp::Or:
      case BinOp::And:
        want(compatible(a, Type::boolean()) && compatible(b, Type::boolean()), "logical operator expects bool");
        if (e.bop != BinOp::And && isSpatial(*e.args[0]))
          error(e.args[0]->span, "type", "left side of a logical operator must be pure");
        if (e.bop == BinOp::Or && isSpatial(*e.args[1]))
          error(e.args[1]->span, "type", "disjunction of spatial assertions is not supported");
        return Type::boolean();
      case BinOp::Eq:
      case BinOp::Ne: want(compatible(a, b), "comparison of incompatible types"); return Type::boolean();
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge: want(isNum(a) && isNum(b), "ordering expects numbers"); return Type::boolean();
      case BinOp::In:
        want(isColl(b) && (!b.known() || compatible(a, *b.elem)), "'in' expects an element and a collection");
        return Type::boolean();
      case BinOp::Subset: want(isColl(a) && isColl(b) && compatible(a, b), "'subset' expects sets"); return Type::boolean();
      case BinOp::Union:
      case BinOp::Inter:
      case BinOp::SetMinus: want(isColl(a) && isColl(b) && compatible(a, b), "set operator expects sets"); return a;
      case BinOp::Add:
      case BinOp::Sub:
        if (a.kind == Type::Kind::Set) {
          want(compatible(a, b), "set operator expects sets");
          return a;
        }
        [[fallthrough]];
      case BinOp::Mul:
      case BinOp::Div:
      case BinOp::Mod: want(isNum(a) && isNum(b), "arithmetic expects numbers"); return joinNumeric(a, b);
    }
    return Type::unknown();
  }

  // ------------------------------------------------------- callables

  void callable(CallableInfo& ci) {
    allVars_ = &ci.vars;
    idContext_.clear();
    for (const auto& e : ci.pres()) collectIds(*e);
    for (const auto& e : ci.posts()) collectIds(*e);
    if (ci.proc && ci.proc->body) collectIds(*ci.proc->body);
    Scope sc;
    for (const auto& p : ci.params()) {
      checkType(p.type, p.span);
      bind(sc, p.name, p.type, p.span);
    }
    if (ci.proc) {
      for (const auto& p : ci.proc->returns) {
        checkType(p.type, p.span);
        bind(sc, p.name, p.type, p.span);
      }
      for (const auto& ic : ci.proc->interference) {
        Type st = expr(*ic.set, sc);
        Type elem = st.kind == Type::Kind::Set && st.elem ? *st.elem : Type::unknown();
        if (st.known() && st.kind != Type::Kind::Set) error(ic.span, "type", "interference set must be a set");
        bind(sc, ic.binder, elem, ic.span);
        ci.interferenceVars.insert(ic.binder);
      }
    }
    binderSink_ = &ci.preBinders;
    for (const auto& e : ci.pres()) assertion(*e, sc);
    binderSink_ = nullptr;
    Scope post = sc;
    for (const auto& e : ci.posts()) assertion(*e, post);
    if (ci.proc && ci.proc->body) {
      Scope body = sc;
      // Binders of the postcondition are not visible in the body, but names
      // must stay unique across the callable.
      for (const auto& [n, t] : post)
        if (!body.count(n)) reserved_.insert(n);
      statements(*ci.proc->body, body);
      reserved_.clear();
    }
    allVars_ = nullptr;
  }

  std::set<std::string> reserved_;

  void declareLocal(Scope& sc, const std::string& n, const Type& t, Span s) {
    if (reserved_.count(n)) {
      error(s, "resolve", "duplicate declaration of " + n);
      return;
    }
    bind(sc, n, t, s);
  }

  void statements(const StmtList& body, Scope& sc) {
    for (const auto& s : body) statement(*s, sc);
  }

  void assignTo(const std::string& n, const Type& t, Span s, Scope& sc) {
    Type vt = lookup(n, s, sc);
    if (!compatible(vt, t)) error(s, "type", "cannot assign " + t.str() + " to " + n + " of type " + vt.str());
  }

  void usingRegion(const Stmt& s, Scope& sc, bool allowState) {
    if (s.region->kind != ExprKind::RegionAssn) {
      error(s.span, "type", "expected a region assertion");
      return;
    }
    regionAssertion(*s.region, sc, allowState);
  }

  void statement(const Stmt& s, Scope& sc) {
    switch (s.kind) {
      case StmtKind::VarDecl:
        checkType(s.declType, s.span);
        if (s.expr) expectType(*s.expr, s.declType, sc, "initializer of " + s.name);
        declareLocal(sc, s.name, s.declType, s.span);
        break;
      case StmtKind::Assign: assignTo(s.name, expr(*s.expr, sc), s.span, sc); break;
      case StmtKind::FieldWrite: {
        expectRef(*s.recv, sc);
        Type ft = fieldType(s.field, s.span);
        expectType(*s.expr, ft, sc, "field write");
        break;
      }
      case StmtKind::FieldRead:
        expectRef(*s.recv, sc);
        assignTo(s.name, fieldType(s.field, s.span), s.span, sc);
        break;
      case StmtKind::Call: call(s, sc); break;
      case StmtKind::If: {
        expectType(*s.expr, Type::boolean(), sc, "condition");
        Scope a = sc, b = sc;
        statements(s.body, a);
        statements(s.elseBody, b);
        break;
      }
      case StmtKind::While:
      case StmtKind::DoWhile: {
        Scope inner = sc;
        if (s.kind == StmtKind::DoWhile) statements(s.body, inner);
        expectType(*s.expr, Type::boolean(), inner, "loop condition");
        for (const auto& inv : s.invariants) {
          Scope is = sc;
          assertion(*inv, is);
        }
        if (s.kind == StmtKind::While) statements(s.body, inner);
        break;
      }
      case StmtKind::MakeAtomic:
      case StmtKind::UseAtomic: {
        Scope inner = sc;
        usingRegion(s, inner, s.kind == StmtKind::UseAtomic);
        if (s.guard->kind != ExprKind::GuardAssn) error(s.guard->span, "type", "expected a guard assertion");
        assertion(*s.guard, inner);
        statements(s.body, inner);
        break;
      }
      case StmtKind::UpdateRegion:
      case StmtKind::OpenRegion: {
        Scope inner = sc;
        usingRegion(s, inner, false);
        statements(s.body, inner);
        break;
      }
      case StmtKind::Use: {
        const LemmaDecl* l = rp_.program.findLemma(s.name);
        if (!l) {
          error(s.span, "resolve", "unknown lemma " + s.name);
          for (const auto& a : s.args) expr(*a, sc);
          break;
        }
        arguments(s, l->params, sc);
        break;
      }
      case StmtKind::Fold:
      case StmtKind::Unfold: usingRegion(s, sc, false); break;
      case StmtKind::Inhale:
      case StmtKind::Exhale:
      case StmtKind::Assert: assertion(*s.expr, sc); break;
      case StmtKind::Parallel: statements(s.body, sc); break;
    }
  }

  void arguments(const Stmt& s, const std::vector<Param>& ps, Scope& sc) {
    if (ps.size() != s.args.size()) {
      error(s.span, "arity",
            s.name + " expects " + std::to_string(ps.size()) + " arguments but got " + std::to_string(s.args.size()));
      return;
    }
    for (std::size_t i = 0; i < ps.size(); ++i) expectType(*s.args[i], ps[i].type, sc, "argument of " + s.name);
  }

  void call(const Stmt& s, Scope& sc) {
    const ProcDecl* p = rp_.program.findProcedure(s.name);
    if (!p) {
      if (rp_.program.findLemma(s.name))
        error(s.span, "resolve", "lemma " + s.name + " must be applied with 'use'");
      else
        error(s.span, "resolve", "unknown procedure " + s.name);
      return;
    }
    arguments(s, p->params, sc);
    if (!s.targets.empty() && s.targets.size() != p->returns.size()) {
      error(s.span, "arity", s.name + " returns " + std::to_string(p->returns.size()) + " values");
      return;
    }
    for (std::size_t i = 0; i < s.targets.size(); ++i) assignTo(s.targets[i], p->returns[i].type, s.span, sc);
  }

};

void Checker::run() {
  std::set<std::string> names;
  for (const auto& d : rp_.program.decls)
    if (!names.insert(declName(d)).second) error(declSpan(d), "resolve", "duplicate declaration " + declName(d));
  for (const auto* s : rp_.program.structs())
    for (const auto& f : s->fields) {
      checkType(f.type, f.span);
      auto it = rp_.fields.find(f.name);
      if (it != rp_.fields.end() && !(it->second == f.type))
        error(f.span, "type", "field " + f.name + " redeclared with type " + f.type.str());
      rp_.fields.emplace(f.name, f.type);
    }
  for (const auto* r : rp_.program.regions()) resolveRegion(*r);
  for (const auto* r : rp_.program.regions())
    if (const RegionInfo* ri = rp_.region(r->name)) actions(*r, *ri);
  for (const auto* p : rp_.program.procedures()) {
    CallableInfo ci;
    ci.name = p->name;
    ci.proc = p;
    rp_.callables.emplace(p->name, std::move(ci));
  }
  for (const auto* l : rp_.program.lemmas()) {
    CallableInfo ci;
    ci.name = l->name;
    ci.isLemma = true;
    ci.lemma = l;
    rp_.callables.emplace(l->name, std::move(ci));
  }
  for (auto& [n, ci] : rp_.callables) callable(ci);
}

}  // namespace

std::vector<Value> defaultStateDomain(const RegionDecl& r, const Type& stateType, const TypeDomains& types,
                                      bool* fromLiterals) {
  if (fromLiterals) *fromLiterals = false;
  if (stateType.kind == Type::Kind::Bool) return types.bools;
  if (stateType.kind != Type::Kind::Int) return {};
  auto literal = [](const Expr& e, std::int64_t& v) {
    if (e.kind == ExprKind::IntLit) {
      v = e.num;
      return true;
    }
    if (e.kind == ExprKind::Unary && e.uop == UnOp::Neg && e.args[0]->kind == ExprKind::IntLit) {
      v = -e.args[0]->num;
      return true;
    }
    return false;
  };
  std::vector<Value> lits;
  bool allLiteral = !r.actions.empty();
  for (const auto& a : r.actions)
    for (const auto* e : {a.from.get(), a.to.get()}) {
      std::int64_t v;
      if (literal(*e, v))
        lits.push_back(Value::integer(v));
      else
        allLiteral = false;
    }
  if (r.actions.empty()) {
    // Equalities against literals in the interpretation, e.g. v == 0 || v == 1.
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
      if (e.kind == ExprKind::Binary && e.bop == BinOp::Eq) {
        std::int64_t v;
        for (const auto& side : e.args)
          if (literal(*side, v)) lits.push_back(Value::integer(v));
      }
      for (const auto& a : e.args) walk(*a);
    };
    walk(*r.interpretation);
    allLiteral = !lits.empty();
  }
  if (allLiteral) {
    if (fromLiterals) *fromLiterals = true;
    return Value::set(lits).elems;
  }
  return types.ints;
}

void runTypecheck(ResolvedProgram& rp, Diagnostics& d) {
  Checker c(rp, d);
  c.run();
}

}  // namespace voila
