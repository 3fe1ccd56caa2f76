#include <algorithm>
#include <functional>

#include "voila/analysis.hpp"

namespace voila {

namespace {

bool ghostLike(const Stmt& s) { return isGhost(s.kind) || (s.kind == StmtKind::VarDecl && !s.expr); }

}  // namespace

Atomicity classifyAtomicity(const ResolvedProgram& rp, const Stmt& s) {
  switch (s.kind) {
    case StmtKind::FieldWrite:
    case StmtKind::FieldRead:
    case StmtKind::MakeAtomic:
    case StmtKind::UpdateRegion:
    case StmtKind::OpenRegion:
    case StmtKind::UseAtomic:
    case StmtKind::Use:
    case StmtKind::Fold:
    case StmtKind::Unfold:
    case StmtKind::Inhale:
    case StmtKind::Exhale:
    case StmtKind::Assert: return Atomicity::Atomic;
    case StmtKind::VarDecl: return s.expr ? Atomicity::NonAtomic : Atomicity::Atomic;
    case StmtKind::Call: {
      const ProcDecl* p = rp.program.findProcedure(s.name);
      return p && p->abstractAtomic ? Atomicity::Atomic : Atomicity::NonAtomic;
    }
    case StmtKind::Assign:
    case StmtKind::If:
    case StmtKind::While:
    case StmtKind::DoWhile:
    case StmtKind::Parallel: return Atomicity::NonAtomic;
  }
  return Atomicity::NonAtomic;
}

Atomicity classifySeq(const ResolvedProgram& rp, const StmtList& body) {
  int real = 0;
  for (const auto& s : body) {
    if (classifyAtomicity(rp, *s) == Atomicity::NonAtomic) return Atomicity::NonAtomic;
    if (!ghostLike(*s)) ++real;
  }
  return real <= 1 ? Atomicity::Atomic : Atomicity::NonAtomic;
}

namespace {

void classifyAll(ResolvedProgram& rp, const StmtList& body, bool atomicOnly, Diagnostics& d) {
  int real = 0;
  for (const auto& s : body) {
    Atomicity k = classifyAtomicity(rp, *s);
    rp.atomicity[s.get()] = k;
    if (atomicOnly) {
      if (k == Atomicity::NonAtomic)
        d.error(s->span, "atomicity", "non-atomic statement in atomic context");
      else if (!ghostLike(*s) && ++real == 2)
        d.error(s->span, "atomicity", "atomic context admits a single non-ghost statement");
    }
    bool inner = s->kind == StmtKind::UpdateRegion || s->kind == StmtKind::OpenRegion || s->kind == StmtKind::UseAtomic;
    classifyAll(rp, s->body, inner, d);
    classifyAll(rp, s->elseBody, false, d);
  }
}

using Licensed = std::set<std::pair<std::string, std::string>>;

class FramingCheck {
 public:
  FramingCheck(const RegionDecl& r, Diagnostics& d) : r_(r), d_(d) {}

  void assertion(const Expr& e, Licensed& lic) {
    if (e.kind == ExprKind::Binary && e.bop == BinOp::And) {
      assertion(*e.args[0], lic);
      assertion(*e.args[1], lic);
      return;
    }
    if (e.kind == ExprKind::Binary && e.bop == BinOp::Implies) {
      reads(*e.args[0], lic);
      Licensed local = lic;
      assertion(*e.args[1], local);
      return;
    }
    if (e.kind == ExprKind::PointsTo) {
      reads(*e.args[0], lic);
      if (e.args[1]->kind != ExprKind::Binder) reads(*e.args[1], lic);
      if (e.args[0]->kind == ExprKind::Var) lic.emplace(e.args[0]->name, e.name);
      return;
    }
    reads(e, lic);
  }

 private:
  const RegionDecl& r_;
  Diagnostics& d_;

  void reads(const Expr& e, const Licensed& lic) {
    if (e.kind == ExprKind::FieldRead) {
      const Expr& recv = *e.args[0];
      if (recv.kind != ExprKind::Var || !lic.count({recv.name, e.name}))
        d_.error(e.span, "region",
                 "region " + r_.name + ": interpretation is not self-framing, " + printedRead(e) +
                     " is read before its points-to");
    }
    for (const auto& a : e.args)
      if (a->kind != ExprKind::Binder && a->kind != ExprKind::Wildcard) reads(*a, lic);
    if (e.target) reads(*e.target, lic);
  }

  static std::string printedRead(const Expr& e) {
    const Expr& recv = *e.args[0];
    return (recv.kind == ExprKind::Var ? recv.name : std::string("(...)")) + "." + e.name;
  }
};

}  // namespace

Diagnostics checkRegionWellformed(const ResolvedProgram& rp, const RegionDecl& r) {
  Diagnostics d;
  const RegionInfo* info = rp.region(r.name);
  if (!info) return d;
  // (a) state expression typing
  if (!info->stateType.known())
    d.error(r.state->span, "region", "region " + r.name + ": state expression has no well-defined type");
  // (c) guards used by actions are declared
  bool guardsOk = true;
  for (const auto& a : r.actions)
    if (!r.findGuard(a.guard)) {
      d.error(a.span, "region", "region " + r.name + ": action uses undeclared guard " + a.guard);
      guardsOk = false;
    }
  // (b) transitive closure over the finite state domain
  if (guardsOk && !info->domain.empty()) {
    ClosureResult c = checkTransitiveClosure(r, info->domain, rp.types, rp.config.domainCap);
    if (c.tooLarge) {
      d.error(r.span, "closure",
              "region " + r.name + ": state domain has " + std::to_string(info->domain.size()) +
                  " values, above the limit of " + std::to_string(rp.config.domainCap) +
                  "; give an explicit --state-domain");
    } else if (!c.closed) {
      const auto& [a, b, x] = *c.counterexample;
      Span at = r.span;
      for (const auto& act : r.actions)
        if (act.guard == c.guard) {
          at = act.span;
          break;
        }
      d.error(at, "closure",
              "region " + r.name + ": actions of guard " + c.guard + " are not transitively closed, counterexample (" +
                  a.str() + ", " + b.str() + ", " + x.str() + ")");
    }
  }
  // (d) self-framing interpretation
  Licensed lic;
  FramingCheck(r, d).assertion(*r.interpretation, lic);
  return d;
}

Diagnostics checkProcedureSignature(const ResolvedProgram& rp, const ProcDecl& p) {
  Diagnostics d;
  if (!p.abstractAtomic) {
    for (const auto& ic : p.interference)
      d.error(ic.span, "signature", "interference clause on non-atomic procedure " + p.name);
    return d;
  }
  std::map<std::string, int> clauses;
  for (const auto& ic : p.interference)
    if (++clauses[ic.binder] == 2) d.error(ic.span, "signature", "duplicate interference binding of " + ic.binder);
  std::map<std::string, int> uses;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::RegionAssn) {
      const RegionInfo* ri = rp.region(e.name);
      if (ri && e.args.size() == ri->decl->params.size() + 1) {
        const Expr& st = *e.args.back();
        if (st.kind == ExprKind::Var && clauses.count(st.name)) {
          if (++uses[st.name] == 2)
            d.error(st.span, "signature", "interference binder " + st.name + " binds more than one region state");
        } else if (st.kind == ExprKind::Binder || st.kind == ExprKind::Wildcard) {
          d.error(st.span, "signature",
                  "region state of " + e.name + " in the precondition of " + p.name +
                      " must be bound by an interference clause");
        }
      }
    }
    for (const auto& a : e.args) walk(*a);
  };
  for (const auto& e : p.pres) walk(*e);
  for (const auto& ic : p.interference)
    if (!uses.count(ic.binder))
      d.warning(ic.span, "signature", "interference binder " + ic.binder + " binds no region state");
  return d;
}

AnalysisResult analyze(Program p, const AnalysisConfig& cfg) {
  auto rp = std::make_shared<ResolvedProgram>(std::move(p));
  rp->config = cfg;
  rp->types = TypeDomains::defaults(cfg.intLo, cfg.intHi);
  AnalysisResult res;
  runTypecheck(*rp, res.diags);
  for (const auto* proc : rp->program.procedures()) {
    if (!proc->body) continue;
    classifyAll(*rp, *proc->body, false, res.diags);
    if (proc->abstractAtomic && classifySeq(*rp, *proc->body) == Atomicity::NonAtomic)
      res.diags.error(proc->span, "atomicity", "body of abstract_atomic procedure " + proc->name + " is not atomic");
  }
  if (!res.diags.hasErrors()) {
    for (const auto* r : rp->program.regions()) res.diags.append(checkRegionWellformed(*rp, *r));
    for (const auto* proc : rp->program.procedures()) res.diags.append(checkProcedureSignature(*rp, *proc));
  } else {
    for (const auto* proc : rp->program.procedures())
      for (const auto& ic : proc->interference)
        if (!proc->abstractAtomic)
          res.diags.error(ic.span, "signature", "interference clause on non-atomic procedure " + proc->name);
  }
  res.diags.sortByPosition();
  res.program = rp;
  return res;
}

}  // namespace voila
