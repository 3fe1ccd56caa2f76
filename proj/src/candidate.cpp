#include "voila/candidate.hpp"

#include <functional>
#include <sstream>

#include "voila/printer.hpp"

namespace voila {

std::string RegionInstance::str() const {
  std::string s = region + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + printExpr(*args[i]);
  return s + ")";
}

const char* bridgeName(BridgeKind k) {
  switch (k) {
    case BridgeKind::None: return "statement";
    case BridgeKind::TripleWeak: return "triple_weak";
    case BridgeKind::Stabilize: return "stabilize";
    case BridgeKind::AtomicExists: return "atomic_exists";
    case BridgeKind::FrameBoundary: return "frame";
    case BridgeKind::Substitution: return "substitution";
    case BridgeKind::LevelAdjust: return "level";
  }
  return "?";
}

bool AtomicityBounds::pending(const RegionInstance& r) const {
  for (const auto& l : lower)
    if (l == r) return true;
  return false;
}

std::string AtomicityBounds::str() const {
  std::string s = "update: {";
  for (std::size_t i = 0; i < lower.size(); ++i) s += (i ? ", " : "") + lower[i].str();
  s += "}, alevel: ";
  s += alevel ? printExpr(*alevel) : std::string("level");
  return s;
}

const CandidateNode& CandidateNode::inner() const {
  const CandidateNode* n = this;
  while (n->bridge != BridgeKind::None) n = &n->children.front();
  return *n;
}

RegionInstance instanceOf(const ResolvedProgram& rp, const Expr& e) {
  RegionInstance r;
  r.region = e.name;
  r.args = e.args;
  if (const RegionInfo* ri = rp.region(e.name))
    if (r.args.size() == ri->decl->params.size() + 1) r.args.pop_back();
  return r;
}

ExprPtr instanceLevel(const ResolvedProgram& rp, const RegionInstance& r) {
  const RegionInfo* ri = rp.region(r.region);
  if (!ri) return mk::intLit(0);
  if (ri->levelParam && *ri->levelParam < r.args.size()) return r.args[*ri->levelParam];
  return mk::intLit(ri->staticLevel);
}

std::vector<std::pair<RegionInstance, std::string>> nestedInstances(const ResolvedProgram& rp,
                                                                    const RegionInstance& r) {
  std::vector<std::pair<RegionInstance, std::string>> out;
  const RegionInfo* ri = rp.region(r.region);
  if (!ri) return out;
  std::map<std::string, ExprPtr> sub;
  for (std::size_t i = 0; i < ri->decl->params.size() && i < r.args.size(); ++i)
    sub[ri->decl->params[i].name] = r.args[i];
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::RegionAssn) {
      auto inst = std::make_shared<Expr>(e);
      std::string binder;
      const RegionInfo* ni = rp.region(e.name);
      if (ni && e.args.size() == ni->decl->params.size() + 1 && e.args.back()->kind == ExprKind::Binder)
        binder = e.args.back()->name;
      out.emplace_back(instanceOf(rp, *substitute(inst, sub)), binder);
    }
    for (const auto& a : e.args) walk(*a);
  };
  walk(*ri->decl->interpretation);
  return out;
}

std::vector<ExprPtr> preconditionLevels(const ResolvedProgram& rp, const std::vector<ExprPtr>& pres) {
  std::vector<ExprPtr> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::RegionAssn) {
      ExprPtr l = instanceLevel(rp, instanceOf(rp, e));
      bool seen = false;
      for (const auto& o : out) seen = seen || equalModuloSpans(*o, *l);
      if (!seen) out.push_back(l);
    }
    for (const auto& a : e.args) walk(*a);
  };
  for (const auto& p : pres) walk(*p);
  return out;
}

AtomicityBounds computeAtomicityBounds(const ResolvedProgram& rp, const Stmt& s, const AtomicityBounds& ctx,
                                       Diagnostics* diags) {
  if (s.kind != StmtKind::MakeAtomic && s.kind != StmtKind::UpdateRegion) return ctx;
  RegionInstance inst = instanceOf(rp, *s.region);
  if (s.kind == StmtKind::UpdateRegion) {
    if (!ctx.pending(inst) && diags)
      diags->error(s.span, "atomicity", "update_region on " + inst.str() + " without a pending make_atomic for it");
    return ctx;
  }
  AtomicityBounds out = ctx;
  if (ctx.pending(inst)) {
    if (diags) diags->error(s.span, "atomicity", "make_atomic on " + inst.str() + " while an update is already pending");
    return out;
  }
  out.lower.push_back(inst);
  out.alevel = instanceLevel(rp, inst);
  return out;
}

ExprPtr computeLevel(const ResolvedProgram& rp, const Stmt& s, const ExprPtr& level) {
  if (s.kind == StmtKind::UpdateRegion || s.kind == StmtKind::OpenRegion || s.kind == StmtKind::UseAtomic)
    return instanceLevel(rp, instanceOf(rp, *s.region));
  return level;
}

namespace {

class Expander {
 public:
  Expander(const ResolvedProgram& rp, Diagnostics& d) : rp_(rp), d_(d) {}

  ProcedureCandidate procedure(const ProcDecl& p) {
    ProcedureCandidate pc;
    pc.proc = &p;
    proc_ = &pc;
    pc.levels = preconditionLevels(rp_, p.pres);
    collectInstances(p);
    hasRegions_ = !rp_.program.regions().empty();
    pc.body = list(*p.body, p.abstractAtomic ? Atomicity::Atomic : Atomicity::NonAtomic, AtomicityBounds{}, nullptr);
    count(pc.body, true);
    return pc;
  }

 private:
  const ResolvedProgram& rp_;
  Diagnostics& d_;
  ProcedureCandidate* proc_ = nullptr;
  bool hasRegions_ = false;

  void addInstance(const RegionInstance& r, int depth = 0) {
    for (const auto& a : r.args)
      if (a->kind == ExprKind::Binder || a->kind == ExprKind::Wildcard) return;
    for (const auto& o : proc_->instances)
      if (o == r) return;
    proc_->instances.push_back(r);
    if (depth < 8)
      for (const auto& [n, b] : nestedInstances(rp_, r)) addInstance(n, depth + 1);
  }

  void instancesIn(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
    if (!e) return;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
      if (x.kind == ExprKind::RegionAssn) addInstance(instanceOf(rp_, *substitute(std::make_shared<Expr>(x), sub)));
      for (const auto& a : x.args) walk(*a);
    };
    walk(*e);
  }

  void instancesOfCallee(const std::vector<Param>& params, const std::vector<ExprPtr>& pres,
                         const std::vector<ExprPtr>& posts, const std::vector<ExprPtr>& args) {
    std::map<std::string, ExprPtr> sub;
    for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) sub[params[i].name] = args[i];
    for (const auto& e : pres) instancesIn(e, sub);
    for (const auto& e : posts) instancesIn(e, sub);
  }

  void collectInstances(const ProcDecl& p) {
    for (const auto& e : p.pres) instancesIn(e, {});
    for (const auto& e : p.posts) instancesIn(e, {});
    std::function<void(const StmtList&)> walk = [&](const StmtList& body) {
      for (const auto& s : body) {
        for (const ExprPtr& e : {s->expr, s->region, s->guard}) instancesIn(e, {});
        for (const auto& e : s->invariants) instancesIn(e, {});
        if (s->kind == StmtKind::Call)
          if (const ProcDecl* c = rp_.program.findProcedure(s->name)) instancesOfCallee(c->params, c->pres, c->posts, s->args);
        if (s->kind == StmtKind::Use)
          if (const LemmaDecl* l = rp_.program.findLemma(s->name)) instancesOfCallee(l->params, l->pres, l->posts, s->args);
        walk(s->body);
        walk(s->elseBody);
      }
    };
    walk(*p.body);
  }

  void count(const std::vector<CandidateNode>& nodes, bool annotated) {
    for (const auto& n : nodes) {
      if (n.bridge != BridgeKind::None)
        ++proc_->inferredSteps;
      else if (annotated && isKeyRule(n.stmt->kind))
        ++proc_->annotatedSteps;
      count(n.children, annotated);
      count(n.elseChildren, annotated);
      count(n.unrolled, false);
    }
  }

  // Definitely violated strict level constraint cur > l, when decidable.
  bool notAbove(const ExprPtr& cur, const ExprPtr& l) const {
    if (!cur) return false;  // the procedure level exceeds its precondition levels; left to the verifier
    if (equalModuloSpans(*cur, *l)) return true;
    return cur->kind == ExprKind::IntLit && l->kind == ExprKind::IntLit && cur->num <= l->num;
  }

  void checkLevel(const CandidateNode& n, const ExprPtr& l, const std::string& what) {
    if (notAbove(n.level, l))
      d_.error(n.stmt->span, "level",
               "level check failed: " + what + " has level " + printExpr(*l) + ", not below the current level " +
                   printExpr(*n.level));
  }

  CandidateNode wrap(BridgeKind k, CandidateNode inner, std::string note = {}) {
    CandidateNode b;
    b.bridge = k;
    b.triple = inner.triple;
    b.bounds = inner.bounds;
    b.level = inner.level;
    b.note = std::move(note);
    b.children.push_back(std::move(inner));
    if (k == BridgeKind::TripleWeak) b.children.front().triple = Atomicity::Atomic, b.triple = Atomicity::NonAtomic;
    return b;
  }

  // The repair chain around an atomic step proved in a non-atomic context.
  CandidateNode weaken(CandidateNode n) {
    if (hasRegions_) n = wrap(BridgeKind::AtomicExists, std::move(n));
    n = wrap(BridgeKind::Stabilize, std::move(n));
    return wrap(BridgeKind::TripleWeak, std::move(n));
  }

  CandidateNode framed(CandidateNode n, std::string footprint) {
    n = wrap(BridgeKind::Stabilize, std::move(n));
    return wrap(BridgeKind::FrameBoundary, std::move(n), std::move(footprint));
  }

  std::vector<CandidateNode> list(const StmtList& body, Atomicity ctx, const AtomicityBounds& bounds,
                                  const ExprPtr& level) {
    std::vector<CandidateNode> out;
    for (const auto& s : body) out.push_back(stmt(*s, ctx, bounds, level));
    return out;
  }

  static std::string joinExprs(const std::vector<ExprPtr>& es) {
    std::string s;
    for (std::size_t i = 0; i < es.size(); ++i) s += (i ? " && " : "") + printExpr(*es[i]);
    return s.empty() ? "true" : s;
  }

  CandidateNode stmt(const Stmt& s, Atomicity ctx, const AtomicityBounds& bounds, const ExprPtr& level) {
    CandidateNode n;
    n.stmt = &s;
    auto it = rp_.atomicity.find(&s);
    n.triple = it != rp_.atomicity.end() ? it->second : classifyAtomicity(rp_, s);
    n.bounds = bounds;
    n.level = level;
    bool nonAtomicCtx = ctx == Atomicity::NonAtomic;
    switch (s.kind) {
      case StmtKind::MakeAtomic: {
        RegionInstance inst = instanceOf(rp_, *s.region);
        checkLevelAlevel(n, instanceLevel(rp_, inst), "make_atomic on " + inst.str());
        AtomicityBounds inner = computeAtomicityBounds(rp_, s, bounds, &d_);
        n.children = list(s.body, Atomicity::NonAtomic, inner, level);
        n.note = inner.str();
        CandidateNode w = framed(std::move(n), printExpr(*s.region) + " && " + printExpr(*s.guard));
        return nonAtomicCtx ? weaken(std::move(w)) : w;
      }
      case StmtKind::UpdateRegion:
      case StmtKind::OpenRegion:
      case StmtKind::UseAtomic: {
        RegionInstance inst = instanceOf(rp_, *s.region);
        ExprPtr l = computeLevel(rp_, s, level);
        checkLevel(n, l, inst.str());
        if (s.kind == StmtKind::UseAtomic) checkLevelAlevel(n, l, inst.str());
        computeAtomicityBounds(rp_, s, bounds, &d_);
        n.children = list(s.body, Atomicity::Atomic, bounds, l);
        CandidateNode w = wrap(BridgeKind::LevelAdjust, std::move(n), "to " + printExpr(*l));
        return nonAtomicCtx ? weaken(std::move(w)) : w;
      }
      case StmtKind::While:
      case StmtKind::DoWhile: {
        n.children = list(s.body, Atomicity::NonAtomic, bounds, level);
        if (s.kind == StmtKind::DoWhile) n.unrolled = list(s.body, Atomicity::NonAtomic, bounds, level);
        return framed(std::move(n), joinExprs(s.invariants));
      }
      case StmtKind::If:
        n.children = list(s.body, ctx, bounds, level);
        n.elseChildren = list(s.elseBody, ctx, bounds, level);
        return n;
      case StmtKind::Call: {
        const ProcDecl* callee = rp_.program.findProcedure(s.name);
        if (!callee) return n;
        std::map<std::string, ExprPtr> sub;
        for (std::size_t i = 0; i < callee->params.size() && i < s.args.size(); ++i)
          sub[callee->params[i].name] = s.args[i];
        std::vector<ExprPtr> ls;
        for (const auto& l : preconditionLevels(rp_, callee->pres)) {
          ls.push_back(substitute(l, sub));
          checkLevel(n, ls.back(), "call of " + s.name);
          checkLevelAlevel(n, ls.back(), "call of " + s.name);
        }
        std::string lnote;
        for (const auto& l : ls) lnote += (lnote.empty() ? "above " : ", ") + printExpr(*l);
        CandidateNode w = std::move(n);
        if (callee->abstractAtomic) w = wrap(BridgeKind::Substitution, std::move(w), "interference of " + s.name);
        w = wrap(BridgeKind::LevelAdjust, std::move(w), lnote);
        w = framed(std::move(w), "spec of " + s.name);
        return nonAtomicCtx && callee->abstractAtomic ? weaken(std::move(w)) : w;
      }
      case StmtKind::FieldRead:
      case StmtKind::FieldWrite: return nonAtomicCtx ? weaken(std::move(n)) : n;
      case StmtKind::Parallel:
        for (const auto& c : s.body) {
          CandidateNode cn;
          cn.stmt = c.get();
          cn.triple = Atomicity::NonAtomic;
          cn.bounds = bounds;
          cn.level = level;
          n.children.push_back(std::move(cn));
        }
        return framed(std::move(n), "specs of the parallel calls");
      default: return n;
    }
  }

  void checkLevelAlevel(const CandidateNode& n, const ExprPtr& l, const std::string& what) {
    if (notAbove(n.bounds.alevel, l))
      d_.error(n.stmt->span, "level",
               "level check failed: " + what + " has level " + printExpr(*l) + ", not below the atomicity level " +
                   printExpr(*n.bounds.alevel));
  }
};

std::string header(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::MakeAtomic:
      return "make_atomic using " + printExpr(*s.region) + " with " + printExpr(*s.guard);
    case StmtKind::UpdateRegion: return "update_region using " + printExpr(*s.region);
    case StmtKind::OpenRegion: return "open_region using " + printExpr(*s.region);
    case StmtKind::UseAtomic: return "use_atomic using " + printExpr(*s.region) + " with " + printExpr(*s.guard);
    case StmtKind::While: return "while (" + printExpr(*s.expr) + ")";
    case StmtKind::DoWhile: return "do-while (" + printExpr(*s.expr) + ")";
    case StmtKind::If: return "if (" + printExpr(*s.expr) + ")";
    case StmtKind::Parallel: return "parallel";
    default: {
      std::string t = printStmt(s, 0);
      while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
      return t;
    }
  }
}

void dumpNodes(std::ostringstream& os, const std::vector<CandidateNode>& nodes, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& n : nodes) {
    if (n.bridge != BridgeKind::None) {
      os << pad << "+ " << bridgeName(n.bridge);
      if (!n.note.empty()) os << " " << n.note;
      os << "\n";
      dumpNodes(os, n.children, indent);
      continue;
    }
    os << pad << header(*n.stmt);
    if (n.stmt->kind == StmtKind::MakeAtomic && !n.note.empty()) os << "  [" << n.note << "]";
    os << "\n";
    if (n.stmt->kind == StmtKind::DoWhile) {
      os << pad << "  first iteration:\n";
      dumpNodes(os, n.unrolled, indent + 2);
      os << pad << "  loop:\n";
      dumpNodes(os, n.children, indent + 2);
      continue;
    }
    dumpNodes(os, n.children, indent + 1);
    if (n.stmt->hasElse) {
      os << pad << "else\n";
      dumpNodes(os, n.elseChildren, indent + 1);
    }
  }
}

}  // namespace

ExpandResult expand(std::shared_ptr<const ResolvedProgram> rp) {
  ExpandResult res;
  res.candidate.program = rp;
  Expander ex(*rp, res.diags);
  for (const auto* p : rp->program.procedures())
    if (p->body) res.candidate.procedures.push_back(ex.procedure(*p));
  res.diags.sortByPosition();
  return res;
}

StmtList erase(const std::vector<CandidateNode>& nodes) {
  StmtList out;
  for (const auto& n : nodes) {
    if (n.bridge != BridgeKind::None) {
      StmtList inner = erase(n.children);
      out.insert(out.end(), inner.begin(), inner.end());
      continue;
    }
    auto s = std::make_shared<Stmt>(*n.stmt);
    if (s->kind != StmtKind::Parallel) {
      s->body = erase(n.children);
      s->elseBody = erase(n.elseChildren);
    }
    out.push_back(s);
  }
  return out;
}

std::string dumpCandidate(const ProofCandidate& c) {
  std::ostringstream os;
  for (const auto& p : c.procedures) {
    os << "procedure " << p.proc->name << (p.proc->abstractAtomic ? " (abstract_atomic)" : "") << "  [level above ";
    if (p.levels.empty()) os << "nothing";
    for (std::size_t i = 0; i < p.levels.size(); ++i) os << (i ? ", " : "") << printExpr(*p.levels[i]);
    os << "]\n";
    dumpNodes(os, p.body, 1);
    os << "steps: " << p.inferredSteps << " inferred, " << p.annotatedSteps << " annotated\n";
  }
  return os.str();
}

}  // namespace voila
