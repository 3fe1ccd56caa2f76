#include <functional>

#include "voila/encoder.hpp"
#include "voila/printer.hpp"

namespace voila {

using ivl::EPtr;
using ivl::Op;
using ivl::SK;
namespace e = ivl::e;

namespace {

EPtr gt(EPtr l, EPtr r) { return e::binary(Op::Gt, std::move(l), std::move(r)); }
EPtr ne(EPtr l, EPtr r) { return e::binary(Op::Ne, std::move(l), std::move(r)); }

void splitAnd(const ExprPtr& x, std::vector<ExprPtr>& out) {
  if (x->kind == ExprKind::Binary && x->bop == BinOp::And) {
    splitAnd(x->args[0], out);
    splitAnd(x->args[1], out);
  } else {
    out.push_back(x);
  }
}

bool isBare(const ExprPtr& x, const std::string& n) {
  return x && (x->kind == ExprKind::Var || x->kind == ExprKind::Binder) && x->name == n;
}

bool mentions(const Expr& x, const std::string& n) {
  if ((x.kind == ExprKind::Var || x.kind == ExprKind::Binder) && x.name == n) return true;
  for (const auto& a : x.args)
    if (mentions(*a, n)) return true;
  return x.target && mentions(*x.target, n);
}

}  // namespace

// ------------------------------------------------------------ helpers

ivl::SPtr MethodEncoder::mk(SK kind, EPtr x, std::string check) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = kind;
  s->expr = std::move(x);
  s->check = std::move(check);
  s->line = line_;
  return s;
}

ivl::SPtr MethodEncoder::label(const std::string& name) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = SK::Label;
  s->name = name;
  s->line = line_;
  return s;
}

ivl::SPtr MethodEncoder::varDecl(const std::string& name, ivl::Type t, EPtr init) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = SK::VarDecl;
  s->name = name;
  s->type = std::move(t);
  s->expr = std::move(init);
  s->line = line_;
  return s;
}

ivl::SPtr MethodEncoder::assign(const std::string& name, EPtr x) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = SK::Assign;
  s->name = name;
  s->expr = std::move(x);
  s->line = line_;
  return s;
}

ivl::SPtr MethodEncoder::havoc(EPtr target, ivl::Type t) {
  auto s = std::make_shared<ivl::Stmt>();
  s->kind = SK::Havoc;
  s->target = std::move(target);
  s->type = std::move(t);
  s->line = line_;
  return s;
}

namespace {
ivl::SPtr external(ivl::SPtr s) {
  auto t = std::make_shared<ivl::Stmt>(*s);
  t->external = true;
  return t;
}

// forall q_r: Ref :: q_r != null ==> body(q_r)
EPtr overRefs(const std::function<EPtr(EPtr)>& body) {
  EPtr q = e::var("q_r");
  return e::forall({{"q_r", ivl::Type::ref()}}, e::implies(ne(q, e::null()), body(q)));
}
}  // namespace

// Quantified region state, q_s unless a region parameter already uses that name.
static std::string stateVar(const ResolvedProgram& rp, const std::string& region) {
  for (const auto& p : rp.region(region)->decl->params)
    if (p.name == "s") return "q_state";
  return "q_s";
}

// Quantified action binder, distinct from the quantified region parameters.
static std::string binderVar(const ResolvedProgram& rp, const std::string& region, const std::string& b) {
  for (const auto& p : rp.region(region)->decl->params)
    if (p.name == b) return "q_" + b + "_a";
  return "q_" + b;
}

// Quantified parameters q_<param> of a region and the region predicate over them.
struct QuantifiedInstance {
  std::vector<ivl::QVar> vars;
  EPtr pred;
  EPtr state;
  EPtr id;
};

static QuantifiedInstance quantified(const ResolvedProgram& rp, const std::string& region) {
  QuantifiedInstance q;
  const RegionInfo* ri = rp.region(region);
  std::vector<EPtr> args;
  for (const auto& p : ri->decl->params) {
    q.vars.push_back({"q_" + p.name, ivlType(p.type)});
    args.push_back(e::var("q_" + p.name));
  }
  q.pred = e::pred(region, args);
  q.state = e::app(mangle::statefn(region), args);
  q.id = args.empty() ? e::null() : args.front();
  return q;
}

// ------------------------------------------------------------ transition system

EPtr MethodEncoder::interferencePermitted(const RegionInstance& r, const EPtr& from, const EPtr& to) {
  const RegionInfo* ri = rp_.region(r.region);
  EPtr id = regionId(r);
  std::vector<EPtr> args;
  for (const auto& a : r.args) args.push_back(pure(*a));
  EPtr pending = e::implies(e::noneLt(e::field(id, mangle::diamond())),
                            e::binary(Op::In, to, e::field(id, mangle::acontext(r.region))));
  std::vector<EPtr> disjuncts{e::eq(from, to)};
  for (const auto& a : ri->decl->actions) {
    const GuardDecl* gd = ri->decl->findGuard(a.guard);
    Scope sc;
    for (std::size_t i = 0; i < ri->decl->params.size() && i < args.size(); ++i)
      sc.sub[ri->decl->params[i].name] = args[i];
    std::vector<ivl::QVar> vars;
    std::string tag;
    for (std::size_t k = 0; k < a.binders.size(); ++k) {
      const std::string& b = a.binders[k];
      ivl::Type t = ivl::Type::integer();
      std::string vtag;
      if (isBare(a.from, b) || isBare(a.to, b)) {
        t = stateType(r.region);
      } else if (mentions(*a.from, b) || mentions(*a.to, b)) {
        vtag = r.region;
      } else if (gd) {
        for (std::size_t i = 0; i < a.guardArgs.size() && i < gd->params.size(); ++i)
          if (isBare(a.guardArgs[i], b)) t = ivlType(gd->params[i].type);
      }
      vars.push_back({binderVar(rp_, r.region, b), t});
      tag += (k ? "," : "") + vtag;
      sc.sub[b] = e::var(binderVar(rp_, r.region, b));
    }
    scopes_.push_back(sc);
    std::vector<EPtr> parts{e::eq(from, pure(*a.from)), e::eq(to, pure(*a.to))};
    if (a.condition) parts.push_back(pure(*a.condition));
    // The environment may hold the guard of the action.
    if (gd && gd->kind != GuardKind::Duplicable) {
      std::vector<EPtr> gargs{id};
      std::size_t n = a.guardArgs.size();
      if (gd->kind == GuardKind::Fractional && n > 0) --n;
      for (std::size_t i = 0; i < n; ++i) gargs.push_back(pure(*a.guardArgs[i]));
      EPtr held = e::perm(e::pred(mangle::guard(r.region, a.guard), gargs));
      if (gd->kind == GuardKind::Fractional)
        parts.push_back(e::binary(Op::Lt, held, e::permLit(1)));
      else
        parts.push_back(e::eq(held, e::permLit(0)));
    }
    scopes_.pop_back();
    EPtr body = e::conj(parts);
    disjuncts.push_back(vars.empty() ? body : e::exists(vars, body, tag));
  }
  return e::binary(Op::And, pending, e::disj(disjuncts));
}

EPtr MethodEncoder::actionPermitted(const RegionInstance& r, const EPtr& from, const EPtr& to, const Expr& g) {
  const RegionInfo* ri = rp_.region(r.region);
  EPtr id = regionId(r);
  std::vector<EPtr> args;
  for (const auto& a : r.args) args.push_back(pure(*a));

  // Held guard terms of the prover, translated in the current scope.
  struct Held {
    std::string name;
    EPtr target;
    std::vector<EPtr> args;
  };
  std::vector<Held> held;
  std::vector<ExprPtr> parts;
  splitAnd(std::make_shared<Expr>(g), parts);
  for (const auto& p : parts) {
    if (p->kind != ExprKind::GuardAssn) continue;
    Held h{p->name, pure(*p->target), {}};
    for (const auto& a : p->args) h.args.push_back(pure(*a));
    held.push_back(std::move(h));
  }

  std::vector<EPtr> disjuncts{e::eq(from, to)};
  for (const auto& a : ri->decl->actions) {
    const GuardDecl* gd = ri->decl->findGuard(a.guard);
    Scope sc;
    for (std::size_t i = 0; i < ri->decl->params.size() && i < args.size(); ++i)
      sc.sub[ri->decl->params[i].name] = args[i];
    std::vector<ivl::QVar> vars;
    std::string tag;
    for (std::size_t k = 0; k < a.binders.size(); ++k) {
      const std::string& b = a.binders[k];
      ivl::Type t = ivl::Type::integer();
      std::string vtag;
      if (isBare(a.from, b) || isBare(a.to, b)) {
        t = stateType(r.region);
      } else if (mentions(*a.from, b) || mentions(*a.to, b)) {
        vtag = r.region;
      } else if (gd) {
        for (std::size_t i = 0; i < a.guardArgs.size() && i < gd->params.size(); ++i)
          if (isBare(a.guardArgs[i], b)) t = ivlType(gd->params[i].type);
      }
      vars.push_back({binderVar(rp_, r.region, b), t});
      tag += (k ? "," : "") + vtag;
      sc.sub[b] = e::var(binderVar(rp_, r.region, b));
    }
    scopes_.push_back(sc);
    std::vector<EPtr> conds{e::eq(from, pure(*a.from)), e::eq(to, pure(*a.to))};
    if (a.condition) conds.push_back(pure(*a.condition));
    std::vector<EPtr> required;
    for (const auto& ga : a.guardArgs) required.push_back(pure(*ga));
    scopes_.pop_back();

    // LESS: the prover's guard entails the action's guard.
    std::vector<EPtr> less;
    for (const auto& h : held) {
      if (h.name != a.guard || !gd) continue;
      std::vector<EPtr> eqs;
      if (ivl::printExpr(*h.target) != ivl::printExpr(*id)) eqs.push_back(e::eq(h.target, id));
      switch (gd->kind) {
        case GuardKind::Unique:
        case GuardKind::Duplicable: break;
        case GuardKind::Fractional:
          for (std::size_t i = 0; i + 1 < required.size() && i + 1 < h.args.size(); ++i)
            eqs.push_back(e::eq(h.args[i], required[i]));
          if (!required.empty() && !h.args.empty())
            eqs.push_back(e::binary(Op::Le, required.back(), h.args.back()));
          break;
        case GuardKind::Indexed:
        case GuardKind::Manual:
          for (std::size_t i = 0; i < required.size() && i < h.args.size(); ++i)
            eqs.push_back(e::eq(h.args[i], required[i]));
          break;
      }
      less.push_back(e::conj(eqs));
    }
    if (less.empty()) continue;
    bool trivially = false;
    for (const auto& x : less) trivially = trivially || (x->kind == ivl::EK::BoolLit && x->b);
    if (!trivially) conds.push_back(less.size() == 1 ? less.front() : e::disj(less));
    EPtr body = e::conj(conds);
    disjuncts.push_back(vars.empty() ? body : e::exists(vars, body, tag));
  }
  return e::disj(disjuncts);
}

// ------------------------------------------------------------ stabilization

ivl::Block MethodEncoder::stabilize() {
  ivl::Block out;
  for (const auto& region : regionNames()) {
    std::string lbl = freshName("pre_stabilize");
    out.push_back(label(lbl));
    auto insts = instancesOf(region);
    for (const auto& i : insts) out.push_back(havoc(regionPred(i)));
    QuantifiedInstance q = quantified(rp_, region);
    out.push_back(external(havoc(e::forall(q.vars, e::implies(e::noneLt(q.pred), q.pred)))));
    for (const auto& i : insts) {
      EPtr st = regionState(i);
      out.push_back(mk(SK::Inhale, e::implies(e::noneLt(regionPred(i)),
                                              interferencePermitted(i, e::old(lbl, st), st))));
    }
    // The quantified form ranges over arbitrary instances; its binder names
    // are the region parameters.
    Scope sc;
    for (const auto& v : q.vars) sc.sub[v.name.substr(2)] = e::var(v.name);
    RegionInstance generic;
    generic.region = region;
    for (const auto& p : rp_.region(region)->decl->params) generic.args.push_back(mk::var(p.name));
    scopes_.push_back(sc);
    EPtr ip = interferencePermitted(generic, e::old(lbl, q.state), q.state);
    scopes_.pop_back();
    out.push_back(external(mk(SK::Inhale, e::forall(q.vars, e::implies(e::noneLt(q.pred), ip)))));
  }
  return out;
}

ivl::Block MethodEncoder::inferInterference(const std::string& region) {
  ivl::Block out;
  ivl::Type st = stateType(region);
  out.push_back(havoc(overRefs([&](EPtr q) { return e::field(q, mangle::icontext(region)); }),
                      ivl::Type::set(st)));
  for (const auto& i : instancesOf(region)) {
    EPtr s = e::var(stateVar(rp_, region));
    EPtr body = e::binary(Op::Iff, e::binary(Op::In, s, e::field(regionId(i), mangle::icontext(region))),
                          interferencePermitted(i, regionState(i), s));
    out.push_back(
        mk(SK::Inhale, e::implies(e::noneLt(regionPred(i)), e::forall({{stateVar(rp_, region), st}}, body, region))));
  }
  QuantifiedInstance q = quantified(rp_, region);
  Scope sc;
  for (const auto& v : q.vars) sc.sub[v.name.substr(2)] = e::var(v.name);
  RegionInstance generic;
  generic.region = region;
  for (const auto& p : rp_.region(region)->decl->params) generic.args.push_back(mk::var(p.name));
  scopes_.push_back(sc);
  EPtr s = e::var(stateVar(rp_, region));
  EPtr iff = e::binary(Op::Iff, e::binary(Op::In, s, e::field(q.id, mangle::icontext(region))),
                       interferencePermitted(generic, q.state, s));
  scopes_.pop_back();
  auto vars = q.vars;
  vars.push_back({stateVar(rp_, region), st});
  out.push_back(external(mk(SK::Inhale, e::forall(vars, e::implies(e::noneLt(q.pred), iff), region))));
  return out;
}

ivl::Block MethodEncoder::linkInterference(const RegionInstance& r, ivl::Block s) {
  ivl::Block out;
  std::string lbl = freshName("pre_link");
  out.push_back(label(lbl));
  std::vector<RegionInstance> children;
  for (const auto& [c, binder] : nestedInstances(rp_, r))
    if (!binder.empty()) children.push_back(c);
  if (children.empty()) {
    out.insert(out.end(), s.begin(), s.end());
    return out;
  }
  auto childX = [&](const RegionInstance& c) { return e::field(regionId(c), mangle::icontext(c.region)); };
  for (const auto& c : children) out.push_back(havoc(childX(c), ivl::Type::set(stateType(c.region))));
  std::vector<ivl::QVar> vars;
  std::vector<std::string> names;
  std::vector<EPtr> members;
  std::string tag;
  for (std::size_t i = 0; i < children.size(); ++i) {
    std::string m = "q_m" + std::to_string(i);
    names.push_back(m);
    vars.push_back({m, stateType(children[i].region)});
    members.push_back(e::binary(Op::In, e::var(m), childX(children[i])));
    tag += (i ? "," : "") + children[i].region;
  }
  EPtr image = e::binary(Op::In, stateFunction(r, names), e::field(regionId(r), mangle::icontext(r.region)));
  out.push_back(mk(SK::Inhale, e::forall(vars, e::binary(Op::Iff, e::conj(members), image), tag)));
  out.insert(out.end(), s.begin(), s.end());
  std::vector<EPtr> restore;
  for (const auto& c : children) {
    out.push_back(havoc(childX(c), ivl::Type::set(stateType(c.region))));
    restore.push_back(e::eq(childX(c), e::old(lbl, childX(c))));
  }
  out.push_back(mk(SK::Inhale, e::conj(restore)));
  return out;
}

// ------------------------------------------------------------ statements

ivl::Block MethodEncoder::statement(const CandidateNode& n) {
  ivl::Block out;
  node(n, out);
  return out;
}

void MethodEncoder::nodes(const std::vector<CandidateNode>& ns, ivl::Block& out) {
  for (const auto& n : ns) node(n, out);
}

void MethodEncoder::node(const CandidateNode& n, ivl::Block& out) {
  switch (n.bridge) {
    case BridgeKind::None: sourceStmt(n, out); return;
    case BridgeKind::TripleWeak: atomicMacro(n, out); return;
    default:
      // Framing, substitution and level bridges are realized inside the
      // macros of the statements they wrap.
      nodes(n.children, out);
      return;
  }
}

void MethodEncoder::atomicMacro(const CandidateNode& tw, ivl::Block& out) {
  line_ = tw.inner().stmt->span.line;
  std::string lbl = freshName("pre_atomic");
  out.push_back(label(lbl));
  const CandidateNode* c = &tw.children.front();
  if (c->bridge == BridgeKind::Stabilize) c = &c->children.front();
  if (c->bridge == BridgeKind::AtomicExists) {
    for (const auto& r : regionNames()) {
      ivl::Block b = inferInterference(r);
      out.insert(out.end(), b.begin(), b.end());
    }
    c = &c->children.front();
  }
  node(*c, out);
  line_ = tw.inner().stmt->span.line;
  for (const auto& r : regionNames()) {
    ivl::Type st = ivl::Type::set(stateType(r));
    out.push_back(havoc(overRefs([&](EPtr q) { return e::field(q, mangle::icontext(r)); }), st));
    out.push_back(mk(SK::Inhale, overRefs([&](EPtr q) {
                       EPtr x = e::field(q, mangle::icontext(r));
                       return e::eq(x, e::old(lbl, x));
                     })));
    ivl::Block s = stabilize();
    // stabilize() covers every region; keep only the block of r.
    std::size_t begin = 0, end = s.size();
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i]->kind == SK::Label) {
        if (regionNames()[k] == r) begin = i;
        if (k > 0 && regionNames()[k - 1] == r) end = i;
        ++k;
      }
    out.insert(out.end(), s.begin() + static_cast<long>(begin), s.begin() + static_cast<long>(end));
  }
}

void MethodEncoder::declareBound(const std::map<std::string, EPtr>& bound, const std::vector<std::string>& order,
                                 ivl::Block& out) {
  for (const auto& name : order) {
    auto it = bound.find(name);
    if (it != bound.end()) out.push_back(varDecl(name, varType(name), it->second));
  }
}

void MethodEncoder::assertionStmt(SK kind, const Expr& x, const std::string& check, ivl::Block& out) {
  scopes_.emplace_back();
  EPtr a = assertion(x);
  Scope sc = top();
  scopes_.pop_back();
  out.push_back(mk(kind, a, check));
  declareBound(sc.bound, sc.boundOrder, out);
}

void MethodEncoder::sourceStmt(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  line_ = s.span.line;
  switch (s.kind) {
    case StmtKind::VarDecl:
      out.push_back(varDecl(s.name, ivlType(s.declType), s.expr ? pure(*s.expr) : nullptr));
      return;
    case StmtKind::Assign: out.push_back(assign(s.name, pure(*s.expr))); return;
    case StmtKind::FieldRead: out.push_back(assign(s.name, e::field(pure(*s.recv), s.field))); return;
    case StmtKind::FieldWrite: {
      auto st = std::make_shared<ivl::Stmt>();
      st->kind = SK::FieldAssign;
      st->target = e::field(pure(*s.recv), s.field);
      st->expr = pure(*s.expr);
      st->line = line_;
      out.push_back(st);
      return;
    }
    case StmtKind::Call: call(s, out); return;
    case StmtKind::If: {
      auto st = std::make_shared<ivl::Stmt>();
      st->kind = SK::If;
      st->expr = pure(*s.expr);
      st->line = line_;
      nodes(n.children, st->body);
      nodes(n.elseChildren, st->elseBody);
      out.push_back(st);
      return;
    }
    case StmtKind::While:
    case StmtKind::DoWhile: loop(n, out); return;
    case StmtKind::MakeAtomic: makeAtomic(n, out); return;
    case StmtKind::UpdateRegion: updateRegion(n, out); return;
    case StmtKind::OpenRegion: openRegion(n, out); return;
    case StmtKind::UseAtomic: useAtomic(n, out); return;
    case StmtKind::Use: {
      auto st = std::make_shared<ivl::Stmt>();
      st->kind = SK::Call;
      st->name = s.name;
      for (const auto& a : s.args) st->args.push_back(pure(*a));
      st->line = line_;
      st->check = "lemma " + s.name;
      out.push_back(st);
      return;
    }
    case StmtKind::Fold:
    case StmtKind::Unfold: {
      RegionInstance inst = instanceOf(rp_, *s.region);
      const RegionInfo* ri = rp_.region(inst.region);
      bool hasState = ri && s.region->args.size() == ri->decl->params.size() + 1;
      ivl::Block stateCheck;
      if (hasState && s.region->args.back()->kind != ExprKind::Wildcard)
        assertionStmt(SK::Assert, *s.region, std::string(s.kind == StmtKind::Fold ? "fold" : "unfold") +
                                                 ": region state might not match", stateCheck);
      if (s.kind == StmtKind::Unfold) out.insert(out.end(), stateCheck.begin(), stateCheck.end());
      out.push_back(mk(s.kind == StmtKind::Fold ? SK::Fold : SK::Unfold, regionPred(inst),
                       s.kind == StmtKind::Fold ? "fold: region interpretation might not hold"
                                                : "unfold: region not held"));
      if (s.kind == StmtKind::Fold) out.insert(out.end(), stateCheck.begin(), stateCheck.end());
      return;
    }
    case StmtKind::Inhale: assertionStmt(SK::Inhale, *s.expr, {}, out); return;
    case StmtKind::Exhale: assertionStmt(SK::Exhale, *s.expr, "exhale might fail", out); return;
    case StmtKind::Assert: assertionStmt(SK::Assert, *s.expr, "assertion might not hold", out); return;
    case StmtKind::Parallel: parallel(n, out); return;
  }
}

// Binds the state binder of a key-rule region argument to the current state.
static bool usingBinder(const ResolvedProgram& rp, const Expr& region, std::string* name) {
  const RegionInfo* ri = rp.region(region.name);
  if (!ri || region.args.size() != ri->decl->params.size() + 1) return false;
  if (region.args.back()->kind != ExprKind::Binder) return false;
  *name = region.args.back()->name;
  return true;
}

void MethodEncoder::openAndLink(const RegionInstance& inst, const CandidateNode& n, ivl::Block& out) {
  out.push_back(mk(SK::Unfold, regionPred(inst), "unfold: region not held"));
  // Other still folded copies of the instance lose their state.
  out.push_back(havoc(regionPred(inst)));
  ivl::Block body;
  nodes(n.children, body);
  line_ = n.stmt->span.line;
  ivl::Block linked = linkInterference(inst, std::move(body));
  out.insert(out.end(), linked.begin(), linked.end());
  line_ = n.stmt->span.line;
  out.push_back(mk(SK::Fold, regionPred(inst), "fold: region interpretation might not hold"));
}

void MethodEncoder::updateRegion(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  RegionInstance inst = instanceOf(rp_, *s.region);
  EPtr id = regionId(inst), l = level(inst), st = regionState(inst);
  std::string lbl = freshName("pre_update");
  out.push_back(label(lbl));
  std::string b;
  if (usingBinder(rp_, *s.region, &b)) out.push_back(varDecl(b, varType(b), st));
  out.push_back(mk(SK::Assert, gt(e::var("level"), l), "level: update_region on " + inst.str()));
  std::string ls = freshName("level_store");
  out.push_back(varDecl(ls, ivl::Type::integer(), e::var("level")));
  out.push_back(assign("level", l));
  out.push_back(mk(SK::Exhale,
                   e::binary(Op::And, e::binary(Op::In, id, e::var("update")),
                             e::acc(e::field(id, mangle::acontext(inst.region)))),
                   "update_region: no pending update for " + inst.str()));
  std::string us = freshName("update_store");
  out.push_back(varDecl(us, ivl::Type::set(ivl::Type::ref()), e::var("update")));
  out.push_back(assign("update", e::binary(Op::Minus, e::var("update"), e::setLit(ivl::Type::ref(), {id}))));
  out.push_back(mk(SK::Exhale, e::acc(e::field(id, mangle::diamond())),
                   "update_region: diamond of " + inst.str() + " not held"));
  openAndLink(inst, n, out);

  auto track = std::make_shared<ivl::Stmt>();
  track->kind = SK::If;
  track->line = line_;
  track->expr = e::eq(st, e::old(lbl, st));
  track->body.push_back(mk(SK::Inhale, e::acc(e::field(id, mangle::diamond()))));
  EPtr f = e::field(id, mangle::from(inst.region)), t = e::field(id, mangle::to(inst.region));
  track->elseBody.push_back(mk(SK::Inhale, e::binary(Op::And, e::acc(f), e::eq(f, e::old(lbl, st)))));
  track->elseBody.push_back(mk(SK::Inhale, e::binary(Op::And, e::acc(t), e::eq(t, st))));
  out.push_back(track);

  out.push_back(assign("update", e::var(us)));
  EPtr a = e::field(id, mangle::acontext(inst.region));
  out.push_back(mk(SK::Inhale, e::binary(Op::And, e::acc(a), e::eq(a, e::old(lbl, a)))));
  out.push_back(assign("level", e::var(ls)));
}

void MethodEncoder::openRegion(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  RegionInstance inst = instanceOf(rp_, *s.region);
  EPtr l = level(inst), st = regionState(inst);
  std::string lbl = freshName("pre_open");
  out.push_back(label(lbl));
  std::string b;
  if (usingBinder(rp_, *s.region, &b)) out.push_back(varDecl(b, varType(b), st));
  out.push_back(mk(SK::Assert, gt(e::var("level"), l), "level: open_region on " + inst.str()));
  std::string ls = freshName("level_store");
  out.push_back(varDecl(ls, ivl::Type::integer(), e::var("level")));
  out.push_back(assign("level", l));
  openAndLink(inst, n, out);
  out.push_back(mk(SK::Assert, e::eq(st, e::old(lbl, st)), "open_region: state of " + inst.str() + " changed"));
  out.push_back(assign("level", e::var(ls)));
}

void MethodEncoder::useAtomic(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  RegionInstance inst = instanceOf(rp_, *s.region);
  EPtr l = level(inst), st = regionState(inst);
  std::string lbl = freshName("pre_use_atomic");
  out.push_back(label(lbl));
  out.push_back(mk(SK::Assert, assertion(*s.guard), "use_atomic: guard not held"));
  out.push_back(mk(SK::Assert, regionPred(inst), "use_atomic: region " + inst.str() + " not held"));
  std::string b;
  if (usingBinder(rp_, *s.region, &b)) out.push_back(varDecl(b, varType(b), st));
  out.push_back(mk(SK::Assert, gt(e::var("alevel"), l), "level: use_atomic on " + inst.str() + " (atomicity level)"));
  out.push_back(mk(SK::Assert, gt(e::var("level"), l), "level: use_atomic on " + inst.str()));
  std::string ls = freshName("level_store");
  out.push_back(varDecl(ls, ivl::Type::integer(), e::var("level")));
  out.push_back(assign("level", l));
  openAndLink(inst, n, out);
  out.push_back(mk(SK::Assert, actionPermitted(inst, e::old(lbl, st), st, *s.guard),
                   "use_atomic: update of " + inst.str() + " not permitted by the guard"));
  out.push_back(assign("level", e::var(ls)));
}

void MethodEncoder::makeAtomic(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  RegionInstance inst = instanceOf(rp_, *s.region);
  EPtr id = regionId(inst), l = level(inst), st = regionState(inst), pred = regionPred(inst);
  EPtr g = assertion(*s.guard);
  std::string lbl = freshName("pre_atomic");
  out.push_back(label(lbl));
  std::string b;
  if (usingBinder(rp_, *s.region, &b)) out.push_back(varDecl(b, varType(b), st));
  out.push_back(mk(SK::Exhale, g, "make_atomic: guard not held"));
  out.push_back(mk(SK::Exhale, pred, "make_atomic: region " + inst.str() + " not held"));
  ivl::Block stab = stabilize();
  out.insert(out.end(), stab.begin(), stab.end());
  std::string frame = freshName("pre_frame");
  out.push_back(label(frame));
  out.push_back(mk(SK::FrameOut));

  out.push_back(mk(SK::Assert, gt(e::var("alevel"), l), "level: make_atomic on " + inst.str()));
  std::string as = freshName("alevel_store");
  out.push_back(varDecl(as, ivl::Type::integer(), e::var("alevel")));
  out.push_back(assign("alevel", l));

  out.push_back(mk(SK::Assert, e::unary(Op::Not, e::binary(Op::In, id, e::var("update"))),
                   "make_atomic: update of " + inst.str() + " already pending"));
  std::string us = freshName("update_store");
  out.push_back(varDecl(us, ivl::Type::set(ivl::Type::ref()), e::var("update")));
  EPtr a = e::field(id, mangle::acontext(inst.region)), x = e::field(id, mangle::icontext(inst.region));
  out.push_back(mk(SK::Inhale, e::binary(Op::And, e::acc(a), e::eq(a, x))));
  out.push_back(assign("update", e::binary(Op::Union, e::var("update"), e::setLit(ivl::Type::ref(), {id}))));
  out.push_back(mk(SK::Inhale, e::binary(Op::And, pred, e::binary(Op::In, st, a))));
  out.push_back(mk(SK::Inhale, e::acc(e::field(id, mangle::diamond()))));

  nodes(n.children, out);
  line_ = s.span.line;

  EPtr f = e::field(id, mangle::from(inst.region)), t = e::field(id, mangle::to(inst.region));
  out.push_back(mk(SK::Assert, actionPermitted(inst, f, t, *s.guard),
                   "make_atomic: update of " + inst.str() + " not permitted by the guard"));
  out.push_back(mk(SK::FrameOut));
  out.push_back(mk(SK::Inhale, e::binary(Op::And, pred, e::eq(st, t))));
  out.push_back(mk(SK::Inhale, e::eq(e::old(lbl, st), f)));
  out.push_back(mk(SK::Exhale, e::binary(Op::And, e::acc(f), e::acc(t))));
  out.push_back(mk(SK::Inhale, g));
  out.push_back(assign("update", e::var(us)));
  out.push_back(mk(SK::Exhale, e::acc(a)));
  out.push_back(assign("alevel", e::var(as)));
  auto in = mk(SK::FrameIn);
  std::const_pointer_cast<ivl::Stmt>(in)->name = frame;
  out.push_back(in);
}

void MethodEncoder::loop(const CandidateNode& n, ivl::Block& out) {
  const Stmt& s = *n.stmt;
  if (s.kind == StmtKind::DoWhile) {
    nodes(n.unrolled, out);
    line_ = s.span.line;
  }
  std::vector<EPtr> inv;
  for (const auto& i : s.invariants) inv.push_back(assertion(*i));
  EPtr I = e::conj(inv);
  std::string lbl = freshName("pre_while");
  out.push_back(label(lbl));
  out.push_back(mk(SK::Exhale, I, "loop invariant might not hold on entry"));
  ivl::Block stab = stabilize();
  out.insert(out.end(), stab.begin(), stab.end());
  out.push_back(mk(SK::Inhale, I));
  std::string ou = freshName("oldUpdate"), ol = freshName("oldLevel"), oa = freshName("oldALevel");
  out.push_back(varDecl(ou, ivl::Type::set(ivl::Type::ref()), e::var("update")));
  out.push_back(varDecl(ol, ivl::Type::integer(), e::var("level")));
  out.push_back(varDecl(oa, ivl::Type::integer(), e::var("alevel")));

  auto w = std::make_shared<ivl::Stmt>();
  w->kind = SK::While;
  w->line = line_;
  w->expr = pure(*s.expr);
  w->check = "loop invariant might not be preserved";
  w->invariants = inv;
  w->invariants.push_back(e::conj({e::eq(e::var("update"), e::var(ou)), e::eq(e::var("level"), e::var(ol)),
                                   e::eq(e::var("alevel"), e::var(oa))}));
  for (const auto& p : n.bounds.lower) {
    EPtr a = e::field(regionId(p), mangle::acontext(p.region));
    w->invariants.push_back(e::binary(Op::And, e::acc(a), e::eq(a, e::old(lbl, a))));
  }
  for (const auto& r : regionNames())
    w->invariants.push_back(overRefs([&](EPtr q) {
      EPtr x = e::field(q, mangle::icontext(r));
      return e::binary(Op::And, e::acc(x), e::eq(x, e::old(lbl, x)));
    }));
  nodes(n.children, w->body);
  out.push_back(w);
}

void MethodEncoder::call(const Stmt& s, ivl::Block& out) {
  const ProcDecl* callee = rp_.program.findProcedure(s.name);
  const CallableInfo* ci = rp_.callable(s.name);
  if (!callee || !ci) throw EncodeError("unknown procedure " + s.name);
  std::string lbl = freshName("pre_call");
  out.push_back(label(lbl));

  std::map<std::string, EPtr> argSub;
  std::vector<EPtr> args;
  for (std::size_t i = 0; i < callee->params.size() && i < s.args.size(); ++i) {
    args.push_back(pure(*s.args[i]));
    argSub[callee->params[i].name] = args.back();
  }
  if (callee->abstractAtomic) {
    for (const auto& ic : callee->interference) {
      if (ic.set->kind == ExprKind::TypeSet) continue;
      std::function<const Expr*(const Expr&)> find = [&](const Expr& x) -> const Expr* {
        if (x.kind == ExprKind::RegionAssn && !x.args.empty() && x.args.back()->kind == ExprKind::Var &&
            x.args.back()->name == ic.binder)
          return &x;
        for (const auto& a : x.args)
          if (const Expr* f = find(*a)) return f;
        return nullptr;
      };
      for (const auto& pre : callee->pres)
        if (const Expr* ra = find(*pre)) {
          scopes_.push_back(Scope{argSub, nullptr, {}, {}, false});
          EPtr id = pure(*ra->args[0]);
          EPtr set = pure(*ic.set);
          scopes_.pop_back();
          out.push_back(mk(SK::Assert, e::binary(Op::Subset, e::field(id, mangle::icontext(ra->name)), set),
                           "interference context exceeds that of " + s.name));
          break;
        }
    }
  }
  for (const auto& lv : preconditionLevels(rp_, callee->pres)) {
    scopes_.push_back(Scope{argSub, nullptr, {}, {}, false});
    EPtr l = pure(*lv);
    scopes_.pop_back();
    out.push_back(mk(SK::Assert, e::binary(Op::And, gt(e::var("level"), l), gt(e::var("alevel"), l)),
                     "level: call of " + s.name));
  }
  std::map<std::string, EPtr> zSub;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string z = freshName("z_" + callee->params[i].name);
    out.push_back(varDecl(z, ivlType(callee->params[i].type), args[i]));
    zSub[callee->params[i].name] = e::var(z);
  }
  std::map<std::string, EPtr> bound;
  // Types of names in the callee contract come from the callee.
  const CallableInfo* saved = scope_;
  scope_ = ci;
  std::vector<EPtr> pres = spec(callee->pres, zSub, &ci->interferenceVars, &bound);
  scope_ = saved;
  out.push_back(mk(SK::Exhale, e::conj(pres), "precondition of " + s.name + " might not hold"));
  ivl::Block stab = stabilize();
  out.insert(out.end(), stab.begin(), stab.end());
  std::map<std::string, EPtr> postSub = zSub;
  for (std::size_t i = 0; i < s.targets.size() && i < callee->returns.size(); ++i) {
    out.push_back(havoc(e::var(s.targets[i]), varType(s.targets[i])));
    postSub[callee->returns[i].name] = e::var(s.targets[i]);
  }
  for (const auto& [k, v] : bound) postSub[k] = e::old(lbl, v);
  scope_ = ci;
  std::vector<EPtr> posts = spec(callee->posts, postSub, nullptr, nullptr);
  scope_ = saved;
  out.push_back(mk(SK::Inhale, e::conj(posts)));
}

void MethodEncoder::parallel(const CandidateNode& n, ivl::Block& out) {
  struct Pending {
    const ProcDecl* callee;
    const CallableInfo* ci;
    std::string label;
    std::map<std::string, EPtr> zSub;
    const Stmt* stmt;
  };
  std::vector<Pending> calls;
  for (const auto& c : n.children) {
    const Stmt& s = *c.stmt;
    line_ = s.span.line;
    const ProcDecl* callee = rp_.program.findProcedure(s.name);
    const CallableInfo* ci = rp_.callable(s.name);
    if (!callee || !ci) throw EncodeError("unknown procedure " + s.name);
    Pending p{callee, ci, freshName("pre_call"), {}, &s};
    out.push_back(label(p.label));
    std::map<std::string, EPtr> argSub;
    std::vector<EPtr> args;
    for (std::size_t i = 0; i < callee->params.size() && i < s.args.size(); ++i) {
      args.push_back(pure(*s.args[i]));
      argSub[callee->params[i].name] = args.back();
    }
    for (const auto& lv : preconditionLevels(rp_, callee->pres)) {
      scopes_.push_back(Scope{argSub, nullptr, {}, {}, false});
      EPtr l = pure(*lv);
      scopes_.pop_back();
      out.push_back(mk(SK::Assert, e::binary(Op::And, gt(e::var("level"), l), gt(e::var("alevel"), l)),
                       "level: call of " + s.name));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string z = freshName("z_" + callee->params[i].name);
      out.push_back(varDecl(z, ivlType(callee->params[i].type), args[i]));
      p.zSub[callee->params[i].name] = e::var(z);
    }
    calls.push_back(std::move(p));
  }
  line_ = n.stmt->span.line;
  std::vector<EPtr> pres;
  std::vector<std::map<std::string, EPtr>> bounds(calls.size());
  const CallableInfo* saved = scope_;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    scope_ = calls[i].ci;
    for (const auto& x : spec(calls[i].callee->pres, calls[i].zSub, &calls[i].ci->interferenceVars, &bounds[i]))
      pres.push_back(x);
  }
  scope_ = saved;
  out.push_back(mk(SK::Exhale, e::conj(pres), "precondition of the parallel calls might not hold"));
  ivl::Block stab = stabilize();
  out.insert(out.end(), stab.begin(), stab.end());
  std::vector<EPtr> posts;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const Stmt& s = *calls[i].stmt;
    std::map<std::string, EPtr> postSub = calls[i].zSub;
    for (std::size_t k = 0; k < s.targets.size() && k < calls[i].callee->returns.size(); ++k) {
      out.push_back(havoc(e::var(s.targets[k]), varType(s.targets[k])));
      postSub[calls[i].callee->returns[k].name] = e::var(s.targets[k]);
    }
    for (const auto& [k, v] : bounds[i]) postSub[k] = e::old(calls[i].label, v);
    scope_ = calls[i].ci;
    for (const auto& x : spec(calls[i].callee->posts, postSub, nullptr, nullptr)) posts.push_back(x);
    scope_ = saved;
  }
  out.push_back(mk(SK::Inhale, e::conj(posts)));
}

}  // namespace voila
