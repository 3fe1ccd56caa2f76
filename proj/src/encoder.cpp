#include "voila/encoder.hpp"

#include <functional>

#include "voila/printer.hpp"

namespace voila {

using ivl::EPtr;
namespace e = ivl::e;

ivl::Type ivlType(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Bool: return ivl::Type::boolean();
    case Type::Kind::Frac: return ivl::Type::perm();
    case Type::Kind::Id:
    case Type::Kind::Struct: return ivl::Type::ref();
    case Type::Kind::Set: return ivl::Type::set(t.elem ? ivlType(*t.elem) : ivl::Type::integer());
    case Type::Kind::Seq: return ivl::Type::seq(t.elem ? ivlType(*t.elem) : ivl::Type::integer());
    default: return ivl::Type::integer();
  }
}

namespace mangle {
std::string statefn(const std::string& r) { return r + "_State"; }
std::string guard(const std::string& r, const std::string& g) { return r + "_" + g; }
std::string from(const std::string& r) { return r + "_from"; }
std::string to(const std::string& r) { return r + "_to"; }
std::string icontext(const std::string& r) { return r + "_X"; }
std::string acontext(const std::string& r) { return r + "_A"; }
}  // namespace mangle

namespace {

ivl::Op binOp(BinOp op) {
  switch (op) {
    case BinOp::Implies: return ivl::Op::Implies;
    case BinOp::Or: return ivl::Op::Or;
    case BinOp::And: return ivl::Op::And;
    case BinOp::Eq: return ivl::Op::Eq;
    case BinOp::Ne: return ivl::Op::Ne;
    case BinOp::Lt: return ivl::Op::Lt;
    case BinOp::Le: return ivl::Op::Le;
    case BinOp::Gt: return ivl::Op::Gt;
    case BinOp::Ge: return ivl::Op::Ge;
    case BinOp::In: return ivl::Op::In;
    case BinOp::Add: return ivl::Op::Add;
    case BinOp::Sub: return ivl::Op::Sub;
    case BinOp::Mul: return ivl::Op::Mul;
    case BinOp::Div: return ivl::Op::Div;
    case BinOp::Mod: return ivl::Op::Mod;
    case BinOp::Union: return ivl::Op::Union;
    case BinOp::Inter: return ivl::Op::Inter;
    case BinOp::SetMinus: return ivl::Op::Minus;
    case BinOp::Subset: return ivl::Op::Subset;
  }
  return ivl::Op::And;
}

void splitAnd(const ExprPtr& x, std::vector<ExprPtr>& out) {
  if (x->kind == ExprKind::Binary && x->bop == BinOp::And) {
    splitAnd(x->args[0], out);
    splitAnd(x->args[1], out);
  } else {
    out.push_back(x);
  }
}

std::vector<ivl::QVar> ivlParams(const std::vector<Param>& ps) {
  std::vector<ivl::QVar> out;
  for (const auto& p : ps) out.push_back({p.name, ivlType(p.type)});
  return out;
}

std::vector<EPtr> paramVars(const std::vector<Param>& ps) {
  std::vector<EPtr> out;
  for (const auto& p : ps) out.push_back(e::var(p.name));
  return out;
}

}  // namespace

// ------------------------------------------------------------ translation

MethodEncoder::MethodEncoder(const ResolvedProgram& rp, const std::string& scope)
    : rp_(rp), scope_(rp.callable(scope)) {
  scopes_.emplace_back();
}

std::string MethodEncoder::freshName(const std::string& base) { return base + "_" + std::to_string(++fresh_); }

EPtr MethodEncoder::lookup(const std::string& name) {
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    if (auto b = it->bound.find(name); b != it->bound.end()) return b->second;
    if (auto s = it->sub.find(name); s != it->sub.end()) return s->second;
  }
  return e::var(name);
}

void MethodEncoder::bind(const std::string& binder, const EPtr& value) {
  top().bound[binder] = value;
  top().boundOrder.push_back(binder);
}

ivl::Type MethodEncoder::varType(const std::string& name) const {
  if (auto it = extraTypes_.find(name); it != extraTypes_.end()) return ivlType(it->second);
  if (scope_)
    if (auto it = scope_->vars.find(name); it != scope_->vars.end()) return ivlType(it->second);
  return ivl::Type::integer();
}

ivl::Type MethodEncoder::stateType(const std::string& region) const {
  const RegionInfo* ri = rp_.region(region);
  return ri ? ivlType(ri->stateType) : ivl::Type::integer();
}

std::vector<std::string> MethodEncoder::regionNames() const {
  std::vector<std::string> out;
  for (const auto* r : rp_.program.regions()) out.push_back(r->name);
  return out;
}

std::vector<RegionInstance> MethodEncoder::instancesOf(const std::string& region) const {
  std::vector<RegionInstance> out;
  for (const auto& i : instances_)
    if (i.region == region) out.push_back(i);
  return out;
}

EPtr MethodEncoder::regionPred(const RegionInstance& r) {
  std::vector<EPtr> args;
  for (const auto& a : r.args) args.push_back(pure(*a));
  return e::pred(r.region, std::move(args));
}

EPtr MethodEncoder::regionState(const RegionInstance& r) {
  std::vector<EPtr> args;
  for (const auto& a : r.args) args.push_back(pure(*a));
  return e::app(mangle::statefn(r.region), std::move(args));
}

EPtr MethodEncoder::regionId(const RegionInstance& r) {
  if (r.args.empty()) throw EncodeError("region instance " + r.str() + " has no identifier");
  return pure(*r.args[0]);
}

EPtr MethodEncoder::level(const RegionInstance& r) { return pure(*instanceLevel(rp_, r)); }

std::string MethodEncoder::regionOfId(const EPtr& id, const std::string& hint) {
  std::string want = ivl::printExpr(*id);
  for (const auto& i : instances_)
    if (ivl::printExpr(*regionId(i)) == want) return i.region;
  auto regions = rp_.program.regions();
  if (regions.size() == 1) return regions.front()->name;
  throw EncodeError("cannot determine the region of " + hint + " on " + want);
}

const GuardDecl* MethodEncoder::guardDeclFor(const Expr& g, std::string* region) const {
  if (const RegionInfo* ri = rp_.guardRegion(g)) {
    *region = ri->decl->name;
    return ri->decl->findGuard(g.name);
  }
  const GuardDecl* found = nullptr;
  for (const auto* r : rp_.program.regions())
    if (const GuardDecl* gd = r->findGuard(g.name)) {
      if (found) throw EncodeError("guard " + g.name + " is declared by several regions");
      found = gd;
      *region = r->name;
    }
  if (!found) throw EncodeError("unknown guard " + g.name);
  return found;
}

EPtr MethodEncoder::pure(const Expr& x) { return translate(x, false); }
EPtr MethodEncoder::assertion(const Expr& x) { return translate(x, true); }

EPtr MethodEncoder::translate(const Expr& x, bool spatial) {
  switch (x.kind) {
    case ExprKind::IntLit: return e::intLit(x.num);
    case ExprKind::BoolLit: return e::boolLit(x.bval);
    case ExprKind::FracLit: return e::permLit(Rational(x.num, x.den));
    case ExprKind::Var:
    case ExprKind::Binder: return lookup(x.name);
    case ExprKind::Wildcard: throw EncodeError("wildcard outside an argument position");
    case ExprKind::TypeSet: throw EncodeError("type set " + x.name + " outside an interference clause");
    case ExprKind::Unary:
      return e::unary(x.uop == UnOp::Not ? ivl::Op::Not : ivl::Op::Neg, translate(*x.args[0], false));
    case ExprKind::Binary:
      if (spatial && x.bop == BinOp::And) {
        EPtr l = translate(*x.args[0], true);
        return e::binary(ivl::Op::And, l, translate(*x.args[1], true));
      }
      if (spatial && x.bop == BinOp::Implies) return e::implies(pure(*x.args[0]), translate(*x.args[1], true));
      {
        EPtr l = pure(*x.args[0]);
        return e::binary(binOp(x.bop), l, pure(*x.args[1]));
      }
    case ExprKind::SetLit:
    case ExprKind::SeqLit: {
      std::vector<EPtr> xs;
      for (const auto& a : x.args) xs.push_back(pure(*a));
      ivl::Type elem = ivl::Type::integer();
      if (!x.args.empty()) {
        const Expr& f = *x.args[0];
        if (f.kind == ExprKind::BoolLit) elem = ivl::Type::boolean();
        else if (f.kind == ExprKind::FracLit) elem = ivl::Type::perm();
        else if (f.kind == ExprKind::Var) elem = varType(f.name);
      }
      return x.kind == ExprKind::SetLit ? e::setLit(elem, std::move(xs)) : e::seqLit(elem, std::move(xs));
    }
    case ExprKind::FieldRead: return e::field(pure(*x.args[0]), x.name);
    case ExprKind::PointsTo: {
      if (!spatial) throw EncodeError("points-to assertion in a pure position");
      EPtr loc = e::field(pure(*x.args[0]), x.name);
      const Expr& v = *x.args[1];
      if (v.kind == ExprKind::Wildcard) return e::acc(loc);
      if (v.kind == ExprKind::Binder && !top().bound.count(v.name)) {
        bind(v.name, loc);
        return e::acc(loc);
      }
      return e::binary(ivl::Op::And, e::acc(loc), e::eq(loc, pure(v)));
    }
    case ExprKind::RegionAssn:
      if (!spatial) throw EncodeError("region assertion in a pure position");
      return regionAssertion(x);
    case ExprKind::GuardAssn:
      if (!spatial) throw EncodeError("guard assertion in a pure position");
      return guardAssertion(x);
    case ExprKind::Diamond:
      if (!spatial) throw EncodeError("diamond in a pure position");
      return e::acc(e::field(pure(*x.target), mangle::diamond()));
    case ExprKind::Witness:
      if (!spatial) throw EncodeError("tracking resource in a pure position");
      return witnessAssertion(x);
  }
  throw EncodeError("unsupported expression");
}

EPtr MethodEncoder::regionAssertion(const Expr& x) {
  const RegionInfo* ri = rp_.region(x.name);
  if (!ri) throw EncodeError("unknown region " + x.name);
  RegionInstance inst = instanceOf(rp_, x);
  EPtr pred = regionPred(inst);
  if (x.args.size() != ri->decl->params.size() + 1) return pred;
  const Expr& st = *x.args.back();
  EPtr state = regionState(inst);
  if (st.kind == ExprKind::Wildcard) return pred;
  if (st.kind == ExprKind::Binder && !top().bound.count(st.name)) {
    bind(st.name, state);
    return pred;
  }
  const Scope& sc = top();
  if (st.kind == ExprKind::Var && sc.interference && sc.interference->count(st.name) && !sc.bound.count(st.name)) {
    bind(st.name, state);
    if (sc.declaration) return pred;
    EPtr x_ = e::field(regionId(inst), mangle::icontext(x.name));
    return e::binary(ivl::Op::And, pred, e::binary(ivl::Op::In, state, x_));
  }
  return e::binary(ivl::Op::And, pred, e::eq(state, pure(st)));
}

EPtr MethodEncoder::guardAssertion(const Expr& x) {
  std::string region;
  const GuardDecl* gd = guardDeclFor(x, &region);
  std::vector<EPtr> args{pure(*x.target)};
  std::size_t n = x.args.size();
  bool fractional = gd->kind == GuardKind::Fractional;
  if (fractional && n == 0) throw EncodeError("fractional guard " + x.name + " without an amount");
  for (std::size_t i = 0; i < n - (fractional ? 1 : 0); ++i) args.push_back(pure(*x.args[i]));
  EPtr p = e::pred(mangle::guard(region, x.name), std::move(args));
  if (fractional) return e::acc(p, pure(*x.args.back()));
  return p;
}

EPtr MethodEncoder::witnessAssertion(const Expr& x) {
  EPtr id = pure(*x.target);
  std::string region = regionOfId(id, "a tracking resource");
  EPtr f = e::field(id, mangle::from(region)), t = e::field(id, mangle::to(region));
  std::vector<EPtr> parts{e::acc(f), e::acc(t)};
  if (x.args[0]->kind != ExprKind::Wildcard) parts.push_back(e::eq(f, pure(*x.args[0])));
  if (x.args[1]->kind != ExprKind::Wildcard) parts.push_back(e::eq(t, pure(*x.args[1])));
  return e::conj(parts);
}

std::vector<EPtr> MethodEncoder::spec(const std::vector<ExprPtr>& xs, std::map<std::string, EPtr> sub,
                                      const std::set<std::string>* interference,
                                      std::map<std::string, EPtr>* boundOut, bool declaration) {
  Scope sc;
  sc.sub = std::move(sub);
  sc.interference = interference;
  sc.declaration = declaration;
  scopes_.push_back(std::move(sc));
  std::vector<EPtr> out;
  std::vector<ExprPtr> parts;
  for (const auto& x : xs) splitAnd(x, parts);
  for (const auto& p : parts) out.push_back(assertion(*p));
  if (boundOut)
    for (const auto& [k, v] : top().bound) (*boundOut)[k] = v;
  scopes_.pop_back();
  return out;
}

EPtr MethodEncoder::stateFunction(const RegionInstance& r, const std::vector<std::string>& childVars) {
  const RegionInfo* ri = rp_.region(r.region);
  Scope sc;
  for (std::size_t i = 0; i < ri->decl->params.size() && i < r.args.size(); ++i)
    sc.sub[ri->decl->params[i].name] = pure(*r.args[i]);
  scopes_.push_back(std::move(sc));
  assertion(*ri->decl->interpretation);
  auto binders = nestedStateBinders(*ri->decl);
  for (std::size_t i = 0; i < binders.size() && i < childVars.size(); ++i)
    top().bound[binders[i].first] = e::var(childVars[i]);
  EPtr s = pure(*ri->decl->state);
  scopes_.pop_back();
  return s;
}

// ------------------------------------------------------------ declarations

RegionEncoding encodeRegion(const ResolvedProgram& rp, const RegionDecl& r) {
  RegionEncoding out;
  const RegionInfo* ri = rp.region(r.name);
  if (!ri) throw EncodeError("unresolved region " + r.name);
  ivl::Type st = ivlType(ri->stateType);
  out.fields = {{mangle::from(r.name), st},
                {mangle::to(r.name), st},
                {mangle::icontext(r.name), ivl::Type::set(st)},
                {mangle::acontext(r.name), ivl::Type::set(st)}};

  MethodEncoder enc(rp, "");
  enc.extraTypes_ = ri->vars;
  auto params = ivlParams(r.params);
  EPtr self = e::pred(r.name, paramVars(r.params));

  out.predicate.name = r.name;
  out.predicate.params = params;
  out.predicate.role = ivl::PredRole::Region;
  out.predicate.region = r.name;
  out.predicate.body = enc.assertion(*r.interpretation);
  // Binders of the interpretation stay bound for the state expression.
  EPtr state = enc.pure(*r.state);

  out.stateFunction.name = mangle::statefn(r.name);
  out.stateFunction.params = params;
  out.stateFunction.ret = st;
  out.stateFunction.pres = {self};
  out.stateFunction.body = e::unfolding(self, state);

  for (const auto& g : r.guards) {
    ivl::PredicateDecl p;
    p.name = mangle::guard(r.name, g.name);
    p.role = ivl::PredRole::Guard;
    p.guardKind = g.kind;
    p.region = r.name;
    p.params.push_back({"r", ivl::Type::ref()});
    std::size_t n = g.params.size();
    if (g.kind == GuardKind::Fractional && n > 0) --n;
    for (std::size_t i = 0; i < n; ++i)
      p.params.push_back({g.params[i].name.empty() ? "a" + std::to_string(i) : g.params[i].name,
                          ivlType(g.params[i].type)});
    out.guards.push_back(std::move(p));
  }
  return out;
}

ivl::MethodDecl MethodEncoder::declaration(const CallableInfo& c) {
  ivl::MethodDecl m;
  m.name = c.name;
  m.params = ivlParams(c.params());
  if (c.proc) m.returns = ivlParams(c.proc->returns);
  m.line = c.proc ? c.proc->span.line : c.lemma->span.line;
  std::map<std::string, EPtr> bound;
  m.pres = spec(c.pres(), {}, &c.interferenceVars, &bound, true);
  std::map<std::string, EPtr> sub;
  for (const auto& [k, v] : bound) sub[k] = e::old("", v);
  m.posts = spec(c.posts(), sub, nullptr, nullptr);
  return m;
}

ivl::MethodDecl MethodEncoder::procedure(const ProcedureCandidate& pc) {
  const ProcDecl& p = *pc.proc;
  instances_ = pc.instances;
  fresh_ = 0;
  ivl::MethodDecl m;
  m.name = p.name;
  m.params = ivlParams(p.params);
  m.returns = ivlParams(p.returns);
  m.line = p.span.line;
  line_ = p.span.line;

  ivl::Block body;
  for (const auto& r : regionNames()) {
    EPtr loc = e::field(e::var("q_c"), mangle::icontext(r));
    body.push_back(mk(ivl::SK::Inhale,
                      e::forall({{"q_c", ivl::Type::ref()}},
                                e::implies(e::binary(ivl::Op::Ne, e::var("q_c"), e::null()), e::acc(loc)))));
  }

  std::set<std::string> inter;
  for (const auto& ic : p.interference) inter.insert(ic.binder);
  std::map<std::string, EPtr> bound;
  std::vector<EPtr> pres = spec(p.pres, {}, &inter, &bound);

  // Interference clauses fix the X of the instance whose state they bind.
  for (const auto& ic : p.interference) {
    if (ic.set->kind == ExprKind::TypeSet) continue;
    std::function<const Expr*(const Expr&)> find = [&](const Expr& x) -> const Expr* {
      if (x.kind == ExprKind::RegionAssn && !x.args.empty() && x.args.back()->kind == ExprKind::Var &&
          x.args.back()->name == ic.binder)
        return &x;
      for (const auto& a : x.args)
        if (const Expr* f = find(*a)) return f;
      return nullptr;
    };
    for (const auto& pre : p.pres)
      if (const Expr* ra = find(*pre)) {
        RegionInstance inst = instanceOf(rp_, *ra);
        body.push_back(mk(ivl::SK::Inhale, e::eq(e::field(regionId(inst), mangle::icontext(inst.region)),
                                                 pure(*ic.set))));
        break;
      }
  }
  for (const auto& x : pres) body.push_back(mk(ivl::SK::Inhale, x));
  body.push_back(label("pre_method"));

  auto lv = varDecl("level", ivl::Type::integer());
  std::const_pointer_cast<ivl::Stmt>(lv)->minimal = true;
  body.push_back(lv);
  std::vector<EPtr> lower;
  for (const auto& l : pc.levels) lower.push_back(e::binary(ivl::Op::Gt, e::var("level"), pure(*l)));
  if (!lower.empty()) body.push_back(mk(ivl::SK::Inhale, e::conj(lower)));
  body.push_back(varDecl("alevel", ivl::Type::integer(), e::var("level")));
  body.push_back(varDecl("update", ivl::Type::set(ivl::Type::ref()), e::setLit(ivl::Type::ref(), {})));

  std::map<std::string, EPtr> sub;
  for (const auto& [k, v] : bound) sub[k] = e::old("pre_method", v);
  Scope sc;
  sc.sub = sub;
  scopes_.push_back(sc);
  nodes(pc.body, body);
  scopes_.pop_back();

  std::vector<ExprPtr> postParts;
  for (const auto& x : p.posts) splitAnd(x, postParts);
  for (const auto& x : postParts) {
    line_ = x->span.line;
    for (const auto& c : spec({x}, sub, nullptr, nullptr))
      body.push_back(mk(ivl::SK::Exhale, c, "could not prove postcondition"));
  }
  m.body = std::move(body);
  return m;
}

// ------------------------------------------------------------ program

ivl::Program encode(const ProofCandidate& c) {
  const ResolvedProgram& rp = *c.program;
  ivl::Program out;
  for (const auto* s : rp.program.structs())
    for (const auto& f : s->fields) {
      if (out.field(f.name)) continue;
      out.fields.push_back({f.name, ivlType(f.type)});
      out.programFields.push_back(f.name);
    }
  out.fields.push_back({mangle::diamond(), ivl::Type::boolean()});
  for (const auto* r : rp.program.regions()) {
    RegionEncoding re = encodeRegion(rp, *r);
    out.fields.insert(out.fields.end(), re.fields.begin(), re.fields.end());
    out.predicates.push_back(re.predicate);
    out.predicates.insert(out.predicates.end(), re.guards.begin(), re.guards.end());
    out.functions.push_back(re.stateFunction);
  }
  std::map<const ProcDecl*, const ProcedureCandidate*> cands;
  for (const auto& pc : c.procedures) cands[pc.proc] = &pc;
  for (const auto& d : rp.program.decls) {
    const std::string& name = declName(d);
    if (const auto* p = std::get_if<ProcDecl>(&d)) {
      MethodEncoder enc(rp, name);
      auto it = cands.find(p);
      if (p->body && it != cands.end())
        out.methods.push_back(enc.procedure(*it->second));
      else if (const CallableInfo* ci = rp.callable(name))
        out.methods.push_back(enc.declaration(*ci));
    } else if (std::holds_alternative<LemmaDecl>(d)) {
      MethodEncoder enc(rp, name);
      if (const CallableInfo* ci = rp.callable(name)) out.methods.push_back(enc.declaration(*ci));
    }
  }
  return out;
}

std::string emitProgram(const ProofCandidate& c) { return ivl::print(encode(c)); }

}  // namespace voila
