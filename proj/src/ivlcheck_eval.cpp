#include <climits>
#include <sstream>

#include "ivlcheck_internal.hpp"
#include "voila/encoder.hpp"
#include "voila/regions.hpp"

namespace voila::ivlcheck::detail {

using ivl::EK;
using ivl::Op;

namespace {

ValueList share(std::vector<Value> xs) { return std::make_shared<const std::vector<Value>>(std::move(xs)); }

bool numericEq(const Value& a, const Value& b) {
  if (a.isNumeric() && b.isNumeric()) return a.asRational() == b.asRational();
  return a == b;
}

std::int64_t floorDiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::vector<std::string> splitTags(const std::string& t) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : t) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

// ------------------------------------------------------------ values

Value applyOp(Op op, const Value& a, const Value& b) {
  switch (op) {
    case Op::Eq: return Value::boolean(numericEq(a, b));
    case Op::Ne: return Value::boolean(!numericEq(a, b));
    case Op::Lt: return Value::boolean(a.asRational() < b.asRational());
    case Op::Le: return Value::boolean(a.asRational() <= b.asRational());
    case Op::Gt: return Value::boolean(a.asRational() > b.asRational());
    case Op::Ge: return Value::boolean(a.asRational() >= b.asRational());
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) {
        std::int64_t r = op == Op::Add ? a.i + b.i : op == Op::Sub ? a.i - b.i : a.i * b.i;
        return Value::integer(r);
      } else {
        Rational x = a.asRational(), y = b.asRational();
        return Value::frac(op == Op::Add ? x + y : op == Op::Sub ? x - y : x * y);
      }
    case Op::Div:
      if (b.asRational().isZero()) throw CheckFailed{"division by zero"};
      if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) return Value::integer(floorDiv(a.i, b.i));
      return Value::frac(a.asRational() / b.asRational());
    case Op::Mod:
      if (b.i == 0) throw CheckFailed{"division by zero"};
      return Value::integer(a.i - b.i * floorDiv(a.i, b.i));
    case Op::In: return Value::boolean(b.contains(a));
    case Op::Union: return setUnion(a, b);
    case Op::Inter: return setInter(a, b);
    case Op::Minus: return setMinus(a, b);
    case Op::Subset: return Value::boolean(setSubset(a, b));
    case Op::And: return Value::boolean(a.asBool() && b.asBool());
    case Op::Or: return Value::boolean(a.asBool() || b.asBool());
    case Op::Implies: return Value::boolean(!a.asBool() || b.asBool());
    case Op::Iff: return Value::boolean(a.asBool() == b.asBool());
    case Op::Not:
    case Op::Neg: break;
  }
  throw CheckFailed{std::string("unsupported operator ") + ivl::opText(op)};
}

bool spatial(const ivl::Expr& e) {
  switch (e.kind) {
    case EK::Acc:
    case EK::Pred: return true;
    case EK::Binary:
      if (e.op == Op::And) return spatial(*e.args[0]) || spatial(*e.args[1]);
      if (e.op == Op::Implies) return spatial(*e.args[1]);
      return false;
    case EK::Forall: return spatial(*e.args[0]);
    default: return false;
  }
}

// ------------------------------------------------------------ context

Context::Context(const ivl::Program& p, const DomainConfig& c) : program(&p), cfg(c) {
  ints = share(intRange(cfg.intLo, cfg.intHi));
  bools = share({Value::boolean(false), Value::boolean(true)});
  std::vector<Value> fr = cfg.fracs;
  if (fr.empty())
    for (auto q : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) fr.push_back(Value::frac(q));
  fracs = share(fr);
  refs = share({Value::null()});
  for (const auto& [r, d] : cfg.regionDomains) regionDomains[r] = share(d);
  for (const auto& pd : p.predicates) {
    if (pd.role != ivl::PredRole::Region) continue;
    for (const auto& f : {mangle::from(pd.name), mangle::to(pd.name), mangle::icontext(pd.name), mangle::acontext(pd.name)})
      fieldRegion[f] = pd.name;
  }
  programFields.insert(p.programFields.begin(), p.programFields.end());
}

void Context::setUniverse(std::int64_t refCount) {
  std::vector<Value> r{Value::null()};
  for (std::int64_t i = 1; i <= refCount; ++i) r.push_back(Value::ref(i));
  refs = share(r);
  subsetCache.clear();
}

ValueList Context::subsets(const std::string& key, const std::vector<Value>& universe) const {
  auto it = subsetCache.find(key);
  if (it != subsetCache.end()) return it->second;
  if (universe.size() > 12) throw TooLarge{"set domain over " + std::to_string(universe.size()) + " elements"};
  ValueList s = share(allSubsets(universe));
  subsetCache[key] = s;
  return s;
}

ValueList Context::regionDomain(const std::string& region) const {
  auto it = regionDomains.find(region);
  return it != regionDomains.end() ? it->second : ints;
}

ValueList Context::domainOf(const ivl::Type& t) const {
  switch (t.kind) {
    case ivl::Type::Kind::Int: return ints;
    case ivl::Type::Kind::Bool: return bools;
    case ivl::Type::Kind::Perm: return fracs;
    case ivl::Type::Kind::Ref: return refs;
    case ivl::Type::Kind::Set: return subsets("type " + t.str(), *domainOf(*t.elem));
    case ivl::Type::Kind::Seq: break;
  }
  throw TooLarge{"sequence domain"};
}

ValueList Context::fieldDomain(const std::string& field) const {
  auto r = fieldRegion.find(field);
  if (r != fieldRegion.end()) {
    const std::string& region = r->second;
    if (field == mangle::from(region) || field == mangle::to(region)) return regionDomain(region);
    return subsets("region " + region, *regionDomain(region));
  }
  const ivl::FieldDecl* f = program->field(field);
  if (!f) throw CheckFailed{"unknown field " + field};
  return domainOf(f->type);
}

ValueList Context::quantDomain(const ivl::Expr& q, std::size_t i) const {
  const ivl::Type& t = q.vars[i].type;
  std::string tag;
  if (!q.tag.empty()) {
    auto tags = splitTags(q.tag);
    if (tags.size() == q.vars.size())
      tag = tags[i];
    else if (tags.size() == 1)
      tag = tags[0];
  }
  if (!tag.empty() && t.kind != ivl::Type::Kind::Ref && t.kind != ivl::Type::Kind::Bool) return regionDomain(tag);
  return domainOf(t);
}

// ------------------------------------------------------------ terms

int Machine::fresh(ValueList domain, bool minimal) {
  int id = static_cast<int>(a_.unknowns.size());
  a_.unknowns.push_back(UnknownInfo{std::move(domain), minimal, INT64_MIN});
  return id;
}

int Machine::root(int id) const {
  for (auto it = a_.alias.find(id); it != a_.alias.end(); it = a_.alias.find(id)) id = it->second;
  return id;
}

Value Machine::force(const Term& t) {
  if (t.known) return t.v;
  int r = root(t.unk);
  auto it = a_.resolved.find(r);
  if (it != a_.resolved.end()) return it->second;
  UnknownInfo& info = a_.unknowns.at(static_cast<std::size_t>(r));
  if (info.minimal) {
    Value v = Value::integer(info.lower == INT64_MIN ? cx_.cfg.intLo : info.lower);
    a_.resolved[r] = v;
    return v;
  }
  throw NeedSplit{r, info.domain};
}

void Machine::bindTerm(const Term& t, const Value& v) {
  int r = root(t.unk);
  a_.resolved[r] = v;
  if (v.kind == Value::Kind::Int && (v.i < cx_.cfg.intLo || v.i > cx_.cfg.intHi) &&
      !a_.unknowns.at(static_cast<std::size_t>(r)).minimal)
    a_.outOfDomain = true;
}

Term Machine::lookupVar(const std::string& n, Env& env) const {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == n) return it->second;
  auto s = a_.store.find(n);
  if (s == a_.store.end()) throw CheckFailed{"undeclared variable " + n};
  return s->second;
}

Rational Machine::fieldPerm(const View& v, const LocKey& k) const {
  Rational p;
  auto it = v.mask->fields.find(k);
  if (it != v.mask->fields.end()) p = it->second;
  for (const Overlay* o = v.overlay; o; o = o->parent) {
    auto e = o->extra.fields.find(k);
    if (e != o->extra.fields.end()) p += e->second;
  }
  return p;
}

Rational Machine::predPerm(const View& v, const PredKey& k) const {
  Rational p;
  auto it = v.mask->preds.find(k);
  if (it != v.mask->preds.end()) p = it->second;
  for (const Overlay* o = v.overlay; o; o = o->parent) {
    auto e = o->extra.preds.find(k);
    if (e != o->extra.preds.end()) p += e->second;
  }
  return p;
}

LocKey Machine::locKey(const ivl::Expr& field, const View& v, Env& env) {
  Value r = value(*field.args[0], v, env);
  if (r.kind != Value::Kind::Ref) throw CheckFailed{"receiver of " + describe(field) + " is not a reference"};
  return {r.i, field.name};
}

PredKey Machine::predKey(const ivl::Expr& pred, const View& v, Env& env) {
  PredKey k{pred.name, {}};
  for (const auto& a : pred.args) k.args.push_back(value(*a, v, env));
  return k;
}

const ivl::PredicateDecl& Machine::predDecl(const std::string& n) const {
  const ivl::PredicateDecl* d = cx_.program->predicate(n);
  if (!d) throw CheckFailed{"unknown predicate " + n};
  return *d;
}

namespace {

bool mentions(const ivl::Expr& e, const std::vector<ivl::QVar>& vars) {
  if (e.kind == EK::Var)
    for (const auto& v : vars)
      if (v.name == e.name) return true;
  for (const auto& a : e.args)
    if (a && mentions(*a, vars)) return true;
  return false;
}

// One-point rule: a conjunct `q == t` of an existential body (or of a
// universal antecedent) with t free of bound variables fixes q to t.
std::vector<ivl::EPtr> pinnedTerms(const ivl::Expr& q) {
  std::vector<ivl::EPtr> pins(q.vars.size());
  const ivl::Expr* scope = q.args[0].get();
  if (q.kind == EK::Forall) {
    if (scope->kind != EK::Binary || scope->op != Op::Implies) return pins;
    scope = scope->args[0].get();
  }
  std::vector<const ivl::Expr*> todo{scope};
  while (!todo.empty()) {
    const ivl::Expr* c = todo.back();
    todo.pop_back();
    if (c->kind != EK::Binary) continue;
    if (c->op == Op::And) {
      todo.push_back(c->args[0].get());
      todo.push_back(c->args[1].get());
      continue;
    }
    if (c->op != Op::Eq) continue;
    for (int side = 0; side < 2; ++side) {
      const ivl::Expr& v = *c->args[side];
      const auto& t = c->args[1 - side];
      if (v.kind != EK::Var || mentions(*t, q.vars)) continue;
      for (std::size_t i = 0; i < q.vars.size(); ++i)
        if (q.vars[i].name == v.name && !pins[i]) pins[i] = t;
    }
  }
  return pins;
}

}  // namespace

void Machine::forEachBinding(const ivl::Expr& q, Env& env, const std::function<bool()>& f, const View* view) {
  std::vector<ValueList> doms;
  std::vector<ivl::EPtr> pins = pinnedTerms(q);
  for (std::size_t i = 0; i < q.vars.size(); ++i) {
    if (pins[i]) {
      try {
        // A pinned variable is determined by the program, so it takes its
        // value even outside the configured domain.
        doms.push_back(share({value(*pins[i], view ? *view : current(), env)}));
        continue;
      } catch (const CheckFailed&) {
        // Not evaluable up front; enumerate instead.
      }
    }
    doms.push_back(cx_.quantDomain(q, i));
  }
  std::size_t base = env.size();
  for (const auto& v : q.vars) env.emplace_back(v.name, Term{});
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == q.vars.size()) return f();
    for (const auto& x : *doms[i]) {
      env[base + i].second = Term::of(x);
      if (rec(i + 1)) return true;
    }
    return false;
  };
  try {
    rec(0);
  } catch (...) {
    env.resize(base);
    throw;
  }
  env.resize(base);
}

void Machine::overlayBody(const ivl::Expr& e, const View& v, Env& env, Overlay& o) {
  switch (e.kind) {
    case EK::Binary:
      if (e.op == Op::And) {
        overlayBody(*e.args[0], v, env, o);
        overlayBody(*e.args[1], v, env, o);
      } else if (e.op == Op::Implies && spatial(*e.args[1])) {
        if (value(*e.args[0], v, env).asBool()) overlayBody(*e.args[1], v, env, o);
      }
      return;
    case EK::Acc: {
      Rational amount = e.args.size() > 1 ? value(*e.args[1], v, env).asRational() : Rational(1);
      const ivl::Expr& loc = *e.args[0];
      if (loc.kind == EK::Field)
        o.extra.fields[locKey(loc, v, env)] += amount;
      else
        o.extra.preds[predKey(loc, v, env)] += amount;
      return;
    }
    case EK::Pred: o.extra.preds[predKey(e, v, env)] += Rational(1); return;
    case EK::Forall:
      if (spatial(*e.args[0]))
        forEachBinding(e, env, [&] {
          overlayBody(*e.args[0], v, env, o);
          return false;
        }, &v);
      return;
    default: return;
  }
}

Overlay Machine::unfoldOverlay(const PredKey& k, const View& v) {
  const ivl::PredicateDecl& d = predDecl(k.name);
  if (!d.body) throw CheckFailed{"cannot unfold abstract predicate " + k.name};
  Env penv;
  for (std::size_t i = 0; i < d.params.size() && i < k.args.size(); ++i)
    penv.emplace_back(d.params[i].name, Term::of(k.args[i]));
  Overlay o;
  o.parent = v.overlay;
  View inner{v.heap, v.mask, &o};
  overlayBody(*d.body, inner, penv, o);
  return o;
}

Value Machine::value(const ivl::Expr& e, const View& v, Env& env) { return force(term(e, v, env)); }

Term Machine::term(const ivl::Expr& e, const View& v, Env& env) {
  switch (e.kind) {
    case EK::IntLit: return Term::of(Value::integer(e.i));
    case EK::BoolLit: return Term::of(Value::boolean(e.b));
    case EK::PermLit: return Term::of(Value::frac(e.q));
    case EK::Null: return Term::of(Value::null());
    case EK::Var: return lookupVar(e.name, env);
    case EK::Field: {
      LocKey k = locKey(e, v, env);
      if (k.first == 0) throw CheckFailed{"null dereference in " + describe(e)};
      if (fieldPerm(v, k) <= Rational(0)) throw CheckFailed{"no permission to read " + describe(e)};
      auto it = v.heap->find(k);
      if (it == v.heap->end()) throw CheckFailed{"no value for " + describe(e)};
      return it->second;
    }
    case EK::App: {
      const ivl::FunctionDecl* f = cx_.program->function(e.name);
      if (!f || !f->body) throw CheckFailed{"unknown function " + e.name};
      Env fenv;
      for (std::size_t i = 0; i < f->params.size() && i < e.args.size(); ++i)
        fenv.emplace_back(f->params[i].name, term(*e.args[i], v, env));
      for (const auto& pre : f->pres) {
        if (pre->kind == EK::Pred) {
          if (predPerm(v, predKey(*pre, v, fenv)) <= Rational(0))
            throw CheckFailed{"function " + e.name + " requires " + describe(*pre)};
        } else if (!spatial(*pre) && !value(*pre, v, fenv).asBool()) {
          throw CheckFailed{"precondition of function " + e.name + " might not hold"};
        }
      }
      return term(*f->body, v, fenv);
    }
    case EK::Pred:
    case EK::Acc: throw CheckFailed{"permission in expression position: " + describe(e)};
    case EK::Perm: {
      View pv = v;
      std::shared_ptr<const Snapshot> snap;
      if (!e.name.empty()) {
        auto it = a_.labels.find(e.name);
        if (it == a_.labels.end()) throw CheckFailed{"unknown label " + e.name};
        snap = it->second;
        pv = View{&snap->heap, &snap->mask, nullptr};
      }
      const ivl::Expr& loc = *e.args[0];
      if (loc.kind == EK::Field) return Term::of(Value::frac(fieldPerm(pv, locKey(loc, v, env))));
      return Term::of(Value::frac(predPerm(pv, predKey(loc, v, env))));
    }
    case EK::Old: {
      auto it = a_.labels.find(e.name);
      if (it == a_.labels.end()) throw CheckFailed{"unknown label " + (e.name.empty() ? std::string("old") : e.name)};
      std::shared_ptr<const Snapshot> snap = it->second;
      return term(*e.args[0], View{&snap->heap, &snap->mask, nullptr}, env);
    }
    case EK::Unary: {
      Value x = value(*e.args[0], v, env);
      if (e.op == Op::Not) return Term::of(Value::boolean(!x.asBool()));
      if (x.kind == Value::Kind::Frac) return Term::of(Value::frac(-x.q));
      return Term::of(Value::integer(-x.i));
    }
    case EK::Binary: {
      switch (e.op) {
        case Op::And:
          if (!value(*e.args[0], v, env).asBool()) return Term::of(Value::boolean(false));
          return Term::of(Value::boolean(value(*e.args[1], v, env).asBool()));
        case Op::Or:
          if (value(*e.args[0], v, env).asBool()) return Term::of(Value::boolean(true));
          return Term::of(Value::boolean(value(*e.args[1], v, env).asBool()));
        case Op::Implies:
          if (!value(*e.args[0], v, env).asBool()) return Term::of(Value::boolean(true));
          return Term::of(Value::boolean(value(*e.args[1], v, env).asBool()));
        case Op::Eq:
        case Op::Ne: {
          // An unknown equals itself without being enumerated.
          Term l = term(*e.args[0], v, env);
          Term r = term(*e.args[1], v, env);
          if (!l.known && !r.known && root(l.unk) == root(r.unk) && !a_.resolved.count(root(l.unk)))
            return Term::of(Value::boolean(e.op == Op::Eq));
          return Term::of(applyOp(e.op, force(l), force(r)));
        }
        default: {
          Value l = value(*e.args[0], v, env);
          Value r = value(*e.args[1], v, env);
          return Term::of(applyOp(e.op, l, r));
        }
      }
    }
    case EK::SetLit: {
      std::vector<Value> xs;
      for (const auto& a : e.args) xs.push_back(value(*a, v, env));
      return Term::of(Value::set(std::move(xs)));
    }
    case EK::SeqLit: {
      std::vector<Value> xs;
      for (const auto& a : e.args) xs.push_back(value(*a, v, env));
      return Term::of(Value::seq(std::move(xs)));
    }
    case EK::Forall:
    case EK::Exists: {
      bool want = e.kind == EK::Exists;
      bool found = false;
      forEachBinding(e, env, [&] {
        if (value(*e.args[0], v, env).asBool() == want) {
          found = true;
          return true;
        }
        return false;
      }, &v);
      return Term::of(Value::boolean(want ? found : !found));
    }
    case EK::Unfolding: {
      PredKey k = predKey(*e.args[0], v, env);
      if (predPerm(v, k) <= Rational(0)) throw CheckFailed{"unfolding of " + describe(*e.args[0]) + " without permission"};
      Overlay o = unfoldOverlay(k, v);
      return term(*e.args[1], View{v.heap, v.mask, &o}, env);
    }
  }
  throw CheckFailed{"unsupported expression"};
}

// ------------------------------------------------------------ diagnostics

std::string Machine::describe(const ivl::Expr& e) const {
  std::string s = ivl::printExpr(e);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

std::string Machine::witness() {
  auto show = [&](const Term& t) {
    if (t.known) return t.v.str();
    int r = root(t.unk);
    auto it = a_.resolved.find(r);
    return it != a_.resolved.end() ? it->second.str() : std::string("?");
  };
  std::ostringstream os;
  os << "store{";
  bool first = true;
  for (const auto& [n, t] : a_.store) {
    os << (first ? "" : ", ") << n << "=" << show(t);
    first = false;
  }
  os << "} heap{";
  first = true;
  for (const auto& [k, p] : a_.mask.fields) {
    if (p <= Rational(0)) continue;
    auto it = a_.heap.find(k);
    os << (first ? "" : ", ") << "#" << k.first << "." << k.second << "=" << (it != a_.heap.end() ? show(it->second) : "?");
    if (p != Rational(1)) os << " [" << p.str() << "]";
    first = false;
  }
  os << "} held{";
  first = true;
  for (const auto& [k, p] : a_.mask.preds) {
    if (p <= Rational(0)) continue;
    os << (first ? "" : ", ") << k.name << "(";
    for (std::size_t i = 0; i < k.args.size(); ++i) os << (i ? ", " : "") << k.args[i].str();
    os << ")";
    if (p != Rational(1)) os << " [" << p.str() << "]";
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace voila::ivlcheck::detail
