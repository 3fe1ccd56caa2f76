#include "voila/regions.hpp"

#include <algorithm>
#include <set>

namespace voila {

std::vector<Value> intRange(std::int64_t lo, std::int64_t hi) {
  std::vector<Value> out;
  for (std::int64_t v = lo; v <= hi; ++v) out.push_back(Value::integer(v));
  return out;
}

TypeDomains TypeDomains::defaults(std::int64_t lo, std::int64_t hi) {
  TypeDomains d;
  d.ints = intRange(lo, hi);
  for (auto q : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) d.fracs.push_back(Value::frac(q));
  d.bools = {Value::boolean(false), Value::boolean(true)};
  d.refs = {Value::ref(1)};
  return d;
}

const std::vector<Value>& TypeDomains::of(const Type& t) const {
  switch (t.kind) {
    case Type::Kind::Frac: return fracs;
    case Type::Kind::Bool: return bools;
    case Type::Kind::Id:
    case Type::Kind::Struct: return refs;
    default: return ints;
  }
}

namespace {

bool mentions(const Expr& e, const std::string& name) {
  if ((e.kind == ExprKind::Var || e.kind == ExprKind::Binder) && e.name == name) return true;
  for (const auto& a : e.args)
    if (mentions(*a, name)) return true;
  return e.target && mentions(*e.target, name);
}

bool isNamed(const ExprPtr& e, const std::string& name) {
  return e && (e->kind == ExprKind::Var || e->kind == ExprKind::Binder) && e->name == name;
}

bool truthy(const Expr& e, const ValueEnv& env) {
  try {
    return evalPure(e, env).asBool();
  } catch (const EvalError&) {
    return false;
  }
}

bool equalsValue(const Expr& e, const ValueEnv& env, const Value& v) {
  try {
    return evalPure(e, env) == v;
  } catch (const EvalError&) {
    return false;
  }
}

}  // namespace

void forEachInstantiation(const RegionDecl& r, const ActionDecl& a, const ValueEnv& params, const Value& from,
                          const Value& to, const std::vector<Value>& domain, const TypeDomains& types,
                          const std::function<bool(const ValueEnv&)>& f) {
  ValueEnv env = params;
  std::vector<std::pair<std::string, const std::vector<Value>*>> free;
  const GuardDecl* gd = r.findGuard(a.guard);
  for (const auto& b : a.binders) {
    bool fromFixed = isNamed(a.from, b), toFixed = isNamed(a.to, b);
    if (fromFixed && toFixed && !(from == to)) return;
    if (fromFixed) {
      env[b] = from;
      continue;
    }
    if (toFixed) {
      env[b] = to;
      continue;
    }
    const std::vector<Value>* dom = &types.ints;
    if (mentions(*a.from, b) || mentions(*a.to, b)) {
      dom = &domain;
    } else if (gd) {
      for (std::size_t i = 0; i < a.guardArgs.size() && i < gd->params.size(); ++i)
        if (isNamed(a.guardArgs[i], b)) dom = &types.of(gd->params[i].type);
    }
    free.emplace_back(b, dom);
  }
  // Odometer over the free binders.
  std::vector<std::size_t> idx(free.size(), 0);
  for (const auto& fb : free)
    if (fb.second->empty()) return;
  for (;;) {
    for (std::size_t i = 0; i < free.size(); ++i) env[free[i].first] = (*free[i].second)[idx[i]];
    if (equalsValue(*a.from, env, from) && equalsValue(*a.to, env, to) && (!a.condition || truthy(*a.condition, env)))
      if (f(env)) return;
    std::size_t k = 0;
    while (k < free.size() && ++idx[k] == free[k].second->size()) idx[k++] = 0;
    if (k == free.size()) return;
  }
}

GuardTerm actionGuard(const RegionDecl& r, const ActionDecl& a, const ValueEnv& env) {
  GuardTerm g;
  g.name = a.guard;
  if (const GuardDecl* gd = r.findGuard(a.guard)) g.kind = gd->kind;
  auto it = env.find(r.params.empty() ? std::string() : r.params[0].name);
  g.region = it != env.end() ? it->second : Value::null();
  for (const auto& arg : a.guardArgs) g.args.push_back(evalPure(*arg, env));
  return g;
}

bool actionPermitted(const RegionConfig& r, const Value& from, const Value& to, const GuardHolding& g) {
  if (from == to) return true;
  for (const auto& a : r.decl->actions) {
    bool ok = false;
    forEachInstantiation(*r.decl, a, r.params, from, to, r.domain, r.types, [&](const ValueEnv& env) {
      ok = guardEntails(actionGuard(*r.decl, a, env), g);
      return ok;
    });
    if (ok) return true;
  }
  return false;
}

bool interferencePermitted(const RegionConfig& r, const Value& from, const Value& to) {
  if (r.pending && std::find(r.updateDomain.begin(), r.updateDomain.end(), to) == r.updateDomain.end()) return false;
  if (from == to) return true;
  for (const auto& a : r.decl->actions) {
    bool ok = false;
    forEachInstantiation(*r.decl, a, r.params, from, to, r.domain, r.types, [&](const ValueEnv& env) {
      ok = envMayHold(actionGuard(*r.decl, a, env), r.local);
      return ok;
    });
    if (ok) return true;
  }
  return false;
}

std::vector<Value> stabilizeStates(const RegionConfig& r, const std::vector<Value>& states) {
  std::vector<Value> out;
  for (const auto& t : r.domain)
    for (const auto& s : states)
      if (interferencePermitted(r, s, t)) {
        out.push_back(t);
        break;
      }
  return Value::set(std::move(out)).elems;
}

std::vector<Value> inferInterference(const RegionConfig& r, const Value& current) {
  return stabilizeStates(r, {current});
}

ClosureResult checkTransitiveClosure(const RegionDecl& r, const std::vector<Value>& domain, const TypeDomains& types,
                                     std::size_t cap) {
  ClosureResult res;
  if (domain.size() > cap) {
    res.closed = false;
    res.tooLarge = true;
    return res;
  }
  std::vector<std::string> names;
  for (const auto& a : r.actions)
    if (std::find(names.begin(), names.end(), a.guard) == names.end()) names.push_back(a.guard);

  // Region parameters are fixed to the first value of their type domain.
  ValueEnv params;
  for (const auto& p : r.params)
    if (!types.of(p.type).empty()) params[p.name] = types.of(p.type).front();

  const std::size_t n = domain.size();
  for (const auto& g : names) {
    std::vector<char> rel(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) {
          rel[i * n + j] = 1;
          continue;
        }
        for (const auto& a : r.actions) {
          if (a.guard != g) continue;
          bool hit = false;
          forEachInstantiation(r, a, params, domain[i], domain[j], domain, types, [&](const ValueEnv&) {
            hit = true;
            return true;
          });
          if (hit) {
            rel[i * n + j] = 1;
            break;
          }
        }
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!rel[i * n + j]) continue;
        for (std::size_t k = 0; k < n; ++k)
          if (rel[j * n + k] && !rel[i * n + k]) {
            res.closed = false;
            res.counterexample = std::array<Value, 3>{domain[i], domain[j], domain[k]};
            res.guard = g;
            return res;
          }
      }
  }
  return res;
}

std::vector<std::pair<std::string, std::string>> nestedStateBinders(const RegionDecl& r) {
  std::vector<std::pair<std::string, std::string>> out;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == ExprKind::RegionAssn && !e.args.empty() && e.args.back()->kind == ExprKind::Binder)
      out.emplace_back(e.args.back()->name, e.name);
    for (const auto& a : e.args) walk(*a);
  };
  if (r.interpretation) walk(*r.interpretation);
  return out;
}

LinkResult linkInterference(const RegionConfig& parent, const std::vector<Value>& parentX,
                            const std::vector<RegionConfig>& children) {
  LinkResult res;
  auto binders = nestedStateBinders(*parent.decl);
  if (binders.size() != children.size()) throw EvalError("child count does not match the parent interpretation");
  res.projections.assign(children.size(), {});
  std::vector<std::size_t> idx(children.size(), 0);
  for (const auto& c : children)
    if (c.domain.empty()) return res;
  std::vector<std::set<Value>> proj(children.size());
  for (;;) {
    ValueEnv env = parent.params;
    std::vector<Value> tuple;
    for (std::size_t i = 0; i < children.size(); ++i) {
      tuple.push_back(children[i].domain[idx[i]]);
      env[binders[i].first] = tuple.back();
    }
    Value image = evalPure(*parent.decl->state, env);
    if (std::find(parentX.begin(), parentX.end(), image) != parentX.end()) {
      for (std::size_t i = 0; i < tuple.size(); ++i) proj[i].insert(tuple[i]);
      res.tuples.push_back(std::move(tuple));
    }
    std::size_t k = 0;
    while (k < children.size() && ++idx[k] == children[k].domain.size()) idx[k++] = 0;
    if (k == children.size()) break;
  }
  std::size_t productSize = 1;
  for (std::size_t i = 0; i < children.size(); ++i) {
    res.projections[i].assign(proj[i].begin(), proj[i].end());
    productSize *= proj[i].size();
  }
  res.product = res.tuples.size() == productSize;
  return res;
}

}  // namespace voila
