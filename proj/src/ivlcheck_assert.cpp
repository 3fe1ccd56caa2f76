#include <algorithm>

#include "ivlcheck_internal.hpp"

namespace voila::ivlcheck::detail {

using ivl::EK;
using ivl::Op;

namespace {
Env paramEnv(const ivl::PredicateDecl& d, const PredKey& k) {
  Env env;
  for (std::size_t i = 0; i < d.params.size() && i < k.args.size(); ++i)
    env.emplace_back(d.params[i].name, Term::of(k.args[i]));
  return env;
}

std::string predText(const PredKey& k) {
  std::string s = k.name + "(";
  for (std::size_t i = 0; i < k.args.size(); ++i) s += (i ? ", " : "") + k.args[i].str();
  return s + ")";
}
}  // namespace

// ------------------------------------------------------------ inhale

void Machine::inhale(const ivl::Expr& e, Env& env, Mode m) {
  switch (e.kind) {
    case EK::Binary:
      if (e.op == Op::And) {
        inhale(*e.args[0], env, m);
        inhale(*e.args[1], env, m);
        return;
      }
      if (e.op == Op::Implies) {
        if (truth(*e.args[0], env)) inhale(*e.args[1], env, m);
        return;
      }
      break;
    case EK::Acc: {
      Rational amount = e.args.size() > 1 ? value(*e.args[1], current(), env).asRational() : Rational(1);
      addPerm(*e.args[0], amount, env, m);
      return;
    }
    case EK::Pred: addPerm(e, Rational(1), env, m); return;
    case EK::Forall:
      if (spatial(*e.args[0])) {
        forEachBinding(e, env, [&] {
          inhale(*e.args[0], env, m);
          return false;
        });
        return;
      }
      break;
    default: break;
  }
  assume(e, env);
}

// Binds an unresolved side of an equality to the other side.
bool Machine::tryBindEq(const ivl::Expr& e, Env& env) {
  Term l = term(*e.args[0], current(), env);
  Term r = term(*e.args[1], current(), env);
  auto norm = [&](Term& t) {
    if (t.known) return;
    auto it = a_.resolved.find(root(t.unk));
    if (it != a_.resolved.end()) t = Term::of(it->second);
  };
  norm(l);
  norm(r);
  auto minimal = [&](const Term& t) { return !t.known && a_.unknowns.at(static_cast<std::size_t>(root(t.unk))).minimal; };
  if (minimal(l) || minimal(r)) return false;
  if (!l.known && r.known) {
    bindTerm(l, r.v);
    return true;
  }
  if (l.known && !r.known) {
    bindTerm(r, l.v);
    return true;
  }
  if (!l.known && !r.known) {
    int a = root(l.unk), b = root(r.unk);
    if (a != b) a_.alias[a] = b;
    return true;
  }
  if (!applyOp(Op::Eq, l.v, r.v).asBool()) throw Infeasible{};
  return true;
}

// forall q :: q in T <==> P(q), with T unresolved, determines T.
bool Machine::tryInferSet(const ivl::Expr& q, Env& env) {
  if (q.vars.size() != 1) return false;
  const ivl::Expr& body = *q.args[0];
  if (body.kind != EK::Binary || body.op != Op::Iff) return false;
  const ivl::Expr& lhs = *body.args[0];
  if (lhs.kind != EK::Binary || lhs.op != Op::In) return false;
  if (lhs.args[0]->kind != EK::Var || lhs.args[0]->name != q.vars[0].name) return false;
  Term t = term(*lhs.args[1], current(), env);
  if (t.known || a_.resolved.count(root(t.unk)) || a_.unknowns.at(static_cast<std::size_t>(root(t.unk))).minimal)
    return false;
  std::vector<Value> members;
  forEachBinding(q, env, [&] {
    if (truth(*body.args[1], env)) members.push_back(env.back().second.v);
    return false;
  });
  Value s = Value::set(std::move(members));
  const auto& dom = *a_.unknowns.at(static_cast<std::size_t>(root(t.unk))).domain;
  if (std::find(dom.begin(), dom.end(), s) == dom.end()) throw Infeasible{};
  bindTerm(t, s);
  return true;
}

void Machine::assume(const ivl::Expr& e, Env& env) {
  if (e.kind == EK::BoolLit) {
    if (!e.b) throw Infeasible{};
    return;
  }
  if (e.kind == EK::Binary) {
    switch (e.op) {
      case Op::And:
        assume(*e.args[0], env);
        assume(*e.args[1], env);
        return;
      case Op::Implies:
        if (truth(*e.args[0], env)) assume(*e.args[1], env);
        return;
      case Op::Eq:
        if (tryBindEq(e, env)) return;
        break;
      case Op::Gt:
      case Op::Ge: {
        Term l = term(*e.args[0], current(), env);
        if (!l.known) {
          int r = root(l.unk);
          if (a_.unknowns.at(static_cast<std::size_t>(r)).minimal && !a_.resolved.count(r)) {
            Rational b = value(*e.args[1], current(), env).asRational();
            std::int64_t fl = b.num() / b.den();
            if (b.num() < 0 && b.num() % b.den() != 0) --fl;
            std::int64_t bound = (b.isInteger() && e.op == Op::Ge) ? fl : fl + 1;
            // Evaluating the bound may have resolved this unknown.
            if (!a_.resolved.count(r)) {
              UnknownInfo& info = a_.unknowns.at(static_cast<std::size_t>(r));
              info.lower = std::max(info.lower, bound);
              return;
            }
          }
        }
        break;
      }
      case Op::In: {
        Term l = term(*e.args[0], current(), env);
        if (!l.known && !a_.resolved.count(root(l.unk)) &&
            !a_.unknowns.at(static_cast<std::size_t>(root(l.unk))).minimal) {
          Value s = value(*e.args[1], current(), env);
          if (s.elems.empty()) throw Infeasible{};
          throw NeedSplit{root(l.unk), std::make_shared<const std::vector<Value>>(s.elems)};
        }
        break;
      }
      default: break;
    }
  }
  if (e.kind == EK::Forall) {
    if (tryInferSet(e, env)) return;
    forEachBinding(e, env, [&] {
      assume(*e.args[0], env);
      return false;
    });
    return;
  }
  if (!truth(e, env)) throw Infeasible{};
}

// ------------------------------------------------------------ permissions

void Machine::addFieldPerm(const LocKey& k, Rational amount, Mode m) {
  if (amount < Rational(0)) throw CheckFailed{"negative permission amount"};
  if (amount.isZero()) return;
  if (k.first == 0) throw Infeasible{};
  Rational& p = a_.mask.fields[k];
  Rational old = p;
  p += amount;
  bool refresh = m == Mode::Fresh || (old.isZero() && m != Mode::Keep) || !a_.heap.count(k);
  if (refresh) a_.heap[k] = Term::unknown(fresh(cx_.fieldDomain(k.second)));
  if (m != Mode::Fresh && p > Rational(1)) throw Infeasible{};
}

void Machine::addPredPerm(const PredKey& k, Rational amount, Mode m) {
  if (amount < Rational(0)) throw CheckFailed{"negative permission amount"};
  if (amount.isZero()) return;
  const ivl::PredicateDecl& d = predDecl(k.name);
  Rational old;
  if (auto it = a_.mask.preds.find(k); it != a_.mask.preds.end()) old = it->second;
  Rational now = old + amount;
  // Guard composition: a unique, fractional or indexed guard cannot be held
  // twice; duplicable and manual guards compose as multisets.
  if (d.role == ivl::PredRole::Guard && d.guardKind != GuardKind::Duplicable && d.guardKind != GuardKind::Manual &&
      now > Rational(1))
    throw Infeasible{};
  if (d.body && (m == Mode::Fresh || (old.isZero() && m != Mode::Keep))) {
    Mask saved = a_.mask;
    Env penv = paramEnv(d, k);
    inhale(*d.body, penv, Mode::Fresh);
    a_.mask = std::move(saved);
  }
  a_.mask.preds[k] = now;
}

void Machine::addPerm(const ivl::Expr& loc, Rational amount, Env& env, Mode m) {
  if (loc.kind == EK::Field) {
    Value r = value(*loc.args[0], current(), env);
    if (r.kind != Value::Kind::Ref) throw CheckFailed{"receiver of " + describe(loc) + " is not a reference"};
    addFieldPerm({r.i, loc.name}, amount, m);
  } else if (loc.kind == EK::Pred) {
    addPredPerm(predKey(loc, current(), env), amount, m);
  } else {
    throw CheckFailed{"not a location: " + describe(loc)};
  }
}

// ------------------------------------------------------------ exhale

void Machine::collect(const ivl::Expr& e, const View& v, Env& env, std::vector<Removal>& out) {
  switch (e.kind) {
    case EK::Binary:
      if (e.op == Op::And) {
        collect(*e.args[0], v, env, out);
        collect(*e.args[1], v, env, out);
        return;
      }
      if (e.op == Op::Implies && spatial(*e.args[1])) {
        if (value(*e.args[0], v, env).asBool()) collect(*e.args[1], v, env, out);
        return;
      }
      break;
    case EK::Acc: {
      Rational amount = e.args.size() > 1 ? value(*e.args[1], v, env).asRational() : Rational(1);
      const ivl::Expr& loc = *e.args[0];
      if (loc.kind == EK::Field) {
        LocKey k = locKey(loc, v, env);
        if (k.first == 0) throw CheckFailed{"permission to a field of null: " + describe(loc)};
        out.push_back({true, k, {}, amount, describe(loc)});
      } else {
        out.push_back({false, {}, predKey(loc, v, env), amount, describe(loc)});
      }
      return;
    }
    case EK::Pred: out.push_back({false, {}, predKey(e, v, env), Rational(1), describe(e)}); return;
    case EK::Forall:
      if (spatial(*e.args[0])) {
        forEachBinding(e, env, [&] {
          collect(*e.args[0], v, env, out);
          return false;
        }, &v);
        return;
      }
      break;
    default: break;
  }
  if (!value(e, v, env).asBool()) throw CheckFailed{describe(e) + " might not hold"};
}

void Machine::exhale(const ivl::Expr& e, Env& env, bool keepValues, bool checkOnly) {
  std::vector<Removal> rs;
  collect(e, current(), env, rs);
  Mask scratch;
  Mask& m = checkOnly ? (scratch = a_.mask) : a_.mask;
  std::vector<LocKey> emptied;
  for (const auto& r : rs) {
    if (r.amount < Rational(0)) throw CheckFailed{"negative permission amount for " + r.text};
    if (r.amount.isZero()) continue;
    if (r.isField) {
      auto it = m.fields.find(r.field);
      if (it == m.fields.end() || it->second < r.amount) throw CheckFailed{"insufficient permission to " + r.text};
      it->second -= r.amount;
      if (it->second.isZero()) {
        m.fields.erase(it);
        emptied.push_back(r.field);
      }
    } else {
      auto it = m.preds.find(r.pred);
      if (it == m.preds.end() || it->second < r.amount) throw CheckFailed{"insufficient permission to " + r.text};
      it->second -= r.amount;
      if (it->second.isZero()) m.preds.erase(it);
    }
  }
  if (checkOnly || keepValues) return;
  for (const auto& k : emptied) a_.heap[k] = Term::unknown(fresh(cx_.fieldDomain(k.second)));
}

// ------------------------------------------------------------ other heap operations

void Machine::havocLocation(const ivl::Expr& loc, Env& env) {
  switch (loc.kind) {
    case EK::Var: {
      auto t = cx_.varTypes.find(loc.name);
      if (t == cx_.varTypes.end()) throw CheckFailed{"unknown type of " + loc.name};
      a_.store[loc.name] = Term::unknown(fresh(cx_.domainOf(t->second)));
      return;
    }
    case EK::Field: {
      LocKey k = locKey(loc, current(), env);
      if (k.first == 0) return;
      a_.heap[k] = Term::unknown(fresh(cx_.fieldDomain(k.second)));
      return;
    }
    case EK::Pred: {
      PredKey k = predKey(loc, current(), env);
      auto it = a_.mask.preds.find(k);
      if (it == a_.mask.preds.end() || it->second.isZero()) return;
      Rational p = it->second;
      a_.mask.preds.erase(it);
      addPredPerm(k, p, Mode::Normal);
      return;
    }
    case EK::Forall:
      forEachBinding(loc, env, [&] {
        const ivl::Expr& body = *loc.args[0];
        if (body.kind == EK::Binary && body.op == Op::Implies) {
          if (truth(*body.args[0], env)) havocLocation(*body.args[1], env);
        } else {
          havocLocation(body, env);
        }
        return false;
      });
      return;
    default: throw CheckFailed{"cannot havoc " + describe(loc)};
  }
}

void Machine::fold(const ivl::Expr& pred, Env& env) {
  PredKey k = predKey(pred, current(), env);
  const ivl::PredicateDecl& d = predDecl(k.name);
  if (!d.body) throw CheckFailed{"cannot fold abstract predicate " + k.name};
  Env penv = paramEnv(d, k);
  exhale(*d.body, penv, true);
  addPredPerm(k, Rational(1), Mode::Keep);
}

void Machine::unfold(const ivl::Expr& pred, Env& env) {
  PredKey k = predKey(pred, current(), env);
  const ivl::PredicateDecl& d = predDecl(k.name);
  if (!d.body) throw CheckFailed{"cannot unfold abstract predicate " + k.name};
  auto it = a_.mask.preds.find(k);
  if (it == a_.mask.preds.end() || it->second < Rational(1)) throw CheckFailed{"insufficient permission to " + predText(k)};
  it->second -= Rational(1);
  if (it->second.isZero()) a_.mask.preds.erase(it);
  Env penv = paramEnv(d, k);
  inhale(*d.body, penv, Mode::Keep);
}

void Machine::frameOut() {
  a_.mask.preds.clear();
  for (auto it = a_.mask.fields.begin(); it != a_.mask.fields.end();) {
    if (cx_.programFields.count(it->first.second)) {
      a_.heap[it->first] = Term::unknown(fresh(cx_.fieldDomain(it->first.second)));
      it = a_.mask.fields.erase(it);
    } else {
      ++it;
    }
  }
}

void Machine::frameIn(const std::string& label) {
  auto it = a_.labels.find(label);
  if (it == a_.labels.end()) throw CheckFailed{"unknown label " + label};
  std::shared_ptr<const Snapshot> snap = it->second;
  for (const auto& [k, p] : snap->mask.preds) addPredPerm(k, p, Mode::Normal);
  for (const auto& [k, p] : snap->mask.fields)
    if (cx_.programFields.count(k.second)) addFieldPerm(k, p, Mode::Normal);
}

void Machine::snapshot(const std::string& label) {
  auto lf = cx_.labelFields.find(label);
  if (lf == cx_.labelFields.end()) {
    a_.labels[label] = std::make_shared<const Snapshot>(Snapshot{a_.heap, a_.mask});
    return;
  }
  // Only the fields old[label] expressions read.
  Snapshot s;
  for (const auto& [k, t] : a_.heap)
    if (lf->second.count(k.second)) s.heap.emplace(k, t);
  for (const auto& [k, p] : a_.mask.fields)
    if (lf->second.count(k.second)) s.mask.fields.emplace(k, p);
  a_.labels[label] = std::make_shared<const Snapshot>(std::move(s));
}

}  // namespace voila::ivlcheck::detail
