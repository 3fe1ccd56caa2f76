#include "voila/ivlcheck.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <set>
#include <thread>

#include "ivlcheck_internal.hpp"

namespace voila::ivlcheck {

using namespace detail;
using ivl::EK;
using ivl::SK;

const char* verdictName(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct MethodFailure {
  Failure failure;
  bool outOfDomain;
};
struct BudgetExceeded {
  std::string what;
};

using Atoms = std::vector<Atom>;

const char* defaultCheck(SK k) {
  switch (k) {
    case SK::Exhale: return "exhale might fail";
    case SK::Assert: return "assertion might not hold";
    case SK::Fold: return "fold might fail";
    case SK::Unfold: return "unfold might fail";
    case SK::FieldAssign: return "field write might fail";
    default: return "statement might fail";
  }
}

void collectVarTypes(const ivl::Block& b, std::map<std::string, ivl::Type>& out) {
  for (const auto& s : b) {
    if (s->kind == SK::VarDecl) out[s->name] = s->type;
    collectVarTypes(s->body, out);
    collectVarTypes(s->elseBody, out);
  }
}

void modifiedVars(const ivl::Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    switch (s->kind) {
      case SK::Assign: out.insert(s->name); break;
      case SK::Call: out.insert(s->targets.begin(), s->targets.end()); break;
      case SK::Havoc:
        if (s->target && s->target->kind == EK::Var) out.insert(s->target->name);
        break;
      default: break;
    }
    modifiedVars(s->body, out);
    modifiedVars(s->elseBody, out);
  }
}

class Executor {
 public:
  Executor(const Context& cx, std::size_t budget, const Liveness* live = nullptr)
      : cx_(cx), budget_(budget), live_(live) {}

  std::size_t peak = 0;

  template <class F>
  Atoms perAtom(Atoms in, int line, const std::string& check, F op) {
    Atoms out;
    std::deque<Atom> work(std::make_move_iterator(in.begin()), std::make_move_iterator(in.end()));
    while (!work.empty()) {
      Atom a = std::move(work.front());
      work.pop_front();
      Atom w = a;
      Machine m(cx_, w);
      try {
        op(m, w);
        out.push_back(std::move(w));
      } catch (const NeedSplit& ns) {
        const auto& vals = *ns.values;
        for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
          Atom b = a;
          b.resolved[ns.id] = *it;
          work.push_front(std::move(b));
        }
      } catch (const Infeasible&) {
      } catch (const CheckFailed& cf) {
        Machine wm(cx_, a);
        throw MethodFailure{Failure{line, check, cf.reason, wm.witness()}, a.outOfDomain};
      }
      if (++steps_ > budget_ * 50) throw BudgetExceeded{"step budget exhausted"};
      if (work.size() + out.size() > budget_) throw BudgetExceeded{"atom budget of " + std::to_string(budget_) + " exhausted"};
    }
    peak = std::max(peak, out.size());
    return out;
  }

  Atoms block(Atoms in, const ivl::Block& b) {
    for (const auto& s : b) {
      if (in.empty()) break;
      if (s->external) continue;
      in = stmt(std::move(in), *s);
      if (live_) compact(cx_, in, live_->after(*s));
    }
    return in;
  }

  Atoms stmt(Atoms in, const ivl::Stmt& s) {
    std::string check = s.check.empty() ? defaultCheck(s.kind) : s.check;
    int line = s.line;
    switch (s.kind) {
      case SK::Inhale:
        return perAtom(std::move(in), line, check.empty() ? "inhale" : check, [&](Machine& m, Atom&) {
          Env env;
          m.inhale(*s.expr, env);
        });
      case SK::Exhale:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) {
          Env env;
          m.exhale(*s.expr, env);
        });
      case SK::Assert:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) {
          Env env;
          m.exhale(*s.expr, env, false, true);
        });
      case SK::Label:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) { m.snapshot(s.name); });
      case SK::VarDecl:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom& a) {
          if (s.expr) {
            a.store[s.name] = readTerm(m, a, *s.expr);
          } else {
            a.store[s.name] = Term::unknown(m.fresh(cx_.domainOf(s.type), s.minimal));
          }
        });
      case SK::Assign:
        return perAtom(std::move(in), line, check,
                       [&](Machine& m, Atom& a) { a.store[s.name] = readTerm(m, a, *s.expr); });
      case SK::FieldAssign:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom& a) {
          Env env;
          LocKey k = m.locKey(*s.target, m.current(), env);
          if (k.first == 0) throw CheckFailed{"write to a field of null"};
          if (m.fieldPerm(m.current(), k) < Rational(1))
            throw CheckFailed{"insufficient permission to write " + m.describe(*s.target)};
          a.heap[k] = readTerm(m, a, *s.expr);
        });
      case SK::Fold:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) {
          Env env;
          m.fold(*s.expr, env);
        });
      case SK::Unfold:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) {
          Env env;
          m.unfold(*s.expr, env);
        });
      case SK::Havoc:
        return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) {
          Env env;
          m.havocLocation(*s.target, env);
        });
      case SK::FrameOut: return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) { m.frameOut(); });
      case SK::FrameIn: return perAtom(std::move(in), line, check, [&](Machine& m, Atom&) { m.frameIn(s.name); });
      case SK::Comment: return in;
      case SK::If: return ifStmt(std::move(in), s, check);
      case SK::While: return whileStmt(std::move(in), s);
      case SK::Call: return call(std::move(in), s);
    }
    return in;
  }

 private:
  const Context& cx_;
  std::size_t budget_;
  const Liveness* live_;
  std::size_t steps_ = 0;

  // Reads a value for storage; unresolved unknowns stay symbolic, minimal
  // ones resolve.
  Term readTerm(Machine& m, Atom& a, const ivl::Expr& e) {
    Env env;
    Term t = m.term(e, m.current(), env);
    if (!t.known) {
      int r = m.root(t.unk);
      if (auto it = a.resolved.find(r); it != a.resolved.end()) return Term::of(it->second);
      if (a.unknowns.at(static_cast<std::size_t>(r)).minimal) return Term::of(m.force(t));
      return t;
    }
    if (t.v.kind == Value::Kind::Int && (t.v.i < cx_.cfg.intLo || t.v.i > cx_.cfg.intHi)) a.outOfDomain = true;
    return t;
  }

  Atoms ifStmt(Atoms in, const ivl::Stmt& s, const std::string& check) {
    Atoms decided = perAtom(std::move(in), s.line, check, [&](Machine& m, Atom& a) {
      Env env;
      a.store["$cond"] = Term::of(Value::boolean(m.truth(*s.expr, env)));
    });
    Atoms yes, no;
    for (auto& a : decided) {
      bool c = a.store["$cond"].v.asBool();
      a.store.erase("$cond");
      (c ? yes : no).push_back(std::move(a));
    }
    yes = block(std::move(yes), s.body);
    no = block(std::move(no), s.elseBody);
    for (auto& a : no) yes.push_back(std::move(a));
    return yes;
  }

  Atoms whileStmt(Atoms in, const ivl::Stmt& s) {
    ivl::EPtr inv = ivl::e::conj(s.invariants);
    std::set<std::string> modified;
    modifiedVars(s.body, modified);
    Atoms frame = perAtom(std::move(in), s.line, "loop invariant might not hold on entry", [&](Machine& m, Atom&) {
      Env env;
      m.exhale(*inv, env);
      for (const auto& v : modified) m.havocLocation(*ivl::e::var(v), env);
    });
    // The body starts from the invariant alone.
    Atoms body = frame;
    for (auto& a : body) a.mask = Mask{};
    if (live_) compact(cx_, body, live_->loopHead(s));
    body = perAtom(std::move(body), s.line, "loop invariant", [&](Machine& m, Atom&) {
      Env env;
      m.inhale(*inv, env);
      m.assume(*s.expr, env);
    });
    body = block(std::move(body), s.body);
    perAtom(std::move(body), s.line, s.check.empty() ? "loop invariant might not be preserved" : s.check,
            [&](Machine& m, Atom&) {
              Env env;
              m.exhale(*inv, env);
            });
    ivl::EPtr exitCond = ivl::e::unary(ivl::Op::Not, s.expr);
    return perAtom(std::move(frame), s.line, "loop invariant", [&](Machine& m, Atom&) {
      Env env;
      m.inhale(*inv, env);
      m.assume(*exitCond, env);
    });
  }

  // Modular call of a method declaration: exhale pres, havoc targets, inhale posts.
  Atoms call(Atoms in, const ivl::Stmt& s) {
    const ivl::MethodDecl* callee = cx_.program->method(s.name);
    if (!callee) throw MethodFailure{Failure{s.line, "call of " + s.name, "unknown method " + s.name, {}}, false};
    std::string check = "precondition of " + s.name + " might not hold";
    return perAtom(std::move(in), s.line, check, [&](Machine& m, Atom& a) {
      Env env;
      Env cenv;
      for (std::size_t i = 0; i < callee->params.size() && i < s.args.size(); ++i)
        cenv.emplace_back(callee->params[i].name, m.term(*s.args[i], m.current(), env));
      m.snapshot("");
      for (const auto& pre : callee->pres) m.exhale(*pre, cenv);
      for (std::size_t i = 0; i < s.targets.size(); ++i) {
        m.havocLocation(*ivl::e::var(s.targets[i]), env);
        if (i < callee->returns.size()) cenv.emplace_back(callee->returns[i].name, a.store[s.targets[i]]);
      }
      for (const auto& post : callee->posts) m.inhale(*post, cenv);
      a.labels.erase("");
    });
  }
};

struct Run {
  MethodResult result;
  Atoms finals;
};

Run run(const ivl::Program& p, const ivl::MethodDecl& md, const DomainConfig& cfg,
        const std::vector<ivl::EPtr>& probes = {}) {
  Run out;
  MethodResult& r = out.result;
  r.method = md.name;
  r.line = md.line;
  if (!md.body) {
    r.note = "declaration only";
    return out;
  }
  Context cx(p, cfg);
  std::int64_t refs = 0;
  for (const auto& q : md.params)
    if (q.type.kind == ivl::Type::Kind::Ref) ++refs;
  cx.setUniverse(refs);
  for (const auto& q : md.params) cx.varTypes[q.name] = q.type;
  for (const auto& q : md.returns) cx.varTypes[q.name] = q.type;
  collectVarTypes(*md.body, cx.varTypes);
  Liveness live(md, probes);
  cx.labelFields = live.labelFields();

  Executor ex(cx, cfg.budget, &live);
  try {
    Atom a0;
    {
      Machine m(cx, a0);
      std::int64_t next = 1;
      // Reference parameters denote distinct objects.
      for (const auto& q : md.params) {
        if (q.type.kind == ivl::Type::Kind::Ref)
          a0.store[q.name] = Term::of(Value::ref(next++));
        else
          a0.store[q.name] = Term::unknown(m.fresh(cx.domainOf(q.type)));
      }
      for (const auto& q : md.returns) a0.store[q.name] = Term::unknown(m.fresh(cx.domainOf(q.type)));
    }
    Atoms atoms{std::move(a0)};
    for (const auto& pre : md.pres)
      atoms = ex.perAtom(std::move(atoms), md.line, "precondition", [&](Machine& m, Atom&) {
        Env env;
        m.inhale(*pre, env);
      });
    atoms = ex.block(std::move(atoms), *md.body);
    for (const auto& post : md.posts)
      atoms = ex.perAtom(std::move(atoms), md.line, "could not prove postcondition", [&](Machine& m, Atom&) {
        Env env;
        m.exhale(*post, env);
      });
    out.finals = std::move(atoms);
    r.verdict = Verdict::Pass;
  } catch (const MethodFailure& f) {
    r.failures.push_back(f.failure);
    if (f.outOfDomain) {
      r.verdict = Verdict::Inconclusive;
      r.note = "failing atom holds a value outside the int domain";
    } else {
      r.verdict = Verdict::Fail;
    }
  } catch (const BudgetExceeded& b) {
    r.verdict = Verdict::Inconclusive;
    r.note = b.what;
  } catch (const TooLarge& t) {
    r.verdict = Verdict::Inconclusive;
    r.note = "domain too large: " + t.what;
  }
  r.peakAtoms = ex.peak;
  return out;
}

}  // namespace

MethodResult verifyMethod(const ivl::Program& p, const ivl::MethodDecl& m, const DomainConfig& cfg) {
  return run(p, m, cfg).result;
}

MethodResult verifyMethod(const ivl::Program& p, const std::string& method, const DomainConfig& cfg) {
  const ivl::MethodDecl* m = p.method(method);
  if (!m) {
    MethodResult r;
    r.method = method;
    r.verdict = Verdict::Fail;
    r.failures.push_back(Failure{0, "unknown method", method, {}});
    return r;
  }
  return verifyMethod(p, *m, cfg);
}

std::vector<MethodResult> verifyProgram(const ivl::Program& p, const DomainConfig& cfg, unsigned jobs) {
  std::vector<const ivl::MethodDecl*> todo;
  for (const auto& m : p.methods)
    if (m.body) todo.push_back(&m);
  std::vector<MethodResult> results(todo.size());
  if (jobs <= 1 || todo.size() <= 1) {
    for (std::size_t i = 0; i < todo.size(); ++i) results[i] = verifyMethod(p, *todo[i], cfg);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, todo.size()); ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < todo.size(); i = next++) results[i] = verifyMethod(p, *todo[i], cfg);
    });
  for (auto& th : pool) th.join();
  return results;
}

Collected collectValues(const ivl::Program& p, const ivl::MethodDecl& m, const std::vector<ivl::EPtr>& probes,
                        const DomainConfig& cfg) {
  Collected c;
  Run r = run(p, m, cfg, probes);
  c.result = r.result;
  if (c.result.verdict != Verdict::Pass) return c;
  Context cx(p, cfg);
  std::int64_t refs = 0;
  for (const auto& q : m.params)
    if (q.type.kind == ivl::Type::Kind::Ref) ++refs;
  cx.setUniverse(refs);
  Executor ex(cx, cfg.budget);
  try {
    Atoms done = ex.perAtom(std::move(r.finals), 0, "probe", [&](Machine& mc, Atom& a) {
      Env env;
      for (std::size_t i = 0; i < probes.size(); ++i)
        a.store["$probe" + std::to_string(i)] = Term::of(mc.value(*probes[i], mc.current(), env));
    });
    for (auto& a : done) {
      std::vector<Value> row;
      for (std::size_t i = 0; i < probes.size(); ++i) row.push_back(a.store["$probe" + std::to_string(i)].v);
      c.rows.push_back(std::move(row));
    }
  } catch (const MethodFailure& f) {
    c.result.verdict = Verdict::Fail;
    c.result.failures.push_back(f.failure);
  } catch (const BudgetExceeded& b) {
    c.result.verdict = Verdict::Inconclusive;
    c.result.note = b.what;
  }
  return c;
}

}  // namespace voila::ivlcheck
