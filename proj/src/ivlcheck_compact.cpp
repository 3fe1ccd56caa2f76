#include <deque>
#include <sstream>
#include <unordered_map>

#include "ivlcheck_internal.hpp"

namespace voila::ivlcheck::detail {

using ivl::EK;
using ivl::SK;

namespace {

// Names read by an expression. Bound variables are included; keeping an
// extra store variable alive is harmless.
void uses(const ivl::Expr& e, Live& out) {
  if (e.kind == EK::Var) out.vars.insert(e.name);
  if ((e.kind == EK::Old || e.kind == EK::Perm) && !e.name.empty()) out.labels.insert(e.name);
  for (const auto& a : e.args)
    if (a) uses(*a, out);
}

void merge(Live& into, const Live& from) {
  into.vars.insert(from.vars.begin(), from.vars.end());
  into.labels.insert(from.labels.begin(), from.labels.end());
}

void stmtUses(const ivl::Stmt& s, Live& out) {
  if (s.expr) uses(*s.expr, out);
  if (s.target && !(s.kind == SK::Havoc && s.target->kind == EK::Var)) uses(*s.target, out);
  for (const auto& a : s.args) uses(*a, out);
  for (const auto& i : s.invariants) uses(*i, out);
  if (s.kind == SK::FrameIn) out.labels.insert(s.name);
  for (const auto& b : s.body) stmtUses(*b, out);
  for (const auto& b : s.elseBody) stmtUses(*b, out);
}

// Fields read by old[L](e) or perm(loc, L); false if e reads through a
// function, predicate or unfolding.
bool fieldsRead(const ivl::Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case EK::App:
    case EK::Pred:
    case EK::Unfolding:
    case EK::Acc: return false;
    case EK::Field: out.insert(e.name); break;
    default: break;
  }
  for (const auto& a : e.args)
    if (a && !fieldsRead(*a, out)) return false;
  return true;
}

void labelReads(const ivl::Expr& e, std::map<std::string, std::set<std::string>>& fields,
                std::set<std::string>& whole) {
  if ((e.kind == EK::Old || e.kind == EK::Perm) && !e.name.empty()) {
    std::set<std::string> fs;
    if (fieldsRead(*e.args[0], fs) && (e.kind == EK::Old || e.args[0]->kind == EK::Field))
      fields[e.name].insert(fs.begin(), fs.end());
    else
      whole.insert(e.name);
  }
  for (const auto& a : e.args)
    if (a) labelReads(*a, fields, whole);
}

void labelReads(const ivl::Block& b, std::map<std::string, std::set<std::string>>& fields,
                std::set<std::string>& whole) {
  for (const auto& s : b) {
    for (const auto* x : {s->expr.get(), s->target.get()})
      if (x) labelReads(*x, fields, whole);
    for (const auto& a : s->args) labelReads(*a, fields, whole);
    for (const auto& i : s->invariants) labelReads(*i, fields, whole);
    if (s->kind == SK::FrameIn) whole.insert(s->name);
    labelReads(s->body, fields, whole);
    labelReads(s->elseBody, fields, whole);
  }
}

}  // namespace

Liveness::Liveness(const ivl::MethodDecl& m, const std::vector<ivl::EPtr>& extra) {
  Live end;
  for (const auto& x : extra) uses(*x, end);
  for (const auto& q : m.params) end.vars.insert(q.name);
  for (const auto& q : m.returns) end.vars.insert(q.name);
  for (const auto& p : m.posts) uses(*p, end);
  if (!m.body) return;
  block(*m.body, end);
  labelReads(*m.body, labelFields_, wholeLabels_);
  for (const auto& p : m.posts) labelReads(*p, labelFields_, wholeLabels_);
  for (const auto& x : extra) labelReads(*x, labelFields_, wholeLabels_);
  for (const auto& w : wholeLabels_) labelFields_.erase(w);
}

Live Liveness::block(const ivl::Block& b, Live after) {
  for (auto it = b.rbegin(); it != b.rend(); ++it) {
    const ivl::Stmt& s = **it;
    after_[&s] = after;
    if (s.kind == SK::If) {
      Live t = block(s.body, after);
      Live e = block(s.elseBody, after);
      merge(after, t);
      merge(after, e);
      if (s.expr) uses(*s.expr, after);
    } else if (s.kind == SK::While) {
      // Every iteration may read what the loop reads.
      Live loop = after;
      stmtUses(s, loop);
      loopHead_[&s] = block(s.body, loop);
      merge(after, loop);
    } else {
      stmtUses(s, after);
    }
  }
  return after;
}

std::optional<std::set<LocKey>> Machine::footprint() {
  std::set<LocKey> out;
  for (const auto& [k, p] : a_.mask.fields)
    if (p > Rational(0)) out.insert(k);
  try {
    std::deque<Overlay> overlays;
    std::set<PredKey> seen;
    std::vector<std::pair<PredKey, const Overlay*>> todo;
    for (const auto& [k, p] : a_.mask.preds)
      if (p > Rational(0)) todo.emplace_back(k, nullptr);
    while (!todo.empty()) {
      auto [k, parent] = todo.back();
      todo.pop_back();
      if (!seen.insert(k).second || !predDecl(k.name).body) continue;
      overlays.push_back(unfoldOverlay(k, View{&a_.heap, &a_.mask, parent}));
      const Overlay* o = &overlays.back();
      for (const auto& [f, p] : o->extra.fields)
        if (p > Rational(0)) out.insert(f);
      for (const auto& [q, p] : o->extra.preds)
        if (p > Rational(0)) todo.emplace_back(q, o);
    }
  } catch (const NeedSplit&) {
    return std::nullopt;
  } catch (const CheckFailed&) {
    return std::nullopt;
  } catch (const Infeasible&) {
    return std::nullopt;
  }
  return out;
}

namespace {

class KeyWriter {
 public:
  explicit KeyWriter(const Atom& a) : a_(a) {}

  void term(std::ostringstream& os, const Term& t) {
    if (t.known) {
      os << t.v.str();
      return;
    }
    int r = t.unk;
    for (auto it = a_.alias.find(r); it != a_.alias.end(); it = a_.alias.find(r)) r = it->second;
    if (auto it = a_.resolved.find(r); it != a_.resolved.end()) {
      os << it->second.str();
      return;
    }
    const UnknownInfo& u = a_.unknowns.at(static_cast<std::size_t>(r));
    os << "?" << r << ":" << u.domain.get() << ":" << u.minimal << ":" << u.lower;
  }

  void heap(std::ostringstream& os, const std::map<LocKey, Term>& h) {
    for (const auto& [k, t] : h) {
      os << k.first << "." << k.second << "=";
      term(os, t);
      os << ";";
    }
  }

  void mask(std::ostringstream& os, const Mask& m) {
    for (const auto& [k, p] : m.fields) os << k.first << "." << k.second << ":" << p.str() << ";";
    for (const auto& [k, p] : m.preds) {
      os << k.name << "(";
      for (const auto& v : k.args) os << v.str() << ",";
      os << "):" << p.str() << ";";
    }
  }

 private:
  const Atom& a_;
};

std::string atomKey(const Atom& a) {
  KeyWriter w(a);
  std::ostringstream os;
  os << a.outOfDomain << "|";
  for (const auto& [n, t] : a.store) {
    os << n << "=";
    w.term(os, t);
    os << ";";
  }
  os << "|";
  w.heap(os, a.heap);
  os << "|";
  w.mask(os, a.mask);
  for (const auto& [n, snap] : a.labels) {
    os << "|" << n << "{";
    w.heap(os, snap->heap);
    os << "}{";
    w.mask(os, snap->mask);
    os << "}";
  }
  return os.str();
}

}  // namespace

void compact(const Context& cx, std::vector<Atom>& atoms, const Live& live) {
  if (atoms.size() < 2) return;
  std::vector<Atom> out;
  out.reserve(atoms.size());
  std::unordered_map<std::string, bool> seen;
  for (auto& a : atoms) {
    for (auto it = a.store.begin(); it != a.store.end();)
      it = live.vars.count(it->first) ? std::next(it) : a.store.erase(it);
    for (auto it = a.labels.begin(); it != a.labels.end();)
      it = live.labels.count(it->first) ? std::next(it) : a.labels.erase(it);
    Machine m(cx, a);
    if (auto fp = m.footprint())
      for (auto it = a.heap.begin(); it != a.heap.end();)
        it = fp->count(it->first) ? std::next(it) : a.heap.erase(it);
    if (seen.emplace(atomKey(a), true).second) out.push_back(std::move(a));
  }
  atoms = std::move(out);
}

}  // namespace voila::ivlcheck::detail
