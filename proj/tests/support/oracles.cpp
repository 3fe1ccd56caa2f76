#include "support/oracles.hpp"

namespace voila::testing::oracle {

namespace {

bool related(const TransitionSystem& ts, int g, int a, int b) {
  return a == b || ts.pairs[static_cast<std::size_t>(g)].count({a, b}) > 0;
}

}  // namespace

bool violates(const TransitionSystem& ts, int g, int a, int b, int c) {
  return related(ts, g, a, b) && related(ts, g, b, c) && !related(ts, g, a, c);
}

Closure closure(const TransitionSystem& ts) {
  Closure out;
  for (int g = 0; g < static_cast<int>(ts.guards.size()); ++g)
    for (int a = 0; a < ts.states; ++a)
      for (int b = 0; b < ts.states; ++b)
        for (int c = 0; c < ts.states; ++c)
          if (violates(ts, g, a, b, c)) {
            out.closed = false;
            out.guard = g;
            out.counterexample = {a, b, c};
            return out;
          }
  return out;
}

bool envMayHold(const TransitionSystem& ts, const StabilizeCase& c, int g) {
  const Rational& h = c.held[static_cast<std::size_t>(g)];
  switch (ts.guards[static_cast<std::size_t>(g)].kind) {
    case GuardKind::Duplicable: return true;
    case GuardKind::Fractional: return h < Rational(1);
    default: return h == Rational(0);
  }
}

bool interferencePermitted(const TransitionSystem& ts, const StabilizeCase& c, int from, int to) {
  if (c.pending && !c.updateDomain.count(to)) return false;
  if (from == to) return true;
  for (int g = 0; g < static_cast<int>(ts.guards.size()); ++g)
    if (envMayHold(ts, c, g) && ts.pairs[static_cast<std::size_t>(g)].count({from, to})) return true;
  return false;
}

std::set<int> stabilize(const TransitionSystem& ts, const StabilizeCase& c, const std::set<int>& s) {
  std::set<int> out;
  for (int t = 0; t < ts.states; ++t)
    for (int x : s)
      if (interferencePermitted(ts, c, x, t)) out.insert(t);
  return out;
}

Rational aggregate(const std::vector<FracEntry>& held, int name, int key) {
  Rational sum;
  for (const auto& e : held)
    if (e.name == name && e.key == key) sum += e.amount;
  return sum;
}

}  // namespace voila::testing::oracle
