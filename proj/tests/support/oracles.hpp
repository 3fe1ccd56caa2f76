#pragma once

#include <array>
#include <optional>
#include <set>
#include <vector>

#include "support/generators.hpp"
#include "voila/value.hpp"

// Reference models straight from the definitions, sharing no code with the
// library under test.
namespace voila::testing::oracle {

// Per guard name G, permitted_G = identity plus the pairs of G's actions.
// Closed iff every permitted_G is transitive.
struct Closure {
  bool closed = true;
  int guard = -1;
  std::array<int, 3> counterexample{};
};
Closure closure(const TransitionSystem& ts);

// Whether (a, b, c) violates transitivity of guard g's relation.
bool violates(const TransitionSystem& ts, int g, int a, int b, int c);

// May the environment take a step enabled by guard g, given local holdings?
bool envMayHold(const TransitionSystem& ts, const StabilizeCase& c, int g);

bool interferencePermitted(const TransitionSystem& ts, const StabilizeCase& c, int from, int to);

// { t | exists s in S. interferencePermitted(s, t) }
std::set<int> stabilize(const TransitionSystem& ts, const StabilizeCase& c, const std::set<int>& s);

// Summed fraction of the entries (name, key, amount) that match name/key.
struct FracEntry {
  int name;
  int key;
  Rational amount;
};
Rational aggregate(const std::vector<FracEntry>& held, int name, int key);

}  // namespace voila::testing::oracle
