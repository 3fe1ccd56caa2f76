#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "voila/ast.hpp"
#include "voila/value.hpp"

namespace voila::testing {

using Rng = std::mt19937_64;

// How an action is written in source. The generator records the pairs it
// denotes separately so that oracles never read the source back.
enum class ActionForm {
  Literal,    // G: a ~> b
  Ascending,  // ?n, ?m | n < m | G: n ~> m
  Successor,  // ?n | n < bound | G: n ~> n + 1
};

struct ActionSpec {
  int guard = 0;  // index into TransitionSystem::guards
  ActionForm form = ActionForm::Literal;
  int from = 0, to = 0;  // Literal
  int bound = 0;         // Successor
};

struct GuardSpec {
  std::string name;
  GuardKind kind = GuardKind::Unique;  // Unique, Duplicable or Fractional
};

// A region R(id r, cell x) whose state is x.val over 0..states-1.
struct TransitionSystem {
  int states = 2;
  std::vector<GuardSpec> guards;
  std::vector<ActionSpec> actions;
  // Per guard, the non-reflexive pairs the actions denote within the domain.
  std::vector<std::set<std::pair<int, int>>> pairs;
};

struct TsOptions {
  int maxStates = 4;
  int maxGuards = 3;
  int maxActions = 5;
  bool allowFractional = true;
  // Guard relations form a chain R_0 within R_1 within ... and each is
  // transitively closed, so every union of them is closed as well.
  bool closedChain = false;
};

TransitionSystem randomTransitionSystem(Rng& rng, const TsOptions& opt = {});

// Source text of the region, preceded by `struct cell { int val; }`, with an
// empty procedure `probe(id r, cell x)` appended.
std::string regionSource(const TransitionSystem& ts);
std::vector<Value> stateDomain(const TransitionSystem& ts);

// Local view of a configuration, for the stabilization cases.
struct StabilizeCase {
  std::vector<Rational> held;  // per guard: multiplicity for unique/duplicable, amount for fractional
  bool pending = false;
  std::set<int> updateDomain;  // A
  std::set<int> start;         // S; within A when pending
};

StabilizeCase randomStabilizeCase(Rng& rng, const TransitionSystem& ts);

// Random syntactically valid programs for the print/parse round trip. No
// name resolution is attempted.
Program randomProgram(Rng& rng);

}  // namespace voila::testing
