#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "voila/ast.hpp"
#include "voila/guards.hpp"
#include "voila/pure_eval.hpp"
#include "voila/value.hpp"

namespace voila {

// Finite value domains used to enumerate action binders that are not fixed
// by the transition endpoints.
struct TypeDomains {
  std::vector<Value> ints;
  std::vector<Value> fracs;
  std::vector<Value> bools;
  std::vector<Value> refs;

  static TypeDomains defaults(std::int64_t lo = -8, std::int64_t hi = 8);
  const std::vector<Value>& of(const Type& t) const;
};

std::vector<Value> intRange(std::int64_t lo, std::int64_t hi);

struct RegionConfig {
  const RegionDecl* decl = nullptr;
  ValueEnv params;                 // concrete parameter values
  std::vector<Value> domain;       // D
  GuardHolding local;
  bool pending = false;            // diamond held
  std::vector<Value> updateDomain;  // A, meaningful only when pending
  TypeDomains types = TypeDomains::defaults();
};

// Calls f for every binder valuation of action a with from_a == from,
// to_a == to and c_a true. f returns true to stop early.
void forEachInstantiation(const RegionDecl& r, const ActionDecl& a, const ValueEnv& params, const Value& from,
                          const Value& to, const std::vector<Value>& domain, const TypeDomains& types,
                          const std::function<bool(const ValueEnv&)>& f);

// The guard term enabling action a under binder valuation env.
GuardTerm actionGuard(const RegionDecl& r, const ActionDecl& a, const ValueEnv& env);

bool actionPermitted(const RegionConfig& r, const Value& from, const Value& to, const GuardHolding& g);
bool interferencePermitted(const RegionConfig& r, const Value& from, const Value& to);
std::vector<Value> stabilizeStates(const RegionConfig& r, const std::vector<Value>& states);
std::vector<Value> inferInterference(const RegionConfig& r, const Value& current);

struct ClosureResult {
  bool closed = true;
  bool tooLarge = false;
  std::optional<std::array<Value, 3>> counterexample;
  std::string guard;  // guard name under which closure failed
};

// Per guard name G, permitted_G(a,b) holds iff a == b or some action with
// guard name G has a matching instantiation. Checks transitivity of every
// permitted_G over domain.
ClosureResult checkTransitiveClosure(const RegionDecl& r, const std::vector<Value>& domain,
                                     const TypeDomains& types = TypeDomains::defaults(), std::size_t cap = 64);

struct LinkResult {
  std::vector<std::vector<Value>> tuples;       // child-state tuples whose image lies in parent_X
  std::vector<std::vector<Value>> projections;  // per child, the projected set
  bool product = true;                          // tuples == product of projections
};

// Children are the region instances of the parent's interpretation whose
// state is bound by a binder, in source order. Throws EvalError if the
// parent state is not a function of the child states.
LinkResult linkInterference(const RegionConfig& parent, const std::vector<Value>& parentX,
                            const std::vector<RegionConfig>& children);

// Names of the binders bound by nested region states in an interpretation,
// paired with the nested region name, in source order.
std::vector<std::pair<std::string, std::string>> nestedStateBinders(const RegionDecl& r);

}  // namespace voila
