#pragma once

#include <memory>
#include <string>
#include <vector>

#include "voila/analysis.hpp"
#include "voila/ast.hpp"
#include "voila/source.hpp"

namespace voila {

// A region instance R(args) without its state argument.
struct RegionInstance {
  std::string region;
  std::vector<ExprPtr> args;

  std::string str() const;
  friend bool operator==(const RegionInstance& a, const RegionInstance& b) { return a.str() == b.str(); }
};

enum class BridgeKind {
  None,  // the node is a source statement
  TripleWeak,
  Stabilize,
  AtomicExists,
  FrameBoundary,
  Substitution,
  LevelAdjust,
};
const char* bridgeName(BridgeKind k);

struct AtomicityBounds {
  std::vector<RegionInstance> lower;  // pending updates, domain A = the X of the instance at make_atomic
  ExprPtr alevel;                     // upper bound threshold; null means the procedure level

  bool pending(const RegionInstance& r) const;
  std::string str() const;
};

struct CandidateNode {
  BridgeKind bridge = BridgeKind::None;
  const Stmt* stmt = nullptr;  // source statement, for bridge == None
  Atomicity triple = Atomicity::NonAtomic;  // kind of the triple proved at this node
  std::vector<CandidateNode> children;      // bridge: the wrapped node; statement: its body
  std::vector<CandidateNode> elseChildren;
  std::vector<CandidateNode> unrolled;  // do-while: the first iteration
  AtomicityBounds bounds;
  ExprPtr level;  // judgment level at the node; null means the procedure level
  std::string note;

  // The statement node below a bridge chain.
  const CandidateNode& inner() const;
};

struct ProcedureCandidate {
  const ProcDecl* proc = nullptr;
  std::vector<CandidateNode> body;
  std::vector<ExprPtr> levels;            // levels occurring in the precondition
  std::vector<RegionInstance> instances;  // instances statically in scope, for stabilization
  int inferredSteps = 0;
  int annotatedSteps = 0;
};

struct ProofCandidate {
  std::shared_ptr<const ResolvedProgram> program;
  std::vector<ProcedureCandidate> procedures;  // procedures with bodies, in source order
};

struct ExpandResult {
  ProofCandidate candidate;
  Diagnostics diags;
};

ExpandResult expand(std::shared_ptr<const ResolvedProgram> rp);

// make_atomic adds its instance to the lower bound and lowers alevel;
// update_region requires its instance to be pending.
AtomicityBounds computeAtomicityBounds(const ResolvedProgram& rp, const Stmt& s, const AtomicityBounds& ctx,
                                       Diagnostics* diags = nullptr);
// The level at which the body of s is proved: the region level for
// update_region, open_region and use_atomic, unchanged otherwise.
ExprPtr computeLevel(const ResolvedProgram& rp, const Stmt& s, const ExprPtr& level);

// Level of a region instance: its lvl argument or the static level.
ExprPtr instanceLevel(const ResolvedProgram& rp, const RegionInstance& r);
// Instance named by a region assertion, dropping a state argument.
RegionInstance instanceOf(const ResolvedProgram& rp, const Expr& regionAssn);
// Region instances in the interpretation of r, with parameters substituted.
std::vector<std::pair<RegionInstance, std::string>> nestedInstances(const ResolvedProgram& rp,
                                                                    const RegionInstance& r);
// Levels of the region assertions in a callable's precondition.
std::vector<ExprPtr> preconditionLevels(const ResolvedProgram& rp, const std::vector<ExprPtr>& pres);

// Removes bridge nodes; the result mirrors the source statement tree.
StmtList erase(const std::vector<CandidateNode>& nodes);

std::string dumpCandidate(const ProofCandidate& c);

}  // namespace voila
