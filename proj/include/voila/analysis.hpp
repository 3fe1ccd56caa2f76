#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "voila/ast.hpp"
#include "voila/regions.hpp"
#include "voila/source.hpp"
#include "voila/value.hpp"

namespace voila {

enum class Atomicity { Atomic, NonAtomic };
const char* atomicityName(Atomicity a);

struct AnalysisConfig {
  std::map<std::string, std::vector<Value>> stateDomains;  // --state-domain overrides
  std::int64_t intLo = -8;
  std::int64_t intHi = 8;
  std::size_t domainCap = 64;
};

struct RegionInfo {
  const RegionDecl* decl = nullptr;
  Type stateType;
  std::map<std::string, Type> vars;           // params and interpretation binders
  std::optional<std::size_t> levelParam;      // index of `int lvl`
  int staticLevel = 0;                        // used when levelParam is empty
  std::vector<Value> domain;                  // state domain D
  bool domainFromLiterals = false;
  std::vector<std::string> nested;            // regions occurring in the interpretation
};

// Per procedure or lemma scope information.
struct CallableInfo {
  std::string name;
  bool isLemma = false;
  const ProcDecl* proc = nullptr;
  const LemmaDecl* lemma = nullptr;
  std::map<std::string, Type> vars;  // every name visible anywhere in the callable
  std::set<std::string> interferenceVars;
  std::set<std::string> preBinders;  // binders introduced by the precondition

  const std::vector<Param>& params() const { return proc ? proc->params : lemma->params; }
  const std::vector<ExprPtr>& pres() const { return proc ? proc->pres : lemma->pres; }
  const std::vector<ExprPtr>& posts() const { return proc ? proc->posts : lemma->posts; }
};

// Owns the program; all pointers below point into it, so it is neither
// copyable nor movable.
struct ResolvedProgram {
  explicit ResolvedProgram(Program p) : program(std::move(p)) {}
  ResolvedProgram(const ResolvedProgram&) = delete;
  ResolvedProgram& operator=(const ResolvedProgram&) = delete;

  Program program;
  AnalysisConfig config;
  TypeDomains types;
  std::map<std::string, Type> fields;  // global struct fields
  std::map<std::string, RegionInfo> regions;
  std::map<std::string, CallableInfo> callables;
  std::map<const Expr*, std::string> guardOwner;  // GuardAssn node to its region
  std::map<const Stmt*, Atomicity> atomicity;

  const RegionInfo* region(const std::string& n) const;
  const CallableInfo* callable(const std::string& n) const;
  const RegionInfo* guardRegion(const Expr& guardAssn) const;
  const GuardDecl* guardDecl(const Expr& guardAssn) const;
};

struct AnalysisResult {
  std::shared_ptr<const ResolvedProgram> program;  // null if resolution failed
  Diagnostics diags;
  bool ok() const { return program && !diags.hasErrors(); }
};

// Runs resolution, type checking, atomicity classification and the
// region and signature checks.
AnalysisResult analyze(Program p, const AnalysisConfig& cfg = {});

// Resolution and type checking proper; fills regions, callables, fields and
// guardOwner of rp.
void runTypecheck(ResolvedProgram& rp, Diagnostics& d);

// Individual checks on an already resolved program.
Atomicity classifyAtomicity(const ResolvedProgram& rp, const Stmt& s);
// A sequence is Atomic iff every statement is Atomic and at most one of them
// is not a ghost statement.
Atomicity classifySeq(const ResolvedProgram& rp, const StmtList& body);
Diagnostics checkRegionWellformed(const ResolvedProgram& rp, const RegionDecl& r);
Diagnostics checkProcedureSignature(const ResolvedProgram& rp, const ProcDecl& p);

// Default state domain of a region: the literals of its action endpoints or,
// lacking actions, of its interpretation; the int domain otherwise.
std::vector<Value> defaultStateDomain(const RegionDecl& r, const Type& stateType, const TypeDomains& types,
                                      bool* fromLiterals = nullptr);

}  // namespace voila
