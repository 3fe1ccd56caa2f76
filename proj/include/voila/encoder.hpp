#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "voila/analysis.hpp"
#include "voila/candidate.hpp"
#include "voila/ivl.hpp"

namespace voila {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ivl::Type ivlType(const Type& t);

// Mangled names of the declarations generated for a region.
namespace mangle {
std::string statefn(const std::string& region);  // R_State
std::string guard(const std::string& region, const std::string& g);  // R_G
std::string from(const std::string& region);  // R_from
std::string to(const std::string& region);    // R_to
std::string icontext(const std::string& region);  // R_X
std::string acontext(const std::string& region);  // R_A
inline const char* diamond() { return "diamond"; }
}  // namespace mangle

struct RegionEncoding {
  std::vector<ivl::FieldDecl> fields;  // R_from, R_to, R_X, R_A
  ivl::PredicateDecl predicate;
  ivl::FunctionDecl stateFunction;
  std::vector<ivl::PredicateDecl> guards;
};

RegionEncoding encodeRegion(const ResolvedProgram& rp, const RegionDecl& r);

// Translation of one method. The macro builders are public so that tests can
// instantiate them on chosen parameters.
class MethodEncoder {
 public:
  // scope names the procedure or lemma whose variable types are used.
  MethodEncoder(const ResolvedProgram& rp, const std::string& scope);

  ivl::MethodDecl procedure(const ProcedureCandidate& pc);
  // Declaration only, for bodyless procedures and lemmas.
  ivl::MethodDecl declaration(const CallableInfo& c);

  // Instances considered by stabilization and the interference macros.
  void setInstances(std::vector<RegionInstance> xs) { instances_ = std::move(xs); }
  const std::vector<RegionInstance>& instances() const { return instances_; }

  ivl::Block statement(const CandidateNode& n);

  ivl::Block stabilize();
  ivl::Block inferInterference(const std::string& region);
  ivl::Block linkInterference(const RegionInstance& r, ivl::Block s);
  ivl::EPtr interferencePermitted(const RegionInstance& r, const ivl::EPtr& from, const ivl::EPtr& to);
  // g is the source guard assertion held by the prover.
  ivl::EPtr actionPermitted(const RegionInstance& r, const ivl::EPtr& from, const ivl::EPtr& to, const Expr& g);

  ivl::EPtr regionPred(const RegionInstance& r);
  ivl::EPtr regionState(const RegionInstance& r);
  ivl::EPtr regionId(const RegionInstance& r);
  ivl::EPtr level(const RegionInstance& r);

  // Expression and assertion translation in the current substitution.
  ivl::EPtr pure(const Expr& e);
  ivl::EPtr assertion(const Expr& e);

 private:
  struct Scope {
    std::map<std::string, ivl::EPtr> sub;
    const std::set<std::string>* interference = nullptr;  // state binders checked against R_X
    std::map<std::string, ivl::EPtr> bound;               // binders bound while translating, with their value
    std::vector<std::string> boundOrder;
    bool declaration = false;  // interference binders bind without an R_X constraint
  };

  const ResolvedProgram& rp_;
  const CallableInfo* scope_;
  std::vector<RegionInstance> instances_;
  std::vector<Scope> scopes_;
  int fresh_ = 0;
  int line_ = 0;

  std::map<std::string, Type> extraTypes_;  // region parameters and binders when encoding a region

  friend RegionEncoding encodeRegion(const ResolvedProgram& rp, const RegionDecl& r);

  std::string freshName(const std::string& base);
  Scope& top() { return scopes_.back(); }
  ivl::EPtr lookup(const std::string& name);

  ivl::EPtr translate(const Expr& e, bool spatial);
  ivl::EPtr regionAssertion(const Expr& e);
  ivl::EPtr guardAssertion(const Expr& e);
  ivl::EPtr witnessAssertion(const Expr& e);
  void bind(const std::string& binder, const ivl::EPtr& value);

  // Region whose instance has the given identifier, by syntactic match.
  std::string regionOfId(const ivl::EPtr& id, const std::string& hint);
  ivl::Type stateType(const std::string& region) const;
  ivl::Type varType(const std::string& name) const;
  const GuardDecl* guardDeclFor(const Expr& g, std::string* region) const;

  // Translates the source conjuncts of a contract, each as one IVL
  // conjunct, inside a scope with the given substitution.
  std::vector<ivl::EPtr> spec(const std::vector<ExprPtr>& xs, std::map<std::string, ivl::EPtr> sub,
                              const std::set<std::string>* interference, std::map<std::string, ivl::EPtr>* boundOut,
                              bool declaration = false);
  // State of r with the states of its nested regions replaced by the given variables.
  ivl::EPtr stateFunction(const RegionInstance& r, const std::vector<std::string>& childVars);

  // statement layer, encoder_macros.cpp
  void node(const CandidateNode& n, ivl::Block& out);
  void nodes(const std::vector<CandidateNode>& ns, ivl::Block& out);
  void sourceStmt(const CandidateNode& n, ivl::Block& out);
  void atomicMacro(const CandidateNode& tw, ivl::Block& out);
  void makeAtomic(const CandidateNode& n, ivl::Block& out);
  void updateRegion(const CandidateNode& n, ivl::Block& out);
  void openRegion(const CandidateNode& n, ivl::Block& out);
  void useAtomic(const CandidateNode& n, ivl::Block& out);
  void loop(const CandidateNode& n, ivl::Block& out);
  void call(const Stmt& s, ivl::Block& out);
  void parallel(const CandidateNode& n, ivl::Block& out);
  void openAndLink(const RegionInstance& inst, const CandidateNode& n, ivl::Block& out);
  void declareBound(const std::map<std::string, ivl::EPtr>& bound, const std::vector<std::string>& order,
                    ivl::Block& out);
  void assertionStmt(ivl::SK kind, const Expr& e, const std::string& check, ivl::Block& out);

  ivl::SPtr mk(ivl::SK kind, ivl::EPtr e = nullptr, std::string check = {});
  ivl::SPtr label(const std::string& name);
  ivl::SPtr varDecl(const std::string& name, ivl::Type t, ivl::EPtr init = nullptr);
  ivl::SPtr assign(const std::string& name, ivl::EPtr e);
  ivl::SPtr havoc(ivl::EPtr target, ivl::Type t = ivl::Type::integer());

  std::vector<std::string> regionNames() const;
  std::vector<RegionInstance> instancesOf(const std::string& region) const;
};

ivl::Program encode(const ProofCandidate& c);
// Deterministic text of encode(c).
std::string emitProgram(const ProofCandidate& c);

}  // namespace voila
