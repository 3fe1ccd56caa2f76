#pragma once

#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "voila/ivl.hpp"
#include "voila/ivlcheck.hpp"
#include "voila/value.hpp"

namespace voila::ivlcheck::detail {

using ValueList = std::shared_ptr<const std::vector<Value>>;

// Either a concrete value or an unknown resolved per atom.
struct Term {
  bool known = true;
  Value v;
  int unk = -1;

  static Term of(Value x) { return Term{true, std::move(x), -1}; }
  static Term unknown(int id) { return Term{false, {}, id}; }
};

struct UnknownInfo {
  ValueList domain;
  bool minimal = false;          // resolves to its lower bound instead of splitting
  std::int64_t lower = INT64_MIN;  // minimal: least admitted value
};

using LocKey = std::pair<std::int64_t, std::string>;  // (reference, field)

struct PredKey {
  std::string name;
  std::vector<Value> args;
  friend auto operator<=>(const PredKey& a, const PredKey& b) = default;
  friend bool operator==(const PredKey& a, const PredKey& b) = default;
};

struct Mask {
  std::map<LocKey, Rational> fields;
  std::map<PredKey, Rational> preds;
};

struct Snapshot {
  std::map<LocKey, Term> heap;
  Mask mask;
};

struct Atom {
  std::map<std::string, Term> store;
  std::map<LocKey, Term> heap;  // values survive at zero permission while owned by a folded predicate
  Mask mask;
  std::map<std::string, std::shared_ptr<const Snapshot>> labels;
  std::vector<UnknownInfo> unknowns;  // by id
  std::map<int, Value> resolved;
  std::map<int, int> alias;  // union-find parent links
  bool outOfDomain = false;  // an int outside the configured domain was stored
};

// Control flow of the splitting semantics.
struct NeedSplit {
  int id;
  ValueList values;
};
struct Infeasible {};
struct CheckFailed {
  std::string reason;
};
// A domain too large to enumerate; the verdict becomes Inconclusive.
struct TooLarge {
  std::string what;
};

// Extra permissions of a transient unfolding.
struct Overlay {
  Mask extra;
  const Overlay* parent = nullptr;
};

struct View {
  const std::map<LocKey, Term>* heap;
  const Mask* mask;
  const Overlay* overlay = nullptr;
};

using Env = std::vector<std::pair<std::string, Term>>;

// Program-wide lookup tables, immutable during a verification.
struct Context {
  const ivl::Program* program = nullptr;
  DomainConfig cfg;
  ValueList ints, bools, fracs, refs;
  std::map<std::string, ValueList> regionDomains;
  std::map<std::string, std::string> fieldRegion;  // R_from, R_to, R_X, R_A to R
  std::set<std::string> programFields;
  std::map<std::string, ivl::Type> varTypes;  // of the method under verification
  mutable std::map<std::string, ValueList> subsetCache;
  // Fields read under each label; labels absent here keep whole snapshots.
  std::map<std::string, std::set<std::string>> labelFields;

  Context(const ivl::Program& p, const DomainConfig& cfg);
  void setUniverse(std::int64_t refCount);

  ValueList domainOf(const ivl::Type& t) const;
  ValueList fieldDomain(const std::string& field) const;
  ValueList regionDomain(const std::string& region) const;
  // Quantifier domain of variable i: Int variables tagged with a region
  // range over its state domain.
  ValueList quantDomain(const ivl::Expr& q, std::size_t i) const;
  ValueList subsets(const std::string& key, const std::vector<Value>& universe) const;
};

class Machine {
 public:
  Machine(const Context& cx, Atom& a) : cx_(cx), a_(a) {}

  View current() const { return View{&a_.heap, &a_.mask, nullptr}; }

  Term term(const ivl::Expr& e, const View& v, Env& env);
  Value value(const ivl::Expr& e, const View& v, Env& env);
  Value force(const Term& t);
  bool truth(const ivl::Expr& e, Env& env) { return value(e, current(), env).asBool(); }

  int fresh(ValueList domain, bool minimal = false);
  int root(int id) const;

  Rational fieldPerm(const View& v, const LocKey& k) const;
  Rational predPerm(const View& v, const PredKey& k) const;
  LocKey locKey(const ivl::Expr& field, const View& v, Env& env);
  PredKey predKey(const ivl::Expr& pred, const View& v, Env& env);

  // Spatial assertions. Fresh gives every location of the body a new value;
  // Keep leaves values in place (unfold).
  enum class Mode { Normal, Fresh, Keep };
  void inhale(const ivl::Expr& e, Env& env, Mode m = Mode::Normal);
  void assume(const ivl::Expr& e, Env& env);
  // keepValues: locations whose permission drops to zero keep their value
  // (fold). checkOnly: nothing is removed (assert).
  void exhale(const ivl::Expr& e, Env& env, bool keepValues = false, bool checkOnly = false);
  void addPerm(const ivl::Expr& loc, Rational amount, Env& env, Mode m);
  void addFieldPerm(const LocKey& k, Rational amount, Mode m);
  void addPredPerm(const PredKey& k, Rational amount, Mode m);
  void havocLocation(const ivl::Expr& loc, Env& env);
  void fold(const ivl::Expr& pred, Env& env);
  void unfold(const ivl::Expr& pred, Env& env);
  void frameOut();
  void frameIn(const std::string& label);
  void snapshot(const std::string& label);

  std::string describe(const ivl::Expr& e) const;
  std::string witness();
  // Locations readable now or through a held predicate; empty if undetermined
  // without splitting.
  std::optional<std::set<LocKey>> footprint();

 private:
  struct Removal {
    bool isField;
    LocKey field;
    PredKey pred;
    Rational amount;
    std::string text;
  };

  const Context& cx_;
  Atom& a_;

  Term lookupVar(const std::string& n, Env& env) const;
  void bindTerm(const Term& t, const Value& v);
  bool tryBindEq(const ivl::Expr& e, Env& env);
  bool tryInferSet(const ivl::Expr& forall, Env& env);
  // Pinned variables are evaluated in view (current state if null).
  void forEachBinding(const ivl::Expr& q, Env& env, const std::function<bool()>& f, const View* view = nullptr);
  void collect(const ivl::Expr& e, const View& v, Env& env, std::vector<Removal>& out);
  Overlay unfoldOverlay(const PredKey& k, const View& v);
  void overlayBody(const ivl::Expr& e, const View& v, Env& env, Overlay& o);
  const ivl::PredicateDecl& predDecl(const std::string& n) const;
};

// Store variables and labels that later statements may read.
struct Live {
  std::set<std::string> vars;
  std::set<std::string> labels;
};

class Liveness {
 public:
  // extra: expressions evaluated after the method body.
  Liveness(const ivl::MethodDecl& m, const std::vector<ivl::EPtr>& extra);
  const Live& after(const ivl::Stmt& s) const { return after_.at(&s); }
  // At the head of a loop body.
  const Live& loopHead(const ivl::Stmt& w) const { return loopHead_.at(&w); }
  const std::map<std::string, std::set<std::string>>& labelFields() const { return labelFields_; }

 private:
  std::map<const ivl::Stmt*, Live> after_;
  std::map<const ivl::Stmt*, Live> loopHead_;
  std::map<std::string, std::set<std::string>> labelFields_;
  std::set<std::string> wholeLabels_;

  Live block(const ivl::Block& b, Live after);
};

// Drops dead variables, dead labels and unreachable heap values, then
// removes duplicate atoms.
void compact(const Context& cx, std::vector<Atom>& atoms, const Live& live);

Value applyOp(ivl::Op op, const Value& a, const Value& b);
bool spatial(const ivl::Expr& e);

}  // namespace voila::ivlcheck::detail
