#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "voila/ast.hpp"
#include "voila/value.hpp"

// Viper-like intermediate verification language produced by the encoder and
// consumed by the micro-verifier.
namespace voila::ivl {

struct Type {
  enum class Kind { Int, Bool, Perm, Ref, Set, Seq };
  Kind kind = Kind::Int;
  std::shared_ptr<const Type> elem;

  static Type integer() { return {Kind::Int, nullptr}; }
  static Type boolean() { return {Kind::Bool, nullptr}; }
  static Type perm() { return {Kind::Perm, nullptr}; }
  static Type ref() { return {Kind::Ref, nullptr}; }
  static Type set(Type e) { return {Kind::Set, std::make_shared<const Type>(std::move(e))}; }
  static Type seq(Type e) { return {Kind::Seq, std::make_shared<const Type>(std::move(e))}; }

  std::string str() const;
  friend bool operator==(const Type& a, const Type& b);
};

enum class EK {
  IntLit,
  BoolLit,
  PermLit,
  Null,
  Var,
  Field,      // args[0].name
  App,        // function application name(args)
  Pred,       // predicate instance name(args); as an assertion means acc(name(args))
  Acc,        // args[0] location, args[1] optional amount
  Perm,       // perm(args[0]), in label name if nonempty
  Old,        // old[name](args[0]); empty name is old(...)
  Unary,      // op Not/Neg
  Binary,
  SetLit,     // elemType, args
  SeqLit,
  Forall,     // vars, args[0] body
  Exists,
  Unfolding,  // unfolding args[0] in args[1]
};

enum class Op {
  Not,
  Neg,
  Implies,
  Iff,
  Or,
  And,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  In,
  Union,
  Inter,
  Minus,
  Subset,
};
const char* opText(Op op);

struct Expr;
using EPtr = std::shared_ptr<const Expr>;

struct QVar {
  std::string name;
  Type type;
};

struct Expr {
  EK kind = EK::IntLit;
  std::int64_t i = 0;
  bool b = false;
  Rational q;
  std::string name;
  Op op = Op::And;
  std::vector<EPtr> args;
  std::vector<QVar> vars;
  Type elemType;    // SetLit, SeqLit
  std::string tag;  // quantifier: region whose state domain ranges the Int variables
};

namespace e {
EPtr intLit(std::int64_t v);
EPtr boolLit(bool v);
EPtr permLit(Rational q);
EPtr null();
EPtr var(std::string n);
EPtr field(EPtr recv, std::string f);
EPtr app(std::string f, std::vector<EPtr> args);
EPtr pred(std::string p, std::vector<EPtr> args);
EPtr acc(EPtr loc, EPtr amount = nullptr);
EPtr perm(EPtr loc, std::string label = {});
EPtr old(std::string label, EPtr x);
EPtr unary(Op op, EPtr x);
EPtr binary(Op op, EPtr l, EPtr r);
EPtr setLit(Type elem, std::vector<EPtr> xs);
EPtr seqLit(Type elem, std::vector<EPtr> xs);
EPtr forall(std::vector<QVar> vars, EPtr body, std::string tag = {});
EPtr exists(std::vector<QVar> vars, EPtr body, std::string tag = {});
EPtr unfolding(EPtr pred, EPtr body);
// Conjunction/disjunction of a list; empty lists give true/false.
EPtr conj(const std::vector<EPtr>& xs);
EPtr disj(const std::vector<EPtr>& xs);
EPtr implies(EPtr l, EPtr r);
EPtr eq(EPtr l, EPtr r);
EPtr noneLt(EPtr loc);  // none < perm(loc)
}  // namespace e

// Top-level conjuncts of a binary-And tree.
std::vector<EPtr> conjuncts(const EPtr& x);
bool equal(const Expr& a, const Expr& b);
// Replaces free variables.
EPtr substitute(const EPtr& x, const std::map<std::string, EPtr>& sub);
// Rewrites old(e) (empty label) to old[label](e).
EPtr relabelOld(const EPtr& x, const std::string& label);

enum class SK {
  Inhale,
  Exhale,
  Assert,
  Label,
  VarDecl,      // name, type, optional expr
  Assign,       // name := expr
  FieldAssign,  // target (Field) := expr
  Fold,         // expr is the predicate instance
  Unfold,
  If,
  While,
  Call,      // targets := name(args)
  Havoc,     // target: Var, Field, Pred, or Forall (vars, cond ==> location)
  FrameOut,  // exhale all held region, guard and program-field permissions
  FrameIn,   // name: label whose permissions are restored
  Comment,
};

struct Stmt;
using SPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<SPtr>;

struct Stmt {
  SK kind = SK::Inhale;
  EPtr expr;
  EPtr target;
  std::string name;
  Type type;
  std::vector<EPtr> invariants;
  std::vector<std::string> targets;
  std::vector<EPtr> args;
  Block body;
  Block elseBody;
  int line = 0;           // voila source line, 0 if none
  bool external = false;  // emitted for external tools only
  bool minimal = false;   // VarDecl: resolves to the least value its inhaled lower bounds allow
  std::string check;      // failure message used by the micro-verifier
};

struct FieldDecl {
  std::string name;
  Type type;
};

enum class PredRole { Region, Guard };

struct PredicateDecl {
  std::string name;
  std::vector<QVar> params;
  EPtr body;  // null for abstract predicates
  PredRole role = PredRole::Region;
  GuardKind guardKind = GuardKind::Unique;
  std::string region;  // owning region
};

struct FunctionDecl {
  std::string name;
  std::vector<QVar> params;
  Type ret;
  std::vector<EPtr> pres;
  EPtr body;
};

struct MethodDecl {
  std::string name;
  std::vector<QVar> params;
  std::vector<QVar> returns;
  std::vector<EPtr> pres;
  std::vector<EPtr> posts;
  std::optional<Block> body;
  int line = 0;
};

struct Program {
  std::vector<FieldDecl> fields;
  std::vector<PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;
  std::vector<MethodDecl> methods;
  std::vector<std::string> programFields;  // fields declared by source structs

  const FieldDecl* field(const std::string& n) const;
  const PredicateDecl* predicate(const std::string& n) const;
  const FunctionDecl* function(const std::string& n) const;
  const MethodDecl* method(const std::string& n) const;
};

// Printing. Havoc, FrameOut and FrameIn are printed as their standard
// exhale/inhale expansions.
std::string print(const Program& p);
std::string printExpr(const Expr& x);
std::string printBlock(const Block& b, int indent = 0);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Parses the printed fragment (comments are dropped). Throws ParseError.
Program parse(const std::string& text);

// Renames identifiers of the form base_<digits> to base, so encodings that
// differ only in fresh-name indices compare equal.
Program normalizeFreshNames(const Program& p);
// Structural equality of declarations and bodies; on mismatch describes the
// first difference.
bool structurallyEqual(const Program& a, const Program& b, std::string* why = nullptr);

}  // namespace voila::ivl
