#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "voila/source.hpp"

namespace voila {

// ---------------------------------------------------------------- types

struct Type {
  enum class Kind { Unknown, Id, Bool, Int, Frac, Set, Seq, Struct };

  Kind kind = Kind::Unknown;
  std::string name;                  // struct name
  std::shared_ptr<const Type> elem;  // set/seq element

  static Type id() { return {Kind::Id, {}, nullptr}; }
  static Type boolean() { return {Kind::Bool, {}, nullptr}; }
  static Type integer() { return {Kind::Int, {}, nullptr}; }
  static Type frac() { return {Kind::Frac, {}, nullptr}; }
  static Type unknown() { return {}; }
  static Type structType(std::string n) { return {Kind::Struct, std::move(n), nullptr}; }
  static Type set(Type e) { return {Kind::Set, {}, std::make_shared<const Type>(std::move(e))}; }
  static Type seq(Type e) { return {Kind::Seq, {}, std::make_shared<const Type>(std::move(e))}; }

  bool known() const { return kind != Kind::Unknown; }
  bool isRef() const { return kind == Kind::Id || kind == Kind::Struct; }
  std::string str() const;
  friend bool operator==(const Type& a, const Type& b);
};

// ---------------------------------------------------------- expressions

enum class ExprKind {
  IntLit,
  BoolLit,
  FracLit,
  Var,
  Binder,    // ?x
  Wildcard,  // _
  Unary,
  Binary,
  SetLit,
  SeqLit,
  FieldRead,  // x.f, receiver is args[0]
  TypeSet,    // Int used as the set of all values of a type
  // assertion forms
  PointsTo,    // args = {receiver, value}, name = field
  RegionAssn,  // name = region, args = arguments
  GuardAssn,   // name = guard, args = guard arguments, target = region id
  Diamond,     // target = region id
  Witness,     // target = region id, args = {from, to}
};

enum class UnOp { Not, Neg };

enum class BinOp {
  Implies,
  Or,
  And,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  In,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Union,
  Inter,
  SetMinus,
  Subset,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  Span span;
  std::int64_t num = 0;  // IntLit value, FracLit numerator
  std::int64_t den = 1;  // FracLit denominator
  bool bval = false;
  std::string name;
  UnOp uop = UnOp::Not;
  BinOp bop = BinOp::And;
  std::vector<ExprPtr> args;
  ExprPtr target;

  bool isAssertionForm() const;
};

// True iff e contains a points-to, region, guard or tracking assertion.
bool isSpatial(const Expr& e);

namespace mk {
ExprPtr intLit(std::int64_t v, Span s = {});
ExprPtr boolLit(bool v, Span s = {});
ExprPtr fracLit(std::int64_t n, std::int64_t d, Span s = {});
ExprPtr var(std::string n, Span s = {});
ExprPtr binder(std::string n, Span s = {});
ExprPtr wildcard(Span s = {});
ExprPtr unary(UnOp op, ExprPtr e, Span s = {});
ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, Span s = {});
ExprPtr setLit(std::vector<ExprPtr> elems, Span s = {});
ExprPtr seqLit(std::vector<ExprPtr> elems, Span s = {});
ExprPtr fieldRead(ExprPtr recv, std::string field, Span s = {});
ExprPtr typeSet(std::string typeName, Span s = {});
ExprPtr pointsTo(ExprPtr recv, std::string field, ExprPtr value, Span s = {});
ExprPtr region(std::string n, std::vector<ExprPtr> args, Span s = {});
ExprPtr guard(std::string n, std::vector<ExprPtr> args, ExprPtr target, Span s = {});
ExprPtr diamond(ExprPtr target, Span s = {});
ExprPtr witness(ExprPtr target, ExprPtr from, ExprPtr to, Span s = {});
}  // namespace mk

// Replaces free occurrences of variables (not binders) by expressions.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub);

// ----------------------------------------------------------- statements

enum class StmtKind {
  VarDecl,
  Assign,
  FieldWrite,
  FieldRead,
  Call,
  If,
  While,
  DoWhile,
  MakeAtomic,
  UpdateRegion,
  OpenRegion,
  UseAtomic,
  Use,
  Fold,
  Unfold,
  Inhale,
  Exhale,
  Assert,
  Parallel,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  Span span;
  Type declType;                     // VarDecl
  std::string name;                  // declared/assigned variable, callee, lemma
  std::vector<std::string> targets;  // call results
  ExprPtr expr;                      // initializer, rhs, condition, assertion, written value
  ExprPtr recv;                      // field write/read receiver
  std::string field;
  std::vector<ExprPtr> args;        // call arguments
  std::vector<ExprPtr> invariants;  // loops
  ExprPtr region;                   // key-rule statements, fold/unfold
  ExprPtr guard;                    // make_atomic, use_atomic
  StmtList body;
  StmtList elseBody;
  bool hasElse = false;
};

bool isKeyRule(StmtKind k);
bool isGhost(StmtKind k);

// ---------------------------------------------------------- declarations

struct Param {
  Type type;
  std::string name;
  Span span;
};

struct StructDecl {
  std::string name;
  std::vector<Param> fields;
  Span span;
};

enum class GuardKind { Unique, Duplicable, Fractional, Indexed, Manual };
const char* guardKindName(GuardKind k);

struct GuardDecl {
  std::string name;
  GuardKind kind = GuardKind::Unique;
  std::vector<Param> params;  // names may be empty
  Span span;
};

struct ActionDecl {
  std::vector<std::string> binders;
  ExprPtr condition;  // may be null
  std::string guard;
  std::vector<ExprPtr> guardArgs;
  ExprPtr from;
  ExprPtr to;
  Span span;
};

struct RegionDecl {
  std::string name;
  std::vector<Param> params;
  ExprPtr interpretation;
  ExprPtr state;
  std::vector<GuardDecl> guards;
  std::vector<ActionDecl> actions;
  Span span;

  const GuardDecl* findGuard(const std::string& g) const;
  // Index of the level parameter (an int parameter named lvl), if any.
  std::optional<std::size_t> levelParam() const;
};

struct InterferenceClause {
  std::string binder;
  ExprPtr set;
  Span span;
};

struct ProcDecl {
  bool abstractAtomic = false;
  std::string name;
  std::vector<Param> params;
  std::vector<Param> returns;
  std::vector<InterferenceClause> interference;
  std::vector<ExprPtr> pres;   // requires
  std::vector<ExprPtr> posts;  // ensures
  std::optional<StmtList> body;
  Span span;
};

struct LemmaDecl {
  std::string name;
  std::vector<Param> params;
  std::vector<ExprPtr> pres;   // requires
  std::vector<ExprPtr> posts;  // ensures
  Span span;
};

using Declaration = std::variant<StructDecl, RegionDecl, ProcDecl, LemmaDecl>;

struct Program {
  std::vector<Declaration> decls;

  std::vector<const StructDecl*> structs() const;
  std::vector<const RegionDecl*> regions() const;
  std::vector<const ProcDecl*> procedures() const;
  std::vector<const LemmaDecl*> lemmas() const;

  const StructDecl* findStruct(const std::string& n) const;
  const RegionDecl* findRegion(const std::string& n) const;
  const ProcDecl* findProcedure(const std::string& n) const;
  const LemmaDecl* findLemma(const std::string& n) const;
};

const std::string& declName(const Declaration& d);
Span declSpan(const Declaration& d);

// Structural equality ignoring spans.
bool equalModuloSpans(const Expr& a, const Expr& b);
bool equalModuloSpans(const Stmt& a, const Stmt& b);
bool equalModuloSpans(const Program& a, const Program& b);

}  // namespace voila
