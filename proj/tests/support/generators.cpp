#include "support/generators.hpp"

#include <algorithm>
#include <sstream>

namespace voila::testing {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

std::set<std::pair<int, int>> denoted(const ActionSpec& a, int states) {
  std::set<std::pair<int, int>> out;
  switch (a.form) {
    case ActionForm::Literal:
      if (a.from != a.to) out.insert({a.from, a.to});
      break;
    case ActionForm::Ascending:
      for (int n = 0; n < states; ++n)
        for (int m = n + 1; m < states; ++m) out.insert({n, m});
      break;
    case ActionForm::Successor:
      for (int n = 0; n < a.bound && n + 1 < states; ++n) out.insert({n, n + 1});
      break;
  }
  return out;
}

std::set<std::pair<int, int>> closure(std::set<std::pair<int, int>> r, int states) {
  for (int k = 0; k < states; ++k)
    for (int i = 0; i < states; ++i)
      for (int j = 0; j < states; ++j)
        if (i != j && r.count({i, k}) && r.count({k, j})) r.insert({i, j});
  return r;
}

}  // namespace

TransitionSystem randomTransitionSystem(Rng& rng, const TsOptions& opt) {
  TransitionSystem ts;
  ts.states = uniform(rng, 1, opt.maxStates);
  int ng = uniform(rng, 1, opt.maxGuards);
  for (int g = 0; g < ng; ++g) {
    GuardSpec gs;
    gs.name = "G" + std::to_string(g);
    int k = uniform(rng, 0, opt.allowFractional ? 2 : 1);
    gs.kind = k == 0 ? GuardKind::Unique : k == 1 ? GuardKind::Duplicable : GuardKind::Fractional;
    ts.guards.push_back(gs);
  }
  ts.pairs.resize(ts.guards.size());

  if (opt.closedChain) {
    std::set<std::pair<int, int>> rel;
    bool ascending = false;
    for (int g = 0; g < ng; ++g) {
      int extra = uniform(rng, 0, 3);
      for (int i = 0; i < extra; ++i) {
        int a = uniform(rng, 0, ts.states - 1), b = uniform(rng, 0, ts.states - 1);
        if (a != b) rel.insert({a, b});
      }
      if (!ascending && coin(rng, 0.2)) {
        ascending = true;
        auto asc = denoted({g, ActionForm::Ascending, 0, 0, 0}, ts.states);
        rel.insert(asc.begin(), asc.end());
      }
      rel = closure(rel, ts.states);
      ts.pairs[static_cast<std::size_t>(g)] = rel;
      std::set<std::pair<int, int>> covered;
      if (ascending) {
        ts.actions.push_back({g, ActionForm::Ascending, 0, 0, 0});
        covered = denoted(ts.actions.back(), ts.states);
      }
      for (const auto& [a, b] : rel)
        if (!covered.count({a, b})) ts.actions.push_back({g, ActionForm::Literal, a, b, 0});
    }
    return ts;
  }

  int na = uniform(rng, 0, opt.maxActions);
  for (int i = 0; i < na; ++i) {
    ActionSpec a;
    a.guard = uniform(rng, 0, ng - 1);
    int f = uniform(rng, 0, 9);
    if (f < 7) {
      a.form = ActionForm::Literal;
      a.from = uniform(rng, 0, ts.states - 1);
      a.to = uniform(rng, 0, ts.states - 1);
    } else if (f < 8) {
      a.form = ActionForm::Ascending;
    } else {
      a.form = ActionForm::Successor;
      a.bound = uniform(rng, 1, ts.states);
    }
    ts.actions.push_back(a);
    auto d = denoted(a, ts.states);
    ts.pairs[static_cast<std::size_t>(a.guard)].insert(d.begin(), d.end());
  }
  return ts;
}

std::string regionSource(const TransitionSystem& ts) {
  std::ostringstream os;
  os << "struct cell { int val; }\n\n";
  os << "region R(id r, cell x)\n";
  os << "  guards {\n";
  for (const auto& g : ts.guards) {
    os << "    " << guardKindName(g.kind) << " " << g.name;
    if (g.kind == GuardKind::Fractional) os << "(frac)";
    os << ";\n";
  }
  os << "  }\n";
  os << "  interpretation { x.val |-> ?v && 0 <= v && v < " << ts.states << " }\n";
  os << "  state { v }\n";
  if (!ts.actions.empty()) {
    os << "  actions {\n";
    for (const auto& a : ts.actions) {
      const GuardSpec& g = ts.guards[static_cast<std::size_t>(a.guard)];
      std::string head = g.name + (g.kind == GuardKind::Fractional ? "(1/2)" : "");
      os << "    ";
      switch (a.form) {
        case ActionForm::Literal: os << head << ": " << a.from << " ~> " << a.to; break;
        case ActionForm::Ascending: os << "?n, ?m | n < m | " << head << ": n ~> m"; break;
        case ActionForm::Successor: os << "?n | n < " << a.bound << " | " << head << ": n ~> n + 1"; break;
      }
      os << ";\n";
    }
    os << "  }\n";
  }
  os << "\nprocedure probe(id r, cell x)\n{\n}\n";
  return os.str();
}

std::vector<Value> stateDomain(const TransitionSystem& ts) {
  std::vector<Value> d;
  for (int i = 0; i < ts.states; ++i) d.push_back(Value::integer(i));
  return d;
}

StabilizeCase randomStabilizeCase(Rng& rng, const TransitionSystem& ts) {
  StabilizeCase c;
  for (const auto& g : ts.guards) {
    if (g.kind == GuardKind::Fractional)
      c.held.push_back(Rational(uniform(rng, 0, 2), 2));
    else
      c.held.push_back(Rational(coin(rng) ? 1 : 0));
  }
  c.pending = coin(rng, 0.3);
  for (int s = 0; s < ts.states; ++s)
    if (!c.pending || coin(rng, 0.6)) c.updateDomain.insert(s);
  for (int s : c.updateDomain)
    if (coin(rng, 0.4)) c.start.insert(s);
  return c;
}

// ------------------------------------------------------------ programs

namespace {

const std::vector<std::string> kVars{"a", "b", "c", "n", "m", "k", "x", "y"};
const std::vector<std::string> kFields{"val", "f", "next"};
const std::vector<std::string> kRegions{"R", "Lock", "Cnt"};
const std::vector<std::string> kGuards{"G", "U", "INC"};
const std::vector<std::string> kProcs{"p_one", "p_two", "cas"};

class ProgramGen {
 public:
  explicit ProgramGen(Rng& rng) : rng_(rng) {}

  Type type(int depth = 0) {
    switch (uniform(rng_, 0, depth > 0 ? 4 : 6)) {
      case 0: return Type::id();
      case 1: return Type::boolean();
      case 2: return Type::integer();
      case 3: return Type::frac();
      case 4: return Type::structType("cell");
      case 5: return Type::set(type(depth + 1));
      default: return Type::seq(type(depth + 1));
    }
  }

  ExprPtr var() { return mk::var(pick(rng_, kVars)); }

  ExprPtr pure(int depth) {
    if (depth <= 0 || coin(rng_, 0.3)) return leaf();
    switch (uniform(rng_, 0, 6)) {
      case 0: return mk::unary(coin(rng_) ? UnOp::Not : UnOp::Neg, pure(depth - 1));
      case 1:
      case 2:
      case 3: {
        static const std::vector<BinOp> ops{BinOp::Implies, BinOp::Or,    BinOp::And,      BinOp::Eq,    BinOp::Ne,
                                            BinOp::Lt,      BinOp::Le,    BinOp::Gt,       BinOp::Ge,    BinOp::In,
                                            BinOp::Add,     BinOp::Sub,   BinOp::Mul,      BinOp::Div,   BinOp::Mod,
                                            BinOp::Union,   BinOp::Inter, BinOp::SetMinus, BinOp::Subset};
        return mk::binary(pick(rng_, ops), pure(depth - 1), pure(depth - 1));
      }
      case 4: {
        std::vector<ExprPtr> xs;
        for (int i = uniform(rng_, 0, 3); i > 0; --i) xs.push_back(pure(depth - 1));
        return coin(rng_) ? mk::setLit(xs) : mk::seqLit(xs);
      }
      case 5: return mk::fieldRead(coin(rng_) ? var() : pure(depth - 1), pick(rng_, kFields));
      default: return mk::typeSet(coin(rng_) ? "Int" : "Bool");
    }
  }

  ExprPtr leaf() {
    switch (uniform(rng_, 0, 4)) {
      case 0: return mk::intLit(uniform(rng_, 0, 20));
      case 1: return mk::boolLit(coin(rng_));
      case 2: {
        static const std::vector<std::pair<int, int>> fr{{1, 1}, {1, 2}, {1, 4}, {3, 4}, {0, 1}};
        auto [n, d] = pick(rng_, fr);
        return mk::fracLit(n, d);
      }
      default: return var();
    }
  }

  // Value of a points-to or the state argument of a region assertion.
  ExprPtr binderOr(int depth, bool wildcard) {
    int r = uniform(rng_, 0, 3);
    if (r == 0) return mk::binder(pick(rng_, kVars));
    if (r == 1 && wildcard) return mk::wildcard();
    return pure(depth);
  }

  ExprPtr regionAssn(int depth, bool stateArg) {
    std::vector<ExprPtr> args{var()};
    for (int i = uniform(rng_, 0, 2); i > 0; --i) args.push_back(pure(depth));
    if (stateArg) args.push_back(binderOr(depth, true));
    return mk::region(pick(rng_, kRegions), args);
  }

  ExprPtr guardAssn(int depth) {
    std::vector<ExprPtr> args;
    for (int i = uniform(rng_, 0, 2); i > 0; --i) args.push_back(pure(depth));
    ExprPtr target = coin(rng_, 0.8) ? var() : pure(depth);
    return mk::guard(pick(rng_, kGuards), args, target);
  }

  ExprPtr spatialAtom(int depth) {
    switch (uniform(rng_, 0, 4)) {
      case 0: return mk::pointsTo(var(), pick(rng_, kFields), binderOr(depth, false));
      case 1: return regionAssn(depth, coin(rng_));
      case 2: return guardAssn(depth);
      case 3: return mk::diamond(var());
      default: return mk::witness(var(), pure(depth), pure(depth));
    }
  }

  ExprPtr assertion(int depth) {
    if (depth <= 0) return coin(rng_) ? spatialAtom(0) : pure(1);
    switch (uniform(rng_, 0, 4)) {
      case 0: return mk::binary(BinOp::And, assertion(depth - 1), assertion(depth - 1));
      case 1: return mk::binary(BinOp::Implies, pure(depth - 1), assertion(depth - 1));
      case 2: return pure(depth);
      default: return spatialAtom(depth - 1);
    }
  }

  // Right-hand side of an assignment: anything that does not reparse as a
  // field-read statement or a call.
  ExprPtr assignRhs() {
    for (;;) {
      ExprPtr e = pure(2);
      if (e->kind == ExprKind::FieldRead && e->args[0]->kind == ExprKind::Var) continue;
      return e;
    }
  }

  StmtPtr call() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Call;
    s->name = pick(rng_, kProcs);
    for (int i = uniform(rng_, 0, 2); i > 0; --i) s->targets.push_back(pick(rng_, kVars));
    for (int i = uniform(rng_, 0, 3); i > 0; --i) s->args.push_back(pure(2));
    return s;
  }

  StmtList block(int depth) {
    StmtList out;
    for (int i = uniform(rng_, 0, depth > 0 ? 3 : 1); i > 0; --i) out.push_back(stmt(depth - 1));
    return out;
  }

  StmtPtr stmt(int depth) {
    auto s = std::make_shared<Stmt>();
    int k = uniform(rng_, 0, depth > 0 ? 18 : 11);
    switch (k) {
      case 0:
        s->kind = StmtKind::VarDecl;
        s->declType = type();
        s->name = pick(rng_, kVars);
        if (coin(rng_)) s->expr = pure(2);
        break;
      case 1:
        s->kind = StmtKind::Assign;
        s->name = pick(rng_, kVars);
        s->expr = assignRhs();
        break;
      case 2:
        s->kind = StmtKind::FieldWrite;
        s->recv = var();
        s->field = pick(rng_, kFields);
        s->expr = pure(2);
        break;
      case 3:
        s->kind = StmtKind::FieldRead;
        s->name = pick(rng_, kVars);
        s->recv = var();
        s->field = pick(rng_, kFields);
        break;
      case 4: return call();
      case 5:
        s->kind = StmtKind::Use;
        s->name = "L_" + pick(rng_, kVars);
        for (int i = uniform(rng_, 0, 3); i > 0; --i) s->args.push_back(pure(1));
        break;
      case 6:
      case 7:
        s->kind = k == 6 ? StmtKind::Fold : StmtKind::Unfold;
        s->region = regionAssn(1, coin(rng_));
        break;
      case 8:
        s->kind = StmtKind::Inhale;
        s->expr = assertion(2);
        break;
      case 9:
        s->kind = StmtKind::Exhale;
        s->expr = assertion(2);
        break;
      case 10:
      case 11:
        s->kind = StmtKind::Assert;
        s->expr = assertion(2);
        break;
      case 12:
        s->kind = StmtKind::If;
        s->expr = pure(2);
        s->body = block(depth);
        s->hasElse = coin(rng_);
        if (s->hasElse) s->elseBody = block(depth);
        break;
      case 13:
      case 14:
        s->kind = k == 13 ? StmtKind::While : StmtKind::DoWhile;
        s->expr = pure(2);
        for (int i = uniform(rng_, 0, 2); i > 0; --i) s->invariants.push_back(assertion(2));
        s->body = block(depth);
        break;
      case 15:
      case 16:
        s->kind = k == 15 ? StmtKind::MakeAtomic : StmtKind::UseAtomic;
        s->region = regionAssn(1, coin(rng_, 0.3));
        s->guard = guardAssn(1);
        s->body = block(depth);
        break;
      case 17:
        s->kind = coin(rng_) ? StmtKind::UpdateRegion : StmtKind::OpenRegion;
        s->region = regionAssn(1, coin(rng_, 0.3));
        s->body = block(depth);
        break;
      default:
        s->kind = StmtKind::Parallel;
        for (int i = uniform(rng_, 1, 3); i > 0; --i) s->body.push_back(call());
        break;
    }
    return s;
  }

  std::vector<Param> params(bool namesOptional) {
    std::vector<Param> ps;
    for (int i = uniform(rng_, 0, 3); i > 0; --i) {
      Param p;
      p.type = type();
      if (!namesOptional || coin(rng_)) p.name = pick(rng_, kVars);
      ps.push_back(p);
    }
    return ps;
  }

  std::vector<ExprPtr> specs() {
    std::vector<ExprPtr> out;
    for (int i = uniform(rng_, 0, 2); i > 0; --i) out.push_back(assertion(2));
    return out;
  }

  Declaration decl(int index) {
    std::string suffix = std::to_string(index);
    switch (uniform(rng_, 0, 3)) {
      case 0: {
        StructDecl d;
        d.name = "S" + suffix;
        for (int i = uniform(rng_, 0, 3); i > 0; --i) d.fields.push_back({type(), pick(rng_, kFields), {}});
        return d;
      }
      case 1: {
        RegionDecl d;
        d.name = "Reg" + suffix;
        d.params.push_back({Type::id(), "r", {}});
        auto more = params(false);
        d.params.insert(d.params.end(), more.begin(), more.end());
        static const std::vector<GuardKind> kinds{GuardKind::Unique, GuardKind::Duplicable, GuardKind::Fractional,
                                                  GuardKind::Indexed, GuardKind::Manual};
        for (int i = uniform(rng_, 0, 2); i > 0; --i)
          d.guards.push_back({pick(rng_, kGuards) + std::to_string(i), pick(rng_, kinds), params(true), {}});
        d.interpretation = assertion(2);
        d.state = pure(2);
        for (int i = uniform(rng_, 0, 3); i > 0; --i) {
          ActionDecl a;
          int nb = uniform(rng_, 0, 2);
          for (int j = 0; j < nb; ++j) a.binders.push_back(pick(rng_, kVars));
          if (nb > 0 && coin(rng_)) a.condition = pure(2);
          a.guard = pick(rng_, kGuards);
          for (int j = uniform(rng_, 0, 2); j > 0; --j) a.guardArgs.push_back(pure(1));
          a.from = pure(2);
          a.to = pure(2);
          d.actions.push_back(a);
        }
        return d;
      }
      case 2: {
        ProcDecl d;
        d.abstractAtomic = coin(rng_);
        d.name = "proc" + suffix;
        d.params = params(false);
        if (coin(rng_, 0.3)) d.returns = params(false);
        if (d.abstractAtomic)
          for (int i = uniform(rng_, 0, 2); i > 0; --i) d.interference.push_back({pick(rng_, kVars), pure(1), {}});
        d.pres = specs();
        d.posts = specs();
        if (coin(rng_, 0.8)) d.body = block(3);
        return d;
      }
      default: {
        LemmaDecl d;
        d.name = "lemma" + suffix;
        d.params = params(false);
        d.pres = specs();
        d.posts = specs();
        return d;
      }
    }
  }

 private:
  Rng& rng_;
};

}  // namespace

Program randomProgram(Rng& rng) {
  ProgramGen g(rng);
  Program p;
  for (int i = uniform(rng, 0, 5); i > 0; --i) p.decls.push_back(g.decl(i));
  return p;
}

}  // namespace voila::testing
