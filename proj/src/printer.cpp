#include "voila/printer.hpp"

#include <cctype>
#include <sstream>

namespace voila {

namespace {

// Binding strength, higher binds tighter. Mirrors the parser's levels.
int prec(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.bop) {
        case BinOp::Implies: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
        case BinOp::In:
        case BinOp::Subset: return 4;
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Union:
        case BinOp::Inter:
        case BinOp::SetMinus: return 5;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 6;
      }
      return 0;
    case ExprKind::PointsTo:
    case ExprKind::Diamond:
    case ExprKind::Witness: return 4;
    case ExprKind::Unary: return 7;
    default: return 8;
  }
}

const char* opText(BinOp op) {
  switch (op) {
    case BinOp::Implies: return "==>";
    case BinOp::Or: return "||";
    case BinOp::And: return "&&";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::In: return "in";
    case BinOp::Subset: return "subset";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Union: return "union";
    case BinOp::Inter: return "intersection";
    case BinOp::SetMinus: return "setminus";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
  }
  return "?";
}

void print(std::ostream& os, const Expr& e, int minPrec);

void printArgs(std::ostream& os, const std::vector<ExprPtr>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print(os, *args[i], 0);
  }
}

void printRaw(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.num; return;
    case ExprKind::BoolLit: os << (e.bval ? "true" : "false"); return;
    case ExprKind::FracLit:
      if (e.den == 1)
        os << e.num << "f";
      else
        os << e.num << "/" << e.den;
      return;
    case ExprKind::Var:
    case ExprKind::TypeSet: os << e.name; return;
    case ExprKind::Binder: os << "?" << e.name; return;
    case ExprKind::Wildcard: os << "_"; return;
    case ExprKind::Unary:
      os << (e.uop == UnOp::Not ? "!" : "-");
      print(os, *e.args[0], 7);
      return;
    case ExprKind::Binary: {
      int p = prec(e);
      bool rightAssoc = e.bop == BinOp::Implies;
      bool nonAssoc = p == 4;
      print(os, *e.args[0], rightAssoc || nonAssoc ? p + 1 : p);
      os << " " << opText(e.bop) << " ";
      const Expr& rhs = *e.args[1];
      std::ostringstream r;
      print(r, rhs, rightAssoc ? p : p + 1);
      // `1 / 2` would reparse as a fraction literal.
      std::string rs = r.str();
      if (e.bop == BinOp::Div && !rs.empty() && std::isdigit(static_cast<unsigned char>(rs[0])))
        os << "(" << rs << ")";
      else
        os << rs;
      return;
    }
    case ExprKind::SetLit:
    case ExprKind::SeqLit:
      os << (e.kind == ExprKind::SetLit ? "Set(" : "Seq(");
      printArgs(os, e.args);
      os << ")";
      return;
    case ExprKind::FieldRead:
      print(os, *e.args[0], 8);
      os << "." << e.name;
      return;
    case ExprKind::PointsTo:
      print(os, *e.args[0], 8);
      os << "." << e.name << " |-> ";
      print(os, *e.args[1], 5);
      return;
    case ExprKind::RegionAssn:
      os << e.name << "(";
      printArgs(os, e.args);
      os << ")";
      return;
    case ExprKind::GuardAssn:
      os << e.name;
      if (!e.args.empty()) {
        os << "(";
        printArgs(os, e.args);
        os << ")";
      }
      os << "@";
      if (e.target->kind == ExprKind::Var) {
        os << e.target->name;
      } else {
        os << "(";
        print(os, *e.target, 0);
        os << ")";
      }
      return;
    case ExprKind::Diamond:
      print(os, *e.target, 5);
      os << " |=> <D>";
      return;
    case ExprKind::Witness:
      print(os, *e.target, 5);
      os << " |=> (";
      printArgs(os, e.args);
      os << ")";
      return;
  }
}

void print(std::ostream& os, const Expr& e, int minPrec) {
  bool paren = prec(e) < minPrec;
  if (paren) os << "(";
  printRaw(os, e);
  if (paren) os << ")";
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

void printParams(std::ostream& os, const std::vector<Param>& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) os << ", ";
    os << printType(ps[i].type);
    if (!ps[i].name.empty()) os << " " << ps[i].name;
  }
}

void printBlock(std::ostream& os, const StmtList& body, int indent) {
  os << "{\n";
  for (const auto& s : body) os << printStmt(*s, indent + 1);
  os << pad(indent) << "}";
}

void printInvariants(std::ostream& os, const std::vector<ExprPtr>& invs, int indent) {
  for (const auto& inv : invs) os << pad(indent + 1) << "invariant " << printExpr(*inv) << ";\n";
}

void printSpec(std::ostream& os, const std::vector<ExprPtr>& req, const std::vector<ExprPtr>& ens) {
  for (const auto& r : req) os << "  requires " << printExpr(*r) << ";\n";
  for (const auto& e : ens) os << "  ensures " << printExpr(*e) << ";\n";
}

void printDecl(std::ostream& os, const StructDecl& d) {
  os << "struct " << d.name << " {\n";
  for (const auto& f : d.fields) os << "  " << printType(f.type) << " " << f.name << ";\n";
  os << "}\n";
}

void printDecl(std::ostream& os, const RegionDecl& d) {
  os << "region " << d.name << "(";
  printParams(os, d.params);
  os << ")\n";
  if (!d.guards.empty()) {
    os << "  guards {\n";
    for (const auto& g : d.guards) {
      os << "    " << guardKindName(g.kind) << " " << g.name;
      if (!g.params.empty()) {
        os << "(";
        printParams(os, g.params);
        os << ")";
      }
      os << ";\n";
    }
    os << "  }\n";
  }
  os << "  interpretation { " << printExpr(*d.interpretation) << " }\n";
  os << "  state { " << printExpr(*d.state) << " }\n";
  if (!d.actions.empty()) {
    os << "  actions {\n";
    for (const auto& a : d.actions) {
      os << "    ";
      if (!a.binders.empty()) {
        for (std::size_t i = 0; i < a.binders.size(); ++i) os << (i ? ", ?" : "?") << a.binders[i];
        os << " | ";
        if (a.condition) os << printExpr(*a.condition) << " | ";
      }
      os << a.guard;
      if (!a.guardArgs.empty()) {
        os << "(";
        printArgs(os, a.guardArgs);
        os << ")";
      }
      os << ": ";
      print(os, *a.from, 5);
      os << " ~> ";
      print(os, *a.to, 5);
      os << ";\n";
    }
    os << "  }\n";
  }
}

void printDecl(std::ostream& os, const ProcDecl& d) {
  if (d.abstractAtomic) os << "abstract_atomic ";
  os << "procedure " << d.name << "(";
  printParams(os, d.params);
  os << ")";
  if (!d.returns.empty()) {
    os << " returns (";
    printParams(os, d.returns);
    os << ")";
  }
  os << "\n";
  for (const auto& ic : d.interference) os << "  interference ?" << ic.binder << " in " << printExpr(*ic.set) << ";\n";
  printSpec(os, d.pres, d.posts);
  if (d.body) {
    printBlock(os, *d.body, 0);
    os << "\n";
  }
}

void printDecl(std::ostream& os, const LemmaDecl& d) {
  os << "lemma " << d.name << "(";
  printParams(os, d.params);
  os << ")\n";
  printSpec(os, d.pres, d.posts);
}

}  // namespace

std::string printType(const Type& t) { return t.str(); }

std::string printExpr(const Expr& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

std::string printStmt(const Stmt& s, int indent) {
  std::ostringstream os;
  os << pad(indent);
  switch (s.kind) {
    case StmtKind::VarDecl:
      os << printType(s.declType) << " " << s.name;
      if (s.expr) os << " := " << printExpr(*s.expr);
      os << ";";
      break;
    case StmtKind::Assign: os << s.name << " := " << printExpr(*s.expr) << ";"; break;
    case StmtKind::FieldWrite:
      os << printExpr(*s.recv) << "." << s.field << " := " << printExpr(*s.expr) << ";";
      break;
    case StmtKind::FieldRead: os << s.name << " := " << printExpr(*s.recv) << "." << s.field << ";"; break;
    case StmtKind::Call:
      for (std::size_t i = 0; i < s.targets.size(); ++i) os << (i ? ", " : "") << s.targets[i];
      if (!s.targets.empty()) os << " := ";
      os << s.name << "(";
      printArgs(os, s.args);
      os << ");";
      break;
    case StmtKind::If:
      os << "if (" << printExpr(*s.expr) << ") ";
      printBlock(os, s.body, indent);
      if (s.hasElse) {
        os << " else ";
        printBlock(os, s.elseBody, indent);
      }
      break;
    case StmtKind::While:
      os << "while (" << printExpr(*s.expr) << ")\n";
      printInvariants(os, s.invariants, indent);
      os << pad(indent);
      printBlock(os, s.body, indent);
      break;
    case StmtKind::DoWhile:
      os << "do\n";
      printInvariants(os, s.invariants, indent);
      os << pad(indent);
      printBlock(os, s.body, indent);
      os << " while (" << printExpr(*s.expr) << ");";
      break;
    case StmtKind::MakeAtomic:
    case StmtKind::UseAtomic:
      os << (s.kind == StmtKind::MakeAtomic ? "make_atomic" : "use_atomic") << " using " << printExpr(*s.region)
         << " with " << printExpr(*s.guard) << " ";
      printBlock(os, s.body, indent);
      break;
    case StmtKind::UpdateRegion:
    case StmtKind::OpenRegion:
      os << (s.kind == StmtKind::UpdateRegion ? "update_region" : "open_region") << " using "
         << printExpr(*s.region) << " ";
      printBlock(os, s.body, indent);
      break;
    case StmtKind::Use:
      os << "use " << s.name << "(";
      printArgs(os, s.args);
      os << ");";
      break;
    case StmtKind::Fold: os << "fold " << printExpr(*s.region) << ";"; break;
    case StmtKind::Unfold: os << "unfold " << printExpr(*s.region) << ";"; break;
    case StmtKind::Inhale: os << "inhale " << printExpr(*s.expr) << ";"; break;
    case StmtKind::Exhale: os << "exhale " << printExpr(*s.expr) << ";"; break;
    case StmtKind::Assert: os << "assert " << printExpr(*s.expr) << ";"; break;
    case StmtKind::Parallel:
      os << "parallel ";
      printBlock(os, s.body, indent);
      break;
  }
  os << "\n";
  return os.str();
}

std::string prettyPrint(const Program& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.decls.size(); ++i) {
    if (i) os << "\n";
    std::visit([&](const auto& d) { printDecl(os, d); }, p.decls[i]);
  }
  return os.str();
}

}  // namespace voila
