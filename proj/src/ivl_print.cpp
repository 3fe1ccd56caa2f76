#include <sstream>

#include "voila/ivl.hpp"

namespace voila::ivl {

namespace {

int prec(const Expr& x) {
  if (x.kind == EK::Forall || x.kind == EK::Exists || x.kind == EK::Unfolding) return 0;
  if (x.kind == EK::Unary) return 10;
  if (x.kind == EK::IntLit && x.i < 0) return 10;
  if (x.kind == EK::PermLit && x.q.den() != 1) return 9;
  if (x.kind != EK::Binary) return 11;
  switch (x.op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Eq:
    case Op::Ne: return 5;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::In:
    case Op::Subset: return 6;
    case Op::Union:
    case Op::Inter:
    case Op::Minus: return 7;
    case Op::Add:
    case Op::Sub: return 8;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return 9;
    default: return 11;
  }
}

bool leftAssoc(Op op) {
  switch (op) {
    case Op::Or:
    case Op::And:
    case Op::Union:
    case Op::Inter:
    case Op::Minus:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return true;
    default: return false;
  }
}

std::string rat(const Rational& q) {
  if (q.isZero()) return "none";
  if (q == Rational(1)) return "write";
  return std::to_string(q.num()) + "/" + std::to_string(q.den());
}

std::string vars(const std::vector<QVar>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + vs[i].name + ": " + vs[i].type.str();
  return s;
}

std::string args(const std::vector<EPtr>& xs, std::size_t from = 0);

std::string expr(const Expr& x) {
  switch (x.kind) {
    case EK::IntLit: return std::to_string(x.i);
    case EK::BoolLit: return x.b ? "true" : "false";
    case EK::PermLit: return rat(x.q);
    case EK::Null: return "null";
    case EK::Var: return x.name;
    case EK::Field: {
      const Expr& r = *x.args[0];
      std::string rs = expr(r);
      if (prec(r) < 11) rs = "(" + rs + ")";
      return rs + "." + x.name;
    }
    case EK::App:
    case EK::Pred: return x.name + "(" + args(x.args) + ")";
    case EK::Acc:
      return "acc(" + expr(*x.args[0]) + (x.args.size() > 1 ? ", " + expr(*x.args[1]) : std::string()) + ")";
    case EK::Perm:
      if (!x.name.empty()) return "old[" + x.name + "](perm(" + expr(*x.args[0]) + "))";
      return "perm(" + expr(*x.args[0]) + ")";
    case EK::Old:
      return (x.name.empty() ? std::string("old") : "old[" + x.name + "]") + "(" + expr(*x.args[0]) + ")";
    case EK::Unary: {
      std::string s = expr(*x.args[0]);
      if (prec(*x.args[0]) < 10) s = "(" + s + ")";
      return std::string(opText(x.op)) + s;
    }
    case EK::Binary: {
      int p = prec(x);
      std::string l = expr(*x.args[0]), r = expr(*x.args[1]);
      int pl = prec(*x.args[0]), pr = prec(*x.args[1]);
      bool la = leftAssoc(x.op), ra = x.op == Op::Implies;
      if (pl < p || (pl == p && !la) || pl == 0) l = "(" + l + ")";
      if (pr < p || (pr == p && !ra) || pr == 0) r = "(" + r + ")";
      return l + " " + opText(x.op) + " " + r;
    }
    case EK::SetLit:
    case EK::SeqLit: {
      std::string kw = x.kind == EK::SetLit ? "Set" : "Seq";
      if (x.args.empty()) return kw + "[" + x.elemType.str() + "]()";
      return kw + "(" + args(x.args) + ")";
    }
    case EK::Forall:
    case EK::Exists:
      return std::string(x.kind == EK::Forall ? "forall " : "exists ") + vars(x.vars) + " :: " + expr(*x.args[0]);
    case EK::Unfolding: return "unfolding " + expr(*x.args[0]) + " in " + expr(*x.args[1]);
  }
  return "?";
}

std::string args(const std::vector<EPtr>& xs, std::size_t from) {
  std::string s;
  for (std::size_t i = from; i < xs.size(); ++i) s += (i > from ? ", " : "") + expr(*xs[i]);
  return s;
}

class Printer {
 public:
  explicit Printer(const Program* p) : prog_(p) {}

  void block(std::ostringstream& os, const Block& b, int indent) {
    for (const auto& s : b) stmt(os, *s, indent);
  }

  void resetMethod() {
    fresh_ = 0;
    lastLine_ = 0;
  }

 private:
  const Program* prog_;
  int fresh_ = 0;
  int lastLine_ = 0;

  static std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

  std::vector<QVar> qvars(const std::vector<QVar>& params) {
    std::vector<QVar> out;
    for (const auto& p : params) out.push_back({"q_" + p.name, p.type});
    return out;
  }

  std::vector<EPtr> qargs(const std::vector<QVar>& qs) {
    std::vector<EPtr> out;
    for (const auto& q : qs) out.push_back(e::var(q.name));
    return out;
  }

  void frame(std::ostringstream& os, const std::string& label, int indent) {
    if (!prog_) {
      os << pad(indent) << (label.empty() ? "// frame out" : "// frame in " + label) << "\n";
      return;
    }
    auto amount = [&](EPtr loc) { return label.empty() ? e::perm(loc) : e::old(label, e::perm(loc)); };
    const char* kw = label.empty() ? "exhale " : "inhale ";
    for (const auto& p : prog_->predicates) {
      auto qs = qvars(p.params);
      EPtr loc = e::pred(p.name, qargs(qs));
      os << pad(indent) << kw << expr(*e::forall(qs, e::acc(loc, amount(loc)))) << "\n";
    }
    for (const auto& f : prog_->programFields) {
      EPtr loc = e::field(e::var("q_x"), f);
      EPtr body = e::implies(e::binary(Op::Ne, e::var("q_x"), e::null()), e::acc(loc, amount(loc)));
      os << pad(indent) << kw << expr(*e::forall({{"q_x", Type::ref()}}, body)) << "\n";
    }
  }

  void havoc(std::ostringstream& os, const Stmt& s, int indent) {
    const Expr& t = *s.target;
    int k = ++fresh_;
    if (t.kind == EK::Var) {
      std::string h = t.name + "_havoc_" + std::to_string(k);
      os << pad(indent) << "var " << h << ": " << s.type.str() << "\n";
      os << pad(indent) << t.name << " := " << h << "\n";
    } else if (t.kind == EK::Forall) {
      os << pad(indent) << "exhale " << expr(*havocQuant(t)) << "\n";
      os << pad(indent) << "inhale " << expr(*havocQuant(t)) << "\n";
    } else {
      std::string p = "p_" + std::to_string(k);
      os << pad(indent) << "var " << p << ": Perm := " << expr(*e::perm(s.target)) << "\n";
      os << pad(indent) << "exhale " << expr(*e::acc(s.target, e::var(p))) << "\n";
      os << pad(indent) << "inhale " << expr(*e::acc(s.target, e::var(p))) << "\n";
    }
  }

  static EPtr havocQuant(const Expr& t) {
    const EPtr& body = t.args[0];
    if (body->kind == EK::Binary && body->op == Op::Implies)
      return e::forall(t.vars, e::implies(body->args[0], e::acc(body->args[1])), t.tag);
    return e::forall(t.vars, e::acc(body), t.tag);
  }

  void stmt(std::ostringstream& os, const Stmt& s, int indent) {
    if (s.line > 0 && s.line != lastLine_) {
      os << pad(indent) << "// voila:" << s.line << "\n";
      lastLine_ = s.line;
    }
    if (s.external) os << pad(indent) << "// begin external\n";
    switch (s.kind) {
      case SK::Inhale: os << pad(indent) << "inhale " << expr(*s.expr) << "\n"; break;
      case SK::Exhale: os << pad(indent) << "exhale " << expr(*s.expr) << "\n"; break;
      case SK::Assert: os << pad(indent) << "assert " << expr(*s.expr) << "\n"; break;
      case SK::Label: os << pad(indent) << "label " << s.name << "\n"; break;
      case SK::VarDecl:
        os << pad(indent) << "var " << s.name << ": " << s.type.str();
        if (s.expr) os << " := " << expr(*s.expr);
        os << "\n";
        break;
      case SK::Assign: os << pad(indent) << s.name << " := " << expr(*s.expr) << "\n"; break;
      case SK::FieldAssign: os << pad(indent) << expr(*s.target) << " := " << expr(*s.expr) << "\n"; break;
      case SK::Fold: os << pad(indent) << "fold " << expr(*s.expr) << "\n"; break;
      case SK::Unfold: os << pad(indent) << "unfold " << expr(*s.expr) << "\n"; break;
      case SK::If:
        os << pad(indent) << "if (" << expr(*s.expr) << ") {\n";
        block(os, s.body, indent + 1);
        if (!s.elseBody.empty()) {
          os << pad(indent) << "} else {\n";
          block(os, s.elseBody, indent + 1);
        }
        os << pad(indent) << "}\n";
        break;
      case SK::While:
        os << pad(indent) << "while (" << expr(*s.expr) << ")\n";
        for (const auto& i : s.invariants) os << pad(indent + 1) << "invariant " << expr(*i) << "\n";
        os << pad(indent) << "{\n";
        block(os, s.body, indent + 1);
        os << pad(indent) << "}\n";
        break;
      case SK::Call: {
        os << pad(indent);
        for (std::size_t i = 0; i < s.targets.size(); ++i) os << (i ? ", " : "") << s.targets[i];
        if (!s.targets.empty()) os << " := ";
        os << s.name << "(" << args(s.args) << ")\n";
        break;
      }
      case SK::Havoc: havoc(os, s, indent); break;
      case SK::FrameOut: frame(os, {}, indent); break;
      case SK::FrameIn: frame(os, s.name, indent); break;
      case SK::Comment: os << pad(indent) << "// " << s.name << "\n"; break;
    }
    if (s.external) os << pad(indent) << "// end external\n";
  }
};

}  // namespace

std::string printExpr(const Expr& x) { return expr(x); }

std::string printBlock(const Block& b, int indent) {
  std::ostringstream os;
  Printer(nullptr).block(os, b, indent);
  return os.str();
}

std::string print(const Program& p) {
  std::ostringstream os;
  for (const auto& f : p.fields) os << "field " << f.name << ": " << f.type.str() << "\n";
  for (const auto& pr : p.predicates) {
    os << "\npredicate " << pr.name << "(" << vars(pr.params) << ")";
    if (pr.body) os << " {\n  " << expr(*pr.body) << "\n}";
    os << "\n";
  }
  for (const auto& f : p.functions) {
    os << "\nfunction " << f.name << "(" << vars(f.params) << "): " << f.ret.str() << "\n";
    for (const auto& r : f.pres) os << "  requires " << expr(*r) << "\n";
    if (f.body) os << "{\n  " << expr(*f.body) << "\n}\n";
  }
  Printer pr(&p);
  for (const auto& m : p.methods) {
    pr.resetMethod();
    os << "\nmethod " << m.name << "(" << vars(m.params) << ")";
    if (!m.returns.empty()) os << " returns (" << vars(m.returns) << ")";
    os << "\n";
    for (const auto& r : m.pres) os << "  requires " << expr(*r) << "\n";
    for (const auto& r : m.posts) os << "  ensures " << expr(*r) << "\n";
    if (m.body) {
      os << "{\n";
      pr.block(os, *m.body, 1);
      os << "}\n";
    }
  }
  return os.str();
}

}  // namespace voila::ivl
