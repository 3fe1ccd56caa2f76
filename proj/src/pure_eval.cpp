#include "voila/pure_eval.hpp"

namespace voila {

namespace {

Value arith(BinOp op, const Value& a, const Value& b) {
  if (!a.isNumeric() || !b.isNumeric()) throw EvalError("arithmetic on non-numeric value");
  if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) {
    switch (op) {
      case BinOp::Add: return Value::integer(a.i + b.i);
      case BinOp::Sub: return Value::integer(a.i - b.i);
      case BinOp::Mul: return Value::integer(a.i * b.i);
      case BinOp::Div:
        if (b.i == 0) throw EvalError("division by zero");
        return Value::integer(a.i / b.i);
      case BinOp::Mod:
        if (b.i == 0) throw EvalError("division by zero");
        return Value::integer(a.i % b.i);
      default: break;
    }
  }
  Rational x = a.asRational(), y = b.asRational();
  switch (op) {
    case BinOp::Add: return Value::frac(x + y);
    case BinOp::Sub: return Value::frac(x - y);
    case BinOp::Mul: return Value::frac(x * y);
    case BinOp::Div:
      if (y.isZero()) throw EvalError("division by zero");
      return Value::frac(x / y);
    default: throw EvalError("modulo on fractions");
  }
}

}  // namespace

Value applyBinary(BinOp op, const Value& a, const Value& b) {
  switch (op) {
    case BinOp::Implies: return Value::boolean(!a.asBool() || b.asBool());
    case BinOp::Or: return Value::boolean(a.asBool() || b.asBool());
    case BinOp::And: return Value::boolean(a.asBool() && b.asBool());
    case BinOp::Eq: return Value::boolean(a == b);
    case BinOp::Ne: return Value::boolean(!(a == b));
    case BinOp::Lt: return Value::boolean(a < b);
    case BinOp::Le: return Value::boolean(a <= b);
    case BinOp::Gt: return Value::boolean(a > b);
    case BinOp::Ge: return Value::boolean(a >= b);
    case BinOp::In:
      if (b.kind != Value::Kind::Set && b.kind != Value::Kind::Seq) throw EvalError("'in' on non-collection");
      return Value::boolean(b.contains(a));
    case BinOp::Subset: return Value::boolean(setSubset(a, b));
    case BinOp::Union: return setUnion(a, b);
    case BinOp::Inter: return setInter(a, b);
    case BinOp::SetMinus: return setMinus(a, b);
    case BinOp::Add:
      if (a.kind == Value::Kind::Set) return setUnion(a, b);
      return arith(op, a, b);
    case BinOp::Sub:
      if (a.kind == Value::Kind::Set) return setMinus(a, b);
      return arith(op, a, b);
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return arith(op, a, b);
  }
  throw EvalError("unknown operator");
}

Value evalPure(const Expr& e, const ValueEnv& env) {
  switch (e.kind) {
    case ExprKind::IntLit: return Value::integer(e.num);
    case ExprKind::BoolLit: return Value::boolean(e.bval);
    case ExprKind::FracLit: return Value::frac(Rational(e.num, e.den));
    case ExprKind::Var:
    case ExprKind::Binder: {
      auto it = env.find(e.name);
      if (it == env.end()) throw EvalError("unbound name " + e.name);
      return it->second;
    }
    case ExprKind::Unary: {
      Value v = evalPure(*e.args[0], env);
      if (e.uop == UnOp::Not) return Value::boolean(!v.asBool());
      if (v.kind == Value::Kind::Frac) return Value::frac(-v.q);
      return Value::integer(-v.i);
    }
    case ExprKind::Binary: {
      Value a = evalPure(*e.args[0], env);
      // Short-circuit keeps guarded sub-expressions from raising.
      if (e.bop == BinOp::And && !a.asBool()) return Value::boolean(false);
      if (e.bop == BinOp::Or && a.asBool()) return Value::boolean(true);
      if (e.bop == BinOp::Implies && !a.asBool()) return Value::boolean(true);
      return applyBinary(e.bop, a, evalPure(*e.args[1], env));
    }
    case ExprKind::SetLit:
    case ExprKind::SeqLit: {
      std::vector<Value> xs;
      for (const auto& a : e.args) xs.push_back(evalPure(*a, env));
      return e.kind == ExprKind::SetLit ? Value::set(std::move(xs)) : Value::seq(std::move(xs));
    }
    default: throw EvalError("expression is not pure");
  }
}

}  // namespace voila
