#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "voila/ast.hpp"
#include "voila/value.hpp"

namespace voila {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ValueEnv = std::map<std::string, Value>;

// Evaluates a pure source expression. Spatial forms, field reads and
// unbound names raise EvalError.
Value evalPure(const Expr& e, const ValueEnv& env);

// Binary operator on values; shared with the micro-verifier.
Value applyBinary(BinOp op, const Value& a, const Value& b);

}  // namespace voila
