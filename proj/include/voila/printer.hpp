#pragma once

#include <string>

#include "voila/ast.hpp"

namespace voila {

// Canonical surface syntax; parseProgram(prettyPrint(p)) equals p modulo spans.
std::string prettyPrint(const Program& p);
std::string printExpr(const Expr& e);
std::string printType(const Type& t);
std::string printStmt(const Stmt& s, int indent = 0);

}  // namespace voila
