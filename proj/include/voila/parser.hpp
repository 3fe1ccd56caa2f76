#pragma once

#include <string>
#include <string_view>

#include "voila/ast.hpp"

namespace voila {

struct ParseResult {
  Program program;  // declarations that parsed cleanly
  Diagnostics diags;
  bool ok() const { return !diags.hasErrors(); }
};

// Errors are recovered per declaration: the parser resynchronises at the
// next declaration keyword and keeps going.
ParseResult parseProgram(std::string_view source, const std::string& file = {});

// Parses a standalone assertion or expression (used by tests and tools).
ParseResult parseAssertion(std::string_view source, ExprPtr& out);

}  // namespace voila
