#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "voila/source.hpp"

namespace voila {

enum class Tok {
  End,
  Ident,
  Int,
  FracInt,  // 0f, 1f
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  Question,
  At,
  Bar,
  Assign,    // :=
  Eq,        // ==
  Ne,        // !=
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  AndAnd,
  OrOr,
  Implies,   // ==>
  PointsTo,  // |->
  Tracks,    // |=>
  Leadsto,   // ~>
};

const char* tokName(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  Span span;
};

// Line comments are dropped. Unknown characters produce "lex" diagnostics
// and are skipped so parsing can continue.
std::vector<Token> lex(std::string_view source, Diagnostics& diags);

}  // namespace voila
