#include "voila/lexer.hpp"

#include <cctype>

namespace voila {

const char* tokName(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::FracInt: return "fraction literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Question: return "'?'";
    case Tok::At: return "'@'";
    case Tok::Bar: return "'|'";
    case Tok::Assign: return "':='";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Bang: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Implies: return "'==>'";
    case Tok::PointsTo: return "'|->'";
    case Tok::Tracks: return "'|=>'";
    case Tok::Leadsto: return "'~>'";
  }
  return "?";
}

namespace {

struct Cursor {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= src.size(); }
  char peek(std::size_t k = 0) const { return pos + k < src.size() ? src[pos + k] : '\0'; }
  bool startsWith(std::string_view s) const { return src.substr(pos, s.size()) == s; }
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos < src.size(); ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }
};

struct Punct {
  std::string_view text;
  Tok kind;
};

// Longest match first.
constexpr Punct kPuncts[] = {
    {"==>", Tok::Implies}, {"|->", Tok::PointsTo}, {"|=>", Tok::Tracks}, {":=", Tok::Assign},
    {"==", Tok::Eq},       {"!=", Tok::Ne},        {"<=", Tok::Le},      {">=", Tok::Ge},
    {"&&", Tok::AndAnd},   {"||", Tok::OrOr},      {"~>", Tok::Leadsto}, {"(", Tok::LParen},
    {")", Tok::RParen},    {"{", Tok::LBrace},     {"}", Tok::RBrace},   {",", Tok::Comma},
    {";", Tok::Semi},      {":", Tok::Colon},      {".", Tok::Dot},      {"?", Tok::Question},
    {"@", Tok::At},        {"|", Tok::Bar},        {"<", Tok::Lt},       {">", Tok::Gt},
    {"+", Tok::Plus},      {"-", Tok::Minus},      {"*", Tok::Star},     {"/", Tok::Slash},
    {"%", Tok::Percent},   {"!", Tok::Bang},
};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(std::string_view source, Diagnostics& diags) {
  std::vector<Token> out;
  Cursor c{source};
  while (!c.done()) {
    char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch))) {
      c.advance();
      continue;
    }
    if (c.startsWith("//")) {
      while (!c.done() && c.peek() != '\n') c.advance();
      continue;
    }
    Token t;
    t.span.line = c.line;
    t.span.col = c.col;
    std::size_t start = c.pos;
    if (identStart(ch)) {
      while (identChar(c.peek())) c.advance();
      t.kind = Tok::Ident;
      t.text = std::string(source.substr(start, c.pos - start));
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.advance();
      t.text = std::string(source.substr(start, c.pos - start));
      t.kind = Tok::Int;
      try {
        t.value = std::stoll(t.text);
      } catch (const std::exception&) {
        diags.error(t.span, "lex", "integer literal out of range: " + t.text);
      }
      if (c.peek() == 'f' && !identChar(c.peek(1))) {
        c.advance();
        t.kind = Tok::FracInt;
        t.text += "f";
      }
    } else {
      bool matched = false;
      for (const auto& p : kPuncts) {
        if (c.startsWith(p.text)) {
          c.advance(p.text.size());
          t.kind = p.kind;
          t.text = std::string(p.text);
          matched = true;
          break;
        }
      }
      if (!matched) {
        Span s{c.line, c.col, c.line, c.col + 1};
        diags.error(s, "lex", std::string("unexpected character '") + ch + "'");
        c.advance();
        continue;
      }
    }
    t.span.endLine = c.line;
    t.span.endCol = c.col;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.span = {c.line, c.col, c.line, c.col};
  out.push_back(end);
  return out;
}

}  // namespace voila
