#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace voila {

struct Span {
  int line = 0;
  int col = 0;
  int endLine = 0;
  int endCol = 0;

  bool valid() const { return line > 0; }
  static Span merge(const Span& a, const Span& b);
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string code;
  std::string message;
  std::string file;

  nlohmann::json toJson() const;
  std::string toText() const;
};

class Diagnostics {
 public:
  void error(Span span, std::string code, std::string message);
  void warning(Span span, std::string code, std::string message);
  void add(Diagnostic d) { items_.push_back(std::move(d)); }
  void append(const Diagnostics& other);

  bool hasErrors() const;
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const std::vector<Diagnostic>& items() const { return items_; }
  std::vector<Diagnostic>& items() { return items_; }

  // Orders by file, then position; stable for equal positions.
  void sortByPosition();

 private:
  std::vector<Diagnostic> items_;
};

const char* severityName(Severity s);

}  // namespace voila
