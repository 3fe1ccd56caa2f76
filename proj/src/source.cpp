#include "voila/source.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace voila {

Span Span::merge(const Span& a, const Span& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  Span s = a;
  if (std::tie(b.line, b.col) < std::tie(s.line, s.col)) {
    s.line = b.line;
    s.col = b.col;
  }
  if (std::tie(b.endLine, b.endCol) > std::tie(s.endLine, s.endCol)) {
    s.endLine = b.endLine;
    s.endCol = b.endCol;
  }
  return s;
}

const char* severityName(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "error";
}

nlohmann::json Diagnostic::toJson() const {
  nlohmann::json j;
  j["severity"] = severityName(severity);
  j["span"] = {{"line", span.line}, {"col", span.col}, {"endLine", span.endLine}, {"endCol", span.endCol}};
  if (!file.empty()) j["span"]["file"] = file;
  j["code"] = code;
  j["message"] = message;
  return j;
}

std::string Diagnostic::toText() const {
  std::ostringstream os;
  if (!file.empty()) os << file << ":";
  os << span.line << ":" << span.col << ": " << severityName(severity) << " [" << code << "] " << message;
  return os.str();
}

void Diagnostics::error(Span span, std::string code, std::string message) {
  items_.push_back({Severity::Error, span, std::move(code), std::move(message), {}});
}

void Diagnostics::warning(Span span, std::string code, std::string message) {
  items_.push_back({Severity::Warning, span, std::move(code), std::move(message), {}});
}

void Diagnostics::append(const Diagnostics& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::hasErrors() const {
  return std::any_of(items_.begin(), items_.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void Diagnostics::sortByPosition() {
  std::stable_sort(items_.begin(), items_.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.file, a.span.line, a.span.col) < std::tie(b.file, b.span.line, b.span.col);
  });
}

}  // namespace voila
