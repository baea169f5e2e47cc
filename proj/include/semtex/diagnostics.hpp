#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semtex {

/// Byte range inside one source file, plus the 1-based line/column of its start.
struct SourceSpan {
  std::string file;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool valid() const { return end >= begin; }
  std::string location() const;
};

enum class ErrorKind {
  Encoding,
  Syntax,
  Keyval,
  Module,
  Import,
  Cycle,
  Ambiguity,
  Expansion,
  Notation,
  Emit,
  Rdfa,
  Owl,
  Store,
  NotFound,
  Io,
  Xml,
};

const char* to_string(ErrorKind kind);

/// The single exception type thrown by the compiler pipeline. Carries a span
/// when the failure can be pinned to source text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, SourceSpan span = {}, bool has_span = false);

  static Error at(ErrorKind kind, const SourceSpan& span, std::string message) {
    return Error(kind, std::move(message), span, true);
  }

  ErrorKind kind() const { return kind_; }
  const std::string& message() const { return message_; }
  const SourceSpan& span() const { return span_; }
  bool has_span() const { return has_span_; }

  /// `file:line:col: error: message`, or `error: message` without a span.
  std::string diagnostic() const;

 private:
  ErrorKind kind_;
  std::string message_;
  SourceSpan span_;
  bool has_span_;
};

}  // namespace semtex
