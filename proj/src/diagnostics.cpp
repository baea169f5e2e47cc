#include "semtex/diagnostics.hpp"

namespace semtex {

std::string SourceSpan::location() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Encoding: return "encoding";
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Keyval: return "keyval";
    case ErrorKind::Module: return "module";
    case ErrorKind::Import: return "import";
    case ErrorKind::Cycle: return "cycle";
    case ErrorKind::Ambiguity: return "ambiguity";
    case ErrorKind::Expansion: return "expansion";
    case ErrorKind::Notation: return "notation";
    case ErrorKind::Emit: return "emit";
    case ErrorKind::Rdfa: return "rdfa";
    case ErrorKind::Owl: return "owl";
    case ErrorKind::Store: return "store";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Io: return "io";
    case ErrorKind::Xml: return "xml";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string message, SourceSpan span, bool has_span)
    : std::runtime_error(message),
      kind_(kind),
      message_(std::move(message)),
      span_(std::move(span)),
      has_span_(has_span) {}

std::string Error::diagnostic() const {
  if (has_span_) {
    return span_.location() + ": error: " + message_;
  }
  return "error: " + message_;
}

}  // namespace semtex
