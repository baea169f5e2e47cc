#pragma once

#include <string>

#include "semtex/syntax.hpp"

namespace semtex::prose {

/// Receives the pieces of a prose node list in document order.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void text(const std::string& s) = 0;
  virtual void math(const syntax::MathGroup& m, const SourceSpan& span) = 0;
  /// Returns false to let the walker treat the command generically.
  virtual bool command(const syntax::Command&, const SourceSpan&) { return false; }
  /// Returns false to let the walker descend into the body.
  virtual bool environment(const syntax::Environment&, const SourceSpan&) { return false; }
};

/// Walks prose: raw text is passed through with `~` as a space, accent
/// control symbols combine with the next letter, argument-less control words
/// map to their text, and other commands contribute their arguments.
void walk(const syntax::NodeList& nodes, Sink& sink);

/// Text of a node list; math is kept as source.
std::string plain_text(const syntax::NodeList& nodes);

}  // namespace semtex::prose
