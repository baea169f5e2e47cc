#include "semtex/prose.hpp"

#include "semtex/text.hpp"

namespace semtex::prose {

using syntax::Command;
using syntax::Environment;
using syntax::Group;
using syntax::MathGroup;
using syntax::NodeList;
using syntax::Text;

namespace {

bool is_accent(std::string_view name) {
  return name.size() == 1 && std::string_view("\"'`^~").find(name[0]) != std::string_view::npos;
}

class Walker {
 public:
  explicit Walker(Sink& sink) : sink_(sink) {}

  void nodes(const NodeList& list) {
    for (const auto& n : list) {
      if (const auto* t = n.as<Text>()) {
        raw(t->text);
      } else if (const auto* m = n.as<MathGroup>()) {
        flush_accent();
        sink_.math(*m, n.span);
      } else if (const auto* g = n.as<Group>()) {
        nodes(g->children);
      } else if (const auto* e = n.as<Environment>()) {
        flush_accent();
        if (!sink_.environment(*e, n.span)) nodes(e->body);
      } else if (const auto* c = n.as<Command>()) {
        command(*c, n.span);
      }
    }
  }

  void finish() { flush_accent(); }

 private:
  void raw(std::string_view s) {
    std::string out;
    for (char c : s) out += c == '~' ? ' ' : c;
    if (accent_ && !out.empty()) {
      auto cps = text::codepoints(out);
      std::string first(cps.front());
      auto acc = text::apply_accent(*accent_, first);
      accent_.reset();
      out = (acc ? *acc : first) + out.substr(first.size());
    }
    if (!out.empty()) sink_.text(out);
  }

  void flush_accent() { accent_.reset(); }

  void command(const Command& c, const SourceSpan& span) {
    if (is_accent(c.name)) {
      if (c.args.empty()) {
        accent_ = c.name[0];
        return;
      }
      std::string base = plain_text(c.args[0]);
      auto acc = text::apply_accent(c.name[0], base);
      sink_.text(acc ? *acc : base);
      for (std::size_t i = 1; i < c.args.size(); ++i) nodes(c.args[i]);
      return;
    }
    flush_accent();
    if (sink_.command(c, span)) return;
    if (c.name == "\\") {
      sink_.text(" ");
      return;
    }
    if (auto t = text::control_word_text(c.name); t && c.args.empty()) {
      sink_.text(*t);
      return;
    }
    for (const auto& a : c.args) nodes(a);
  }

  Sink& sink_;
  std::optional<char> accent_;
};

class TextSink : public Sink {
 public:
  void text(const std::string& s) override { out += s; }
  void math(const MathGroup& m, const SourceSpan&) override {
    out += '$';
    for (const auto& t : m.tokens) out += t.lexeme;
    out += '$';
  }
  std::string out;
};

}  // namespace

void walk(const NodeList& nodes, Sink& sink) {
  Walker w(sink);
  w.nodes(nodes);
  w.finish();
}

std::string plain_text(const NodeList& nodes) {
  TextSink s;
  walk(nodes, s);
  return s.out;
}

}  // namespace semtex::prose
