#include "semtex/content.hpp"

#include <set>

#include "semtex/text.hpp"

namespace semtex::content {

using syntax::Token;
using syntax::TokenKind;

bool operator==(const OMS& a, const OMS& b) { return a.cd == b.cd && a.name == b.name; }
bool operator==(const OMV& a, const OMV& b) { return a.name == b.name; }
bool operator==(const OMI& a, const OMI& b) { return a.value == b.value; }
bool operator==(const OMA& a, const OMA& b) { return a.elems == b.elems; }
bool operator==(const OMObject& a, const OMObject& b) { return a.value == b.value; }

OMObject oms(std::string cd, std::string name) { return OMObject{OMS{std::move(cd), std::move(name)}}; }
OMObject omv(std::string name) { return OMObject{OMV{std::move(name)}}; }

OMObject omi(std::string digits) {
  std::size_t nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  return OMObject{OMI{std::move(digits)}};
}

OMObject oma(OMObject head, std::vector<OMObject> args) {
  OMA a;
  a.elems.reserve(args.size() + 1);
  a.elems.push_back(std::move(head));
  for (auto& x : args) a.elems.push_back(std::move(x));
  return OMObject{std::move(a)};
}

std::string to_string(const OMObject& obj) {
  if (const auto* s = obj.as<OMS>()) return "OMS(" + s->cd + "," + s->name + ")";
  if (const auto* v = obj.as<OMV>()) return "OMV(" + v->name + ")";
  if (const auto* i = obj.as<OMI>()) return "OMI(" + i->value + ")";
  const auto& a = std::get<OMA>(obj.value);
  std::string out = "OMA(";
  for (std::size_t k = 0; k < a.elems.size(); ++k) {
    if (k) out += ", ";
    out += to_string(a.elems[k]);
  }
  return out + ")";
}

xml::Node to_element(const OMObject& obj) {
  if (const auto* s = obj.as<OMS>()) {
    xml::Node n = xml::Node::element("OMS");
    n.set_attr("cd", s->cd).set_attr("name", s->name);
    return n;
  }
  if (const auto* v = obj.as<OMV>()) {
    xml::Node n = xml::Node::element("OMV");
    n.set_attr("name", v->name);
    return n;
  }
  if (const auto* i = obj.as<OMI>()) {
    xml::Node n = xml::Node::element("OMI");
    n.append_text(i->value);
    return n;
  }
  xml::Node n = xml::Node::element("OMA");
  for (const auto& e : std::get<OMA>(obj.value).elems) n.append(to_element(e));
  return n;
}

xml::Node to_openmath(const OMObject& obj) {
  xml::Node n = xml::Node::element("OMOBJ");
  n.set_attr("xmlns", kOpenMathNs);
  n.append(to_element(obj));
  return n;
}

OMObject from_openmath(const xml::Node& node) {
  if (node.name == "OMOBJ") {
    auto kids = node.child_elements();
    if (kids.size() != 1) throw Error(ErrorKind::Xml, "OMOBJ must hold exactly one object");
    return from_openmath(*kids[0]);
  }
  if (node.name == "OMS") return oms(node.attr_or("cd"), node.attr_or("name"));
  if (node.name == "OMV") return omv(node.attr_or("name"));
  if (node.name == "OMI") return omi(text::trim(node.text_content()));
  if (node.name == "OMA") {
    auto kids = node.child_elements();
    if (kids.size() < 2) throw Error(ErrorKind::Xml, "OMA needs a head and at least one argument");
    OMA a;
    for (const auto* k : kids) a.elems.push_back(from_openmath(*k));
    return OMObject{std::move(a)};
  }
  throw Error(ErrorKind::Xml, "unsupported OpenMath element <" + node.name + ">");
}

std::vector<OMS> symbols_of(const OMObject& obj) {
  std::vector<OMS> out;
  if (const auto* s = obj.as<OMS>()) out.push_back(*s);
  if (const auto* a = obj.as<OMA>()) {
    for (const auto& e : a->elems) {
      auto sub = symbols_of(e);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

namespace {

/// Splits text runs into single code points and drops whitespace and
/// comments, so that every remaining token is one TeX-style argument unit.
std::vector<Token> units(const std::vector<Token>& toks) {
  std::vector<Token> out;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::Comment) continue;
    if (t.kind == TokenKind::Text || t.kind == TokenKind::BeginOpt || t.kind == TokenKind::EndOpt) {
      std::size_t off = 0;
      for (auto cp : text::codepoints(t.lexeme)) {
        if (!(cp.size() == 1 && text::is_space(cp[0]))) {
          Token u{TokenKind::Text, std::string(cp), t.span};
          u.span.begin = t.span.begin + off;
          u.span.end = u.span.begin + cp.size();
          out.push_back(std::move(u));
        }
        off += cp.size();
      }
      continue;
    }
    out.push_back(t);
  }
  return out;
}

bool presentation_only(std::string_view cmd) {
  static const std::set<std::string_view> names = {
      "mathbb", "text", "mathrm", "mathit", "mathcal", "in", "mid", "{", "}", "ldots", "cdots",
      "cdot", ",", ";", "quad", "left", "right", "times", "leq", "geq", "neq", "to"};
  return names.count(cmd) > 0;
}

bool is_letter(std::string_view u) { return u.size() == 1 && text::is_ascii_letter(u[0]); }
bool is_digit(std::string_view u) { return u.size() == 1 && text::is_ascii_digit(u[0]); }

class Expander {
 public:
  Expander(const modsys::Scope& scope, const SourceSpan& at) : scope_(scope), at_(at) {}

  /// Exactly one term from [b, e).
  OMObject single(const std::vector<Token>& u, std::size_t b, std::size_t e, const SourceSpan& where) {
    if (b == e) throw Error::at(ErrorKind::Expansion, where, "empty math: expected a term");
    std::size_t pos = b;
    OMObject obj = term(u, pos, e);
    if (pos != e) {
      throw Error::at(ErrorKind::Expansion, span(u[pos]),
                      "juxtaposed terms: unexpected '" + u[pos].lexeme + "' after a complete term");
    }
    return obj;
  }

 private:
  SourceSpan span(const Token& t) const {
    if (t.span.file.empty() && t.span.begin == 0 && t.span.end == 0) return at_;
    return t.span;
  }

  /// End index (exclusive) of the group opening at `b`, pointing at its '}'.
  std::size_t group_end(const std::vector<Token>& u, std::size_t b, std::size_t e) {
    int depth = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (u[i].kind == TokenKind::BeginGroup) ++depth;
      if (u[i].kind == TokenKind::EndGroup && --depth == 0) return i;
    }
    throw Error::at(ErrorKind::Expansion, span(u[b]), "unbalanced '{' in math");
  }

  OMObject term(const std::vector<Token>& u, std::size_t& pos, std::size_t e) {
    const Token& t = u[pos];
    switch (t.kind) {
      case TokenKind::BeginGroup: {
        std::size_t close = group_end(u, pos, e);
        OMObject obj = single(u, pos + 1, close, span(t));
        pos = close + 1;
        return obj;
      }
      case TokenKind::Command:
        return macro(u, pos, e);
      case TokenKind::Text: {
        if (is_letter(t.lexeme)) {
          if (pos + 1 < e && u[pos + 1].kind == TokenKind::Text && is_letter(u[pos + 1].lexeme) &&
              u[pos + 1].span.begin == t.span.end && t.span.end != 0) {
            throw Error::at(ErrorKind::Expansion, span(t),
                            "multi-letter identifier '" + t.lexeme + u[pos + 1].lexeme +
                                "...': only single-letter variables are supported");
          }
          ++pos;
          return omv(t.lexeme);
        }
        if (is_digit(t.lexeme)) {
          std::string digits;
          while (pos < e && u[pos].kind == TokenKind::Text && is_digit(u[pos].lexeme)) digits += u[pos++].lexeme;
          return omi(digits);
        }
        throw Error::at(ErrorKind::Expansion, span(t),
                        "unexpected '" + t.lexeme + "' in content position; use a semantic macro");
      }
      default:
        throw Error::at(ErrorKind::Expansion, span(t), "unexpected '" + t.lexeme + "' in content position");
    }
  }

  OMObject macro(const std::vector<Token>& u, std::size_t& pos, std::size_t e) {
    const Token& t = u[pos];
    std::string name(t.command_name());
    const modsys::SymDef* sd = nullptr;
    try {
      sd = scope_.find_command(name);
    } catch (const Error& err) {
      throw Error::at(ErrorKind::Ambiguity, span(t), err.message());
    }
    if (!sd) {
      if (presentation_only(name)) {
        throw Error::at(ErrorKind::Expansion, span(t),
                        "presentation command \\" + name + " is not allowed in content; declare a \\symdef");
      }
      throw Error::at(ErrorKind::Expansion, span(t),
                      "unknown command \\" + name + " in math: no visible \\symdef in module '" + scope_.module() + "'");
    }
    ++pos;
    OMObject head = oms(sd->home, sd->name);
    if (sd->arity == 0) return head;
    std::vector<OMObject> args;
    for (int k = 0; k < sd->arity; ++k) {
      if (pos >= e || u[pos].kind == TokenKind::EndGroup) {
        throw Error::at(ErrorKind::Expansion, span(t),
                        "\\" + name + " expects " + std::to_string(sd->arity) + " arguments but got " + std::to_string(k));
      }
      if (u[pos].kind == TokenKind::BeginGroup) {
        std::size_t close = group_end(u, pos, e);
        args.push_back(single(u, pos + 1, close, span(u[pos])));
        pos = close + 1;
      } else {
        args.push_back(single(u, pos, pos + 1, span(u[pos])));
        ++pos;
      }
    }
    return oma(std::move(head), std::move(args));
  }

  const modsys::Scope& scope_;
  SourceSpan at_;
};

}  // namespace

ArgBinding bind_args(const modsys::SymDef& macro, const std::vector<Token>& following) {
  std::vector<Token> u = units(following);
  ArgBinding out;
  std::size_t pos = 0;
  for (int k = 0; k < macro.arity; ++k) {
    if (pos >= u.size() || u[pos].kind == TokenKind::EndGroup) {
      throw Error::at(ErrorKind::Expansion, macro.span,
                      "\\" + macro.command() + " expects " + std::to_string(macro.arity) + " arguments but got " +
                          std::to_string(k));
    }
    if (u[pos].kind == TokenKind::BeginGroup) {
      int depth = 0;
      std::size_t i = pos;
      for (; i < u.size(); ++i) {
        if (u[i].kind == TokenKind::BeginGroup) ++depth;
        if (u[i].kind == TokenKind::EndGroup && --depth == 0) break;
      }
      if (i == u.size()) throw Error::at(ErrorKind::Expansion, macro.span, "unbalanced '{' in arguments");
      out.args.emplace_back(u.begin() + static_cast<std::ptrdiff_t>(pos) + 1, u.begin() + static_cast<std::ptrdiff_t>(i));
      pos = i + 1;
    } else {
      out.args.push_back({u[pos]});
      ++pos;
    }
  }
  out.rest.assign(u.begin() + static_cast<std::ptrdiff_t>(pos), u.end());
  return out;
}

OMObject expand_math(const std::vector<Token>& math, const modsys::Scope& scope, const SourceSpan& at) {
  std::vector<Token> u = units(math);
  Expander ex(scope, at);
  return ex.single(u, 0, u.size(), at);
}

}  // namespace semtex::content
