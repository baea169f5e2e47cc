#include "semtex/notation.hpp"

#include <algorithm>
#include <set>

#include "semtex/text.hpp"

namespace semtex::notation {

using content::OMObject;
using content::OMS;
using syntax::Token;
using syntax::TokenKind;

bool operator==(const TNode& a, const TNode& b) {
  return a.kind == b.kind && a.text == b.text && a.slot == b.slot && a.fence == b.fence && a.elidable == b.elidable &&
         a.children == b.children;
}

namespace {

TNode leaf(TNode::Kind k, std::string s) {
  TNode n;
  n.kind = k;
  n.text = std::move(s);
  return n;
}

TNode row(std::vector<TNode> items) {
  if (items.size() == 1) return std::move(items[0]);
  TNode n;
  n.kind = TNode::Kind::Row;
  n.children = std::move(items);
  return n;
}

/// Text runs split into code points, whitespace kept.
std::vector<Token> units(const std::vector<Token>& toks) {
  std::vector<Token> out;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::Comment) continue;
    if (t.kind == TokenKind::Text || t.kind == TokenKind::BeginOpt || t.kind == TokenKind::EndOpt) {
      for (auto cp : text::codepoints(t.lexeme)) out.push_back(Token{TokenKind::Text, std::string(cp), t.span});
      continue;
    }
    out.push_back(t);
  }
  return out;
}

bool is_space_unit(const Token& t) {
  return t.kind == TokenKind::Text && t.lexeme.size() == 1 && text::is_space(t.lexeme[0]);
}
bool is_letter_unit(const Token& t) {
  if (t.kind != TokenKind::Text) return false;
  if (t.lexeme.size() == 1) return text::is_ascii_letter(t.lexeme[0]);
  return true;  // non-ASCII code points read as identifiers
}
bool is_digit_unit(const Token& t) {
  return t.kind == TokenKind::Text && t.lexeme.size() == 1 && text::is_ascii_digit(t.lexeme[0]);
}
bool is_control_word(const Token& t) {
  if (t.kind != TokenKind::Command) return false;
  return text::is_ascii_letter(t.lexeme.size() > 1 ? t.lexeme[1] : ' ');
}

std::optional<std::string> double_struck(std::string_view s) {
  static const std::map<std::string_view, std::string_view> table = {
      {"R", "ℝ"}, {"N", "ℕ"}, {"Z", "ℤ"}, {"Q", "ℚ"}, {"C", "ℂ"}, {"P", "ℙ"}, {"H", "ℍ"}};
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return std::string(it->second);
}

std::optional<std::string> operator_symbol(std::string_view cmd) {
  static const std::map<std::string_view, std::string_view> table = {
      {"in", "∈"},     {"mid", "∣"},    {"{", "{"},     {"}", "}"},     {"ldots", "…"}, {"cdots", "⋯"},
      {"cdot", "⋅"},   {"times", "×"},  {"leq", "≤"},   {"geq", "≥"},   {"neq", "≠"},   {"to", "→"},
      {"langle", "⟨"}, {"rangle", "⟩"}, {"notin", "∉"}, {"subseteq", "⊆"}, {"cup", "∪"}, {"cap", "∩"},
  };
  auto it = table.find(cmd);
  if (it == table.end()) return std::nullopt;
  return std::string(it->second);
}

class Compiler {
 public:
  explicit Compiler(const modsys::Scope& scope) : scope_(scope) {}

  TNode compile(const modsys::SymDef& sym) {
    auto cached = done_.find(sym.name);
    if (cached != done_.end()) return cached->second;
    if (std::find(stack_.begin(), stack_.end(), sym.name) != stack_.end()) {
      std::string cycle;
      auto from = std::find(stack_.begin(), stack_.end(), sym.name);
      for (auto it = from; it != stack_.end(); ++it) cycle += *it + " -> ";
      throw Error::at(ErrorKind::Notation, sym.span, "cyclic notation: " + cycle + sym.name);
    }
    stack_.push_back(sym.name);
    std::vector<Token> u = units(sym.body);
    std::size_t b = 0;
    std::size_t e = u.size();
    while (b < e && is_space_unit(u[b])) ++b;
    while (e > b && is_space_unit(u[e - 1])) --e;
    TNode out = row(sequence(u, b, e, sym));
    stack_.pop_back();
    done_.emplace(sym.name, out);
    return out;
  }

 private:
  [[noreturn]] void fail(const modsys::SymDef& sym, const std::string& msg) {
    throw Error::at(ErrorKind::Notation, sym.span, "notation of '" + sym.name + "': " + msg);
  }

  std::size_t group_end(const std::vector<Token>& u, std::size_t b, std::size_t e, const modsys::SymDef& sym) {
    int depth = 0;
    for (std::size_t i = b; i < e; ++i) {
      if (u[i].kind == TokenKind::BeginGroup) ++depth;
      if (u[i].kind == TokenKind::EndGroup && --depth == 0) return i;
    }
    fail(sym, "unbalanced '{'");
  }

  /// Next TeX argument starting at `pos`: [begin, end) of its content.
  std::pair<std::size_t, std::size_t> argument(const std::vector<Token>& u, std::size_t& pos, std::size_t e,
                                               const modsys::SymDef& sym, const std::string& who) {
    while (pos < e && is_space_unit(u[pos])) ++pos;
    if (pos >= e || u[pos].kind == TokenKind::EndGroup) fail(sym, who + " is missing an argument");
    if (u[pos].kind == TokenKind::BeginGroup) {
      std::size_t close = group_end(u, pos, e, sym);
      std::pair<std::size_t, std::size_t> r{pos + 1, close};
      pos = close + 1;
      return r;
    }
    std::size_t start = pos++;
    return {start, pos};
  }

  std::string plain_text(const std::vector<Token>& u, std::size_t b, std::size_t e, const modsys::SymDef& sym) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
      const Token& t = u[i];
      if (t.kind == TokenKind::Text) {
        out += t.lexeme;
      } else if (t.kind == TokenKind::BeginGroup || t.kind == TokenKind::EndGroup) {
        continue;
      } else if (t.kind == TokenKind::Command) {
        std::string name(t.command_name());
        if (name.size() == 1 && std::string("\"'`^~").find(name[0]) != std::string::npos) {
          std::size_t pos = i + 1;
          auto [ab, ae] = argument(u, pos, e, sym, "\\" + name);
          std::string base = plain_text(u, ab, ae, sym);
          std::string first = base.empty() ? "" : std::string(text::codepoints(base)[0]);
          auto acc = text::apply_accent(name[0], first);
          out += acc ? *acc + base.substr(first.size()) : base;
          i = pos - 1;
        } else if (auto w = text::control_word_text(name)) {
          out += *w;
          if (is_control_word(t)) {
            while (i + 1 < e && is_space_unit(u[i + 1])) ++i;
          }
        } else {
          fail(sym, "unsupported command \\" + name + " in text");
        }
      } else {
        out += t.lexeme;
      }
    }
    return out;
  }

  std::vector<TNode> sequence(const std::vector<Token>& u, std::size_t b, std::size_t e, const modsys::SymDef& sym) {
    std::vector<TNode> out;
    std::size_t i = b;
    while (i < e) {
      const Token& t = u[i];
      switch (t.kind) {
        case TokenKind::Parameter: {
          int k = t.parameter_index();
          if (k > sym.arity) fail(sym, "parameter #" + std::to_string(k) + " exceeds arity " + std::to_string(sym.arity));
          TNode s;
          s.kind = TNode::Kind::Slot;
          s.slot = k;
          out.push_back(s);
          ++i;
          break;
        }
        case TokenKind::BeginGroup: {
          std::size_t close = group_end(u, i, e, sym);
          auto inner = sequence(u, i + 1, close, sym);
          if (!inner.empty()) out.push_back(row(std::move(inner)));
          i = close + 1;
          break;
        }
        case TokenKind::EndGroup:
          fail(sym, "unbalanced '}'");
        case TokenKind::Superscript: {
          if (out.empty()) fail(sym, "'^' without a base");
          std::size_t pos = i + 1;
          auto [sb, se] = argument(u, pos, e, sym, "'^'");
          TNode sup;
          sup.kind = TNode::Kind::Sup;
          sup.children.push_back(std::move(out.back()));
          out.pop_back();
          sup.children.push_back(row(sequence(u, sb, se, sym)));
          out.push_back(std::move(sup));
          i = pos;
          break;
        }
        case TokenKind::Command:
          i = command(u, i, e, sym, out);
          break;
        case TokenKind::MathShift:
          ++i;
          break;
        default: {
          if (is_space_unit(t)) {
            while (i < e && is_space_unit(u[i])) ++i;
            out.push_back(leaf(TNode::Kind::Mspace, " "));
          } else if (is_letter_unit(t)) {
            std::string s;
            while (i < e && is_letter_unit(u[i])) s += u[i++].lexeme;
            out.push_back(leaf(TNode::Kind::Mi, s));
          } else if (is_digit_unit(t)) {
            std::string s;
            while (i < e && is_digit_unit(u[i])) s += u[i++].lexeme;
            out.push_back(leaf(TNode::Kind::Mn, s));
          } else if (t.lexeme == "(" || t.lexeme == ")") {
            TNode f = leaf(TNode::Kind::Mo, t.lexeme);
            f.fence = true;
            f.elidable = true;
            out.push_back(f);
            ++i;
          } else {
            std::string s;
            while (i < e && u[i].kind == TokenKind::Text && !is_space_unit(u[i]) && !is_letter_unit(u[i]) &&
                   !is_digit_unit(u[i]) && u[i].lexeme != "(" && u[i].lexeme != ")") {
              s += u[i++].lexeme;
            }
            out.push_back(leaf(TNode::Kind::Mo, s));
          }
        }
      }
    }
    return out;
  }

  /// Handles the command at `i`; returns the index after it and its arguments.
  std::size_t command(const std::vector<Token>& u, std::size_t i, std::size_t e, const modsys::SymDef& sym,
                      std::vector<TNode>& out) {
    const Token& t = u[i];
    std::string name(t.command_name());
    std::size_t pos = i + 1;
    auto skip_space = [&] {
      if (is_control_word(t)) {
        while (pos < e && is_space_unit(u[pos])) ++pos;
      }
    };
    if (name == "mathbb") {
      auto [ab, ae] = argument(u, pos, e, sym, "\\mathbb");
      std::string letter = plain_text(u, ab, ae, sym);
      auto ds = double_struck(letter);
      if (!ds) fail(sym, "no double-struck form for '" + letter + "'");
      out.push_back(leaf(TNode::Kind::Mo, *ds));
      return pos;
    }
    if (name == "text" || name == "mathrm") {
      auto [ab, ae] = argument(u, pos, e, sym, "\\" + name);
      out.push_back(leaf(TNode::Kind::Mtext, plain_text(u, ab, ae, sym)));
      return pos;
    }
    if (auto op = operator_symbol(name)) {
      out.push_back(leaf(TNode::Kind::Mo, *op));
      skip_space();
      return pos;
    }
    if (name == "," || name == "quad" || name == ";") {
      out.push_back(leaf(TNode::Kind::Mspace, " "));
      skip_space();
      return pos;
    }
    const modsys::SymDef* nested = nullptr;
    try {
      nested = scope_.find_command(name);
    } catch (const Error& err) {
      fail(sym, err.message());
    }
    if (!nested) fail(sym, "unsupported command \\" + name);
    TNode tmpl = compile(*nested);
    if (nested->arity == 0) {
      skip_space();
      out.push_back(std::move(tmpl));
      return pos;
    }
    std::vector<TNode> args;
    for (int k = 0; k < nested->arity; ++k) {
      auto [ab, ae] = argument(u, pos, e, sym, "\\" + name);
      args.push_back(row(sequence(u, ab, ae, sym)));
    }
    out.push_back(substitute(tmpl, args));
    return pos;
  }

  static TNode substitute(const TNode& t, const std::vector<TNode>& args) {
    if (t.kind == TNode::Kind::Slot) return args.at(static_cast<std::size_t>(t.slot - 1));
    TNode out = t;
    for (auto& c : out.children) c = substitute(c, args);
    return out;
  }

  const modsys::Scope& scope_;
  std::vector<std::string> stack_;
  std::map<std::string, TNode> done_;
};

}  // namespace

NotationRule compile_notation(const modsys::SymDef& sym, const modsys::Scope& scope) {
  Compiler c(scope);
  NotationRule r;
  r.head = OMS{sym.home, sym.name};
  r.arity = sym.arity;
  r.rendering = c.compile(sym);
  return r;
}

std::optional<std::vector<OMObject>> match_prototype(const NotationRule& rule, const OMObject& obj) {
  if (const auto* s = obj.as<OMS>()) {
    if (rule.arity == 0 && *s == rule.head) return std::vector<OMObject>{};
    return std::nullopt;
  }
  const auto* a = obj.as<content::OMA>();
  if (!a || rule.arity == 0) return std::nullopt;
  const auto* head = a->elems.front().as<OMS>();
  if (!head || !(*head == rule.head)) return std::nullopt;
  if (a->elems.size() != static_cast<std::size_t>(rule.arity) + 1) return std::nullopt;
  return std::vector<OMObject>(a->elems.begin() + 1, a->elems.end());
}

void RuleSet::add(NotationRule rule) {
  auto key = std::make_pair(rule.head.cd, rule.head.name);
  rules_.insert_or_assign(key, std::move(rule));
}

const NotationRule* RuleSet::find(const OMS& head) const {
  auto it = rules_.find({head.cd, head.name});
  return it == rules_.end() ? nullptr : &it->second;
}

RuleSet compile_rules(const modsys::ModuleGraph& graph) {
  RuleSet rules;
  for (const auto& id : graph.modules()) {
    const auto& m = graph.module(id);
    if (m.symdefs.empty()) continue;
    auto scope = modsys::visible_scope(graph, id);
    for (const auto& sd : m.symdefs) rules.add(compile_notation(sd, scope));
  }
  return rules;
}

namespace {

const char* element_name(TNode::Kind k) {
  switch (k) {
    case TNode::Kind::Mi: return "mi";
    case TNode::Kind::Mo: return "mo";
    case TNode::Kind::Mn: return "mn";
    case TNode::Kind::Mtext: return "mtext";
    case TNode::Kind::Mspace: return "mspace";
    case TNode::Kind::Row: return "mrow";
    case TNode::Kind::Sup: return "msup";
    case TNode::Kind::Slot: return "render";
  }
  return "mrow";
}

bool is_token(TNode::Kind k) {
  return k == TNode::Kind::Mi || k == TNode::Kind::Mo || k == TNode::Kind::Mn || k == TNode::Kind::Mtext;
}

}  // namespace

xml::Node template_to_mathml(const TNode& t, const std::string& prefix) {
  xml::Node n = xml::Node::element(t.kind == TNode::Kind::Slot ? "render" : prefix + element_name(t.kind));
  if (t.kind == TNode::Kind::Slot) {
    n.set_attr("name", "arg" + std::to_string(t.slot));
  } else if (t.kind == TNode::Kind::Mspace) {
    n.set_attr("width", "mediummathspace");
  } else if (is_token(t.kind)) {
    n.append_text(t.text);
    if (t.fence) n.set_attr("fence", "true");
  }
  for (const auto& c : t.children) n.append(template_to_mathml(c, prefix));
  return n;
}

namespace {

void strip_ids(xml::Node& n) {
  n.remove_attr("id");
  for (auto& c : n.children) {
    if (c.is_element()) strip_ids(c);
  }
}

class Renderer {
 public:
  Renderer(const RuleSet& rules, const RenderOptions& opts) : rules_(rules), opts_(opts) {}

  std::vector<std::pair<std::string, std::string>> crossrefs;

  /// Returns the presentation; fills `content` with the id-carrying OM element.
  xml::Node render(const OMObject& obj, xml::Node& content) {
    int n = counter_++;
    std::string cid = opts_.id_prefix + ".c" + std::to_string(n);
    std::string pid = opts_.id_prefix + ".p" + std::to_string(n);
    xml::Node pres;
    if (const auto* v = obj.as<content::OMV>()) {
      content = content::to_element(obj);
      pres = token("mi", v->name);
    } else if (const auto* i = obj.as<content::OMI>()) {
      content = content::to_element(obj);
      pres = token("mn", i->value);
    } else if (const auto* s = obj.as<OMS>()) {
      content = content::to_element(obj);
      const NotationRule* rule = rules_.find(*s);
      if (rule && rule->arity == 0) {
        pres = instantiate(rule->rendering, {}, *s);
      } else if (opts_.fallback) {
        pres = symbol_token(token("mi", s->name), *s);
      } else {
        throw Error(ErrorKind::Notation, "no notation for symbol " + s->cd + "#" + s->name);
      }
    } else {
      const auto& a = std::get<content::OMA>(obj.value);
      content = xml::Node::element("OMA");
      std::vector<xml::Node> parts;
      for (const auto& e : a.elems) {
        xml::Node c;
        parts.push_back(render(e, c));
        content.append(std::move(c));
      }
      const auto* head = a.elems.front().as<OMS>();
      const NotationRule* rule = head ? rules_.find(*head) : nullptr;
      if (rule && match_prototype(*rule, obj)) {
        std::vector<xml::Node> args(parts.begin() + 1, parts.end());
        pres = instantiate(rule->rendering, args, *head);
      } else {
        pres = fallback(parts);
      }
    }
    if (pres.attr("id")) {
      xml::Node wrap = xml::Node::element("mrow");
      wrap.append(std::move(pres));
      pres = std::move(wrap);
    }
    pres.set_attr("id", pid);
    pres.set_attr("xref", cid);
    content.set_attr("id", cid);
    crossrefs.emplace_back(pid, cid);
    return pres;
  }

 private:
  static xml::Node token(const char* name, const std::string& text) {
    xml::Node n = xml::Node::element(name);
    n.append_text(text);
    return n;
  }

  xml::Node symbol_token(xml::Node n, const OMS& s) const {
    n.set_attr("data-cd", s.cd);
    n.set_attr("data-name", s.name);
    if (opts_.symbol_uri) n.set_attr("href", opts_.symbol_uri(s));
    return n;
  }

  xml::Node fence(const char* glyph) const {
    xml::Node f = token("mo", glyph);
    f.set_attr("fence", "true");
    f.set_attr("data-elidable", "true");
    return f;
  }

  /// head(arg, arg, ...) with elidable parentheses.
  xml::Node fallback(std::vector<xml::Node>& parts) const {
    xml::Node r = xml::Node::element("mrow");
    r.append(std::move(parts[0]));
    r.append(fence("("));
    for (std::size_t k = 1; k < parts.size(); ++k) {
      if (k > 1) {
        xml::Node sep = token("mo", ",");
        sep.set_attr("separator", "true");
        r.append(std::move(sep));
        xml::Node sp = xml::Node::element("mspace");
        sp.set_attr("width", "mediummathspace");
        r.append(std::move(sp));
      }
      r.append(std::move(parts[k]));
    }
    r.append(fence(")"));
    return r;
  }

  xml::Node instantiate(const TNode& t, const std::vector<xml::Node>& args, const OMS& s) {
    std::vector<bool> used(args.size(), false);
    return build(t, args, used, s);
  }

  xml::Node build(const TNode& t, const std::vector<xml::Node>& args, std::vector<bool>& used, const OMS& s) {
    switch (t.kind) {
      case TNode::Kind::Slot: {
        auto k = static_cast<std::size_t>(t.slot - 1);
        xml::Node copy = args.at(k);
        if (used[k]) {
          strip_ids(copy);
          copy.remove_attr("xref");
        }
        used[k] = true;
        return copy;
      }
      case TNode::Kind::Mspace: {
        xml::Node n = xml::Node::element("mspace");
        n.set_attr("width", "mediummathspace");
        return n;
      }
      case TNode::Kind::Row:
      case TNode::Kind::Sup: {
        xml::Node n = xml::Node::element(element_name(t.kind));
        for (const auto& c : t.children) n.append(build(c, args, used, s));
        return n;
      }
      default: {
        xml::Node n = token(element_name(t.kind), t.text);
        if (t.fence) {
          n.set_attr("fence", "true");
          if (t.elidable) n.set_attr("data-elidable", "true");
        }
        return symbol_token(std::move(n), s);
      }
    }
  }

  const RuleSet& rules_;
  const RenderOptions& opts_;
  int counter_ = 0;
};

}  // namespace

RenderedFormula render_object(const OMObject& obj, const RuleSet& rules, const RenderOptions& opts) {
  Renderer r(rules, opts);
  xml::Node content;
  xml::Node pres = r.render(obj, content);
  xml::Node omobj = xml::Node::element("OMOBJ");
  omobj.set_attr("xmlns", content::kOpenMathNs);
  omobj.append(std::move(content));
  xml::Node ann = xml::Node::element("annotation-xml");
  ann.set_attr("encoding", "OpenMath");
  ann.append(std::move(omobj));
  xml::Node sem = xml::Node::element("semantics");
  sem.append(std::move(pres));
  sem.append(std::move(ann));
  xml::Node math = xml::Node::element("math");
  math.set_attr("xmlns", kMathMlNs);
  math.append(std::move(sem));
  return RenderedFormula{std::move(math), obj, std::move(r.crossrefs)};
}

const xml::Node& presentation_of(const xml::Node& math) {
  const xml::Node* sem = math.first_child("semantics");
  if (!sem) throw Error(ErrorKind::Notation, "math element without semantics");
  auto kids = sem->child_elements();
  if (kids.empty()) throw Error(ErrorKind::Notation, "semantics element without presentation");
  return *kids[0];
}

content::OMObject annotation_of(const xml::Node& math) {
  const xml::Node* sem = math.first_child("semantics");
  const xml::Node* ann = sem ? sem->first_child("annotation-xml") : nullptr;
  const xml::Node* om = ann ? ann->first_child("OMOBJ") : nullptr;
  if (!om) throw Error(ErrorKind::Notation, "math element without an OpenMath annotation");
  return content::from_openmath(*om);
}

namespace {

std::string local_name(const std::string& n) {
  auto colon = n.find(':');
  return colon == std::string::npos ? n : n.substr(colon + 1);
}

void linearize_into(const xml::Node& n, std::string& out) {
  if (n.is_text()) {
    out += n.text;
    return;
  }
  std::string name = local_name(n.name);
  if (name == "annotation-xml" || name == "annotation") return;
  if (name == "mspace") {
    out += ' ';
    return;
  }
  if (name == "msup") {
    auto kids = n.child_elements();
    if (kids.size() == 2) {
      linearize_into(*kids[0], out);
      std::string script;
      linearize_into(*kids[1], script);
      auto sup = text::to_superscript(script);
      out += sup ? *sup : "^" + script;
      return;
    }
  }
  for (const auto& c : n.children) linearize_into(c, out);
}

}  // namespace

std::string linearize(const xml::Node& math) {
  std::string out;
  linearize_into(math, out);
  return out;
}

}  // namespace semtex::notation
