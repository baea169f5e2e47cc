#include "semtex/syntax.hpp"

#include <algorithm>
#include <set>

#include "semtex/text.hpp"

namespace semtex::syntax {

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Command: return "command";
    case TokenKind::BeginGroup: return "begin-group";
    case TokenKind::EndGroup: return "end-group";
    case TokenKind::BeginOpt: return "begin-opt";
    case TokenKind::EndOpt: return "end-opt";
    case TokenKind::MathShift: return "math-shift";
    case TokenKind::Superscript: return "superscript";
    case TokenKind::Parameter: return "parameter";
    case TokenKind::Text: return "text";
    case TokenKind::Comment: return "comment";
  }
  return "?";
}

bool operator==(const Token& a, const Token& b) {
  return a.kind == b.kind && a.lexeme == b.lexeme;
}

namespace {

bool is_special(char c) {
  switch (c) {
    case '\\': case '{': case '}': case '[': case ']': case '$': case '^': case '#': case '%':
      return true;
    default:
      return false;
  }
}

/// Tracks line/column while scanning a buffer.
class Cursor {
 public:
  Cursor(std::string_view src, std::string file, std::size_t offset = 0, std::size_t line = 1,
         std::size_t column = 1)
      : src_(src), file_(std::move(file)), offset_(offset), line_(line), column_(column) {}

  SourceSpan span_of(std::size_t begin, std::size_t end) {
    advance_to(begin);
    return SourceSpan{file_, offset_ + begin, offset_ + end, line_, column_};
  }

 private:
  void advance_to(std::size_t pos) {
    if (pos < at_) {
      at_ = 0;
      line_ = line0_;
      column_ = column0_;
    }
    for (; at_ < pos && at_ < src_.size(); ++at_) {
      if (src_[at_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
  std::size_t line0_ = line_;
  std::size_t column0_ = column_;
  std::size_t at_ = 0;
};

std::vector<Token> tokenize_at(std::string_view src, Cursor& cur) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.push_back(Token{kind, std::string(src.substr(begin, end - begin)), cur.span_of(begin, end)});
  };
  while (i < src.size()) {
    char c = src[i];
    std::size_t start = i;
    switch (c) {
      case '\\': {
        if (i + 1 >= src.size()) {
          throw Error::at(ErrorKind::Syntax, cur.span_of(i, i + 1), "trailing backslash at end of input");
        }
        if (text::is_ascii_letter(src[i + 1])) {
          i += 2;
          while (i < src.size() && text::is_ascii_letter(src[i])) ++i;
        } else {
          std::size_t len = text::utf8_length(static_cast<unsigned char>(src[i + 1]));
          i += 1 + std::max<std::size_t>(len, 1);
        }
        push(TokenKind::Command, start, i);
        break;
      }
      case '{': push(TokenKind::BeginGroup, i, i + 1); ++i; break;
      case '}': push(TokenKind::EndGroup, i, i + 1); ++i; break;
      case '[': push(TokenKind::BeginOpt, i, i + 1); ++i; break;
      case ']': push(TokenKind::EndOpt, i, i + 1); ++i; break;
      case '$': push(TokenKind::MathShift, i, i + 1); ++i; break;
      case '^': push(TokenKind::Superscript, i, i + 1); ++i; break;
      case '#': {
        if (i + 1 >= src.size() || src[i + 1] < '1' || src[i + 1] > '9') {
          throw Error::at(ErrorKind::Syntax, cur.span_of(i, i + 1),
                          "parameter marker '#' must be followed by a digit 1-9");
        }
        push(TokenKind::Parameter, i, i + 2);
        i += 2;
        break;
      }
      case '%': {
        while (i < src.size() && src[i] != '\n') ++i;
        push(TokenKind::Comment, start, i);
        break;
      }
      default: {
        while (i < src.size() && !is_special(src[i])) ++i;
        push(TokenKind::Text, start, i);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::string_view origin) {
  Cursor cur(source, std::string(origin));
  if (auto bad = text::find_invalid_utf8(source)) {
    throw Error::at(ErrorKind::Encoding, cur.span_of(*bad, *bad + 1), "input is not valid UTF-8");
  }
  return tokenize_at(source, cur);
}

std::vector<Token> significant(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Comment) continue;
    if (t.kind == TokenKind::Text && !out.empty() && out.back().kind == TokenKind::Text) {
      out.back().lexeme += t.lexeme;
      out.back().span.end = t.span.end;
      continue;
    }
    out.push_back(t);
  }
  return out;
}

bool operator==(const MathGroup& a, const MathGroup& b) { return a.tokens == b.tokens; }

bool operator==(const KeyVal& a, const KeyVal& b) {
  return a.key == b.key && a.value == b.value;
}

bool operator==(const KeyValList& a, const KeyValList& b) { return a.pairs == b.pairs; }

const KeyVal* KeyValList::find(std::string_view key) const {
  for (const auto& kv : pairs) {
    if (kv.key == key) return &kv;
  }
  return nullptr;
}

std::optional<std::string> KeyValList::text(std::string_view key) const {
  const KeyVal* kv = find(key);
  if (!kv || !kv->text()) return std::nullopt;
  return *kv->text();
}

bool operator==(const Command& a, const Command& b) {
  return a.name == b.name && a.opts == b.opts && a.args == b.args;
}
bool operator==(const Environment& a, const Environment& b) {
  return a.name == b.name && a.opts == b.opts && a.body == b.body;
}
bool operator==(const Group& a, const Group& b) { return a.children == b.children; }
bool operator==(const Text& a, const Text& b) { return a.text == b.text; }
bool operator==(const Node& a, const Node& b) { return a.value == b.value; }
bool operator==(const DocumentAST& a, const DocumentAST& b) { return a.nodes == b.nodes; }

CommandSignature signature_of(std::string_view command) {
  if (command == "symdef") return {1, 2, true};
  if (command == "keydef") return {0, 2, true};
  if (command == "importmodule" || command == "metalanguage") return {0, 1, true};
  if (command == "definiendum") return {0, 1, true};
  return {0, 0, false};
}

// ---------------------------------------------------------------------------
// keyvals

namespace {

struct Piece {
  std::size_t begin;
  std::size_t end;
};

/// Splits at depth-0 commas outside math, honouring backslash escapes.
std::vector<Piece> split_pairs(std::string_view raw, Cursor& cur) {
  std::vector<Piece> pieces;
  int depth = 0;
  bool in_math = false;
  std::size_t math_start = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\') {
      ++i;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') {
      if (--depth < 0) throw Error::at(ErrorKind::Keyval, cur.span_of(i, i + 1), "unbalanced '}' in options");
    }
    if (c == '$') {
      in_math = !in_math;
      math_start = i;
    }
    if (c == ',' && depth == 0 && !in_math) {
      pieces.push_back({start, i});
      start = i + 1;
    }
  }
  if (in_math) throw Error::at(ErrorKind::Keyval, cur.span_of(math_start, math_start + 1), "unterminated math in option value");
  if (depth != 0) throw Error::at(ErrorKind::Keyval, cur.span_of(start, raw.size()), "unterminated '{' in options");
  pieces.push_back({start, raw.size()});
  return pieces;
}

std::size_t find_top_level_eq(std::string_view s) {
  int depth = 0;
  bool in_math = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      ++i;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == '$') in_math = !in_math;
    if (c == '=' && depth == 0 && !in_math) return i;
  }
  return std::string_view::npos;
}

/// True when `s` is `{...}` with the outer braces matching each other.
bool wrapped_in_braces(std::string_view s) {
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') return false;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0 && i + 1 != s.size()) return false;
  }
  return true;
}

/// True when `s` is exactly one `$...$` group.
bool single_math_group(std::string_view s) {
  if (s.size() < 2 || s.front() != '$' || s.back() != '$') return false;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '$') return false;
  }
  return true;
}

std::size_t skip_leading_space(std::string_view raw, std::size_t b, std::size_t e) {
  while (b < e && text::is_space(raw[b])) ++b;
  return b;
}
std::size_t skip_trailing_space(std::string_view raw, std::size_t b, std::size_t e) {
  while (e > b && text::is_space(raw[e - 1])) --e;
  return e;
}

KeyValList parse_keyvals_at(std::string_view raw, const SourceSpan& base) {
  Cursor cur(raw, base.file, base.begin, base.line, base.column);
  KeyValList out;
  out.raw = std::string(raw);
  out.span = base;
  std::set<std::string> seen;
  for (const Piece& p : split_pairs(raw, cur)) {
    std::size_t b = skip_leading_space(raw, p.begin, p.end);
    std::size_t e = skip_trailing_space(raw, b, p.end);
    if (b == e) continue;
    std::string_view piece = raw.substr(b, e - b);
    std::size_t eq = find_top_level_eq(piece);
    KeyVal kv;
    if (eq == std::string_view::npos) {
      kv.key = std::string(piece);
    } else {
      kv.key = text::trim(piece.substr(0, eq));
      std::size_t vb = skip_leading_space(raw, b + eq + 1, e);
      std::string_view value = raw.substr(vb, e - vb);
      if (single_math_group(value)) {
        Cursor inner(raw, base.file, base.begin, base.line, base.column);
        SourceSpan at = inner.span_of(vb + 1, e - 1);
        Cursor math_cur(value.substr(1, value.size() - 2), base.file, at.begin, at.line, at.column);
        MathGroup mg;
        mg.tokens = significant(tokenize_at(value.substr(1, value.size() - 2), math_cur));
        mg.span = inner.span_of(vb, e);
        kv.value = std::move(mg);
      } else if (wrapped_in_braces(value)) {
        kv.value = std::string(value.substr(1, value.size() - 2));
      } else {
        kv.value = std::string(value);
      }
    }
    if (kv.key.empty()) throw Error::at(ErrorKind::Keyval, cur.span_of(b, e), "empty key in options");
    if (!seen.insert(kv.key).second) {
      throw Error::at(ErrorKind::Keyval, cur.span_of(b, e), "duplicate key '" + kv.key + "'");
    }
    out.pairs.push_back(std::move(kv));
  }
  return out;
}

}  // namespace

KeyValList parse_keyvals(std::string_view raw, const SourceSpan& base) {
  if (auto bad = text::find_invalid_utf8(raw)) {
    Cursor cur(raw, base.file, base.begin, base.line, base.column);
    throw Error::at(ErrorKind::Encoding, cur.span_of(*bad, *bad + 1), "option text is not valid UTF-8");
  }
  return parse_keyvals_at(raw, base);
}

// ---------------------------------------------------------------------------
// parser

namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end = b.end;
  return s;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodeList parse_top() {
    NodeList nodes = parse_list(Stop::Eof, {});
    return nodes;
  }

 private:
  enum class Stop { Eof, Group, Environment };

  bool eof() const { return pos_ >= toks_.size(); }
  const Token& peek() const { return toks_[pos_]; }
  bool next_is(TokenKind k) const { return !eof() && toks_[pos_].kind == k; }

  SourceSpan end_span() const {
    if (toks_.empty()) return {};
    const Token& last = toks_.back();
    SourceSpan s = last.span;
    s.begin = s.end;
    for (auto cp : text::codepoints(last.lexeme)) {
      if (cp == "\n") {
        ++s.line;
        s.column = 1;
      } else {
        ++s.column;
      }
    }
    return s;
  }

  static void append_text(NodeList& nodes, const Token& t) {
    if (!nodes.empty()) {
      if (auto* txt = nodes.back().as<Text>()) {
        txt->text += t.lexeme;
        nodes.back().span.end = t.span.end;
        return;
      }
    }
    nodes.push_back(Node{Text{t.lexeme}, t.span});
  }

  NodeList parse_list(Stop stop, const Token* opener) {
    NodeList nodes;
    while (!eof()) {
      const Token& t = peek();
      switch (t.kind) {
        case TokenKind::EndGroup:
          if (stop == Stop::Group) return nodes;
          throw Error::at(ErrorKind::Syntax, t.span, "unbalanced '}'");
        case TokenKind::BeginGroup: {
          Node g = parse_group();
          nodes.push_back(std::move(g));
          break;
        }
        case TokenKind::MathShift:
          nodes.push_back(parse_math());
          break;
        case TokenKind::Command: {
          if (t.command_name() == "end") {
            if (stop == Stop::Environment) return nodes;
            std::string name = peek_env_name(pos_);
            throw Error::at(ErrorKind::Syntax, t.span, "\\end{" + name + "} without matching \\begin");
          }
          if (t.command_name() == "begin") {
            nodes.push_back(parse_environment());
          } else {
            nodes.push_back(parse_command());
          }
          break;
        }
        case TokenKind::Comment:
          ++pos_;
          break;
        default:
          append_text(nodes, t);
          ++pos_;
      }
    }
    if (stop == Stop::Group) throw Error::at(ErrorKind::Syntax, opener->span, "unbalanced '{': group is never closed");
    if (stop == Stop::Environment) {
      throw Error::at(ErrorKind::Syntax, opener->span, "environment is never closed with \\end");
    }
    return nodes;
  }

  Node parse_group() {
    const Token& open = peek();
    std::size_t open_idx = pos_;
    ++pos_;
    NodeList children = parse_list(Stop::Group, &toks_[open_idx]);
    SourceSpan span = join(open.span, peek().span);
    ++pos_;  // '}'
    return Node{Group{std::move(children)}, span};
  }

  Node parse_math() {
    std::size_t open_idx = pos_;
    ++pos_;
    MathGroup mg;
    int depth = 0;
    while (true) {
      if (eof()) throw Error::at(ErrorKind::Syntax, toks_[open_idx].span, "unterminated math: missing closing '$'");
      const Token& t = peek();
      if (t.kind == TokenKind::MathShift) {
        if (depth != 0) throw Error::at(ErrorKind::Syntax, t.span, "unbalanced braces inside math");
        break;
      }
      if (t.kind == TokenKind::BeginGroup) ++depth;
      if (t.kind == TokenKind::EndGroup && --depth < 0) {
        throw Error::at(ErrorKind::Syntax, t.span, "unbalanced '}' inside math");
      }
      if (t.kind != TokenKind::Comment) mg.tokens.push_back(t);
      ++pos_;
    }
    mg.tokens = significant(mg.tokens);
    mg.span = join(toks_[open_idx].span, peek().span);
    SourceSpan span = mg.span;
    ++pos_;
    return Node{std::move(mg), span};
  }

  /// Reads `[...]` starting at the current BeginOpt token.
  KeyValList parse_opts() {
    const Token& open = peek();
    ++pos_;
    std::string raw;
    int depth = 0;
    bool in_math = false;
    SourceSpan inner = open.span;
    inner.begin = open.span.end;
    inner.column += 1;
    while (true) {
      if (eof()) throw Error::at(ErrorKind::Syntax, open.span, "unterminated '[': options never closed");
      const Token& t = peek();
      if (t.kind == TokenKind::EndOpt && depth == 0 && !in_math) break;
      if (t.kind == TokenKind::BeginGroup) ++depth;
      if (t.kind == TokenKind::EndGroup && --depth < 0) throw Error::at(ErrorKind::Syntax, t.span, "unbalanced '}' in options");
      if (t.kind == TokenKind::MathShift) in_math = !in_math;
      if (t.kind != TokenKind::Comment) raw += t.lexeme;
      ++pos_;
    }
    inner.end = peek().span.begin;
    ++pos_;  // ']'
    // Comments were dropped from `raw`, so positions inside are approximate
    // only when comments occur in option lists.
    return parse_keyvals(raw, inner);
  }

  NodeList parse_required_arg(const Token& cmd, int index) {
    if (!next_is(TokenKind::BeginGroup)) {
      SourceSpan at = eof() ? end_span() : peek().span;
      throw Error::at(ErrorKind::Syntax, at,
                      "\\" + std::string(cmd.command_name()) + " expects a braced argument #" + std::to_string(index + 1));
    }
    Node g = parse_group();
    return std::move(std::get<Group>(g.value).children);
  }

  Node parse_command() {
    const Token cmd = peek();
    ++pos_;
    Command c;
    c.name = std::string(cmd.command_name());
    CommandSignature sig = signature_of(c.name);
    SourceSpan span = cmd.span;
    if (sig.known) {
      for (int i = 0; i <= sig.arity; ++i) {
        if (i == sig.opt_position && next_is(TokenKind::BeginOpt)) c.opts = parse_opts();
        if (i == sig.arity) break;
        c.args.push_back(parse_required_arg(cmd, i));
      }
    } else {
      if (next_is(TokenKind::BeginOpt)) c.opts = parse_opts();
      while (next_is(TokenKind::BeginGroup)) {
        Node g = parse_group();
        c.args.push_back(std::move(std::get<Group>(g.value).children));
      }
    }
    if (pos_ > 0) span = join(cmd.span, toks_[pos_ - 1].span);
    return Node{std::move(c), span};
  }

  /// Reads `{name}` after \begin or \end at token index `at`.
  std::string peek_env_name(std::size_t at) const {
    if (at + 3 < toks_.size() && toks_[at + 1].kind == TokenKind::BeginGroup &&
        toks_[at + 2].kind == TokenKind::Text && toks_[at + 3].kind == TokenKind::EndGroup) {
      return toks_[at + 2].lexeme;
    }
    return "";
  }

  std::string read_env_name(const Token& cmd) {
    std::string name = peek_env_name(pos_);
    if (name.empty() || text::trim(name) != name) {
      throw Error::at(ErrorKind::Syntax, cmd.span,
                      "\\" + std::string(cmd.command_name()) + " must be followed by {environment-name}");
    }
    pos_ += 4;
    return name;
  }

  Node parse_environment() {
    const Token begin = peek();
    std::size_t begin_idx = pos_;
    Environment env;
    env.name = read_env_name(begin);
    if (next_is(TokenKind::BeginOpt)) env.opts = parse_opts();
    env.body = parse_list(Stop::Environment, &toks_[begin_idx]);
    const Token end = peek();
    std::string end_name = peek_env_name(pos_);
    if (end_name != env.name) {
      throw Error::at(ErrorKind::Syntax, end.span,
                      "\\end{" + end_name + "} does not match \\begin{" + env.name + "} at " + begin.span.location());
    }
    pos_ += 4;
    return Node{std::move(env), join(begin.span, toks_[pos_ - 1].span)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

DocumentAST parse_document(std::string_view source, std::string_view origin) {
  DocumentAST ast;
  ast.origin = std::string(origin);
  Parser p(tokenize(source, origin));
  ast.nodes = p.parse_top();
  return ast;
}

// ---------------------------------------------------------------------------
// printer

namespace {

bool needs_protection(std::string_view v) {
  if (v.empty()) return false;
  if (text::is_space(v.front()) || text::is_space(v.back())) return true;
  return v.find_first_of(",={}$[]") != std::string_view::npos;
}

void print_into(const NodeList& nodes, std::string& out);

void print_node(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Text>) {
          out += v.text;
        } else if constexpr (std::is_same_v<T, Group>) {
          out += '{';
          print_into(v.children, out);
          out += '}';
        } else if constexpr (std::is_same_v<T, MathGroup>) {
          out += '$';
          for (const auto& t : v.tokens) out += t.lexeme;
          out += '$';
        } else if constexpr (std::is_same_v<T, Command>) {
          out += '\\';
          out += v.name;
          CommandSignature sig = signature_of(v.name);
          for (std::size_t i = 0; i <= v.args.size(); ++i) {
            if (v.opts && static_cast<int>(i) == sig.opt_position) {
              out += '[' + print_keyvals(*v.opts) + ']';
            }
            if (i == v.args.size()) break;
            out += '{';
            print_into(v.args[i], out);
            out += '}';
          }
        } else if constexpr (std::is_same_v<T, Environment>) {
          out += "\\begin{" + v.name + "}";
          if (v.opts) out += '[' + print_keyvals(*v.opts) + ']';
          print_into(v.body, out);
          out += "\\end{" + v.name + "}";
        }
      },
      n.value);
}

void print_into(const NodeList& nodes, std::string& out) {
  for (const auto& n : nodes) print_node(n, out);
}

}  // namespace

std::string print_keyvals(const KeyValList& kvs) {
  if (kvs.raw) return *kvs.raw;
  std::string out;
  bool first = true;
  for (const auto& kv : kvs.pairs) {
    if (!first) out += ',';
    first = false;
    out += kv.key;
    if (const auto* s = kv.text()) {
      out += '=';
      out += needs_protection(*s) || (!s->empty() && s->front() == '{') ? "{" + *s + "}" : *s;
    } else if (const auto* m = kv.math()) {
      out += "=$";
      for (const auto& t : m->tokens) out += t.lexeme;
      out += '$';
    }
  }
  return out;
}

std::string print_nodes(const NodeList& nodes) {
  std::string out;
  print_into(nodes, out);
  return out;
}

std::string print_ast(const DocumentAST& ast) { return print_nodes(ast.nodes); }

}  // namespace semtex::syntax
