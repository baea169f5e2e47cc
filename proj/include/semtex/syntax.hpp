#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semtex/diagnostics.hpp"

namespace semtex::syntax {

enum class TokenKind {
  Command,     // `\name` or a control symbol such as `\{`
  BeginGroup,  // {
  EndGroup,    // }
  BeginOpt,    // [
  EndOpt,      // ]
  MathShift,   // $
  Superscript, // ^
  Parameter,   // #1 .. #9
  Text,        // maximal run of ordinary characters
  Comment,     // % to end of line, newline excluded
};

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Text;
  std::string lexeme;
  SourceSpan span;

  /// Command name without the backslash.
  std::string_view command_name() const { return std::string_view(lexeme).substr(1); }
  /// Parameter index 1..9.
  int parameter_index() const { return lexeme[1] - '0'; }
};

/// Kind and lexeme only; spans are positional metadata.
bool operator==(const Token& a, const Token& b);

/// Lossless tokenizer: the lexemes of the result concatenate to `source`.
/// Throws on invalid UTF-8, a trailing backslash, or `#` not followed by 1..9.
std::vector<Token> tokenize(std::string_view source, std::string_view origin = "<input>");

/// Tokens with comments removed and adjacent text runs merged.
std::vector<Token> significant(const std::vector<Token>& tokens);

struct Node;
using NodeList = std::vector<Node>;

/// `$...$` contents. Tokens exclude comments.
struct MathGroup {
  std::vector<Token> tokens;
  SourceSpan span;
};
bool operator==(const MathGroup& a, const MathGroup& b);

struct KeyVal {
  std::string key;
  std::variant<std::monostate, std::string, MathGroup> value;  // monostate = bare key

  bool bare() const { return std::holds_alternative<std::monostate>(value); }
  const std::string* text() const { return std::get_if<std::string>(&value); }
  const MathGroup* math() const { return std::get_if<MathGroup>(&value); }
};
bool operator==(const KeyVal& a, const KeyVal& b);

struct KeyValList {
  std::vector<KeyVal> pairs;
  /// Source text between the brackets when parsed; reused by the printer so
  /// that re-tokenizing printed sources reproduces the original tokens.
  std::optional<std::string> raw;
  SourceSpan span;

  bool empty() const { return pairs.empty(); }
  const KeyVal* find(std::string_view key) const;
  /// Value of a string-valued key, or nullopt.
  std::optional<std::string> text(std::string_view key) const;
};
/// Compares pairs only.
bool operator==(const KeyValList& a, const KeyValList& b);

struct Command {
  std::string name;
  std::optional<KeyValList> opts;
  std::vector<NodeList> args;
};

struct Environment {
  std::string name;
  std::optional<KeyValList> opts;
  NodeList body;
};

struct Group {
  NodeList children;
};

/// Raw source characters (not unescaped); may contain `#n`, `^`, `[`, `]`.
struct Text {
  std::string text;
};

struct Node {
  std::variant<Command, Environment, MathGroup, Group, Text> value;
  SourceSpan span;

  template <class T>
  const T* as() const { return std::get_if<T>(&value); }
  template <class T>
  T* as() { return std::get_if<T>(&value); }
};

bool operator==(const Command& a, const Command& b);
bool operator==(const Environment& a, const Environment& b);
bool operator==(const Group& a, const Group& b);
bool operator==(const Text& a, const Text& b);
/// Structural equality; spans are ignored.
bool operator==(const Node& a, const Node& b);

struct DocumentAST {
  std::string origin;
  NodeList nodes;
};
bool operator==(const DocumentAST& a, const DocumentAST& b);

/// Where a command's optional `[...]` argument sits and how many braced
/// arguments it takes. Opaque commands greedily take adjacent groups.
struct CommandSignature {
  int opt_position = 0;  // number of mandatory args before the optional one
  int arity = 0;
  bool known = false;
};
CommandSignature signature_of(std::string_view command);

DocumentAST parse_document(std::string_view source, std::string_view origin = "<input>");

/// Parses option text (without brackets). `base` positions spans inside a file.
KeyValList parse_keyvals(std::string_view raw, const SourceSpan& base = {});

std::string print_keyvals(const KeyValList& kvs);
std::string print_nodes(const NodeList& nodes);
std::string print_ast(const DocumentAST& ast);

}  // namespace semtex::syntax
