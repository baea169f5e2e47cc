#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "semtex/diagnostics.hpp"
#include "semtex/syntax.hpp"

using namespace semtex;
using namespace semtex::syntax;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Node text(std::string s) { return Node{Text{std::move(s)}, {}}; }

std::string concat(const std::vector<Token>& toks) {
  std::string out;
  for (const auto& t : toks) out += t.lexeme;
  return out;
}

const char* kRealsSource =
    "\\begin{module}[id=reals]\n"
    "  \\importmodule[../background/sets]{sets}\n"
    "  \\symdef{Reals}{\\mathbb{R}}\n"
    "  \\symdef{greater}[2]{#1>#2}\n"
    "  \\symdef{positiveReals}{\\Reals^+}\n"
    "  \\begin{definition}[id=posreals.def,\n"
    "   title=Positive Real Numbers]\n"
    "    $\\defeq\\positiveReals\n"
    "             {\\setst{\\inset{x}\\Reals}{\\greater{x}0}}$\n"
    "  \\end{definition}\n"
    "  \\ldots\n"
    "\\end{module}\n";

// ---------------------------------------------------------------------------
// Random canonical ASTs. Constraints keep every generated tree in the image
// of the parser, e.g. no adjacent Text nodes and no Group right after an
// opaque command (it would be taken as an argument).

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  std::string text_piece() {
    static const char* pieces[] = {"ab", "Real", " ", "\n", "x", "0", "#1", "#2", "^",
                                   "[", "]", "é", ".", ",", ":=", "ℝ", "  "};
    return pieces[pick(17)];
  }

  std::string math_source() {
    static const char* maths[] = {"x", "\\greater{x}0", "a^2", "", " y ", "#1>#2",
                                  "\\defeq\\positiveReals{\\setst{\\inset{x}\\Reals}{\\greater{x}0}}",
                                  "\\statedocrd{\\tuev}", "{a}{b}", "\\{x\\mid y\\}"};
    return maths[pick(10)];
  }

  MathGroup math() {
    MathGroup m;
    m.tokens = significant(tokenize(math_source()));
    return m;
  }

  KeyValList opts() {
    static const char* keys[] = {"id", "for", "title", "2", "hasState", "x-y"};
    static const char* values[] = {"reals", "Positive Real Numbers", "a,b", "", "{x}", "a=b",
                                   "[x]", "posreals.def", "T{\\\"U}V"};
    KeyValList kvs;
    int n = pick(4);
    std::vector<int> order = {0, 1, 2, 3, 4, 5};
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < n; ++i) {
      KeyVal kv;
      kv.key = keys[order[i]];
      switch (pick(3)) {
        case 0: break;
        case 1: kv.value = std::string(values[pick(9)]); break;
        default: kv.value = math();
      }
      kvs.pairs.push_back(std::move(kv));
    }
    return kvs;
  }

  static bool letters_only(const std::string& s) {
    for (char c : s) {
      if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
    }
    return !s.empty();
  }

  /// Would text starting with `first` be absorbed by or merged into `prev`?
  static bool text_allowed_after(const Node* prev, char first, bool env_start_without_opts) {
    if (env_start_without_opts && first == '[') return false;
    if (!prev) return true;
    if (prev->as<Text>()) return false;
    if (const auto* c = prev->as<Command>()) {
      bool bare = c->args.empty() && !c->opts;
      if (bare && first == '[') return false;
      bool letter = (first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z');
      if (bare && letters_only(c->name) && letter) return false;
    }
    return true;
  }

  static bool group_allowed_after(const Node* prev) {
    if (!prev) return true;
    if (const auto* c = prev->as<Command>()) return signature_of(c->name).known;
    return true;
  }

  Command opaque_command(int depth) {
    static const char* names[] = {"foo", "emph", "mathbb", "ldots", "\"", ",", "{", "Reals"};
    Command c;
    c.name = names[pick(8)];
    if (pick(4) == 0) c.opts = opts();
    int n = pick(3);
    for (int i = 0; i < n; ++i) c.args.push_back(list(depth - 1, false));
    return c;
  }

  Command known_command(int depth) {
    static const char* names[] = {"symdef", "keydef", "importmodule", "metalanguage", "definiendum"};
    Command c;
    c.name = names[pick(5)];
    if (pick(2)) c.opts = opts();
    for (int i = 0; i < signature_of(c.name).arity; ++i) c.args.push_back(list(depth - 1, false));
    return c;
  }

  Environment environment(int depth) {
    static const char* names[] = {"module", "definition", "document", "foo"};
    Environment e;
    e.name = names[pick(4)];
    if (pick(2)) e.opts = opts();
    e.body = list(depth - 1, !e.opts);
    return e;
  }

  NodeList list(int depth, bool env_start_without_opts) {
    NodeList out;
    int n = pick(5);
    for (int i = 0; i < n; ++i) {
      const Node* prev = out.empty() ? nullptr : &out.back();
      bool at_env_start = env_start_without_opts && out.empty();
      int kind = pick(depth > 0 ? 6 : 3);
      if (kind == 0) {
        std::string s;
        int pieces = 1 + pick(3);
        for (int k = 0; k < pieces; ++k) s += text_piece();
        if (!text_allowed_after(prev, s[0], at_env_start)) continue;
        out.push_back(text(s));
      } else if (kind == 1) {
        out.push_back(Node{math(), {}});
      } else if (kind == 2) {
        out.push_back(Node{opaque_command(depth), {}});
      } else if (kind == 3) {
        if (!group_allowed_after(prev)) continue;
        out.push_back(Node{Group{list(depth - 1, false)}, {}});
      } else if (kind == 4) {
        out.push_back(Node{known_command(depth), {}});
      } else {
        out.push_back(Node{environment(depth), {}});
      }
    }
    return out;
  }
};

}  // namespace

TEST_SUITE("syntax") {

TEST_CASE("empty input parses to an empty list") {
  CHECK(parse_document("").nodes.empty());
  CHECK(tokenize("").empty());
}

TEST_CASE("symdef with an argument-taking body") {
  auto ast = parse_document("\\symdef{Reals}{\\mathbb{R}}");
  REQUIRE(ast.nodes.size() == 1);
  const auto* c = ast.nodes[0].as<Command>();
  REQUIRE(c);
  CHECK(c->name == "symdef");
  CHECK_FALSE(c->opts);
  REQUIRE(c->args.size() == 2);
  CHECK(c->args[0] == NodeList{text("Reals")});
  Command inner{"mathbb", std::nullopt, {NodeList{text("R")}}};
  CHECK(c->args[1] == NodeList{Node{inner, {}}});
}

TEST_CASE("symdef options sit between name and body") {
  auto ast = parse_document("\\symdef{greater}[2]{#1>#2}");
  const auto* c = ast.nodes.at(0).as<Command>();
  REQUIRE(c);
  REQUIRE(c->opts);
  REQUIRE(c->opts->pairs.size() == 1);
  CHECK(c->opts->pairs[0].key == "2");
  CHECK(c->opts->pairs[0].bare());
  CHECK(c->args.at(1) == NodeList{text("#1>#2")});
}

TEST_CASE("math content keeps its significant tokens") {
  auto ast = parse_document("$\\greater{x}0$");
  const auto* m = ast.nodes.at(0).as<MathGroup>();
  REQUIRE(m);
  CHECK(concat(m->tokens) == "\\greater{x}0");
  REQUIRE(m->tokens.size() == 5);
  CHECK(m->tokens[0].kind == TokenKind::Command);
  CHECK(m->tokens[4].lexeme == "0");
}

TEST_CASE("environment with options spanning a line break") {
  auto ast = parse_document(kRealsSource);
  REQUIRE(ast.nodes.size() == 2);  // module, trailing newline
  const auto* mod = ast.nodes[0].as<Environment>();
  REQUIRE(mod);
  CHECK(mod->name == "module");
  CHECK(mod->opts->text("id") == "reals");
  const Environment* def = nullptr;
  for (const auto& n : mod->body) {
    if (const auto* e = n.as<Environment>()) def = e;
  }
  REQUIRE(def);
  CHECK(def->opts->text("id") == "posreals.def");
  CHECK(def->opts->text("title") == "Positive Real Numbers");
}

TEST_CASE("keyval parsing") {
  SUBCASE("plain, bare and braced values") {
    auto kv = parse_keyvals("id=reals, 2 ,title={a, b}");
    REQUIRE(kv.pairs.size() == 3);
    CHECK(kv.text("id") == "reals");
    CHECK(kv.pairs[1].key == "2");
    CHECK(kv.pairs[1].bare());
    CHECK(kv.text("title") == "a, b");
  }
  SUBCASE("math value") {
    auto kv = parse_keyvals("hasState=$\\statedocrd{\\tuev}$");
    REQUIRE(kv.pairs.size() == 1);
    const auto* m = kv.pairs[0].math();
    REQUIRE(m);
    CHECK(concat(m->tokens) == "\\statedocrd{\\tuev}");
  }
  SUBCASE("commas inside math do not split") {
    auto kv = parse_keyvals("a=$f{x,y}$,b=c");
    CHECK(kv.pairs.size() == 2);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_keyvals("a=1,a=2"), Error);
    CHECK_THROWS_AS(parse_keyvals("=x"), Error);
    CHECK_THROWS_AS(parse_keyvals("a=$x"), Error);
    CHECK_THROWS_AS(parse_keyvals("a={x"), Error);
    CHECK_THROWS_AS(parse_keyvals("a=x}"), Error);
  }
}

TEST_CASE("diagnostics carry file, line and column") {
  auto expect = [](const char* src, ErrorKind kind, std::size_t line, std::size_t col) {
    try {
      parse_document(src, "f.tex");
      FAIL("no error for " << src);
    } catch (const Error& e) {
      CAPTURE(e.diagnostic());
      CHECK(e.kind() == kind);
      REQUIRE(e.has_span());
      CHECK(e.span().file == "f.tex");
      CHECK(e.span().line == line);
      CHECK(e.span().column == col);
    }
  };
  expect("a\n {b", ErrorKind::Syntax, 2, 2);
  expect("a}", ErrorKind::Syntax, 1, 2);
  expect("\\begin{module}\n\\end{modul}", ErrorKind::Syntax, 2, 1);
  expect("\\end{x}", ErrorKind::Syntax, 1, 1);
  expect("$x", ErrorKind::Syntax, 1, 1);
  expect("x\n\n  #", ErrorKind::Syntax, 3, 3);
  expect("ok \xff", ErrorKind::Encoding, 1, 4);
  expect("\\symdef{a}", ErrorKind::Syntax, 1, 11);
  expect("\\begin{d}[id=1,\n id=2]\\end{d}", ErrorKind::Keyval, 2, 2);

  try {
    parse_document("\\begin{module}\n\\end{modul}", "f.tex");
  } catch (const Error& e) {
    CHECK(e.diagnostic().rfind("f.tex:2:1: error:", 0) == 0);
  }
}

TEST_CASE("lexing is lossless") {
  CHECK(concat(tokenize(kRealsSource)) == kRealsSource);
  std::mt19937 rng(11);
  const std::string alphabet = "ab \n\\{}[]$^%#1é,=";
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    std::string s;
    int len = static_cast<int>(rng() % 30);
    for (int k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    // single bytes of é make some inputs invalid UTF-8
    try {
      auto toks = tokenize(s);
      CHECK(concat(toks) == s);
      ++checked;
    } catch (const Error& e) {
      REQUIRE(e.has_span());
      CHECK(e.span().begin <= s.size());
      CHECK(e.span().end <= s.size());
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("error spans stay inside the input") {
  std::mt19937 rng(5);
  const std::string src = kRealsSource;
  const std::string noise = "{}[]$\\#%\xff";
  for (int i = 0; i < 500; ++i) {
    std::string s = src;
    int edits = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < edits; ++k) {
      std::size_t at = rng() % s.size();
      if (rng() % 2) {
        s.erase(at, 1);
      } else {
        s.insert(at, 1, noise[rng() % noise.size()]);
      }
    }
    try {
      parse_document(s, "m.tex");
    } catch (const Error& e) {
      CAPTURE(s);
      REQUIRE(e.has_span());
      CHECK(e.span().begin <= s.size());
      CHECK(e.span().end <= s.size());
      CHECK(e.span().begin <= e.span().end);
      CHECK(e.span().line >= 1);
    }
  }
}

TEST_CASE("parse(print(ast)) == ast for random canonical trees") {
  Gen gen(2024);
  for (int i = 0; i < 500; ++i) {
    DocumentAST ast;
    ast.nodes = gen.list(3, false);
    std::string printed = print_ast(ast);
    CAPTURE(printed);
    DocumentAST back = parse_document(printed);
    CHECK(back == ast);
    CHECK(tokenize(print_ast(back)) == tokenize(printed));
  }
}

TEST_CASE("printing a parsed file reproduces its significant tokens") {
  for (const char* rel : {"/corpus/math/reals.tex", "/corpus/background/sets.tex",
                          "/corpus/ontologies/cert.tex", "/corpus/docs/manual.tex",
                          "/verbatim/ontologies/cert_verbatim.tex", "/corpus/vocab/sdmacros.tex",
                          "/corpus/vocab/vmodel.tex", "/corpus/docs/brakes.tex"}) {
    std::string src = slurp(std::string(SEMTEX_FIXTURES) + rel);
    auto ast = parse_document(src, rel);
    std::string printed = print_ast(ast);
    CAPTURE(rel);
    CHECK(significant(tokenize(printed)) == significant(tokenize(src)));
    CHECK(parse_document(printed) == ast);
  }
}

}  // TEST_SUITE
