#include <doctest.h>

#include <random>

#include "semtex/content.hpp"
#include "test_support.hpp"

using namespace semtex;
using namespace semtex::content;

namespace {

std::vector<syntax::Token> toks(const std::string& s) { return syntax::significant(syntax::tokenize(s, "m.tex")); }

const modsys::ModuleGraph& reals_graph() {
  static const modsys::ModuleGraph g = modsys::build_graph({testing::fixture("corpus/math/reals.tex")});
  return g;
}

std::string lexemes(const std::vector<syntax::Token>& ts) {
  std::string out;
  for (const auto& t : ts) out += t.lexeme;
  return out;
}

Error expansion_error(const std::string& src, const modsys::Scope& scope) {
  try {
    expand_math(toks(src), scope);
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error for " << src);
  return Error(ErrorKind::Io, "");
}

/// Random content tree over the visible symbols, printed back as TeX.
struct TreeGen {
  std::mt19937 rng;
  std::vector<const modsys::SymDef*> syms;

  OMObject tree(int depth, std::string& tex) {
    int pick = static_cast<int>(rng() % (depth > 0 ? 4 : 3));
    if (pick == 0) {
      std::string v(1, static_cast<char>('a' + rng() % 26));
      tex += v;
      return omv(v);
    }
    if (pick == 1) {
      std::string d = std::to_string(rng() % 1000);
      tex += "{" + d + "}";
      return omi(d);
    }
    const auto* s = syms[rng() % syms.size()];
    if (pick == 2 && s->arity > 0) {
      // keep leaves 0-ary
      for (const auto* c : syms) {
        if (c->arity == 0) s = c;
      }
    }
    tex += "\\" + s->command();
    if (s->arity == 0) {
      tex += ' ';
      return oms(s->home, s->name);
    }
    std::vector<OMObject> args;
    for (int k = 0; k < s->arity; ++k) {
      tex += '{';
      args.push_back(tree(depth - 1, tex));
      tex += '}';
    }
    return oma(oms(s->home, s->name), std::move(args));
  }
};

}  // namespace

TEST_SUITE("content") {

TEST_CASE("expansion of the positive-reals definition") {
  auto scope = modsys::visible_scope(reals_graph(), "reals");
  auto got = expand_math(toks("\\defeq\\positiveReals\n   {\\setst{\\inset{x}\\Reals}{\\greater{x}0}}"), scope);
  auto expected =
      oma(oms("mathtalk", "defeq"),
          {oms("reals", "positiveReals"),
           oma(oms("sets", "setst"), {oma(oms("sets", "inset"), {omv("x"), oms("reals", "Reals")}),
                                      oma(oms("reals", "greater"), {omv("x"), omi("0")})})});
  CHECK(to_string(got) == to_string(expected));
  CHECK(got == expected);
}

TEST_CASE("lone variables and integers") {
  auto scope = modsys::visible_scope(reals_graph(), "reals");
  CHECK(expand_math(toks("x"), scope) == omv("x"));
  CHECK(expand_math(toks("0"), scope) == omi("0"));
  CHECK(expand_math(toks(" 0042 "), scope) == omi("42"));
  CHECK(expand_math(toks("{{y}}"), scope) == omv("y"));
}

TEST_CASE("bind_args grabs groups and single tokens") {
  auto scope = modsys::visible_scope(reals_graph(), "reals");
  const auto* greater = scope.find_symbol("greater");
  auto b = bind_args(*greater, toks("{x}0 rest"));
  REQUIRE(b.args.size() == 2);
  CHECK(lexemes(b.args[0]) == "x");
  CHECK(lexemes(b.args[1]) == "0");
  CHECK(lexemes(b.rest) == "rest");
  CHECK_THROWS_AS(bind_args(*greater, toks("{x}")), Error);

  auto g = modsys::build_graph({testing::fixture("corpus/docs/manual.tex")});
  auto ms = modsys::visible_scope(g, "manual");
  auto b2 = bind_args(*ms.find_command("statedocrd"), toks("{\\tuev}"));
  REQUIRE(b2.args.size() == 1);
  CHECK(lexemes(b2.args[0]) == "\\tuev");
  CHECK(b2.rest.empty());
  CHECK(expand_math(toks("\\statedocrd{\\tuev}"), ms) ==
        oma(oms("certification", "state-doc-rd"), {oms("certification", "tuev")}));
}

TEST_CASE("expansion errors") {
  auto scope = modsys::visible_scope(reals_graph(), "reals");
  auto e = expansion_error("x+\\nosuch", scope);
  CHECK(e.kind() == ErrorKind::Expansion);
  e = expansion_error("\\nosuch", scope);
  CHECK(e.message().find("\\nosuch") != std::string::npos);
  CHECK(e.span().begin == 0);
  CHECK(e.span().end == 7);
  CHECK(expansion_error("\\greater{x}", scope).message().find("expects 2") != std::string::npos);
  CHECK(expansion_error("", scope).message().find("empty") != std::string::npos);
  CHECK(expansion_error("ab", scope).message().find("multi-letter") != std::string::npos);
  CHECK(expansion_error("x y", scope).message().find("juxtaposed") != std::string::npos);
  CHECK(expansion_error("\\mathbb{R}", scope).message().find("presentation") != std::string::npos);
  CHECK(expansion_error("x>0", scope).kind() == ErrorKind::Expansion);
  // mathtalk cannot see reals
  auto leaf = modsys::visible_scope(reals_graph(), "mathtalk");
  CHECK(expansion_error("\\Reals", leaf).kind() == ErrorKind::Expansion);
}

TEST_CASE("expansion inverts a printer of random trees; every OMS is visible") {
  auto scope = modsys::visible_scope(reals_graph(), "reals");
  TreeGen gen{std::mt19937(3), {}};
  for (const auto& [_, s] : scope.symbols()) gen.syms.push_back(&s);
  for (int i = 0; i < 300; ++i) {
    std::string tex;
    OMObject expected = gen.tree(4, tex);
    CAPTURE(tex);
    OMObject got = expand_math(toks(tex), scope);
    CHECK(got == expected);
    CHECK(expand_math(toks(tex), scope) == got);
    for (const auto& s : symbols_of(got)) {
      const auto* sd = scope.find_symbol(s.name);
      REQUIRE(sd);
      CHECK(sd->home == s.cd);
    }
    CHECK(from_openmath(to_openmath(got)) == got);
  }
}

TEST_CASE("expansion does not consult notation bodies") {
  testing::MemoryFiles a{{"/n/m.tex", "\\begin{module}[id=m]\\symdef{f}[2]{#1+#2}\\symdef{c}{C}\\end{module}"}};
  testing::MemoryFiles b{{"/n/m.tex", "\\begin{module}[id=m]\\symdef{f}[2]{\\langle #2,#1\\rangle}\\symdef{c}{\\text{k}}\\end{module}"}};
  auto ga = modsys::build_graph({"/n/m.tex"}, a.loader());
  auto gb = modsys::build_graph({"/n/m.tex"}, b.loader());
  auto sa = modsys::visible_scope(ga, "m");
  auto sb = modsys::visible_scope(gb, "m");
  for (const char* src : {"\\f{x}\\c", "\\f{\\f12}{y}", "\\c"}) {
    CHECK(expand_math(toks(src), sa) == expand_math(toks(src), sb));
  }
}

TEST_CASE("OpenMath XML form") {
  auto obj = oma(oms("reals", "greater"), {omv("x"), omi("0")});
  CHECK(xml::serialize_fragment(to_openmath(obj)) ==
        "<OMOBJ xmlns=\"http://www.openmath.org/OpenMath\">\n"
        "  <OMA>\n"
        "    <OMS cd=\"reals\" name=\"greater\"/>\n"
        "    <OMV name=\"x\"/>\n"
        "    <OMI>0</OMI>\n"
        "  </OMA>\n"
        "</OMOBJ>");
  CHECK_THROWS_AS(from_openmath(xml::Node::element("OMF")), Error);
}

}  // TEST_SUITE
