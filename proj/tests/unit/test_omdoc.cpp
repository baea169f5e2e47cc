#include <doctest.h>

#include <set>

#include "semtex/omdoc.hpp"
#include "test_support.hpp"

using namespace semtex;
using content::oma;
using content::oms;
using content::omi;
using content::omv;

namespace {

/// Graph, corpus naming and rules for one root file.
struct Compiled {
  explicit Compiled(const std::filesystem::path& root, const modsys::Loader& loader = modsys::file_loader())
      : graph(modsys::build_graph({root}, loader)),
        corpus(uri::Corpus::of(graph, "http://example.org")),
        rules(notation::compile_rules(graph)),
        ctx(graph, corpus, rules) {}

  xml::Document doc_of(const std::string& module) const {
    return omdoc::emit_document(graph.file_of(module), ctx);
  }

  modsys::ModuleGraph graph;
  uri::Corpus corpus;
  notation::RuleSet rules;
  omdoc::Context ctx;
};

const Compiled& reals() {
  static const Compiled c(testing::fixture("corpus/math/reals.tex"));
  return c;
}
const Compiled& manual() {
  static const Compiled c(testing::fixture("corpus/docs/manual.tex"));
  return c;
}

std::vector<std::string> child_names(const xml::Node& n) {
  std::vector<std::string> out;
  for (const auto* c : n.child_elements()) out.push_back(c->name);
  return out;
}

// The positive-reals formula, with the symbol spelled as declared.
const char* kPositiveRealsFormula =
    "<OMOBJ>"
    "<OMA><OMS cd=\"mathtalk\" name=\"defeq\"/><OMS cd=\"reals\" name=\"positiveReals\"/>"
    "<OMA><OMS cd=\"sets\" name=\"setst\"/>"
    "<OMA><OMS cd=\"sets\" name=\"inset\"/><OMV name=\"x\"/><OMS cd=\"reals\" name=\"Reals\"/></OMA>"
    "<OMA><OMS cd=\"reals\" name=\"greater\"/><OMV name=\"x\"/><OMI>0</OMI></OMA>"
    "</OMA></OMA></OMOBJ>";

}  // namespace

TEST_SUITE("omdoc") {

TEST_CASE("the real-number theory") {
  auto doc = reals().doc_of("reals");
  const xml::Node* th = xml::find_by_id(doc.root, "reals");
  REQUIRE(th);
  CHECK(th->name == "theory");
  CHECK(child_names(*th) == std::vector<std::string>{"imports", "symbol", "notation", "symbol", "notation", "symbol",
                                                     "notation", "definition"});
  auto kids = th->child_elements();
  CHECK(kids[0]->attr_or("from") == "../background/sets.omdoc#sets");
  CHECK(kids[1]->attr_or("xml:id") == "Reals");
  CHECK(kids[3]->attr_or("xml:id") == "greater");
  CHECK(kids[5]->attr_or("xml:id") == "positiveReals");

  // <prototype><OMS cd="reals" name="Reals"/></prototype> <rendering><m:mo>ℝ</m:mo></rendering>
  const xml::Node* proto = kids[2]->first_child("prototype");
  REQUIRE(proto);
  CHECK(content::from_openmath(*proto->child_elements()[0]) == oms("reals", "Reals"));
  const xml::Node* mo = kids[2]->first_child("rendering")->first_child("m:mo");
  REQUIRE(mo);
  CHECK(mo->text_content() == "ℝ");

  const xml::Node& def = *kids[7];
  CHECK(def.attr_or("xml:id") == "posreals.def");
  CHECK(def.attr_or("for") == "positiveReals");
  auto parts = def.child_elements();
  REQUIRE(parts.size() == 2);
  CHECK(parts[0]->name == "meta");
  CHECK(parts[0]->attr_or("property") == "dc:title");
  CHECK(parts[0]->text_content() == "Positive Real Numbers");
  CHECK(parts[1]->name == "OMOBJ");
  auto expected = content::from_openmath(xml::parse(kPositiveRealsFormula).root);
  CHECK(content::from_openmath(*parts[1]) == expected);
  CHECK(expected == oma(oms("mathtalk", "defeq"),
                        {oms("reals", "positiveReals"),
                         oma(oms("sets", "setst"), {oma(oms("sets", "inset"), {omv("x"), oms("reals", "Reals")}),
                                                    oma(oms("reals", "greater"), {omv("x"), omi("0")})})}));
}

TEST_CASE("an empty module is a bare theory") {
  testing::MemoryFiles mem{{"/c/m.tex", "\\begin{module}[id=m]\n\\end{module}\n"}};
  Compiled c("/c/m.tex", mem.loader());
  auto th = omdoc::emit_theory(c.graph.module("m"), modsys::visible_scope(c.graph, "m"), c.ctx);
  CHECK(xml::serialize_fragment(th.element) == "<theory xml:id=\"m\"/>");
  CHECK(th.triples.empty());
}

TEST_CASE("the certification vocabulary") {
  auto doc = manual().doc_of("certification");
  const xml::Node* th = xml::find_by_id(doc.root, "certification");
  REQUIRE(th);
  auto kids = th->child_elements();
  CHECK(kids[0]->name == "imports");
  CHECK(kids[0]->attr_or("from") == "../background/owl.omdoc#owl");
  CHECK(kids[0]->attr_or("type") == "metalanguage");
  CHECK(kids[1]->name == "meta");
  CHECK(kids[1]->attr_or("name") == "keydef");
  CHECK(kids[1]->attr_or("env") == "document");
  CHECK(kids[1]->attr_or("key") == "hasState");
  std::vector<std::string> symbols;
  for (const auto* k : th->child_elements("symbol")) symbols.push_back(k->attr_or("xml:id"));
  CHECK(symbols == std::vector<std::string>{"state-doc-rd", "tuev"});

  auto defs = th->child_elements("definition");
  REQUIRE(defs.size() == 3);
  const xml::Node* term = defs[0]->first_child("term");
  REQUIRE(term);
  CHECK(term->attr_or("cd") == "certification");
  CHECK(term->attr_or("name") == "hasState");
  CHECK(term->attr_or("role") == "definiendum");
  CHECK(term->text_content() == "has state");
  CHECK(defs[0]->attr_or("for") == "hasState");
  CHECK(defs[0]->attr_or("xml:id") == "certification.def1");
  CHECK(defs[2]->attr_or("xml:id") == "certification.def3");
  CHECK(defs[2]->text_content().find("Technischer Überwachungsverein") != std::string::npos);
  // the definiendum around "rd. $x$" keeps its formula
  const xml::Node* rd = defs[1]->first_child("term");
  REQUIRE(rd);
  CHECK(rd->first_child("OMOBJ"));
}

TEST_CASE("definition prose keeps formulas in place") {
  auto doc = reals().doc_of("sets");
  const xml::Node* def = xml::find_by_id(doc.root, "inset.def");
  REQUIRE(def);
  std::string shape;
  for (const auto& c : def->children) {
    if (c.is_text()) shape += c.text;
    else if (c.name == "OMOBJ") shape += "[" + content::to_string(content::from_openmath(c)) + "]";
    else if (c.name == "term") shape += "<" + c.text_content() + ">";
  }
  CHECK(shape ==
        "An object [OMV(x)] is an <element> of a set [OMV(S)], written [OMA(OMS(sets,inset), OMV(x), OMV(S))], "
        "iff [OMV(x)] is one of the members of [OMV(S)].");
}

TEST_CASE("document annotations sit on the root") {
  auto doc = manual().doc_of("manual");
  CHECK(doc.root.attr_or("about") == "http://example.org/doc/docs/manual.omdoc");
  CHECK(doc.root.attr_or("prefix") == "certification: http://example.org/doc/ontologies/cert.omdoc#");
  auto kids = doc.root.child_elements();
  REQUIRE(kids.size() == 3);
  CHECK(kids[0]->attr_or("property") == "certification:hasState");
  CHECK(kids[0]->direct_text() == "rd. TÜV");
  REQUIRE(kids[0]->first_child("OMOBJ"));
  CHECK(content::from_openmath(*kids[0]->first_child("OMOBJ")) ==
        oma(oms("certification", "state-doc-rd"), {oms("certification", "tuev")}));
  CHECK(kids[1]->attr_or("from") == "../ontologies/cert.omdoc#certification");
  CHECK(kids[2]->name == "omtext");
  CHECK(kids[2]->text_content() == "The user manual of the safety component.");
}

TEST_CASE("a document key placed on a definition is rejected") {
  try {
    Compiled c(testing::fixture("verbatim/ontologies/cert_verbatim.tex"));
    c.doc_of("certification");
    FAIL("expected an unknown-key error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Rdfa);
    CHECK(e.message().find("unknown key 'hasState' for environment 'definition'") != std::string::npos);
    CHECK(e.has_span());
    CHECK(e.span().line == 14);
  }
}

TEST_CASE("annotated fragments from the vocabulary fixtures") {
  Compiled c(testing::fixture("corpus/docs/brakes.tex"));
  auto doc = c.doc_of("brakes");
  const xml::Node* obj = xml::find_by_id(doc.root, "field-calc");
  REQUIRE(obj);
  CHECK(obj->name == "omtext");
  CHECK(obj->attr_or("type") == "SDobject");
  CHECK(obj->attr_or("about") == "http://example.org/doc/docs/brakes.omdoc#field-calc");
  auto metas = obj->child_elements("meta");
  REQUIRE(metas.size() == 3);
  CHECK(metas[1]->attr_or("rel") == "vmodel:SemVMrefines");
  CHECK(metas[1]->attr_or("resource") == "http://example.org/doc/docs/brakes.omdoc#brake-model");
  CHECK(metas[2]->attr_or("resource") == "http://example.org/doc/docs/manual.omdoc");
  const xml::Node* cert = xml::find_by_id(doc.root, "cert-1");
  REQUIRE(cert);
  CHECK(cert->child_elements("meta")[0]->text_content() == "TÜV");
}

TEST_CASE("for= inference and checks") {
  testing::MemoryFiles mem{{"/c/m.tex",
                            "\\begin{module}[id=m]\\symdef{f}{F}\\symdef{g}{G}\\symdef{eq}[2]{#1=#2}"
                            "\\begin{definition}An \\definiendum[g]{gee} is fine.\\end{definition}"
                            "\\begin{definition}$\\eq\\f\\g$\\end{definition}"
                            "\\begin{definition}plain words\\end{definition}"
                            "\\end{module}"}};
  Compiled c("/c/m.tex", mem.loader());
  auto th = omdoc::emit_theory(c.graph.module("m"), modsys::visible_scope(c.graph, "m"), c.ctx).element;
  auto defs = th.child_elements("definition");
  REQUIRE(defs.size() == 3);
  CHECK(defs[0]->attr_or("for") == "g");
  CHECK(defs[1]->attr_or("for") == "f");
  CHECK(defs[2]->attr("for") == nullptr);
  CHECK(defs[2]->attr_or("xml:id") == "m.def3");
  CHECK(defs[2]->text_content() == "plain words");
}

TEST_CASE("emission errors") {
  auto fails = [](const std::string& src, const std::string& needle) {
    testing::MemoryFiles mem{{"/c/m.tex", src}};
    Compiled c("/c/m.tex", mem.loader());
    try {
      c.doc_of("m");
    } catch (const Error& e) {
      CHECK(e.message().find(needle) != std::string::npos);
      return;
    }
    FAIL("no error for " << src);
  };
  fails("\\begin{module}[id=m]\\begin{definition}[for=nosuch]x\\end{definition}\\end{module}", "for=nosuch");
  fails("\\begin{module}[id=m]\\symdef{d}{D}\\begin{definition}[id=d]x\\end{definition}\\end{module}",
        "duplicate xml:id 'd'");
  fails("\\begin{module}[id=m]\\keydef{box}{k}\\begin{box}[k=1]x\\end{box}\\end{module}", "needs an id=");
  fails("\\begin{module}[id=m]\\begin{definition}\\definiendum{x}\\end{definition}\\end{module}", "\\definiendum");
  fails("\\begin{module}[id=m]\\begin{definition}$\\nosuch$\\end{definition}\\end{module}", "\\nosuch");
}

TEST_CASE("every OMS names a theory reachable from its emitter") {
  for (const char* root : {"corpus/math/reals.tex", "corpus/docs/manual.tex"}) {
    Compiled c(testing::fixture(root));
    for (const auto& f : c.graph.files()) {
      auto doc = omdoc::emit_document(f, c.ctx);
      std::set<std::string> allowed;
      for (const auto& m : f.modules) {
        auto r = c.graph.reachable(m.id);
        allowed.insert(r.begin(), r.end());
      }
      xml::for_each_element(doc.root, [&](const xml::Node& n) {
        if (n.name == "OMS") CHECK(allowed.count(n.attr_or("cd")) == 1);
      });
    }
  }
}

TEST_CASE("serialization is stable and parses back") {
  for (const char* root : {"corpus/math/reals.tex", "corpus/docs/manual.tex", "corpus/docs/brakes.tex"}) {
    Compiled c(testing::fixture(root));
    for (const auto& f : c.graph.files()) {
      std::string a = omdoc::serialize(omdoc::emit_document(f, c.ctx));
      std::string b = omdoc::serialize(omdoc::emit_document(f, c.ctx));
      CHECK(a == b);
      auto back = xml::parse(a);
      CHECK(back.root == omdoc::emit_document(f, c.ctx).root);
      CHECK(omdoc::serialize(back) == a);
    }
  }
}

TEST_CASE("markup characters are escaped") {
  testing::MemoryFiles mem{{"/c/m.tex",
                            "\\begin{module}[id=m]\\begin{definition}[title=a < b & \"c\"]x < y\\end{definition}"
                            "\\end{module}"}};
  Compiled c("/c/m.tex", mem.loader());
  auto doc = c.doc_of("m");
  doc.root.set_attr("about", "http://example.org/doc/m.omdoc?x=<1>&y=\"2\"");
  std::string bytes = omdoc::serialize(doc);
  CHECK(bytes.find("a &lt; b &amp; \"c\"") != std::string::npos);
  CHECK(bytes.find("x &lt; y") != std::string::npos);
  CHECK(bytes.find("?x=&lt;1&gt;&amp;y=&quot;2&quot;") != std::string::npos);
  CHECK(xml::parse(bytes).root == doc.root);
}

TEST_CASE("import targets") {
  CHECK(omdoc::import_target({"../background/sets", "sets", false, {}}) == "../background/sets.omdoc#sets");
  CHECK(omdoc::import_target({"a/b.tex", "b", false, {}}) == "a/b.omdoc#b");
  CHECK(omdoc::import_target({"", "local", false, {}}) == "#local");
}

}  // TEST_SUITE
