#include <doctest.h>

#include <set>

#include "semtex/omdoc.hpp"
#include "semtex/page.hpp"
#include "semtex/rdfa.hpp"
#include "test_support.hpp"

using namespace semtex;
using content::oma;
using content::omi;
using content::oms;
using content::omv;

namespace {

struct Paged {
  explicit Paged(const std::filesystem::path& root, const modsys::Loader& loader = modsys::file_loader())
      : graph(modsys::build_graph({root}, loader)),
        corpus(uri::Corpus::of(graph, "http://example.org")),
        rules(notation::compile_rules(graph)),
        ctx(graph, corpus, rules) {
    opts.symbol_uri = [this](const content::OMS& s) { return corpus.symbol_uri(graph, s.cd, s.name); };
  }

  xml::Document omdoc_of(const std::string& module) const { return omdoc::emit_document(graph.file_of(module), ctx); }
  xml::Document page_of(const std::string& module) const {
    page::PageOptions o = opts;
    o.document_module = module;
    return page::assemble_page(omdoc_of(module), rules, o);
  }

  modsys::ModuleGraph graph;
  uri::Corpus corpus;
  notation::RuleSet rules;
  omdoc::Context ctx;
  page::PageOptions opts;
};

const Paged& reals() {
  static const Paged p(testing::fixture("corpus/math/reals.tex"));
  return p;
}
const Paged& manual() {
  static const Paged p(testing::fixture("corpus/docs/manual.tex"));
  return p;
}

std::vector<const xml::Node*> all(const xml::Node& root, const std::string& name) {
  std::vector<const xml::Node*> out;
  xml::for_each_element(root, [&](const xml::Node& n) {
    if (n.name == name) out.push_back(&n);
  });
  return out;
}

const xml::Node* by_id(const xml::Node& root, const std::string& id) {
  return xml::find_if(root, [&](const xml::Node& n) { return n.attr_or("id") == id; });
}

}  // namespace

TEST_SUITE("page") {

TEST_CASE("the positive-reals page") {
  auto page = reals().page_of("reals");
  CHECK(page.doctype.find("XHTML 1.1 plus MathML 2.0") != std::string::npos);
  CHECK(page.root.attr_or("xmlns") == page::kXhtmlNs);

  auto defs = page::definition_fragments(page);
  REQUIRE(defs.size() == 1);
  CHECK(defs[0].id == "posreals.def");
  CHECK(defs[0].cd == "reals");
  CHECK(defs[0].for_name == "positiveReals");
  std::string label = defs[0].element.text_content();
  CHECK(label.find("Definition 1.1 (Positive Real Numbers):") != std::string::npos);
  const xml::Node* title = xml::find_if(defs[0].element, [](const xml::Node& n) {
    return n.attr_or("property") == "dc:title";
  });
  REQUIRE(title);
  CHECK(title->text_content() == "Positive Real Numbers");

  auto maths = all(defs[0].element, "math");
  REQUIRE(maths.size() == 1);
  CHECK(notation::linearize(*maths[0]) == "ℝ⁺:={x∈ℝ∣x>0}");
  auto expected = oma(oms("mathtalk", "defeq"),
                      {oms("reals", "positiveReals"),
                       oma(oms("sets", "setst"), {oma(oms("sets", "inset"), {omv("x"), oms("reals", "Reals")}),
                                                  oma(oms("reals", "greater"), {omv("x"), omi("0")})})});
  CHECK(notation::annotation_of(*maths[0]) == expected);

  const xml::Node* in = xml::find_if(*maths[0], [](const xml::Node& n) { return n.direct_text() == "∈"; });
  REQUIRE(in);
  CHECK(in->attr_or("data-cd") == "sets");
  CHECK(in->attr_or("data-name") == "inset");
  CHECK(in->attr_or("href") == "http://example.org/doc/background/sets.omdoc#inset");

  auto scripts = all(page.root, "script");
  REQUIRE(scripts.size() == 1);
  CHECK(scripts[0]->attr_or("src") == "semtex-viewer.js");
}

TEST_CASE("theory sections and symbol lists") {
  auto page = reals().page_of("reals");
  const xml::Node* sec = by_id(page.root, "reals");
  REQUIRE(sec);
  CHECK(sec->attr_or("class") == "theory");
  const xml::Node* dl = sec->first_child("dl");
  REQUIRE(dl);
  std::vector<std::string> names;
  for (const auto* dt : dl->child_elements("dt")) names.push_back(dt->attr_or("id"));
  CHECK(names == std::vector<std::string>{"Reals", "greater", "positiveReals"});
  // greater is shown on placeholders
  auto dds = dl->child_elements("dd");
  REQUIRE(dds.size() == 3);
  CHECK(notation::linearize(*dds[1]->first_child("math")) == "a>b");

  auto talk = Paged(testing::fixture("corpus/background/mathtalk.tex")).page_of("mathtalk");
  auto defs = page::definition_fragments(talk);
  REQUIRE(defs.size() == 1);
  const xml::Node* dfn = xml::find_if(defs[0].element, [](const xml::Node& n) { return n.name == "dfn"; });
  REQUIRE(dfn);
  CHECK(dfn->attr_or("data-name") == "defeq");
  CHECK(dfn->text_content() == "define");
}

TEST_CASE("a theory with no content has a heading only") {
  testing::MemoryFiles mem{{"/p/e.tex", "\\begin{module}[id=e]\\end{module}"}};
  Paged p("/p/e.tex", mem.loader());
  auto page = p.page_of("e");
  const xml::Node* th = by_id(page.root, "e");
  REQUIRE(th);
  auto kids = th->child_elements();
  REQUIRE(kids.size() == 1);
  CHECK(kids[0]->name == "h2");
}

TEST_CASE("RDFa survives rendering") {
  auto omdoc = manual().omdoc_of("manual");
  auto page = manual().page_of("manual");
  auto from_omdoc = rdfa::extract_triples(omdoc);
  auto from_page = rdfa::extract_triples(page);
  std::set<rdfa::Triple> a(from_omdoc.begin(), from_omdoc.end());
  std::set<rdfa::Triple> b(from_page.begin(), from_page.end());
  CHECK(a == b);
  int has_state = 0;
  for (const auto& t : from_page) {
    if (t.predicate.size() >= 8 && t.predicate.substr(t.predicate.size() - 8) == "hasState") {
      ++has_state;
      CHECK(t.object == "rd. TÜV");
      CHECK_FALSE(t.object_is_uri);
    }
  }
  CHECK(has_state == 1);

  auto r_omdoc = rdfa::extract_triples(reals().omdoc_of("reals"));
  auto r_page = rdfa::extract_triples(reals().page_of("reals"));
  CHECK(std::set<rdfa::Triple>(r_omdoc.begin(), r_omdoc.end()) ==
        std::set<rdfa::Triple>(r_page.begin(), r_page.end()));
}

TEST_CASE("fragments of the vocabulary fixtures keep their triples") {
  Paged p(testing::fixture("corpus/docs/brakes.tex"));
  auto omdoc = p.omdoc_of("brakes");
  auto page = p.page_of("brakes");
  auto a = rdfa::extract_triples(omdoc);
  auto b = rdfa::extract_triples(page);
  CHECK(a.size() > 5);
  CHECK(std::set<rdfa::Triple>(a.begin(), a.end()) == std::set<rdfa::Triple>(b.begin(), b.end()));
  CHECK(by_id(page.root, "brake-model"));
}

TEST_CASE("ids are unique and output is deterministic") {
  for (const char* f : {"corpus/math/reals.tex", "corpus/docs/manual.tex", "corpus/docs/brakes.tex",
                        "corpus/ontologies/cert.tex"}) {
    Paged p(testing::fixture(f));
    for (const auto& file : p.graph.files()) {
      auto page = page::assemble_page(omdoc::emit_document(file, p.ctx), p.rules, p.opts);
      std::vector<std::string> ids;
      xml::for_each_element(page.root, [&](const xml::Node& n) {
        if (const auto* id = n.attr("id")) ids.push_back(*id);
      });
      CAPTURE(file.path.string());
      CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
      std::string s = xml::serialize(page);
      CHECK(s == xml::serialize(page::assemble_page(omdoc::emit_document(file, p.ctx), p.rules, p.opts)));
      CHECK(xml::serialize(xml::parse(s)) == s);
    }
  }
}

TEST_CASE("configured numbering and labels") {
  page::PageOptions o = reals().opts;
  o.theory_numbers = {{"reals", 2}};
  o.definition_label = "Def.";
  o.lookup_endpoint = "/lookup";
  auto page = page::assemble_page(reals().omdoc_of("reals"), reals().rules, o);
  CHECK(page::definition_fragments(page)[0].element.text_content().find("Def. 2.1 (Positive Real Numbers):") !=
        std::string::npos);
  CHECK(page.root.first_child("body")->attr_or("data-lookup") == "/lookup");
}

TEST_CASE("the attribute contract read by the viewer") {
  testing::MemoryFiles mem{{"/v/m.tex",
                            "\\begin{module}[id=m]\\symdef{f}[1]{f(#1)}\\symdef{c}{c}"
                            "\\begin{definition}[id=f.def,for=f]$\\f{\\f\\c}$\\end{definition}\\end{module}"}};
  Paged p("/v/m.tex", mem.loader());
  page::PageOptions o = p.opts;
  o.lookup_endpoint = "http://example.org/lookup";
  auto page = page::assemble_page(p.omdoc_of("m"), p.rules, o);

  const xml::Node* body = page.root.first_child("body");
  REQUIRE(body);
  CHECK(body->attr_or("data-lookup") == "http://example.org/lookup");
  CHECK(body->attr_or("about") == "http://example.org/doc/m.omdoc");

  auto defs = page::definition_fragments(page);
  REQUIRE(defs.size() == 1);
  const xml::Node* math = xml::find_if(defs[0].element, [](const xml::Node& n) { return n.name == "math"; });
  REQUIRE(math);
  std::set<std::string> content_ids;
  xml::for_each_element(*math->first_child("semantics")->first_child("annotation-xml"),
                        [&](const xml::Node& n) { content_ids.insert(n.attr_or("id")); });
  int tokens = 0, fences = 0;
  xml::for_each_element(notation::presentation_of(*math), [&](const xml::Node& n) {
    if (n.attr("data-cd")) {
      ++tokens;
      CHECK(n.attr("data-name"));
      CHECK(n.attr_or("href") == "http://example.org/doc/m.omdoc#" + n.attr_or("data-name"));
    }
    if (n.attr_or("fence") == "true") {
      ++fences;
      CHECK(n.attr_or("data-elidable") == "true");
    }
    if (const auto* x = n.attr("xref")) CHECK(content_ids.count(*x) == 1);
  });
  CHECK(tokens == 7);  // every template token names its symbol: f ( ) twice, c once
  CHECK(fences == 4);
}

TEST_CASE("malformed input") {
  xml::Document d;
  d.root = xml::Node::element("html");
  CHECK_THROWS_AS(page::assemble_page(d, reals().rules, {}), Error);
  auto bad = xml::parse(
      "<omdoc xmlns=\"http://omdoc.org/ns\"><theory xml:id=\"t\"><definition xml:id=\"d\">"
      "<OMOBJ><OMA><OMS cd=\"t\" name=\"f\"/></OMA></OMOBJ></definition></theory></omdoc>");
  CHECK_THROWS_AS(page::assemble_page(bad, reals().rules, {}), Error);
}

}  // TEST_SUITE
