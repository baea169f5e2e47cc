#include <doctest.h>

#include <random>

#include "semtex/diagnostics.hpp"
#include "semtex/xml.hpp"

using namespace semtex;
using xml::Node;

TEST_SUITE("xml") {

TEST_CASE("serialize sorts attributes and indents element-only content") {
  xml::Document doc;
  doc.root = Node::element("a");
  doc.root.set_attr("z", "1").set_attr("b", "2");
  Node c = Node::element("c");
  c.append_text("hi & <bye>");
  doc.root.append(std::move(c));
  CHECK(xml::serialize(doc) ==
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<a b=\"2\" z=\"1\">\n"
        "  <c>hi &amp; &lt;bye&gt;</c>\n"
        "</a>\n");
}

TEST_CASE("mixed content is written inline") {
  Node p = Node::element("p");
  p.append_text("x ");
  p.append(Node::element("b")).append_text("y");
  p.append_text(" z");
  CHECK(xml::serialize_fragment(p) == "<p>x <b>y</b> z</p>");
}

TEST_CASE("append_text merges adjacent text") {
  Node p = Node::element("p");
  p.append_text("a");
  p.append_text("b");
  REQUIRE(p.children.size() == 1);
  CHECK(p.children[0].text == "ab");
}

TEST_CASE("parse handles entities, CDATA, comments and doctype") {
  auto doc = xml::parse(
      "<?xml version=\"1.0\"?>\n<!DOCTYPE html>\n<!-- c -->\n"
      "<r a='&lt;&#65;&#x42;'>\n  <s>x&amp;y<![CDATA[<z>]]></s>\n</r>");
  CHECK(doc.doctype == "<!DOCTYPE html>");
  CHECK(doc.root.name == "r");
  CHECK(doc.root.attr_or("a") == "<AB");
  REQUIRE(doc.root.children.size() == 1);
  CHECK(doc.root.children[0].text_content() == "x&y<z>");
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(xml::parse("<a><b></a>"), Error);
  CHECK_THROWS_AS(xml::parse("<a>"), Error);
  CHECK_THROWS_AS(xml::parse("<a x=1/>"), Error);
  CHECK_THROWS_AS(xml::parse("<a>&bogus;</a>"), Error);
  CHECK_THROWS_AS(xml::parse("<a/><b/>"), Error);
}

TEST_CASE("find_by_id and direct_text") {
  auto doc = xml::parse("<r><s xml:id=\"k\">one<t>two</t>three</s></r>");
  const Node* s = xml::find_by_id(doc.root, "k");
  REQUIRE(s);
  CHECK(s->direct_text() == "onethree");
  CHECK(s->text_content() == "onetwothree");
  CHECK(xml::find_by_id(doc.root, "missing") == nullptr);
}

namespace {

Node random_tree(std::mt19937& rng, int depth) {
  static const char* names[] = {"a", "m:mo", "theory", "meta", "x-y"};
  static const char* texts[] = {"plain", " spaced ", "a&b", "<lt>", "\"q\"", "ü∈ℝ", "line\nbreak", "'"};
  Node n = Node::element(names[rng() % 5]);
  int attrs = rng() % 3;
  for (int i = 0; i < attrs; ++i) n.set_attr("k" + std::to_string(i), texts[rng() % 8]);
  int kids = depth > 0 ? rng() % 4 : 0;
  for (int i = 0; i < kids; ++i) {
    if (rng() % 2) {
      n.append(random_tree(rng, depth - 1));
    } else {
      n.append_text(texts[rng() % 8]);
    }
  }
  return n;
}

}  // namespace

TEST_CASE("serialize then parse is the identity and serialization is deterministic") {
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    xml::Document doc;
    doc.root = random_tree(rng, 3);
    std::string once = xml::serialize(doc);
    xml::Document back = xml::parse(once);
    CAPTURE(once);
    CHECK(back.root == doc.root);
    CHECK(xml::serialize(back) == once);
  }
}

}  // TEST_SUITE
