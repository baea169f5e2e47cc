#include "semtex/page.hpp"

#include "semtex/text.hpp"

namespace semtex::page {

namespace {

const char* kStyle =
    "body{font-family:serif;max-width:50em;margin:auto;line-height:1.4}"
    ".definition{margin:1em 0}"
    ".definition-label b{font-weight:bold}"
    ".semtex-meta{display:none}"
    "dl.symbols dt{font-family:monospace;float:left;clear:left;width:12em}"
    "dl.symbols dd{margin-left:13em}"
    "dfn.definiendum{font-style:italic}"
    "[data-cd]{cursor:pointer}";

std::string local(const std::string& name) {
  auto colon = name.find(':');
  return colon == std::string::npos ? name : name.substr(colon + 1);
}

xml::Node el(const char* name, const char* cls = nullptr) {
  xml::Node n = xml::Node::element(name);
  if (cls) n.set_attr("class", cls);
  return n;
}

bool is_property(const xml::Node& n) {
  return n.is_element() && n.name == "meta" && (n.attr("property") || n.attr("rel"));
}

/// RDFa of an OMDoc meta element as a hidden span.
xml::Node meta_span(const xml::Node& meta) {
  xml::Node s = el("span", "semtex-meta");
  for (const char* a : {"property", "rel", "resource", "content"}) {
    if (const auto* v = meta.attr(a)) s.set_attr(a, *v);
  }
  if (meta.attr("property")) s.append_text(meta.direct_text());
  return s;
}

class Builder {
 public:
  Builder(const notation::RuleSet& rules, const PageOptions& opts) : rules_(rules), opts_(opts) {}

  xml::Document build(const xml::Document& omdoc) {
    const xml::Node& root = omdoc.root;
    if (local(root.name) != "omdoc") throw Error(ErrorKind::Xml, "not an OMDoc document: root <" + root.name + ">");

    int position = 0;
    for (const auto* c : root.child_elements("theory")) numbers_.emplace(c->attr_or("xml:id"), ++position);
    numbers_.emplace(opts_.document_module, ++position);
    for (const auto& [id, n] : opts_.theory_numbers) numbers_[id] = n;

    xml::Document page;
    page.doctype = kDoctype;
    page.root = el("html");
    page.root.set_attr("xmlns", kXhtmlNs);
    if (const auto* p = root.attr("prefix")) page.root.set_attr("prefix", *p);

    xml::Node head = el("head");
    xml::Node title = el("title");
    title.append_text(page_title(root));
    head.append(std::move(title));
    xml::Node style = el("style");
    style.set_attr("type", "text/css");
    style.append_text(kStyle);
    head.append(std::move(style));
    xml::Node script = el("script");
    script.set_attr("type", "text/javascript").set_attr("src", opts_.viewer_script);
    head.append(std::move(script));
    page.root.append(std::move(head));

    xml::Node body = el("body");
    if (const auto* about = root.attr("about")) body.set_attr("about", *about);
    if (!opts_.lookup_endpoint.empty()) body.set_attr("data-lookup", opts_.lookup_endpoint);

    xml::Node h1 = el("h1");
    h1.append_text(page_title(root));
    body.append(std::move(h1));

    xml::Node meta = el("div", "semtex-metadata");
    xml::Node imports = el("ul", "imports");
    for (const auto& c : root.children) {
      if (!c.is_element()) continue;
      if (is_property(c)) {
        meta.append(meta_span(c));
      } else if (c.name == "theory") {
        body.append(theory(c));
      } else if (c.name == "imports") {
        imports.append(import_item(c));
      } else if (c.name == "definition") {
        body.append(definition(c, opts_.document_module));
      } else if (c.name == "omtext") {
        body.append(omtext(c, opts_.document_module));
      }
    }
    if (!meta.children.empty()) body.children.insert(body.children.begin() + 1, std::move(meta));
    if (!imports.children.empty()) body.children.insert(body.children.begin() + 1, std::move(imports));
    page.root.append(std::move(body));
    return page;
  }

 private:
  static std::string page_title(const xml::Node& root) {
    for (const auto* m : root.child_elements("meta")) {
      if (m->attr_or("property") == "dc:title") return m->direct_text();
    }
    for (const auto* t : root.child_elements("theory")) return "Theory " + t->attr_or("xml:id");
    return root.attr_or("about", "document");
  }

  xml::Node import_item(const xml::Node& imp) {
    std::string from = imp.attr_or("from");
    xml::Node li = el("li");
    xml::Node a = el("a");
    a.set_attr("href", from);
    auto hash = from.find('#');
    a.append_text(hash == std::string::npos ? from : from.substr(hash + 1));
    li.append(std::move(a));
    if (imp.attr_or("type") == "metalanguage") li.append_text(" (meta language)");
    return li;
  }

  xml::Node theory(const xml::Node& th) {
    const std::string id = th.attr_or("xml:id");
    xml::Node sec = el("div", "theory");
    sec.set_attr("id", id);
    if (const auto* about = th.attr("about")) sec.set_attr("about", *about);
    xml::Node h = el("h2");
    h.append_text("Theory " + id);
    sec.append(std::move(h));

    xml::Node imports = el("ul", "imports");
    xml::Node symbols = el("dl", "symbols");
    std::vector<xml::Node> blocks;
    for (const auto& c : th.children) {
      if (!c.is_element()) continue;
      if (is_property(c)) {
        sec.append(meta_span(c));
      } else if (c.name == "imports") {
        imports.append(import_item(c));
      } else if (c.name == "meta" && c.attr_or("name") == "keydef") {
        xml::Node dt = el("dt");
        if (const auto* kid = c.attr("xml:id")) dt.set_attr("id", *kid);
        dt.append_text(c.attr_or("key"));
        symbols.append(std::move(dt));
        xml::Node dd = el("dd");
        dd.append_text("metadata key of " + c.attr_or("env"));
        symbols.append(std::move(dd));
      } else if (c.name == "symbol") {
        pending_symbol_ = c.attr_or("xml:id");
      } else if (c.name == "notation") {
        symbol_entry(symbols, c, id);
      } else if (c.name == "definition") {
        blocks.push_back(definition(c, id));
      } else if (c.name == "omtext") {
        blocks.push_back(omtext(c, id));
      }
    }
    if (!imports.children.empty()) sec.append(std::move(imports));
    if (!symbols.children.empty()) sec.append(std::move(symbols));
    for (auto& b : blocks) sec.append(std::move(b));
    return sec;
  }

  /// A symbol with its notation shown on placeholder variables.
  void symbol_entry(xml::Node& list, const xml::Node& notation, const std::string& cd) {
    xml::Node dt = el("dt");
    dt.set_attr("id", pending_symbol_);
    dt.append_text(pending_symbol_);
    list.append(std::move(dt));
    xml::Node dd = el("dd");
    const xml::Node* proto = notation.first_child("prototype");
    auto kids = proto ? proto->child_elements() : std::vector<const xml::Node*>{};
    if (kids.size() == 1) {
      const xml::Node& p = *kids[0];
      content::OMObject obj;
      if (p.name == "OMS") {
        obj = content::from_openmath(p);
      } else {
        auto parts = p.child_elements();
        if (parts.empty()) throw Error(ErrorKind::Xml, "empty prototype in theory " + cd);
        std::vector<content::OMObject> vars;
        for (std::size_t k = 1; k < parts.size(); ++k) {
          vars.push_back(content::omv(std::string(1, static_cast<char>('a' + (k - 1) % 26))));
        }
        obj = content::oma(content::from_openmath(*parts[0]), std::move(vars));
      }
      dd.append(formula(obj));
    }
    list.append(std::move(dd));
    pending_symbol_.clear();
  }

  xml::Node formula(const content::OMObject& obj) {
    notation::RenderOptions ro;
    ro.id_prefix = "f" + std::to_string(++formulas_);
    ro.symbol_uri = opts_.symbol_uri;
    return notation::render_object(obj, rules_, ro).math;
  }

  xml::Node definition(const xml::Node& d, const std::string& cd) {
    const std::string id = d.attr_or("xml:id");
    int n = numbers_.count(cd) ? numbers_.at(cd) : 0;
    int m = ++def_counts_[cd];
    xml::Node div = el("div", "definition");
    div.set_attr("id", id);
    div.set_attr("data-cd", cd);
    if (const auto* f = d.attr("for")) div.set_attr("data-for", *f);
    if (const auto* about = d.attr("about")) div.set_attr("about", *about);

    xml::Node p = el("p");
    xml::Node label = el("span", "definition-label");
    xml::Node b = el("b");
    b.append_text(opts_.definition_label);
    label.append(std::move(b));
    label.append_text(" " + std::to_string(n) + "." + std::to_string(m));
    const xml::Node* title = nullptr;
    for (const auto& c : d.children) {
      if (is_property(c) && c.attr_or("property") == "dc:title") {
        title = &c;
        break;
      }
    }
    if (title) {
      label.append_text(" (");
      xml::Node t = el("span");
      t.set_attr("property", "dc:title");
      t.append_text(title->direct_text());
      label.append(std::move(t));
      label.append_text(")");
    }
    label.append_text(":");
    p.append(std::move(label));
    p.append_text(" ");
    for (const auto& c : d.children) {
      if (&c == title) continue;
      mixed(c, p, cd);
    }
    div.append(std::move(p));
    return div;
  }

  xml::Node omtext(const xml::Node& t, const std::string& cd) {
    xml::Node div = el("div", "omtext");
    if (const auto* id = t.attr("xml:id")) div.set_attr("id", *id);
    if (const auto* type = t.attr("type")) div.set_attr("data-type", *type);
    if (const auto* about = t.attr("about")) div.set_attr("about", *about);
    for (const auto& c : t.children) mixed(c, div, cd);
    return div;
  }

  /// Body content of a definition or text block.
  void mixed(const xml::Node& c, xml::Node& out, const std::string& cd) {
    if (c.is_text()) {
      out.append_text(c.text);
      return;
    }
    if (is_property(c)) {
      out.append(meta_span(c));
    } else if (c.name == "OMOBJ") {
      out.append(formula(content::from_openmath(c)));
    } else if (c.name == "term") {
      xml::Node dfn = el("dfn", "definiendum");
      dfn.set_attr("data-cd", c.attr_or("cd"));
      dfn.set_attr("data-name", c.attr_or("name"));
      for (const auto& k : c.children) mixed(k, dfn, cd);
      out.append(std::move(dfn));
    } else if (c.name == "omtext") {
      out.append(omtext(c, cd));
    } else if (c.name == "definition") {
      out.append(definition(c, cd));
    } else {
      for (const auto& k : c.children) mixed(k, out, cd);
    }
  }

  const notation::RuleSet& rules_;
  const PageOptions& opts_;
  std::map<std::string, int> numbers_;
  std::map<std::string, int> def_counts_;
  std::string pending_symbol_;
  int formulas_ = 0;
};

}  // namespace

xml::Document assemble_page(const xml::Document& omdoc, const notation::RuleSet& rules, const PageOptions& opts) {
  return Builder(rules, opts).build(omdoc);
}

std::vector<DefinitionFragment> definition_fragments(const xml::Document& page) {
  std::vector<DefinitionFragment> out;
  xml::for_each_element(page.root, [&](const xml::Node& n) {
    if (n.name == "div" && n.attr_or("class") == "definition") {
      out.push_back({n.attr_or("data-cd"), n.attr_or("data-for"), n.attr_or("id"), n});
    }
  });
  return out;
}

}  // namespace semtex::page
