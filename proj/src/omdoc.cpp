#include "semtex/omdoc.hpp"

#include <set>

#include "semtex/content.hpp"
#include "semtex/prose.hpp"
#include "semtex/text.hpp"

namespace semtex::omdoc {

using syntax::Command;
using syntax::Environment;
using syntax::MathGroup;
using syntax::NodeList;

Context::Context(const modsys::ModuleGraph& g, const uri::Corpus& c, const notation::RuleSet& r)
    : graph(g), corpus(c), rules(r), prefixes(rdfa::vocabulary_prefixes(g, c)) {}

std::string import_target(const modsys::ImportRef& ref) {
  if (ref.path.empty()) return "#" + ref.module_id;
  modsys::fs::path p(ref.path);
  if (p.extension() == ".tex" || p.extension() == ".stex") p.replace_extension();
  return p.generic_string() + ".omdoc#" + ref.module_id;
}

namespace {

/// Collapses whitespace in every text child and trims the ends of the content.
void tidy(xml::Node& el) {
  for (auto& c : el.children) {
    if (c.is_text()) c.text = text::collapse_space(c.text);
  }
  if (!el.children.empty() && el.children.front().is_text()) {
    auto& t = el.children.front().text;
    std::size_t b = t.find_first_not_of(' ');
    t.erase(0, b == std::string::npos ? t.size() : b);
  }
  if (!el.children.empty() && el.children.back().is_text()) {
    auto& t = el.children.back().text;
    t.erase(t.find_last_not_of(' ') + 1);
  }
  std::vector<xml::Node> kept;
  for (auto& c : el.children) {
    if (c.is_text() && c.text.empty()) continue;
    kept.push_back(std::move(c));
  }
  el.children = std::move(kept);
}

bool blank(const xml::Node& el) {
  for (const auto& c : el.children) {
    if (c.is_element() || !text::trim(c.text).empty()) return false;
  }
  return true;
}

void prepend_properties(xml::Node& host, const std::vector<rdfa::Triple>& triples, const rdfa::PrefixMap& prefixes) {
  std::vector<xml::Node> props;
  for (const auto& t : triples) props.push_back(rdfa::property_element(t, prefixes));
  host.children.insert(host.children.begin(), std::make_move_iterator(props.begin()),
                       std::make_move_iterator(props.end()));
}

/// Facts gathered while walking a definition body.
struct DefinitionFacts {
  std::optional<std::string> definiendum;
  std::optional<content::OMObject> formula;
};

class Emitter {
 public:
  Emitter(const modsys::ModuleDef& m, const modsys::Scope& scope, const Context& ctx)
      : m_(m),
        scope_(scope),
        ctx_(ctx),
        doc_uri_(ctx.corpus.doc_uri(m.origin)),
        keyctx_{ctx.graph, ctx.corpus, ctx.rules, m.origin} {}

  std::vector<rdfa::Triple> triples;

  EmittedDefinition definition(const modsys::DefinitionBlock& d, std::size_t index) {
    std::string id = d.id.value_or(m_.id + ".def" + std::to_string(index));
    xml::Node el = xml::Node::element("definition");
    el.set_attr("xml:id", id);
    DefinitionFacts facts;
    el = content_of(d.body, std::move(el), Mode::Keep, &facts);

    std::optional<std::string> target = d.for_name;
    if (target) {
      if (!scope_.find_symbol(*target) && !key_named(*target)) {
        throw Error::at(ErrorKind::Emit, d.opts.span.file.empty() ? d.span : d.opts.span,
                        "definition '" + id + "': for=" + *target + " names no symbol or key visible in module '" +
                            m_.id + "'");
      }
    } else if (facts.definiendum) {
      target = facts.definiendum;
    } else if (facts.formula) {
      if (const auto* a = facts.formula->as<content::OMA>(); a && a->elems.size() >= 2) {
        if (const auto* s = a->elems[1].as<content::OMS>(); s && s->cd == m_.id) target = s->name;
      }
    }
    if (target) el.set_attr("for", *target);

    auto own = rdfa::triples_from_keyvals(doc_uri_ + "#" + id, "definition", d.opts, scope_, keyctx_);
    if (!own.empty()) {
      el.set_attr("about", doc_uri_ + "#" + id);
      prepend_properties(el, own, ctx_.prefixes);
    }
    triples.insert(triples.end(), own.begin(), own.end());
    return {std::move(el), std::move(own)};
  }

  /// Walks a module or document body for definitions and annotated fragments.
  xml::Node blocks(const NodeList& body, xml::Node parent, bool keep_prose) {
    return content_of(body, std::move(parent), keep_prose ? Mode::Wrap : Mode::Drop, nullptr);
  }

 private:
  enum class Mode {
    Drop,  // prose is ignored; only blocks are kept
    Wrap,  // prose runs become omtext elements between blocks
    Keep,  // prose is mixed into the element itself
  };

  const modsys::KeyDef* key_named(const std::string& key) const {
    for (const auto& [k, kd] : scope_.keys()) {
      if (k.second == key) return &kd;
    }
    return nullptr;
  }

  class Sink : public prose::Sink {
   public:
    Sink(Emitter& em, xml::Node root, Mode mode, DefinitionFacts* facts)
        : em_(em), root_(std::move(root)), mode_(mode), facts_(facts) {}

    void text(const std::string& s) override {
      if (xml::Node* t = target()) t->append_text(s);
    }

    void math(const MathGroup& m, const SourceSpan& span) override {
      xml::Node* t = target();
      if (!t) return;
      auto obj = content::expand_math(m.tokens, em_.scope_, span);
      if (facts_ && !facts_->formula) facts_->formula = obj;
      t->append(content::to_openmath(obj));
    }

    bool command(const Command& c, const SourceSpan& span) override {
      if (c.name == "importmodule" || c.name == "metalanguage" || c.name == "symdef" || c.name == "keydef") {
        return true;
      }
      if (c.name != "definiendum") return false;
      xml::Node* t = target();
      if (!t) return true;
      t->append(em_.term(c, span, facts_));
      return true;
    }

    bool environment(const Environment& e, const SourceSpan& span) override {
      if (e.name == "module") return true;
      if (e.name == "definition") {
        block(em_.next_definition(span));
        return true;
      }
      if (!em_.scope_.keys_for(e.name).empty()) {
        block(em_.fragment(e, span));
        return true;
      }
      return false;
    }

    xml::Node finish() {
      flush();
      tidy(root_);
      return std::move(root_);
    }

   private:
    xml::Node* target() {
      if (mode_ == Mode::Drop) return nullptr;
      if (mode_ == Mode::Keep) return &root_;
      if (!pending_) pending_ = xml::Node::element("omtext");
      return &*pending_;
    }

    void flush() {
      if (!pending_) return;
      tidy(*pending_);
      if (!blank(*pending_)) root_.append(std::move(*pending_));
      pending_.reset();
    }

    void block(xml::Node n) {
      flush();
      root_.append(std::move(n));
    }

    Emitter& em_;
    xml::Node root_;
    Mode mode_;
    DefinitionFacts* facts_;
    std::optional<xml::Node> pending_;
  };

  xml::Node content_of(const NodeList& body, xml::Node root, Mode mode, DefinitionFacts* facts) {
    Sink sink(*this, std::move(root), mode, facts);
    prose::walk(body, sink);
    return sink.finish();
  }

  xml::Node term(const Command& c, const SourceSpan& span, DefinitionFacts* facts) {
    std::optional<std::string> name;
    if (c.opts && !c.opts->pairs.empty()) name = c.opts->pairs.front().key;
    if (!name && current_for_) name = *current_for_;
    if (!name) throw Error::at(ErrorKind::Emit, span, "\\definiendum needs [symbol] outside a definition with for=");
    std::string cd;
    if (const auto* sd = scope_.find_symbol(*name)) {
      cd = sd->home;
    } else if (const auto* kd = key_named(*name)) {
      cd = kd->home;
    } else {
      throw Error::at(ErrorKind::Emit, span,
                      "\\definiendum[" + *name + "]: no visible symbol or key of that name in module '" + m_.id + "'");
    }
    if (facts && !facts->definiendum) facts->definiendum = name;
    xml::Node t = xml::Node::element("term");
    t.set_attr("cd", cd).set_attr("name", *name).set_attr("role", "definiendum");
    return content_of(c.args.empty() ? NodeList{} : c.args[0], std::move(t), Mode::Keep, nullptr);
  }

  xml::Node next_definition(const SourceSpan& span) {
    if (next_def_ >= m_.definitions.size()) {
      throw Error::at(ErrorKind::Emit, span, "definition environment not collected for module '" + m_.id + "'");
    }
    const auto& d = m_.definitions[next_def_++];
    current_for_ = d.for_name;
    auto out = definition(d, next_def_);
    current_for_.reset();
    return std::move(out.element);
  }

  xml::Node fragment(const Environment& e, const SourceSpan& span) {
    const syntax::KeyValList opts = e.opts.value_or(syntax::KeyValList{});
    auto id = opts.text("id");
    if (!id) {
      throw Error::at(ErrorKind::Emit, span, "annotated environment '" + e.name + "' needs an id= option");
    }
    xml::Node el = xml::Node::element("omtext");
    el.set_attr("xml:id", *id).set_attr("type", e.name);
    el = content_of(e.body, std::move(el), Mode::Keep, nullptr);
    std::string subject = doc_uri_ + "#" + *id;
    auto own = rdfa::triples_from_keyvals(subject, e.name, opts, scope_, keyctx_);
    if (!own.empty()) {
      el.set_attr("about", subject);
      prepend_properties(el, own, ctx_.prefixes);
    }
    triples.insert(triples.end(), own.begin(), own.end());
    return el;
  }

  const modsys::ModuleDef& m_;
  const modsys::Scope& scope_;
  const Context& ctx_;
  std::string doc_uri_;
  rdfa::KeyContext keyctx_;
  std::size_t next_def_ = 0;
  std::optional<std::string> current_for_;
};

xml::Node keydef_element(const modsys::KeyDef& kd, bool with_id) {
  xml::Node n = xml::Node::element("meta");
  n.set_attr("name", "keydef").set_attr("env", kd.env).set_attr("key", kd.key);
  if (with_id) n.set_attr("xml:id", kd.key);
  if (kd.resource) n.set_attr("range", "resource");
  if (kd.owltype) n.set_attr("owltype", *kd.owltype);
  return n;
}

xml::Node notation_element(const modsys::SymDef& sd, const modsys::Scope& scope, const Context& ctx) {
  content::OMS head{sd.home, sd.name};
  const notation::NotationRule* rule = ctx.rules.find(head);
  notation::NotationRule compiled;
  if (!rule) {
    compiled = notation::compile_notation(sd, scope);
    rule = &compiled;
  }
  xml::Node proto = xml::Node::element("prototype");
  xml::Node oms = content::to_element(content::OMObject{head});
  if (sd.arity == 0) {
    proto.append(std::move(oms));
  } else {
    xml::Node app = xml::Node::element("OMA");
    app.append(std::move(oms));
    for (int k = 1; k <= sd.arity; ++k) {
      xml::Node e = xml::Node::element("expr");
      e.set_attr("name", "arg" + std::to_string(k));
      app.append(std::move(e));
    }
    proto.append(std::move(app));
  }
  xml::Node rendering = xml::Node::element("rendering");
  rendering.append(notation::template_to_mathml(rule->rendering, "m:"));
  xml::Node n = xml::Node::element("notation");
  n.append(std::move(proto));
  n.append(std::move(rendering));
  return n;
}

void check_ids(const xml::Node& root) {
  std::set<std::string> seen;
  xml::for_each_element(root, [&](const xml::Node& n) {
    if (const auto* id = n.attr("xml:id"); id && !seen.insert(*id).second) {
      throw Error(ErrorKind::Emit, "duplicate xml:id '" + *id + "' in one document");
    }
  });
}

}  // namespace

EmittedDefinition emit_definition(const modsys::DefinitionBlock& d, std::size_t index, const modsys::ModuleDef& m,
                                  const modsys::Scope& scope, const Context& ctx) {
  Emitter em(m, scope, ctx);
  return em.definition(d, index);
}

EmittedTheory emit_theory(const modsys::ModuleDef& m, const modsys::Scope& scope, const Context& ctx) {
  if (scope.module() != m.id) {
    throw Error(ErrorKind::Emit, "scope of '" + scope.module() + "' given for module '" + m.id + "'");
  }
  xml::Node th = xml::Node::element("theory");
  th.set_attr("xml:id", m.id);
  for (const auto& imp : m.imports) {
    xml::Node n = xml::Node::element("imports");
    n.set_attr("from", import_target(imp));
    if (imp.meta) n.set_attr("type", "metalanguage");
    th.append(std::move(n));
  }
  std::set<std::string> key_ids;
  for (const auto& kd : m.keydefs) th.append(keydef_element(kd, key_ids.insert(kd.key).second));
  for (const auto& sd : m.symdefs) {
    xml::Node s = xml::Node::element("symbol");
    s.set_attr("xml:id", sd.name);
    if (sd.owltype) s.set_attr("owltype", *sd.owltype);
    th.append(std::move(s));
    th.append(notation_element(sd, scope, ctx));
  }
  Emitter em(m, scope, ctx);
  th = em.blocks(m.body, std::move(th), false);

  std::string subject = ctx.corpus.doc_uri(m.origin) + "#" + m.id;
  rdfa::KeyContext keyctx{ctx.graph, ctx.corpus, ctx.rules, m.origin};
  auto own = rdfa::triples_from_keyvals(subject, "module", m.annotations, scope, keyctx);
  if (!own.empty()) {
    th.set_attr("about", subject);
    prepend_properties(th, own, ctx.prefixes);
  }
  EmittedTheory out{std::move(th), std::move(own)};
  out.triples.insert(out.triples.end(), em.triples.begin(), em.triples.end());
  return out;
}

xml::Document emit_document(const modsys::SourceFile& file, const Context& ctx) {
  xml::Document doc;
  doc.root = xml::Node::element("omdoc");
  doc.root.set_attr("xmlns", kOmdocNs);
  doc.root.set_attr("xmlns:m", notation::kMathMlNs);
  const std::string doc_uri = ctx.corpus.doc_uri(file.path);
  doc.root.set_attr("about", doc_uri);

  std::vector<rdfa::Triple> inner;
  std::vector<rdfa::Triple> root_triples;
  for (const auto& m : file.modules) {
    auto scope = modsys::visible_scope(ctx.graph, m.id);
    if (!m.anonymous) {
      auto th = emit_theory(m, scope, ctx);
      doc.root.append(std::move(th.element));
      inner.insert(inner.end(), th.triples.begin(), th.triples.end());
      continue;
    }
    for (const auto& imp : m.imports) {
      xml::Node n = xml::Node::element("imports");
      n.set_attr("from", import_target(imp));
      if (imp.meta) n.set_attr("type", "metalanguage");
      doc.root.append(std::move(n));
    }
    Emitter em(m, scope, ctx);
    doc.root = em.blocks(m.body, std::move(doc.root), true);
    inner.insert(inner.end(), em.triples.begin(), em.triples.end());
    rdfa::KeyContext keyctx{ctx.graph, ctx.corpus, ctx.rules, file.path};
    root_triples = rdfa::triples_from_keyvals(doc_uri, m.env_name, m.annotations, scope, keyctx);
  }

  rdfa::PrefixMap used;
  for (const auto& t : inner) {
    auto c = ctx.prefixes.compact(t.predicate);
    if (c) used.add(c->first, ctx.prefixes.entries().at(c->first));
  }
  if (!used.empty()) doc.root.set_attr("prefix", used.attribute());
  rdfa::emit_rdfa(doc, root_triples, ctx.prefixes);
  check_ids(doc.root);
  return doc;
}

std::string serialize(const xml::Document& doc) { return xml::serialize(doc); }

}  // namespace semtex::omdoc
