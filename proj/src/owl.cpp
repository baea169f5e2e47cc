#include "semtex/owl.hpp"

#include <set>

#include "semtex/content.hpp"
#include "semtex/prose.hpp"
#include "semtex/text.hpp"

namespace semtex::owl {

namespace {

std::string kind_of(const std::optional<std::string>& owltype, const char* fallback, const SourceSpan& span) {
  if (!owltype) return fallback;
  if (*owltype == "class") return "Class";
  if (*owltype == "individual") return "NamedIndividual";
  if (*owltype == "objectproperty") return "ObjectProperty";
  if (*owltype == "annotationproperty") return "AnnotationProperty";
  throw Error::at(ErrorKind::Owl, span,
                  "owltype='" + *owltype + "': expected class, individual, objectproperty or annotationproperty");
}

xml::Node el(const std::string& name) { return xml::Node::element(name); }

xml::Node iri_ref(const std::string& kind, const std::string& iri) {
  xml::Node n = el(kind);
  n.set_attr("IRI", iri);
  return n;
}

xml::Node literal(const std::string& text) {
  xml::Node n = el("Literal");
  n.append_text(text);
  return n;
}

/// Definition text with formulas linearized.
class PlainText : public prose::Sink {
 public:
  PlainText(const modsys::Scope& scope, const notation::RuleSet& rules) : scope_(scope), rules_(rules) {}
  void text(const std::string& s) override { out += s; }
  void math(const syntax::MathGroup& m, const SourceSpan& span) override {
    auto obj = content::expand_math(m.tokens, scope_, span);
    out += notation::linearize(notation::render_object(obj, rules_).math);
  }
  std::string out;

 private:
  const modsys::Scope& scope_;
  const notation::RuleSet& rules_;
};

class Exporter {
 public:
  Exporter(const modsys::SourceFile& file, const omdoc::Context& ctx) : file_(file), ctx_(ctx) {
    doc_uri_ = ctx.corpus.doc_uri(file.path);
    root_ = el("Ontology");
    root_.set_attr("xmlns", kOwlNs);
    root_.set_attr("ontologyIRI", doc_uri_);
  }

  void add(const modsys::ModuleDef& m, const modsys::Scope& scope) {
    if (!is_ontology(m)) {
      throw Error::at(ErrorKind::Owl, m.span,
                      "module '" + m.id + "' is not an ontology: it has no \\metalanguage import of owl");
    }
    for (const auto& imp : m.imports) {
      if (imp.meta || imp.path.empty()) continue;
      std::string target = ctx_.corpus.doc_uri(ctx_.graph.file_of(imp.module_id).path);
      if (target != doc_uri_ && seen_imports_.insert(target).second) {
        xml::Node i = el("Import");
        i.append_text(target);
        imports_.push_back(std::move(i));
      }
    }

    rdfa::KeyContext keyctx{ctx_.graph, ctx_.corpus, ctx_.rules, file_.path};
    for (const auto& t : rdfa::triples_from_keyvals(doc_uri_, "module", m.annotations, scope, keyctx)) {
      xml::Node a = el("Annotation");
      a.append(iri_ref("AnnotationProperty", t.predicate));
      if (t.object_is_uri) {
        xml::Node v = el("IRI");
        v.append_text(t.object);
        a.append(std::move(v));
      } else {
        a.append(literal(t.object));
      }
      annotations_.push_back(std::move(a));
    }

    std::string ns = ctx_.corpus.vocab_ns(ctx_.graph, m.id);
    for (const auto& kd : m.keydefs) declare(entity_kind(kd), ns + kd.key);
    for (const auto& sd : m.symdefs) declare(entity_kind(sd), ctx_.corpus.symbol_uri(ctx_.graph, m.id, sd.name));

    std::size_t index = 0;
    for (const auto& d : m.definitions) {
      ++index;
      auto emitted = omdoc::emit_definition(d, index, m, scope, ctx_);
      const std::string* target = emitted.element.attr("for");
      if (!target) continue;
      std::string iri = m.symdef(*target) ? ctx_.corpus.symbol_uri(ctx_.graph, m.id, *target) : ns + *target;
      PlainText pt(scope, ctx_.rules);
      prose::walk(d.body, pt);
      xml::Node a = el("AnnotationAssertion");
      a.append(iri_ref("AnnotationProperty", kRdfsComment));
      xml::Node subject = el("IRI");
      subject.append_text(iri);
      a.append(std::move(subject));
      a.append(literal(text::trim(text::collapse_space(pt.out))));
      assertions_.push_back(std::move(a));
    }
  }

  xml::Document finish() {
    for (auto* group : {&imports_, &annotations_, &declarations_, &assertions_}) {
      for (auto& n : *group) root_.append(std::move(n));
    }
    xml::Document doc;
    doc.root = std::move(root_);
    return doc;
  }

 private:
  void declare(const std::string& kind, const std::string& iri) {
    if (!declared_.insert(iri).second) return;
    xml::Node d = el("Declaration");
    d.append(iri_ref(kind, iri));
    declarations_.push_back(std::move(d));
  }

  const modsys::SourceFile& file_;
  const omdoc::Context& ctx_;
  std::string doc_uri_;
  xml::Node root_;
  std::vector<xml::Node> imports_, annotations_, declarations_, assertions_;
  std::set<std::string> seen_imports_, declared_;
};

}  // namespace

bool is_ontology(const modsys::ModuleDef& m) {
  for (const auto& imp : m.imports) {
    if (imp.meta && imp.module_id == "owl") return true;
  }
  return false;
}

std::string entity_kind(const modsys::SymDef& sd) {
  return kind_of(sd.owltype, sd.arity == 0 ? "NamedIndividual" : "AnnotationProperty", sd.span);
}

std::string entity_kind(const modsys::KeyDef& kd) { return kind_of(kd.owltype, "AnnotationProperty", kd.span); }

xml::Document export_owl(const modsys::ModuleDef& m, const modsys::Scope& scope, const omdoc::Context& ctx) {
  Exporter ex(ctx.graph.file_of(m.id), ctx);
  ex.add(m, scope);
  return ex.finish();
}

std::optional<xml::Document> export_file(const modsys::SourceFile& file, const omdoc::Context& ctx) {
  Exporter ex(file, ctx);
  bool any = false;
  for (const auto& m : file.modules) {
    if (!is_ontology(m)) continue;
    ex.add(m, modsys::visible_scope(ctx.graph, m.id));
    any = true;
  }
  if (!any) return std::nullopt;
  return ex.finish();
}

}  // namespace semtex::owl
