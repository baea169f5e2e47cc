#include "semtex/rdfa.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "semtex/prose.hpp"
#include "semtex/text.hpp"

namespace semtex::rdfa {

bool operator==(const Triple& a, const Triple& b) {
  return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object &&
         a.object_is_uri == b.object_is_uri;
}

bool operator<(const Triple& a, const Triple& b) {
  return std::tie(a.subject, a.predicate, a.object, a.object_is_uri) <
         std::tie(b.subject, b.predicate, b.object, b.object_is_uri);
}

// ---------------------------------------------------------------------------
// prefixes

PrefixMap PrefixMap::with_defaults() {
  PrefixMap p;
  p.add("dc", kDcNs);
  return p;
}

PrefixMap PrefixMap::parse(std::string_view attribute) {
  PrefixMap p;
  std::istringstream in{std::string(attribute)};
  std::string name;
  std::string ns;
  while (in >> name) {
    if (name.size() < 2 || name.back() != ':') {
      throw Error(ErrorKind::Rdfa, "malformed prefix declaration near '" + name + "'");
    }
    if (!(in >> ns)) throw Error(ErrorKind::Rdfa, "prefix '" + name + "' has no namespace");
    name.pop_back();
    p.add(name, ns);
  }
  return p;
}

void PrefixMap::add(const std::string& prefix, const std::string& ns) {
  if (prefix.empty() || prefix.find_first_of(": \t\n") != std::string::npos) {
    throw Error(ErrorKind::Rdfa, "invalid prefix name '" + prefix + "'");
  }
  auto [it, inserted] = map_.emplace(prefix, ns);
  if (!inserted && it->second != ns) {
    throw Error(ErrorKind::Rdfa, "prefix '" + prefix + "' bound to both " + it->second + " and " + ns);
  }
}

std::optional<std::string> PrefixMap::expand(std::string_view curie) const {
  auto colon = curie.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto it = map_.find(std::string(curie.substr(0, colon)));
  if (it == map_.end()) return std::nullopt;
  return it->second + std::string(curie.substr(colon + 1));
}

std::optional<std::pair<std::string, std::string>> PrefixMap::compact(std::string_view uri) const {
  const std::pair<const std::string, std::string>* best = nullptr;
  for (const auto& entry : map_) {
    const auto& ns = entry.second;
    if (uri.size() >= ns.size() && uri.compare(0, ns.size(), ns) == 0 &&
        (!best || ns.size() > best->second.size())) {
      best = &entry;
    }
  }
  if (!best) return std::nullopt;
  return std::make_pair(best->first, best->first + ":" + std::string(uri.substr(best->second.size())));
}

std::string PrefixMap::attribute() const {
  std::string out;
  for (const auto& [p, ns] : map_) {
    if (!out.empty()) out += ' ';
    out += p + ": " + ns;
  }
  return out;
}

PrefixMap vocabulary_prefixes(const modsys::ModuleGraph& graph, const uri::Corpus& corpus) {
  PrefixMap p = PrefixMap::with_defaults();
  for (const auto& id : graph.modules()) {
    if (!graph.module(id).keydefs.empty()) p.add(id, corpus.vocab_ns(graph, id));
  }
  return p;
}

// ---------------------------------------------------------------------------
// keyvals -> triples

bool builtin_key(std::string_view env, std::string_view key) {
  return key == "id" || key == "title" || (key == "for" && env == "definition");
}

std::string literal_text(std::string_view tex) {
  auto ast = syntax::parse_document(tex, "<value>");
  return text::trim(text::collapse_space(prose::plain_text(ast.nodes)));
}

std::string formula_literal(const content::OMObject& obj, const notation::RuleSet& rules) {
  return notation::linearize(notation::render_object(obj, rules).math);
}

std::vector<Triple> triples_from_keyvals(const std::string& subject, std::string_view env,
                                         const syntax::KeyValList& kvs, const modsys::Scope& scope,
                                         const KeyContext& ctx) {
  std::vector<Triple> out;
  for (const auto& kv : kvs.pairs) {
    if (builtin_key(env, kv.key)) {
      if (kv.key != "title") continue;
      if (!kv.text()) throw Error::at(ErrorKind::Rdfa, kvs.span, "title= needs a text value");
      out.push_back({subject, std::string(kDcNs) + "title", literal_text(*kv.text()), false, std::nullopt});
      continue;
    }
    const modsys::KeyDef* kd = scope.find_key(env, kv.key);
    if (!kd) {
      throw Error::at(ErrorKind::Rdfa, kvs.span,
                      "unknown key '" + kv.key + "' for environment '" + std::string(env) +
                          "': no visible \\keydef{" + std::string(env) + "}{" + kv.key + "} in module '" +
                          scope.module() + "'");
    }
    Triple t;
    t.subject = subject;
    t.predicate = ctx.corpus.vocab_ns(ctx.graph, kd->home) + kd->key;
    if (kv.bare()) throw Error::at(ErrorKind::Rdfa, kvs.span, "key '" + kv.key + "' needs a value");
    if (const auto* m = kv.math()) {
      if (kd->resource) {
        throw Error::at(ErrorKind::Rdfa, m->span, "key '" + kv.key + "' takes a resource reference, not a formula");
      }
      content::OMObject obj = content::expand_math(m->tokens, scope, m->span);
      t.object = formula_literal(obj, ctx.rules);
      t.value = std::move(obj);
    } else if (kd->resource) {
      t.object = ctx.corpus.resolve_reference(ctx.file, literal_text(*kv.text()));
      t.object_is_uri = true;
    } else {
      t.object = literal_text(*kv.text());
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// emission

namespace {

std::string curie_of(const std::string& uri, const PrefixMap& prefixes) {
  auto c = prefixes.compact(uri);
  if (!c) throw Error(ErrorKind::Rdfa, "no prefix declared for predicate <" + uri + ">");
  return c->second;
}

}  // namespace

xml::Node property_element(const Triple& t, const PrefixMap& prefixes, const std::string& element_name) {
  xml::Node n = xml::Node::element(element_name);
  if (t.object_is_uri) {
    n.set_attr("rel", curie_of(t.predicate, prefixes));
    n.set_attr("resource", t.object);
    return n;
  }
  n.set_attr("property", curie_of(t.predicate, prefixes));
  n.append_text(t.object);
  if (t.value && element_name == "meta") n.append(content::to_openmath(*t.value));
  return n;
}

namespace {

xml::Node* find_attr(xml::Node& root, const char* attr, std::string_view value) {
  return xml::find_if(root, [&](const xml::Node& n) {
    const std::string* v = n.attr(attr);
    return v && *v == value;
  });
}

xml::Node& host_for(xml::Document& doc, const std::string& subject, const EmitOptions& opts) {
  const std::string root_about = doc.root.attr_or("about");
  if (!root_about.empty() && subject == root_about) return doc.root;
  if (xml::Node* n = find_attr(doc.root, "about", subject)) return *n;
  if (!root_about.empty() && subject.size() > root_about.size() + 1 &&
      subject.compare(0, root_about.size(), root_about) == 0 && subject[root_about.size()] == '#') {
    std::string frag = subject.substr(root_about.size() + 1);
    if (xml::Node* n = find_attr(doc.root, opts.id_attribute.c_str(), frag)) {
      n->set_attr("about", subject);
      return *n;
    }
  }
  throw Error(ErrorKind::Rdfa, "no element for triple subject <" + subject + ">");
}

void insert_property(xml::Node& host, xml::Node prop, const std::string& element_name) {
  auto it = host.children.begin();
  while (it != host.children.end() && it->is_element() && it->name == element_name &&
         (it->attr("property") || it->attr("rel"))) {
    ++it;
  }
  host.children.insert(it, std::move(prop));
}

}  // namespace

void emit_rdfa(xml::Document& doc, const std::vector<Triple>& triples, const PrefixMap& prefixes,
               const EmitOptions& opts) {
  if (triples.empty()) return;
  PrefixMap used = doc.root.attr("prefix") ? PrefixMap::parse(doc.root.attr_or("prefix")) : PrefixMap{};
  for (const auto& t : triples) {
    auto c = prefixes.compact(t.predicate);
    if (!c) throw Error(ErrorKind::Rdfa, "no prefix declared for predicate <" + t.predicate + ">");
    used.add(c->first, prefixes.entries().at(c->first));
    xml::Node& host = host_for(doc, t.subject, opts);
    insert_property(host, property_element(t, prefixes, opts.element_name), opts.element_name);
  }
  doc.root.set_attr("prefix", used.attribute());
}

// ---------------------------------------------------------------------------
// extraction

namespace {

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

class Extractor {
 public:
  explicit Extractor(std::string base) : base_(std::move(base)) {}

  void walk(const xml::Node& n, const std::string& subject, const PrefixMap& outer) {
    if (!n.is_element()) return;
    PrefixMap prefixes = outer;
    if (const auto* p = n.attr("prefix")) {
      PrefixMap local = PrefixMap::parse(*p);
      for (const auto& [k, v] : local.entries()) prefixes.add(k, v);
    }
    std::string here = subject;
    if (const auto* about = n.attr("about")) here = resolve(*about);
    if (const auto* prop = n.attr("property")) {
      std::string object;
      bool is_uri = false;
      if (const auto* res = n.attr("resource")) {
        object = resolve(*res);
        is_uri = true;
      } else if (const auto* content = n.attr("content")) {
        object = *content;
      } else {
        object = n.direct_text();
      }
      for (const auto& term : words(*prop)) out.push_back({here, predicate(term, prefixes), object, is_uri, std::nullopt});
    }
    if (const auto* rel = n.attr("rel")) {
      if (const auto* res = n.attr("resource")) {
        for (const auto& term : words(*rel)) out.push_back({here, predicate(term, prefixes), resolve(*res), true, std::nullopt});
      }
    }
    for (const auto& c : n.children) walk(c, here, prefixes);
  }

  std::vector<Triple> out;

 private:
  std::string resolve(const std::string& ref) const {
    if (!ref.empty() && ref[0] == '#') return base_ + ref;
    if (ref.empty()) return base_;
    return ref;
  }

  static std::string predicate(const std::string& term, const PrefixMap& prefixes) {
    if (term.find("://") != std::string::npos) return term;
    auto full = prefixes.expand(term);
    if (!full) throw Error(ErrorKind::Rdfa, "undeclared prefix in '" + term + "'");
    return *full;
  }

  std::string base_;
};

}  // namespace

std::vector<Triple> extract_triples(const xml::Document& doc, std::string_view base) {
  std::string b = doc.root.attr_or("about", std::string(base));
  Extractor ex(b);
  ex.walk(doc.root, b, PrefixMap{});
  return ex.out;
}

// ---------------------------------------------------------------------------
// N-Triples

namespace {

std::string nt_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_ntriples(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += "<" + t.subject + "> <" + t.predicate + "> ";
    out += t.object_is_uri ? "<" + t.object + ">" : "\"" + nt_escape(t.object) + "\"";
    out += " .\n";
  }
  return out;
}

}  // namespace semtex::rdfa
