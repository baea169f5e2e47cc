#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semtex/content.hpp"
#include "semtex/modsys.hpp"
#include "semtex/notation.hpp"
#include "semtex/uri.hpp"
#include "semtex/xml.hpp"

namespace semtex::rdfa {

inline constexpr const char* kDcNs = "http://purl.org/dc/elements/1.1/";

struct Triple {
  std::string subject;
  std::string predicate;  // full URI
  std::string object;     // literal text or URI
  bool object_is_uri = false;
  std::optional<content::OMObject> value;  // content tree of a formula-valued literal; not part of identity
};
bool operator==(const Triple& a, const Triple& b);
bool operator<(const Triple& a, const Triple& b);

class PrefixMap {
 public:
  /// Only `dc`.
  static PrefixMap with_defaults();
  /// Parses an RDFa `prefix` attribute value (`p: uri p2: uri2`).
  static PrefixMap parse(std::string_view attribute);

  /// Throws when `prefix` is already bound to another namespace.
  void add(const std::string& prefix, const std::string& ns);
  const std::map<std::string, std::string>& entries() const { return map_; }
  bool empty() const { return map_.empty(); }

  /// `p:local` -> full URI; nullopt for an unbound prefix.
  std::optional<std::string> expand(std::string_view curie) const;
  /// Full URI -> CURIE using the longest matching namespace; nullopt when none matches.
  std::optional<std::pair<std::string, std::string>> compact(std::string_view uri) const;
  /// The attribute value, prefixes in sorted order.
  std::string attribute() const;

 private:
  std::map<std::string, std::string> map_;
};

/// `dc` plus one prefix per module that declares keys, named after the module.
PrefixMap vocabulary_prefixes(const modsys::ModuleGraph& graph, const uri::Corpus& corpus);

/// What is needed to turn option values into triple objects.
struct KeyContext {
  const modsys::ModuleGraph& graph;
  const uri::Corpus& corpus;
  const notation::RuleSet& rules;
  modsys::fs::path file;  // the annotated source file; resolves relative references
};

/// Keys every environment understands without a keydef: `id` and `title`
/// (plus `for` on definitions). `title` yields a dc:title triple.
bool builtin_key(std::string_view env, std::string_view key);

/// One triple per annotated key. Keys need a visible keydef for `env` unless
/// built in; unknown keys are errors.
std::vector<Triple> triples_from_keyvals(const std::string& subject, std::string_view env,
                                         const syntax::KeyValList& kvs, const modsys::Scope& scope,
                                         const KeyContext& ctx);

/// Plain text of an option value written in TeX (accents and a few control
/// words resolved, whitespace collapsed).
std::string literal_text(std::string_view tex);

/// Plain-text linearization of a formula under `rules`.
std::string formula_literal(const content::OMObject& obj, const notation::RuleSet& rules);

/// Property element for one triple, placed inside its subject's element.
/// Literal objects become `property` + text (plus the OpenMath of formula
/// values); URI objects become `rel` + `resource`.
xml::Node property_element(const Triple& t, const PrefixMap& prefixes, const std::string& element_name = "meta");

struct EmitOptions {
  std::string element_name = "meta";
  std::string id_attribute = "xml:id";
};

/// Places each triple on the element naming its subject: the root for the
/// root's `about`, the element with the fragment id for `about#id`, or an
/// element whose `about` equals the subject. Declares used prefixes on the
/// root. Throws when a subject has no element.
void emit_rdfa(xml::Document& doc, const std::vector<Triple>& triples, const PrefixMap& prefixes,
               const EmitOptions& opts = {});

/// Triples of the supported RDFa subset (about, property, rel, resource,
/// content, prefix). Subjects default to the root's `about`, else `base`.
std::vector<Triple> extract_triples(const xml::Document& doc, std::string_view base = {});

/// One N-Triples line per triple, in the given order.
std::string to_ntriples(const std::vector<Triple>& triples);

}  // namespace semtex::rdfa
