#pragma once

#include <string>
#include <vector>

#include "semtex/modsys.hpp"
#include "semtex/notation.hpp"
#include "semtex/rdfa.hpp"
#include "semtex/uri.hpp"
#include "semtex/xml.hpp"

namespace semtex::omdoc {

inline constexpr const char* kOmdocNs = "http://omdoc.org/ns";

struct Context {
  Context(const modsys::ModuleGraph& g, const uri::Corpus& c, const notation::RuleSet& r);

  const modsys::ModuleGraph& graph;
  const uri::Corpus& corpus;
  const notation::RuleSet& rules;
  rdfa::PrefixMap prefixes;  // every prefix the corpus may use
};

/// A definition element plus the triples placed on it.
struct EmittedDefinition {
  xml::Node element;
  std::vector<rdfa::Triple> triples;
};

/// `index` is the 1-based position of the definition within its module and
/// names it `{module}.def{index}` when it has no `id=`. A missing `for=` is
/// taken from the first definiendum, else from a formula whose first argument
/// is a symbol of the module itself.
EmittedDefinition emit_definition(const modsys::DefinitionBlock& d, std::size_t index, const modsys::ModuleDef& m,
                                  const modsys::Scope& scope, const Context& ctx);

struct EmittedTheory {
  xml::Node element;
  std::vector<rdfa::Triple> triples;
};

/// `theory` element: imports, key declarations, symbol/notation pairs,
/// then definitions and annotated fragments in source order.
EmittedTheory emit_theory(const modsys::ModuleDef& m, const modsys::Scope& scope, const Context& ctx);

/// The `omdoc` document of one source file: its theories, then the
/// document-module's imports and content directly under the root, whose
/// `about` is the file's document URI.
xml::Document emit_document(const modsys::SourceFile& file, const Context& ctx);

/// Canonical bytes.
std::string serialize(const xml::Document& doc);

/// `from` attribute of an import: the written path with `.omdoc`, then `#id`.
std::string import_target(const modsys::ImportRef& ref);

}  // namespace semtex::omdoc
