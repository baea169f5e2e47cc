#pragma once

#include <functional>
#include <map>
#include <string>

#include "semtex/content.hpp"
#include "semtex/notation.hpp"
#include "semtex/xml.hpp"

namespace semtex::page {

inline constexpr const char* kXhtmlNs = "http://www.w3.org/1999/xhtml";
inline constexpr const char* kDoctype =
    "<!DOCTYPE html PUBLIC \"-//W3C//DTD XHTML 1.1 plus MathML 2.0//EN\" "
    "\"http://www.w3.org/Math/DTD/mathml2/xhtml-math11-f.dtd\">";

struct PageOptions {
  std::function<std::string(const content::OMS&)> symbol_uri;  // href of symbol tokens
  /// Number of a theory in definition labels ("Definition n.m"); theories
  /// not listed are numbered by their position in the page.
  std::map<std::string, int> theory_numbers;
  /// Module id standing for definitions placed directly in the document.
  std::string document_module;
  std::string definition_label = "Definition";
  std::string viewer_script = "semtex-viewer.js";
  std::string lookup_endpoint;  // written to body/@data-lookup when set
};

/// XHTML+MathML page of an emitted OMDoc document: one section per theory
/// with its symbol list, numbered definitions, formulas with parallel
/// markup, and the document's RDFa carried over. Throws on malformed input.
xml::Document assemble_page(const xml::Document& omdoc, const notation::RuleSet& rules, const PageOptions& opts);

/// `div.definition` elements of a page, keyed by (cd, for); a definition
/// without `for` is keyed by its own id.
struct DefinitionFragment {
  std::string cd;
  std::string for_name;
  std::string id;
  xml::Node element;
};
std::vector<DefinitionFragment> definition_fragments(const xml::Document& page);

}  // namespace semtex::page
