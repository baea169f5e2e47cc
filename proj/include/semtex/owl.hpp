#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semtex/omdoc.hpp"

namespace semtex::owl {

inline constexpr const char* kOwlNs = "http://www.w3.org/2002/07/owl#";
inline constexpr const char* kRdfsComment = "http://www.w3.org/2000/01/rdf-schema#comment";

/// True when the module imports a module named `owl` as its meta language.
bool is_ontology(const modsys::ModuleDef& m);

/// OWL entity kind for a declaration: Class, NamedIndividual,
/// ObjectProperty or AnnotationProperty.
std::string entity_kind(const modsys::SymDef& sd);
std::string entity_kind(const modsys::KeyDef& kd);

/// OWL/XML ontology of one module; its IRI is the module file's document
/// URI. Throws ErrorKind::Owl when the module is not an ontology.
xml::Document export_owl(const modsys::ModuleDef& m, const modsys::Scope& scope, const omdoc::Context& ctx);

/// One ontology holding every ontology module of the file; nullopt when the
/// file has none.
std::optional<xml::Document> export_file(const modsys::SourceFile& file, const omdoc::Context& ctx);

}  // namespace semtex::owl
