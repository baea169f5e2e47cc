#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semtex/modsys.hpp"
#include "semtex/uri.hpp"

namespace semtex::pipeline {

namespace fs = std::filesystem;

/// Store path of the corpus index used by the lookup endpoint.
inline constexpr const char* kIndexPath = "_corpus";
inline constexpr const char* kIndexVariant = "json";

/// Variant names, in content-negotiation order.
inline const std::vector<std::string> kFormats = {"xhtml", "omdoc", "owl", "nt"};

struct Options {
  std::string base_uri = uri::default_base();
  std::optional<fs::path> root;  // corpus root; deepest common directory when absent
  std::set<std::string> formats{kFormats.begin(), kFormats.end()};
  std::string viewer_script = "semtex-viewer.js";
  std::string definition_label = "Definition";
};

/// Compiled form of one source file. `owl` is present only for files with
/// ontology modules.
struct Artifact {
  fs::path source;
  std::string doc_path;  // e.g. "math/reals"
  std::map<std::string, std::string> variants;
};

struct Result {
  std::vector<Artifact> artifacts;  // in file discovery order
  std::string index;                // JSON corpus index
};

/// Parses, resolves and emits the import closure of `roots`. Throws the
/// first diagnostic.
Result compile(const std::vector<fs::path>& roots, const Options& opts = {},
               const modsys::Loader& loader = modsys::file_loader());

/// Same, over an already built graph.
Result compile_graph(const modsys::ModuleGraph& graph, const Options& opts = {});

/// Writes `<out>/<doc_path>.<variant>` for every artifact and
/// `<out>/_corpus.json`, each file replaced atomically; unchanged files are
/// left untouched. Returns the paths written.
std::vector<fs::path> write_outputs(const Result& result, const fs::path& out);

/// The corpus index: for every theory its document path, its symbols and
/// keys with the ids of their definitions, and each definition's rendered
/// XHTML fragment.
///   {"theories": {cd: {"path": p, "symbols": {name: [def-id...]}}},
///    "definitions": {cd: {def-id: "<div ...>"}}}

}  // namespace semtex::pipeline
