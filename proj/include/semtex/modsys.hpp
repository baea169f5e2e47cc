#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semtex/diagnostics.hpp"
#include "semtex/syntax.hpp"

namespace semtex::modsys {

namespace fs = std::filesystem;

struct SymDef {
  std::string name;
  int arity = 0;
  std::vector<syntax::Token> body;  // significant tokens of the notation body
  std::string home;
  std::optional<std::string> owltype;
  SourceSpan span;

  /// TeX command name: the symbol name with hyphens removed.
  std::string command() const;
};

struct KeyDef {
  std::string env;
  std::string key;
  std::string home;
  std::optional<std::string> owltype;
  bool resource = false;  // value names a resource rather than a literal
  SourceSpan span;
};

struct ImportRef {
  std::string path;  // as written, empty for a module in the same file
  std::string module_id;
  bool meta = false;
  SourceSpan span;
};

struct DefinitionBlock {
  std::optional<std::string> id;
  std::optional<std::string> for_name;
  std::optional<std::string> title;
  syntax::KeyValList opts;
  syntax::NodeList body;
  SourceSpan span;
};

struct ModuleDef {
  std::string id;
  fs::path origin;
  std::string env_name = "module";  // or "document"
  bool anonymous = false;           // the document-module of a file
  std::vector<ImportRef> imports;
  std::vector<SymDef> symdefs;
  std::vector<KeyDef> keydefs;
  std::vector<DefinitionBlock> definitions;
  syntax::KeyValList annotations;  // the environment's options
  syntax::NodeList body;
  SourceSpan span;

  const SymDef* symdef(std::string_view name) const;
};

/// One ModuleDef per `module` environment, in source order, followed by the
/// document-module when the file has a `document` environment.
std::vector<ModuleDef> collect_modules(const syntax::DocumentAST& ast, const fs::path& origin);

struct SourceFile {
  fs::path path;  // absolute, lexically normal
  syntax::DocumentAST ast;
  std::vector<ModuleDef> modules;
};

struct Edge {
  std::string from;
  std::string to;
  bool meta = false;
};

using Loader = std::function<syntax::DocumentAST(const fs::path&)>;

/// Reads and parses a file from disk.
Loader file_loader();

class ModuleGraph {
 public:
  /// Files in discovery order: roots first, then imports depth-first.
  const std::vector<SourceFile>& files() const { return files_; }
  /// Module ids in discovery order.
  const std::vector<std::string>& modules() const { return order_; }
  bool contains(std::string_view id) const;
  const ModuleDef& module(std::string_view id) const;
  const SourceFile& file_of(std::string_view id) const;
  const SourceFile* file(const fs::path& path) const;
  std::vector<Edge> edges() const;
  /// Module ids, every module after all modules it imports.
  std::vector<std::string> dependency_order() const;
  /// Modules reachable from `id` over import edges, including `id`.
  std::set<std::string> reachable(std::string_view id) const;

 private:
  friend ModuleGraph build_graph(const std::vector<fs::path>&, const Loader&);
  std::vector<SourceFile> files_;
  std::vector<std::string> order_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> index_;
};

/// Loads `roots` and everything they import. Import paths resolve relative to
/// the importing file; `.tex` is appended when the path has no extension.
/// Rejects cycles, naming the module ids on the cycle.
ModuleGraph build_graph(const std::vector<fs::path>& roots, const Loader& loader = file_loader());

/// Resolves an import path written in `importer`.
fs::path resolve_import(const fs::path& importer, std::string_view written);

/// Import graph in DOT; meta imports are dashed.
std::string to_dot(const ModuleGraph& graph);

class Scope {
 public:
  const std::string& module() const { return module_; }
  const std::map<std::string, SymDef>& symbols() const { return symbols_; }
  const std::map<std::pair<std::string, std::string>, KeyDef>& keys() const { return keys_; }

  const SymDef* find_symbol(std::string_view name) const;
  /// Resolves a TeX command name: an exact symbol name first, then the
  /// hyphen-free alias. Throws on an ambiguous alias.
  const SymDef* find_command(std::string_view command) const;
  const KeyDef* find_key(std::string_view env, std::string_view key) const;
  /// Keys visible for an environment name.
  std::vector<const KeyDef*> keys_for(std::string_view env) const;

 private:
  friend Scope visible_scope(const ModuleGraph&, std::string_view);
  std::string module_;
  std::map<std::string, SymDef> symbols_;
  std::map<std::pair<std::string, std::string>, KeyDef> keys_;
  std::map<std::string, std::vector<std::string>, std::less<>> aliases_;
};

/// Own declarations plus everything reachable over imports. An imported
/// declaration is hidden by one from a module that itself reaches it; two
/// remaining candidates are an ambiguity error.
Scope visible_scope(const ModuleGraph& graph, std::string_view module);

}  // namespace semtex::modsys
