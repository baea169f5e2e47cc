#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "semtex/modsys.hpp"

namespace semtex::uri {

namespace fs = std::filesystem;

inline constexpr const char* kDefaultBase = "http://localhost:8080";

/// `SEMTEX_BASE_URI` when set, otherwise kDefaultBase. Trailing slashes removed.
std::string default_base();

/// Linked Data naming for the files of one compiled corpus:
/// `{base}/doc/{path}.omdoc` per file and `#name` fragments below it.
class Corpus {
 public:
  Corpus(fs::path root, std::string base);

  /// Root is the deepest directory containing every file of the graph unless
  /// given explicitly.
  static Corpus of(const modsys::ModuleGraph& graph, std::string base = default_base(),
                   std::optional<fs::path> root = std::nullopt);

  const fs::path& root() const { return root_; }
  const std::string& base() const { return base_; }

  /// Root-relative path without extension, `/`-separated, e.g. `math/reals`.
  /// Throws when the file lies outside the root.
  std::string doc_path(const fs::path& file) const;
  std::string doc_uri(const fs::path& file) const;
  std::string doc_uri_for_path(std::string_view doc_path) const;

  std::string module_uri(const modsys::ModuleGraph& graph, std::string_view module) const;
  std::string symbol_uri(const modsys::ModuleGraph& graph, std::string_view module, std::string_view name) const;
  /// Namespace of a vocabulary module's keys: the module's document URI plus `#`.
  std::string vocab_ns(const modsys::ModuleGraph& graph, std::string_view module) const;

  /// Resolves a reference written in `from`: absolute URIs pass through,
  /// `path#frag` resolves the path against the file's directory, `#frag`
  /// stays in the current document.
  std::string resolve_reference(const fs::path& from, std::string_view ref) const;

 private:
  fs::path root_;
  std::string base_;
};

/// Doc path of a `/doc/...` URL path: the `.omdoc` suffix is dropped.
std::string strip_doc_suffix(std::string_view path);

}  // namespace semtex::uri
