#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semtex::store {

namespace fs = std::filesystem;

/// Variant name (file extension) -> bytes, e.g. "omdoc", "xhtml", "owl", "nt".
using Variants = std::map<std::string, std::string>;

struct RevisionInfo {
  int revision = 0;
  std::string created;  // UTC, ISO 8601 with microseconds
};

struct StoredResource {
  std::string path;
  int revision = 0;
  std::string created;
  Variants variants;
};

/// Directory-backed revision store:
///   <root>/<path>/<rev>/doc.<variant>   immutable once published
///   <root>/<path>/<rev>/created
///   <root>/<path>/LATEST                one line, replaced by rename
/// A revision directory is assembled under a dot-prefixed temporary name and
/// renamed into place; the revision becomes visible when LATEST names it.
/// Writers to one path are serialized within the process.
class Store {
 public:
  explicit Store(fs::path root);

  const fs::path& root() const { return root_; }

  /// Next revision of `path` (1 for a new path). Throws ErrorKind::Store for
  /// invalid paths or variant names, ErrorKind::Io on file system failure.
  int put(std::string_view path, const Variants& variants);

  /// Latest revision when `revision` is absent. Throws ErrorKind::NotFound.
  StoredResource get(std::string_view path, std::optional<int> revision = std::nullopt) const;

  /// Bytes of one variant; nullopt when the revision lacks it.
  std::optional<std::string> get_variant(std::string_view path, std::string_view variant,
                                         std::optional<int> revision = std::nullopt) const;

  /// Ascending and contiguous from 1. Throws ErrorKind::NotFound.
  std::vector<RevisionInfo> list_revisions(std::string_view path) const;

  /// 0 when the path has no revision.
  int latest(std::string_view path) const;

  /// Canonical form of a document path: `/`-separated segments of letters,
  /// digits, `_`, `-` and `.`; no empty, `.`/`..`, dot-prefixed, all-digit or
  /// `LATEST` segments. Leading and trailing slashes are dropped.
  static std::string normalize_path(std::string_view path);

 private:
  fs::path dir_of(const std::string& path) const;
  std::shared_ptr<std::mutex> lock_for(const std::string& path);

  fs::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::string last_created_;
};

}  // namespace semtex::store
