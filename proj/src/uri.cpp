#include "semtex/uri.hpp"

#include <cstdlib>

namespace semtex::uri {

namespace {

std::string trim_slashes(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

bool inside(const fs::path& dir, const fs::path& file) {
  auto rel = file.lexically_relative(dir);
  return !rel.empty() && *rel.begin() != "..";
}

}  // namespace

std::string default_base() {
  const char* env = std::getenv("SEMTEX_BASE_URI");
  if (env && *env) return trim_slashes(env);
  return kDefaultBase;
}

Corpus::Corpus(fs::path root, std::string base)
    : root_(fs::absolute(root).lexically_normal()), base_(trim_slashes(std::move(base))) {
  // "/a/b/" normalizes with an empty filename
  if (!root_.has_filename() && root_ != root_.root_path()) root_ = root_.parent_path();
}

Corpus Corpus::of(const modsys::ModuleGraph& graph, std::string base, std::optional<fs::path> root) {
  if (root) return Corpus(*root, std::move(base));
  fs::path common;
  for (const auto& f : graph.files()) {
    fs::path dir = f.path.parent_path();
    if (common.empty()) {
      common = dir;
      continue;
    }
    while (!(common == dir || inside(common, dir))) common = common.parent_path();
  }
  return Corpus(common.empty() ? fs::current_path() : common, std::move(base));
}

std::string Corpus::doc_path(const fs::path& file) const {
  fs::path abs = fs::absolute(file).lexically_normal();
  if (!inside(root_, abs)) {
    throw Error(ErrorKind::Io, "'" + abs.string() + "' lies outside the corpus root '" + root_.string() + "'");
  }
  fs::path rel = abs.lexically_relative(root_);
  rel.replace_extension();
  return rel.generic_string();
}

std::string Corpus::doc_uri(const fs::path& file) const { return doc_uri_for_path(doc_path(file)); }

std::string Corpus::doc_uri_for_path(std::string_view doc_path) const {
  return base_ + "/doc/" + std::string(doc_path) + ".omdoc";
}

std::string Corpus::module_uri(const modsys::ModuleGraph& graph, std::string_view module) const {
  return doc_uri(graph.file_of(module).path);
}

std::string Corpus::symbol_uri(const modsys::ModuleGraph& graph, std::string_view module,
                               std::string_view name) const {
  return module_uri(graph, module) + "#" + std::string(name);
}

std::string Corpus::vocab_ns(const modsys::ModuleGraph& graph, std::string_view module) const {
  return module_uri(graph, module) + "#";
}

std::string Corpus::resolve_reference(const fs::path& from, std::string_view ref) const {
  if (ref.find("://") != std::string_view::npos) return std::string(ref);
  auto hash = ref.find('#');
  std::string_view path = ref.substr(0, hash);
  std::string frag = hash == std::string_view::npos ? "" : std::string(ref.substr(hash));
  if (path.empty()) return doc_uri(from) + frag;
  fs::path target = (fs::absolute(from).parent_path() / fs::path(std::string(path))).lexically_normal();
  return doc_uri(target) + frag;
}

std::string strip_doc_suffix(std::string_view path) {
  std::string p(path);
  const std::string suffix = ".omdoc";
  if (p.size() > suffix.size() && p.compare(p.size() - suffix.size(), suffix.size(), suffix) == 0) {
    p.resize(p.size() - suffix.size());
  }
  return p;
}

}  // namespace semtex::uri
