#include "semtex/pipeline.hpp"

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "semtex/notation.hpp"
#include "semtex/omdoc.hpp"
#include "semtex/owl.hpp"
#include "semtex/page.hpp"
#include "semtex/rdfa.hpp"

namespace semtex::pipeline {

namespace {

using nlohmann::json;

std::string read_or_empty(const fs::path& p, bool& exists) {
  std::ifstream in(p, std::ios::binary);
  exists = static_cast<bool>(in);
  if (!exists) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_atomic(const fs::path& target, const std::string& bytes) {
  bool exists = false;
  if (read_or_empty(target, exists) == bytes && exists) return false;
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + target.parent_path().string() + ": " + ec.message());
  static thread_local std::mt19937_64 rng(std::random_device{}());
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, "cannot replace " + target.string() + ": " + ec.message());
  }
  return true;
}

}  // namespace

Result compile(const std::vector<fs::path>& roots, const Options& opts, const modsys::Loader& loader) {
  return compile_graph(modsys::build_graph(roots, loader), opts);
}

Result compile_graph(const modsys::ModuleGraph& graph, const Options& opts) {
  uri::Corpus corpus = opts.root ? uri::Corpus(*opts.root, opts.base_uri) : uri::Corpus::of(graph, opts.base_uri);
  notation::RuleSet rules = notation::compile_rules(graph);
  omdoc::Context ctx(graph, corpus, rules);

  page::PageOptions popts;
  popts.symbol_uri = [&](const content::OMS& s) { return corpus.symbol_uri(graph, s.cd, s.name); };
  int n = 0;
  for (const auto& id : graph.dependency_order()) popts.theory_numbers[id] = ++n;
  popts.viewer_script = opts.viewer_script;
  popts.definition_label = opts.definition_label;
  popts.lookup_endpoint = corpus.base() + "/lookup";

  json theories = json::object();
  json definitions = json::object();
  Result result;
  for (const auto& file : graph.files()) {
    Artifact a;
    a.source = file.path;
    a.doc_path = corpus.doc_path(file.path);
    if (a.doc_path == kIndexPath) {
      throw Error(ErrorKind::Io, "'" + file.path.string() + "' would shadow the corpus index '" + kIndexPath + "'");
    }
    xml::Document doc = omdoc::emit_document(file, ctx);

    popts.document_module.clear();
    for (const auto& m : file.modules) {
      if (m.anonymous) popts.document_module = m.id;
    }
    xml::Document pg = page::assemble_page(doc, rules, popts);

    if (opts.formats.count("omdoc")) a.variants["omdoc"] = omdoc::serialize(doc);
    if (opts.formats.count("xhtml")) a.variants["xhtml"] = xml::serialize(pg);
    if (opts.formats.count("nt")) a.variants["nt"] = rdfa::to_ntriples(rdfa::extract_triples(doc));
    if (opts.formats.count("owl")) {
      if (auto o = owl::export_file(file, ctx)) a.variants["owl"] = xml::serialize(*o);
    }

    // index: every theory of the file, including a document-module
    std::map<std::string, json> symbols;
    for (const auto& m : file.modules) {
      json syms = json::object();
      for (const auto& kd : m.keydefs) syms[kd.key] = json::array();
      for (const auto& sd : m.symdefs) syms[sd.name] = json::array();
      theories[m.id] = json{{"path", a.doc_path}, {"symbols", syms}};
      definitions[m.id] = json::object();
    }
    for (const auto& frag : page::definition_fragments(pg)) {
      if (!theories.contains(frag.cd)) continue;
      definitions[frag.cd][frag.id] = xml::serialize_fragment(frag.element);
      auto& syms = theories[frag.cd]["symbols"];
      if (!frag.for_name.empty() && syms.contains(frag.for_name)) syms[frag.for_name].push_back(frag.id);
    }
    result.artifacts.push_back(std::move(a));
  }
  result.index = json{{"theories", theories}, {"definitions", definitions}}.dump(1) + "\n";
  return result;
}

std::vector<fs::path> write_outputs(const Result& result, const fs::path& out) {
  std::vector<fs::path> written;
  for (const auto& a : result.artifacts) {
    for (const auto& [variant, bytes] : a.variants) {
      fs::path target = out / fs::path(a.doc_path + "." + variant);
      if (write_atomic(target, bytes)) written.push_back(target);
    }
  }
  fs::path index = out / (std::string(kIndexPath) + "." + kIndexVariant);
  if (write_atomic(index, result.index)) written.push_back(index);
  return written;
}

}  // namespace semtex::pipeline
