#include "semtex/modsys.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semtex/text.hpp"

namespace semtex::modsys {

using syntax::Command;
using syntax::Environment;
using syntax::Group;
using syntax::Node;
using syntax::NodeList;

std::string SymDef::command() const {
  std::string out;
  for (char c : name) {
    if (c != '-') out += c;
  }
  return out;
}

const SymDef* ModuleDef::symdef(std::string_view name) const {
  for (const auto& s : symdefs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = text::is_ascii_letter(c) || text::is_ascii_digit(c) || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

/// Text of an argument consisting only of Text nodes, trimmed.
std::optional<std::string> plain_text(const NodeList& nodes) {
  std::string out;
  for (const auto& n : nodes) {
    const auto* t = n.as<syntax::Text>();
    if (!t) return std::nullopt;
    out += t->text;
  }
  return text::trim(out);
}

std::string identifier_arg(const Command& c, std::size_t i, const SourceSpan& span, const char* what) {
  auto s = plain_text(c.args.at(i));
  if (!s || !is_identifier(*s)) {
    throw Error::at(ErrorKind::Module, span, "\\" + c.name + ": " + what + " must be a plain identifier");
  }
  return *s;
}

std::optional<std::string> string_opt(const syntax::KeyValList& opts, std::string_view key, const SourceSpan& span) {
  const auto* kv = opts.find(key);
  if (!kv) return std::nullopt;
  if (!kv->text()) {
    throw Error::at(ErrorKind::Module, span, "option '" + std::string(key) + "' needs a plain text value");
  }
  return *kv->text();
}

int highest_parameter(const std::vector<syntax::Token>& toks) {
  int hi = 0;
  for (const auto& t : toks) {
    if (t.kind == syntax::TokenKind::Parameter) hi = std::max(hi, t.parameter_index());
  }
  return hi;
}

class Collector {
 public:
  Collector(const fs::path& origin) : origin_(origin) {}

  std::vector<ModuleDef> run(const syntax::DocumentAST& ast) {
    std::vector<ModuleDef> out;
    std::optional<ModuleDef> doc;
    ModuleDef stray;  // top-level imports before the document environment
    top_level(ast.nodes, out, doc, stray);
    if (doc) {
      stray.imports.insert(stray.imports.end(), doc->imports.begin(), doc->imports.end());
      doc->imports = std::move(stray.imports);
      out.push_back(std::move(*doc));
    } else if (!stray.imports.empty()) {
      throw Error::at(ErrorKind::Module, stray.imports.front().span,
                      "\\importmodule outside a module needs a document environment");
    }
    return out;
  }

 private:
  void top_level(const NodeList& nodes, std::vector<ModuleDef>& out, std::optional<ModuleDef>& doc,
                 ModuleDef& stray) {
    for (const auto& n : nodes) {
      if (const auto* env = n.as<Environment>()) {
        if (env->name == "module") {
          out.push_back(module(*env, n.span));
        } else if (env->name == "document") {
          if (doc) throw Error::at(ErrorKind::Module, n.span, "more than one document environment");
          doc = document(*env, n.span, out);
        } else {
          top_level(env->body, out, doc, stray);
        }
      } else if (const auto* c = n.as<Command>()) {
        if (c->name == "importmodule" || c->name == "metalanguage") {
          stray.imports.push_back(import(*c, n.span));
        } else if (c->name == "symdef" || c->name == "keydef") {
          throw Error::at(ErrorKind::Module, n.span, "\\" + c->name + " outside a module");
        } else {
          for (const auto& a : c->args) top_level(a, out, doc, stray);
        }
      } else if (const auto* g = n.as<Group>()) {
        top_level(g->children, out, doc, stray);
      }
    }
  }

  ModuleDef module(const Environment& env, const SourceSpan& span) {
    ModuleDef m;
    m.origin = origin_;
    m.span = span;
    m.annotations = env.opts.value_or(syntax::KeyValList{});
    auto id = env.opts ? string_opt(*env.opts, "id", span) : std::nullopt;
    if (!id || !is_identifier(*id)) {
      throw Error::at(ErrorKind::Module, span, "module environment needs an id= option naming it");
    }
    m.id = *id;
    m.body = env.body;
    body(env.body, m, false);
    return m;
  }

  ModuleDef document(const Environment& env, const SourceSpan& span, std::vector<ModuleDef>& out) {
    ModuleDef m;
    m.origin = origin_;
    m.span = span;
    m.env_name = "document";
    m.anonymous = true;
    m.id = origin_.stem().string();
    m.annotations = env.opts.value_or(syntax::KeyValList{});
    m.body = env.body;
    document_body(env.body, m, out);
    return m;
  }

  /// A document body may hold modules of its own next to the document's
  /// imports and definitions.
  void document_body(const NodeList& nodes, ModuleDef& m, std::vector<ModuleDef>& out) {
    for (const auto& n : nodes) {
      if (const auto* env = n.as<Environment>()) {
        if (env->name == "module") {
          out.push_back(module(*env, n.span));
          continue;
        }
        if (env->name == "document") throw Error::at(ErrorKind::Module, n.span, "nested document environment");
        if (env->name == "definition") {
          definition(*env, n.span, m);
          continue;
        }
        document_body(env->body, m, out);
      } else if (const auto* g = n.as<Group>()) {
        document_body(g->children, m, out);
      } else if (n.as<Command>()) {
        NodeList one{n};
        body(one, m, false);
      }
    }
  }

  void body(const NodeList& nodes, ModuleDef& m, bool in_definition) {
    for (const auto& n : nodes) {
      if (const auto* env = n.as<Environment>()) {
        if (env->name == "module") {
          throw Error::at(ErrorKind::Module, n.span,
                          "nested module environment inside '" + m.id + "' is not supported");
        }
        if (env->name == "document") throw Error::at(ErrorKind::Module, n.span, "document environment inside a module");
        if (env->name == "definition") {
          if (in_definition) throw Error::at(ErrorKind::Module, n.span, "nested definition environment");
          definition(*env, n.span, m);
          continue;
        }
        body(env->body, m, in_definition);
      } else if (const auto* g = n.as<Group>()) {
        body(g->children, m, in_definition);
      } else if (const auto* c = n.as<Command>()) {
        if (c->name == "symdef") {
          if (in_definition) throw Error::at(ErrorKind::Module, n.span, "\\symdef inside a definition");
          symdef(*c, n.span, m);
        } else if (c->name == "keydef") {
          if (in_definition) throw Error::at(ErrorKind::Module, n.span, "\\keydef inside a definition");
          keydef(*c, n.span, m);
        } else if (c->name == "importmodule" || c->name == "metalanguage") {
          m.imports.push_back(import(*c, n.span));
        } else {
          for (const auto& a : c->args) body(a, m, in_definition);
        }
      }
    }
  }

  void symdef(const Command& c, const SourceSpan& span, ModuleDef& m) {
    SymDef s;
    s.name = identifier_arg(c, 0, span, "symbol name");
    s.home = m.id;
    s.span = span;
    std::optional<int> arity;
    if (c.opts) {
      for (const auto& kv : c.opts->pairs) {
        if (kv.bare() && kv.key.size() == 1 && text::is_ascii_digit(kv.key[0])) {
          if (arity) throw Error::at(ErrorKind::Module, span, "\\symdef{" + s.name + "}: arity given twice");
          arity = kv.key[0] - '0';
        } else if (kv.key == "owltype" && kv.text()) {
          s.owltype = *kv.text();
        } else {
          throw Error::at(ErrorKind::Module, c.opts->span,
                          "\\symdef{" + s.name + "}: unsupported option '" + kv.key + "'");
        }
      }
    }
    s.arity = arity.value_or(0);
    s.body = syntax::significant(syntax::tokenize(syntax::print_nodes(c.args.at(1)), span.file));
    int hi = highest_parameter(s.body);
    if (hi > s.arity) {
      throw Error::at(ErrorKind::Module, span,
                      "\\symdef{" + s.name + "}: parameter #" + std::to_string(hi) + " exceeds arity " +
                          std::to_string(s.arity));
    }
    if (hi < s.arity) {
      throw Error::at(ErrorKind::Module, span,
                      "\\symdef{" + s.name + "}: arity " + std::to_string(s.arity) + " but the body only uses #" +
                          std::to_string(hi));
    }
    if (m.symdef(s.name)) {
      throw Error::at(ErrorKind::Module, span, "duplicate \\symdef{" + s.name + "} in module '" + m.id + "'");
    }
    m.symdefs.push_back(std::move(s));
  }

  void keydef(const Command& c, const SourceSpan& span, ModuleDef& m) {
    KeyDef k;
    k.env = identifier_arg(c, 0, span, "environment name");
    k.key = identifier_arg(c, 1, span, "key");
    k.home = m.id;
    k.span = span;
    if (c.opts) {
      for (const auto& kv : c.opts->pairs) {
        if (kv.key == "owltype" && kv.text()) {
          k.owltype = *kv.text();
        } else if (kv.key == "range" && kv.text() && *kv.text() == "resource") {
          k.resource = true;
        } else {
          throw Error::at(ErrorKind::Module, c.opts->span, "\\keydef: unsupported option '" + kv.key + "'");
        }
      }
    }
    if (k.key == "id" || k.key == "for" || k.key == "title" || k.key == "owltype") {
      throw Error::at(ErrorKind::Module, span, "\\keydef: '" + k.key + "' is a reserved option name");
    }
    for (const auto& other : m.keydefs) {
      if (other.env == k.env && other.key == k.key) {
        throw Error::at(ErrorKind::Module, span,
                        "duplicate \\keydef{" + k.env + "}{" + k.key + "} in module '" + m.id + "'");
      }
    }
    m.keydefs.push_back(std::move(k));
  }

  ImportRef import(const Command& c, const SourceSpan& span) {
    ImportRef r;
    r.meta = c.name == "metalanguage";
    r.span = span;
    r.module_id = identifier_arg(c, 0, span, "module name");
    if (c.opts) {
      if (c.opts->pairs.size() > 1 || (c.opts->pairs.size() == 1 && !c.opts->pairs[0].bare())) {
        throw Error::at(ErrorKind::Module, span, "\\" + c.name + ": the option must be a single path");
      }
      if (!c.opts->pairs.empty()) r.path = c.opts->pairs[0].key;
    }
    return r;
  }

  void definition(const Environment& env, const SourceSpan& span, ModuleDef& m) {
    DefinitionBlock d;
    d.span = span;
    d.opts = env.opts.value_or(syntax::KeyValList{});
    d.id = string_opt(d.opts, "id", span);
    d.for_name = string_opt(d.opts, "for", span);
    d.title = string_opt(d.opts, "title", span);
    d.body = env.body;
    body(env.body, m, true);
    m.definitions.push_back(std::move(d));
  }

  fs::path origin_;
};

}  // namespace

std::vector<ModuleDef> collect_modules(const syntax::DocumentAST& ast, const fs::path& origin) {
  return Collector(origin).run(ast);
}

Loader file_loader() {
  return [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return syntax::parse_document(ss.str(), p.string());
  };
}

fs::path resolve_import(const fs::path& importer, std::string_view written) {
  fs::path p = importer.parent_path() / fs::path(std::string(written));
  if (!p.has_extension()) p += ".tex";
  return p.lexically_normal();
}

bool ModuleGraph::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

const ModuleDef& ModuleGraph::module(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::NotFound, "unknown module '" + std::string(id) + "'");
  return files_[it->second.first].modules[it->second.second];
}

const SourceFile& ModuleGraph::file_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::NotFound, "unknown module '" + std::string(id) + "'");
  return files_[it->second.first];
}

const SourceFile* ModuleGraph::file(const fs::path& path) const {
  fs::path want = fs::absolute(path).lexically_normal();
  for (const auto& f : files_) {
    if (f.path == want) return &f;
  }
  return nullptr;
}

std::vector<Edge> ModuleGraph::edges() const {
  std::vector<Edge> out;
  for (const auto& id : order_) {
    for (const auto& imp : module(id).imports) out.push_back({id, imp.module_id, imp.meta});
  }
  return out;
}

std::set<std::string> ModuleGraph::reachable(std::string_view id) const {
  std::set<std::string> seen;
  std::vector<std::string> stack{std::string(id)};
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& imp : module(cur).imports) stack.push_back(imp.module_id);
  }
  return seen;
}

std::vector<std::string> ModuleGraph::dependency_order() const {
  std::vector<std::string> out;
  std::set<std::string> done;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    if (!done.insert(id).second) return;
    for (const auto& imp : module(id).imports) visit(imp.module_id);
    out.push_back(id);
  };
  for (const auto& id : order_) visit(id);
  return out;
}

namespace {

void check_acyclic(const ModuleGraph& g) {
  enum class Color { White, Gray, Black };
  std::map<std::string, Color> color;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    color[id] = Color::Gray;
    stack.push_back(id);
    for (const auto& imp : g.module(id).imports) {
      Color c = color.count(imp.module_id) ? color[imp.module_id] : Color::White;
      if (c == Color::Gray) {
        auto from = std::find(stack.begin(), stack.end(), imp.module_id);
        std::string cycle;
        for (auto it = from; it != stack.end(); ++it) cycle += *it + " -> ";
        cycle += imp.module_id;
        throw Error::at(ErrorKind::Cycle, imp.span, "import cycle: " + cycle);
      }
      if (c == Color::White) visit(imp.module_id);
    }
    stack.pop_back();
    color[id] = Color::Black;
  };
  for (const auto& id : g.modules()) {
    if (!color.count(id)) visit(id);
  }
}

}  // namespace

ModuleGraph build_graph(const std::vector<fs::path>& roots, const Loader& loader) {
  ModuleGraph g;
  std::map<fs::path, std::size_t> loaded;

  auto load = [&](const fs::path& path) -> std::pair<std::size_t, bool> {
    fs::path p = fs::absolute(path).lexically_normal();
    if (auto it = loaded.find(p); it != loaded.end()) return {it->second, false};
    SourceFile f;
    f.path = p;
    f.ast = loader(p);
    f.modules = collect_modules(f.ast, p);
    std::size_t idx = g.files_.size();
    for (std::size_t k = 0; k < f.modules.size(); ++k) {
      const auto& m = f.modules[k];
      if (g.index_.count(m.id)) {
        throw Error::at(ErrorKind::Module, m.span,
                        "module id '" + m.id + "' is already declared in " + g.file_of(m.id).path.string());
      }
      g.index_[m.id] = {idx, k};
      g.order_.push_back(m.id);
    }
    g.files_.push_back(std::move(f));
    loaded[p] = idx;
    return {idx, true};
  };

  std::function<void(std::size_t)> visit = [&](std::size_t idx) {
    // Copy the import lists: loading may grow files_.
    std::vector<ImportRef> imports;
    for (const auto& m : g.files_[idx].modules) imports.insert(imports.end(), m.imports.begin(), m.imports.end());
    fs::path here = g.files_[idx].path;
    for (const auto& imp : imports) {
      fs::path target = imp.path.empty() ? here : resolve_import(here, imp.path);
      std::pair<std::size_t, bool> res;
      try {
        res = load(target);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Io) throw;
        throw Error::at(ErrorKind::Import, imp.span, "cannot import '" + imp.module_id + "': " + e.message());
      }
      bool found = false;
      for (const auto& m : g.files_[res.first].modules) found = found || m.id == imp.module_id;
      if (!found) {
        throw Error::at(ErrorKind::Import, imp.span,
                        "module '" + imp.module_id + "' not found in " + g.files_[res.first].path.string());
      }
      if (res.second) visit(res.first);
    }
  };

  std::vector<std::size_t> root_idx;
  for (const auto& r : roots) {
    auto res = load(r);
    if (res.second) root_idx.push_back(res.first);
  }
  for (std::size_t idx : root_idx) visit(idx);
  check_acyclic(g);
  return g;
}

std::string to_dot(const ModuleGraph& graph) {
  std::string out = "digraph imports {\n";
  for (const auto& id : graph.modules()) out += "  \"" + id + "\";\n";
  for (const auto& e : graph.edges()) {
    out += "  \"" + e.from + "\" -> \"" + e.to + "\"";
    if (e.meta) out += " [style=dashed]";
    out += ";\n";
  }
  out += "}\n";
  return out;
}

const SymDef* Scope::find_symbol(std::string_view name) const {
  auto it = symbols_.find(std::string(name));
  return it == symbols_.end() ? nullptr : &it->second;
}

const SymDef* Scope::find_command(std::string_view command) const {
  if (const SymDef* s = find_symbol(command)) return s;
  auto it = aliases_.find(command);
  if (it == aliases_.end()) return nullptr;
  if (it->second.size() > 1) {
    throw Error(ErrorKind::Ambiguity, "\\" + std::string(command) + " could mean '" + it->second[0] + "' or '" +
                                          it->second[1] + "'");
  }
  return find_symbol(it->second.front());
}

const KeyDef* Scope::find_key(std::string_view env, std::string_view key) const {
  auto it = keys_.find({std::string(env), std::string(key)});
  return it == keys_.end() ? nullptr : &it->second;
}

std::vector<const KeyDef*> Scope::keys_for(std::string_view env) const {
  std::vector<const KeyDef*> out;
  for (const auto& [k, v] : keys_) {
    if (k.first == env) out.push_back(&v);
  }
  return out;
}

Scope visible_scope(const ModuleGraph& graph, std::string_view module) {
  Scope s;
  s.module_ = std::string(module);
  std::set<std::string> reach = graph.reachable(module);
  std::map<std::string, std::set<std::string>> reach_of;
  auto reaches = [&](const std::string& a, const std::string& b) {
    auto it = reach_of.find(a);
    if (it == reach_of.end()) it = reach_of.emplace(a, graph.reachable(a)).first;
    return it->second.count(b) > 0;
  };
  // Picks the home of a declaration among the modules declaring it.
  auto choose = [&](const std::vector<std::string>& homes, const std::string& what) -> std::string {
    if (std::find(homes.begin(), homes.end(), s.module_) != homes.end()) return s.module_;
    std::vector<std::string> kept;
    for (const auto& h : homes) {
      bool hidden = false;
      for (const auto& other : homes) hidden = hidden || (other != h && reaches(other, h));
      if (!hidden) kept.push_back(h);
    }
    if (kept.size() > 1) {
      throw Error(ErrorKind::Ambiguity, what + " is ambiguous in module '" + s.module_ + "': declared in '" +
                                            kept[0] + "' and '" + kept[1] + "'");
    }
    return kept.front();
  };

  std::map<std::string, std::vector<std::string>> sym_homes;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> key_homes;
  for (const auto& id : reach) {
    const ModuleDef& m = graph.module(id);
    for (const auto& sd : m.symdefs) sym_homes[sd.name].push_back(id);
    for (const auto& kd : m.keydefs) key_homes[{kd.env, kd.key}].push_back(id);
  }
  for (const auto& [name, homes] : sym_homes) {
    std::string home = choose(homes, "symbol '" + name + "'");
    s.symbols_.emplace(name, *graph.module(home).symdef(name));
  }
  for (const auto& [k, homes] : key_homes) {
    std::string home = choose(homes, "key '" + k.second + "' of environment '" + k.first + "'");
    for (const auto& kd : graph.module(home).keydefs) {
      if (kd.env == k.first && kd.key == k.second) s.keys_.emplace(k, kd);
    }
  }
  for (const auto& [name, sd] : s.symbols_) {
    std::string cmd = sd.command();
    if (cmd != name) s.aliases_[cmd].push_back(name);
  }
  return s;
}

}  // namespace semtex::modsys
