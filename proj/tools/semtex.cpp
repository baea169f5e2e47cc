// semtex: command-line driver for the compiler, store and server.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <set>
#include <thread>

#include "semtex/modsys.hpp"
#include "semtex/pipeline.hpp"
#include "semtex/server.hpp"
#include "semtex/store.hpp"

namespace fs = std::filesystem;
using namespace semtex;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;

struct Common {
  std::vector<std::string> roots;
  std::string base_uri = uri::default_base();
  std::string root;
};

pipeline::Options options_of(const Common& c) {
  pipeline::Options o;
  o.base_uri = c.base_uri;
  if (!c.root.empty()) o.root = fs::path(c.root);
  return o;
}

std::vector<fs::path> paths_of(const std::vector<std::string>& roots) {
  return {roots.begin(), roots.end()};
}

std::set<std::string> parse_formats(const std::string& list) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    std::string f = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? list.size() + 1 : comma + 1;
    if (f.empty()) continue;
    if (std::find(pipeline::kFormats.begin(), pipeline::kFormats.end(), f) == pipeline::kFormats.end()) {
      throw CLI::ValidationError("--format", "unknown format '" + f + "' (expected omdoc, xhtml, owl, nt)");
    }
    out.insert(f);
  }
  if (out.empty()) throw CLI::ValidationError("--format", "no formats given");
  return out;
}

int run_compile(const Common& c, const std::string& out, const std::string& formats) {
  auto o = options_of(c);
  o.formats = parse_formats(formats);
  auto result = pipeline::compile(paths_of(c.roots), o);
  auto written = pipeline::write_outputs(result, out);
  std::cerr << "compiled " << result.artifacts.size() << " files, wrote " << written.size() << " into " << out << "\n";
  return kOk;
}

int run_check(const Common& c) {
  auto result = pipeline::compile(paths_of(c.roots), options_of(c));
  std::cerr << "ok: " << result.artifacts.size() << " files\n";
  return kOk;
}

int run_graph(const Common& c) {
  std::cout << modsys::to_dot(modsys::build_graph(paths_of(c.roots)));
  return kOk;
}

int run_triples(const Common& c) {
  auto o = options_of(c);
  o.formats = {"nt"};
  auto result = pipeline::compile(paths_of(c.roots), o);
  std::set<fs::path> roots;
  for (const auto& r : c.roots) roots.insert(fs::absolute(r).lexically_normal());
  for (const auto& a : result.artifacts) {
    if (roots.count(a.source)) std::cout << a.variants.at("nt");
  }
  return kOk;
}

int run_publish(const Common& c, const std::string& to, const std::string& token) {
  auto result = pipeline::compile(paths_of(c.roots), options_of(c));
  for (const auto& p : server::publish(result, to, token)) {
    std::cerr << "published " << p.path << " revision " << p.revision << "\n";
  }
  return kOk;
}

int run_serve(const std::string& store_dir, const std::string& host, int port, const std::string& base_uri,
              const std::string& token) {
  // SIGINT/SIGTERM are taken by a waiting thread so that stop() runs outside a handler
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  store::Store store(store_dir);
  server::Server srv(store, server::Options{token, {}});
  int bound = srv.bind(host, port);
  std::cerr << "serving " << fs::absolute(store_dir).string() << " on http://" << host << ":" << bound
            << " (documents under " << base_uri << "/doc/)\n";
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    srv.stop();
  });
  srv.run();
  // run() also returns when binding breaks; wake the waiter
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semtex: semantic TeX to OMDoc, XHTML+MathML, OWL and RDF"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool many) {
    if (many) {
      sub->add_option("roots", common.roots, "root .tex files")->required()->check(CLI::ExistingFile);
    } else {
      sub->add_option("file", common.roots, "root .tex file")->required()->expected(1)->check(CLI::ExistingFile);
    }
    sub->add_option("--base-uri", common.base_uri, "base of document URIs (env SEMTEX_BASE_URI)");
    sub->add_option("--root", common.root, "corpus root directory (default: deepest common directory)");
  };

  std::string out, formats = "omdoc,xhtml,owl,nt";
  auto* compile = app.add_subcommand("compile", "compile the import closure of the roots");
  add_common(compile, true);
  compile->add_option("--out", out, "output directory")->required();
  compile->add_option("--format", formats, "comma-separated subset of omdoc,xhtml,owl,nt");

  auto* check = app.add_subcommand("check", "run all analyses, write nothing");
  add_common(check, true);

  bool dot = false;
  auto* graph = app.add_subcommand("graph", "print the import graph");
  add_common(graph, true);
  graph->add_flag("--dot", dot, "DOT output (the only format)");

  auto* triples = app.add_subcommand("triples", "print the RDFa triples of a document as N-Triples");
  add_common(triples, false);

  std::string store_dir, host = "127.0.0.1", token;
  int port = 8080;
  std::string serve_base = uri::default_base();
  auto* serve = app.add_subcommand("serve", "serve a store over HTTP");
  serve->add_option("--store", store_dir, "store directory")->required();
  serve->add_option("--port", port, "port, 0 picks a free one")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "interface to bind");
  serve->add_option("--base-uri", serve_base, "public base URI, shown at startup");
  serve->add_option("--token", token, "bearer token required for PUT");

  std::string to;
  std::string publish_token;
  auto* publish = app.add_subcommand("publish", "compile and PUT the results to a server");
  add_common(publish, true);
  publish->add_option("--to", to, "server URL, e.g. http://localhost:8080")->required();
  publish->add_option("--token", publish_token, "bearer token");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "semtex: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*compile) return run_compile(common, out, formats);
    if (*check) return run_check(common);
    if (*graph) return run_graph(common);
    if (*triples) return run_triples(common);
    if (*publish) return run_publish(common, to, publish_token);
    if (*serve) return run_serve(store_dir, host, port, serve_base, token);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "semtex: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.diagnostic() << "\n";
    return kDiagnostics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  return kUsage;
}
