#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semtex/pipeline.hpp"
#include "semtex/store.hpp"

namespace semtex::server {

struct Options {
  std::string token;  // PUT requires `Authorization: Bearer <token>` when set
  /// Receives one line per request; stdout when empty.
  std::function<void(const std::string&)> access_log;
};

/// Media type of a stored variant ("xhtml" -> "application/xhtml+xml").
std::string media_type(std::string_view variant);

/// Variant for an Accept header among the `available` ones. Each variant
/// takes the q-value of its most specific matching range; the highest
/// positive q wins, ties going to the order xhtml, omdoc, owl, nt. A missing
/// or empty header accepts everything. nullopt when nothing is acceptable.
std::optional<std::string> negotiate(std::string_view accept, const std::vector<std::string>& available);

struct Response {
  int status = 200;
  std::string content_type;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// XHTML fragment with the definitions of `name` in theory `cd`, read from
/// a corpus index; 404 when either is unknown.
Response lookup(const std::string& index_json, std::string_view cd, std::string_view name);

/// GET /doc/{path}: `path` may carry the `.omdoc` suffix of symbol URIs.
Response get_document(const store::Store& store, std::string_view path, std::optional<int> revision,
                      std::string_view accept);

struct Published {
  std::string path;
  int revision = 0;
};

/// PUTs every artifact to `{url}/doc/{path}` and the corpus index to
/// `{url}/doc/_corpus`, one multipart part per variant. Throws ErrorKind::Io
/// on connection failures and non-201 answers.
std::vector<Published> publish(const pipeline::Result& result, const std::string& url, const std::string& token = {});

/// HTTP frontend over a store.
class Server {
 public:
  Server(store::Store& store, Options opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to `host`; port 0 picks a free port. Returns the bound port or
  /// throws ErrorKind::Io.
  int bind(const std::string& host, int port);
  /// Serves until stop(); bind first.
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace semtex::server
