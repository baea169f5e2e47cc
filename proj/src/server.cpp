#include "semtex/server.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <json.hpp>
#include <mutex>

#include "semtex/diagnostics.hpp"
#include "semtex/pipeline.hpp"
#include "semtex/text.hpp"
#include "semtex/uri.hpp"
#include "semtex/xml.hpp"

namespace semtex::server {

namespace {

const std::vector<std::pair<std::string, std::string>> kMediaTypes = {
    {"xhtml", "application/xhtml+xml"},
    {"omdoc", "application/omdoc+xml"},
    {"owl", "application/owl+xml"},
    {"nt", "application/n-triples"},
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Range {
  std::string type, subtype;
  double q = 1.0;
};

std::vector<Range> parse_accept(std::string_view accept) {
  std::vector<Range> out;
  std::size_t pos = 0;
  while (pos <= accept.size()) {
    std::size_t comma = accept.find(',', pos);
    std::string_view item = accept.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? accept.size() + 1 : comma + 1;
    std::size_t semi = item.find(';');
    std::string mt = lower(text::trim(item.substr(0, semi)));
    if (mt.empty()) continue;
    auto slash = mt.find('/');
    if (slash == std::string::npos) continue;
    Range r{mt.substr(0, slash), mt.substr(slash + 1), 1.0};
    while (semi != std::string_view::npos) {
      std::size_t next = item.find(';', semi + 1);
      std::string param = lower(text::trim(item.substr(semi + 1, next == std::string_view::npos ? next : next - semi - 1)));
      if (param.rfind("q=", 0) == 0) {
        try {
          r.q = std::clamp(std::stod(param.substr(2)), 0.0, 1.0);
        } catch (const std::exception&) {
          r.q = 0.0;
        }
      }
      semi = next;
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// q of the most specific matching range; -1 when none matches.
double quality(const std::vector<Range>& ranges, const std::string& media) {
  auto slash = media.find('/');
  std::string type = media.substr(0, slash), sub = media.substr(slash + 1);
  int best = -1;
  double q = -1;
  for (const auto& r : ranges) {
    int specificity = -1;
    if (r.type == type && r.subtype == sub) specificity = 2;
    else if (r.type == type && r.subtype == "*") specificity = 1;
    else if (r.type == "*" && r.subtype == "*") specificity = 0;
    // browsers ask for text/html
    else if (media == "application/xhtml+xml" && r.type == "text" && r.subtype == "html") specificity = 2;
    if (specificity > best || (specificity == best && r.q > q)) {
      if (specificity >= 0) {
        best = specificity;
        q = r.q;
      }
    }
  }
  return q;
}

std::string timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Response error_response(int status, const std::string& message) {
  Response r;
  r.status = status;
  r.content_type = "text/plain; charset=utf-8";
  r.body = message + "\n";
  return r;
}

void apply(const Response& from, httplib::Response& to) {
  to.status = from.status;
  for (const auto& [k, v] : from.headers) to.set_header(k, v);
  to.set_header("Access-Control-Allow-Origin", "*");
  to.set_content(from.body, from.content_type);
}

}  // namespace

std::string media_type(std::string_view variant) {
  for (const auto& [v, mt] : kMediaTypes) {
    if (v == variant) return mt;
  }
  if (variant == "json") return "application/json";
  return "application/octet-stream";
}

std::optional<std::string> negotiate(std::string_view accept, const std::vector<std::string>& available) {
  auto ranges = parse_accept(accept);
  if (ranges.empty()) ranges.push_back({"*", "*", 1.0});
  std::optional<std::string> best;
  double best_q = 0;
  for (const auto& [variant, mt] : kMediaTypes) {
    if (std::find(available.begin(), available.end(), variant) == available.end()) continue;
    double q = quality(ranges, mt);
    if (q > best_q) {
      best_q = q;
      best = variant;
    }
  }
  return best;
}

Response lookup(const std::string& index_json, std::string_view cd, std::string_view name) {
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(index_json);
  } catch (const nlohmann::json::exception& e) {
    return error_response(500, std::string("corrupt corpus index: ") + e.what());
  }
  const std::string c(cd), n(name);
  const auto& theories = index.at("theories");
  if (!theories.contains(c)) return error_response(404, "unknown theory '" + c + "'");
  const auto& syms = theories.at(c).at("symbols");
  if (!syms.contains(n)) return error_response(404, "theory '" + c + "' declares no symbol '" + n + "'");

  std::string body = "<div xmlns=\"http://www.w3.org/1999/xhtml\" class=\"semtex-lookup\" data-cd=\"" +
                     xml::escape_attr(c) + "\" data-name=\"" + xml::escape_attr(n) + "\">\n";
  const auto& ids = syms.at(n);
  if (ids.empty()) {
    body += "<p class=\"semtex-no-definition\">No definition of " + xml::escape_text(n) + " in theory " +
            xml::escape_text(c) + ".</p>\n";
  }
  for (const auto& id : ids) body += index.at("definitions").at(c).at(id.get<std::string>()).get<std::string>() + "\n";
  body += "</div>\n";
  Response r;
  r.content_type = "application/xhtml+xml; charset=utf-8";
  r.body = std::move(body);
  return r;
}

Response get_document(const store::Store& store, std::string_view raw_path, std::optional<int> revision,
                      std::string_view accept) {
  std::string path;
  try {
    path = store::Store::normalize_path(uri::strip_doc_suffix(raw_path));
  } catch (const Error& e) {
    return error_response(404, e.message());
  }
  store::StoredResource res;
  try {
    res = store.get(path, revision);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotFound) return error_response(404, e.message());
    throw;
  }
  std::vector<std::string> available;
  for (const auto& [v, _] : res.variants) available.push_back(v);
  auto chosen = negotiate(accept, available);
  Response r;
  r.headers["Vary"] = "Accept";
  r.headers["X-Revision"] = std::to_string(res.revision);
  if (!chosen) {
    std::string offered;
    for (const auto& [v, mt] : kMediaTypes) {
      if (res.variants.count(v)) offered += (offered.empty() ? "" : ", ") + mt;
    }
    auto e = error_response(406, "no acceptable variant; available: " + offered);
    e.headers = r.headers;
    return e;
  }
  r.content_type = media_type(*chosen) + "; charset=utf-8";
  r.body = res.variants.at(*chosen);
  return r;
}

std::vector<Published> publish(const pipeline::Result& result, const std::string& url, const std::string& token) {
  httplib::Client client(url);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  auto put = [&](const std::string& path, const std::map<std::string, std::string>& variants) {
    httplib::MultipartFormDataItems items;
    for (const auto& [name, bytes] : variants) items.push_back({name, bytes, "doc." + name, media_type(name)});
    auto res = client.Put("/doc/" + path, headers, items);
    if (!res) throw Error(ErrorKind::Io, "PUT " + url + "/doc/" + path + ": " + httplib::to_string(res.error()));
    if (res->status != 201) {
      throw Error(ErrorKind::Io, "PUT " + url + "/doc/" + path + ": HTTP " + std::to_string(res->status) + " " +
                                     text::trim(res->body));
    }
    return Published{path, nlohmann::json::parse(res->body).at("revision").get<int>()};
  };

  std::vector<Published> out;
  for (const auto& a : result.artifacts) out.push_back(put(a.doc_path, a.variants));
  out.push_back(put(pipeline::kIndexPath, {{pipeline::kIndexVariant, result.index}}));
  return out;
}

struct Server::Impl {
  store::Store& store;
  Options opts;
  httplib::Server http;
  std::mutex log_mutex;

  Impl(store::Store& s, Options o) : store(s), opts(std::move(o)) {
    http.Get(R"(/doc/(.+))", [this](const httplib::Request& req, httplib::Response& res) { get_doc(req, res); });
    http.Put(R"(/doc/(.+))", [this](const httplib::Request& req, httplib::Response& res) { put_doc(req, res); });
    http.Get("/lookup", [this](const httplib::Request& req, httplib::Response& res) { get_lookup(req, res); });
    http.Options(R"(/(doc/.+|lookup))", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Accept, Authorization, Content-Type");
    });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      } catch (...) {
      }
      apply(error_response(500, msg), res);
    });
    http.set_logger([this](const httplib::Request& req, const httplib::Response& res) { log(req, res); });
  }

  void log(const httplib::Request& req, const httplib::Response& res) {
    std::string line = req.remote_addr + " [" + timestamp() + "] \"" + req.method + " " + req.target + "\" " +
                       std::to_string(res.status) + " " + std::to_string(res.body.size());
    std::lock_guard<std::mutex> g(log_mutex);
    if (opts.access_log) {
      opts.access_log(line);
    } else {
      std::fprintf(stdout, "%s\n", line.c_str());
      std::fflush(stdout);
    }
  }

  void get_doc(const httplib::Request& req, httplib::Response& res) {
    std::optional<int> rev;
    if (req.has_param("rev")) {
      std::string v = req.get_param_value("rev");
      if (v.empty() || v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos) {
        apply(error_response(400, "rev must be a positive integer"), res);
        return;
      }
      rev = std::stoi(v);
    }
    apply(get_document(store, req.matches[1].str(), rev, req.get_header_value("Accept")), res);
  }

  void put_doc(const httplib::Request& req, httplib::Response& res) {
    if (!opts.token.empty() && req.get_header_value("Authorization") != "Bearer " + opts.token) {
      apply(error_response(401, "missing or wrong bearer token"), res);
      res.set_header("WWW-Authenticate", "Bearer");
      return;
    }
    if (!req.is_multipart_form_data() || req.files.empty()) {
      apply(error_response(400, "expected a multipart/form-data body with one part per variant"), res);
      return;
    }
    store::Variants variants;
    for (const auto& [name, part] : req.files) {
      if (!variants.emplace(name, part.content).second) {
        apply(error_response(400, "variant '" + name + "' given twice"), res);
        return;
      }
    }
    std::string path;
    int rev = 0;
    try {
      path = store::Store::normalize_path(uri::strip_doc_suffix(req.matches[1].str()));
      rev = store.put(path, variants);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Store) throw;
      apply(error_response(400, e.message()), res);
      return;
    }
    Response r;
    r.status = 201;
    r.content_type = "application/json";
    r.body = nlohmann::json{{"path", path}, {"revision", rev}}.dump() + "\n";
    r.headers["Location"] = "/doc/" + path + "?rev=" + std::to_string(rev);
    apply(r, res);
  }

  void get_lookup(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("cd") || !req.has_param("name")) {
      apply(error_response(400, "lookup needs cd and name parameters"), res);
      return;
    }
    std::optional<std::string> index;
    int rev = 0;
    try {
      rev = store.latest(pipeline::kIndexPath);
      if (rev > 0) index = store.get_variant(pipeline::kIndexPath, pipeline::kIndexVariant, rev);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotFound) throw;
    }
    if (!index) {
      apply(error_response(404, "no corpus index in the store; publish a compiled corpus first"), res);
      return;
    }
    Response r = lookup(*index, req.get_param_value("cd"), req.get_param_value("name"));
    r.headers["X-Revision"] = std::to_string(rev);
    apply(r, res);
  }
};

Server::Server(store::Store& store, Options opts) : impl_(std::make_unique<Impl>(store, std::move(opts))) {}
Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Server::run() { impl_->http.listen_after_bind(); }
void Server::stop() { impl_->http.stop(); }
void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace semtex::server
