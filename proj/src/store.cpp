#include "semtex/store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "semtex/diagnostics.hpp"
#include "semtex/text.hpp"

namespace semtex::store {

namespace {

bool valid_segment(std::string_view s) {
  if (s.empty() || s.front() == '.' || s == "LATEST") return false;
  bool digits_only = true;
  for (char c : s) {
    bool ok = text::is_ascii_letter(c) || text::is_ascii_digit(c) || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
    digits_only = digits_only && text::is_ascii_digit(c);
  }
  return !digits_only;
}

bool valid_variant(std::string_view v) {
  if (v.empty() || v.front() == '.' || v.back() == '.') return false;
  for (char c : v) {
    if (!(text::is_ascii_letter(c) || text::is_ascii_digit(c) || c == '.' || c == '-' || c == '+')) return false;
  }
  return true;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
}

std::string temp_suffix() {
  thread_local std::mt19937_64 rng(std::random_device{}() ^
                                   std::hash<std::thread::id>{}(std::this_thread::get_id()));
  std::ostringstream ss;
  ss << std::hex << rng();
  return ss.str();
}

std::string now_iso() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(now - secs).count();
  std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char frac[16];
  std::snprintf(frac, sizeof frac, ".%06lldZ", static_cast<long long>(micros));
  return std::string(buf) + frac;
}

int read_latest(const fs::path& dir) {
  std::error_code ec;
  if (!fs::exists(dir / "LATEST", ec)) return 0;
  std::string s = text::trim(read_file(dir / "LATEST"));
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Store, "corrupt LATEST marker in " + dir.string());
  }
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) throw Error(ErrorKind::Io, "cannot create store at " + root_.string());
}

std::string Store::normalize_path(std::string_view path) {
  std::string out;
  std::size_t i = 0;
  while (i < path.size() && path[i] == '/') ++i;
  std::size_t end = path.size();
  while (end > i && path[end - 1] == '/') --end;
  if (i == end) throw Error(ErrorKind::Store, "empty document path");
  std::string_view rest = path.substr(i, end - i);
  while (true) {
    auto slash = rest.find('/');
    std::string_view seg = rest.substr(0, slash);
    if (!valid_segment(seg)) {
      throw Error(ErrorKind::Store, "invalid document path '" + std::string(path) + "': bad segment '" +
                                        std::string(seg) + "'");
    }
    if (!out.empty()) out += '/';
    out += seg;
    if (slash == std::string_view::npos) break;
    rest = rest.substr(slash + 1);
  }
  return out;
}

fs::path Store::dir_of(const std::string& path) const { return root_ / fs::path(path); }

std::shared_ptr<std::mutex> Store::lock_for(const std::string& path) {
  std::lock_guard<std::mutex> g(locks_mutex_);
  auto& m = locks_[path];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

int Store::put(std::string_view raw_path, const Variants& variants) {
  std::string path = normalize_path(raw_path);
  if (variants.empty()) throw Error(ErrorKind::Store, "put of '" + path + "' without variants");
  for (const auto& [name, _] : variants) {
    if (!valid_variant(name)) throw Error(ErrorKind::Store, "invalid variant name '" + name + "'");
  }
  auto lock = lock_for(path);
  std::lock_guard<std::mutex> g(*lock);

  fs::path dir = dir_of(path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  int rev = read_latest(dir) + 1;
  fs::path final_dir = dir / std::to_string(rev);
  // left behind by a writer that died before publishing
  fs::remove_all(final_dir, ec);

  fs::path tmp = dir / (".tmp-" + std::to_string(rev) + "-" + temp_suffix());
  fs::create_directory(tmp, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + tmp.string() + ": " + ec.message());
  std::string created;
  {
    std::lock_guard<std::mutex> clock(locks_mutex_);
    created = std::max(now_iso(), last_created_);
    last_created_ = created;
  }
  try {
    for (const auto& [name, bytes] : variants) write_file(tmp / ("doc." + name), bytes);
    write_file(tmp / "created", created + "\n");
    fs::rename(tmp, final_dir);
    fs::path marker = dir / (".LATEST-" + temp_suffix());
    write_file(marker, std::to_string(rev) + "\n");
    fs::rename(marker, dir / "LATEST");
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw Error(ErrorKind::Io, std::string("store write failed: ") + e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  return rev;
}

int Store::latest(std::string_view raw_path) const {
  std::string path = normalize_path(raw_path);
  return read_latest(dir_of(path));
}

StoredResource Store::get(std::string_view raw_path, std::optional<int> revision) const {
  std::string path = normalize_path(raw_path);
  fs::path dir = dir_of(path);
  int latest = read_latest(dir);
  if (latest == 0) throw Error(ErrorKind::NotFound, "no document '" + path + "'");
  int rev = revision.value_or(latest);
  if (rev < 1 || rev > latest) {
    throw Error(ErrorKind::NotFound, "document '" + path + "' has no revision " + std::to_string(rev));
  }
  StoredResource r;
  r.path = path;
  r.revision = rev;
  fs::path rdir = dir / std::to_string(rev);
  r.created = text::trim(read_file(rdir / "created"));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(rdir)) files.push_back(e.path());
  for (const auto& f : files) {
    std::string name = f.filename().string();
    if (name.rfind("doc.", 0) == 0) r.variants[name.substr(4)] = read_file(f);
  }
  return r;
}

std::optional<std::string> Store::get_variant(std::string_view raw_path, std::string_view variant,
                                              std::optional<int> revision) const {
  std::string path = normalize_path(raw_path);
  fs::path dir = dir_of(path);
  int latest = read_latest(dir);
  if (latest == 0) throw Error(ErrorKind::NotFound, "no document '" + path + "'");
  int rev = revision.value_or(latest);
  if (rev < 1 || rev > latest) {
    throw Error(ErrorKind::NotFound, "document '" + path + "' has no revision " + std::to_string(rev));
  }
  if (!valid_variant(variant)) return std::nullopt;
  fs::path f = dir / std::to_string(rev) / ("doc." + std::string(variant));
  std::error_code ec;
  if (!fs::exists(f, ec)) return std::nullopt;
  return read_file(f);
}

std::vector<RevisionInfo> Store::list_revisions(std::string_view raw_path) const {
  std::string path = normalize_path(raw_path);
  fs::path dir = dir_of(path);
  int latest = read_latest(dir);
  if (latest == 0) throw Error(ErrorKind::NotFound, "no document '" + path + "'");
  std::vector<RevisionInfo> out;
  for (int r = 1; r <= latest; ++r) {
    out.push_back({r, text::trim(read_file(dir / std::to_string(r) / "created"))});
  }
  return out;
}

}  // namespace semtex::store
