#include "semtex/xml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "semtex/diagnostics.hpp"

namespace semtex::xml {

const std::string* Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Node::attr_or(std::string_view key, std::string fallback) const {
  const std::string* v = attr(key);
  return v ? *v : std::move(fallback);
}

Node& Node::set_attr(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

bool Node::remove_attr(std::string_view key) {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

Node& Node::append(Node child) {
  if (child.is_text() && !children.empty() && children.back().is_text()) {
    children.back().text += child.text;
    return children.back();
  }
  children.push_back(std::move(child));
  return children.back();
}

Node& Node::append_text(std::string_view value) {
  return append(make_text(std::string(value)));
}

const Node* Node::first_child(std::string_view element_name) const {
  for (const auto& c : children) {
    if (c.is_element() && c.name == element_name) return &c;
  }
  return nullptr;
}

Node* Node::first_child(std::string_view element_name) {
  for (auto& c : children) {
    if (c.is_element() && c.name == element_name) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::child_elements(std::string_view element_name) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.is_element() && (element_name.empty() || c.name == element_name)) out.push_back(&c);
  }
  return out;
}

std::string Node::direct_text() const {
  std::string out;
  for (const auto& c : children) {
    if (c.is_text()) out += c.text;
  }
  return out;
}

std::string Node::text_content() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.text_content();
  return out;
}

namespace {

using Attrs = std::vector<std::pair<std::string, std::string>>;

Attrs sorted(Attrs a) {
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

bool operator==(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.is_text()) return a.text == b.text;
  return a.name == b.name && sorted(a.attributes) == sorted(b.attributes) &&
         a.children == b.children;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attr(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

void write_open(const Node& n, std::string& out) {
  out += '<';
  out += n.name;
  for (const auto& [k, v] : sorted(n.attributes)) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape_attr(v);
    out += '"';
  }
}

void write_inline(const Node& n, std::string& out) {
  if (n.is_text()) {
    out += escape_text(n.text);
    return;
  }
  write_open(n, out);
  if (n.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : n.children) write_inline(c, out);
  out += "</" + n.name + ">";
}

bool has_text_child(const Node& n) {
  return std::any_of(n.children.begin(), n.children.end(),
                     [](const Node& c) { return c.is_text(); });
}

void write_pretty(const Node& n, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out += indent;
  if (n.is_text() || n.children.empty() || has_text_child(n)) {
    write_inline(n, out);
    out += '\n';
    return;
  }
  write_open(n, out);
  out += ">\n";
  for (const auto& c : n.children) write_pretty(c, depth + 1, out);
  out += indent + "</" + n.name + ">\n";
}

}  // namespace

std::string serialize_fragment(const Node& node, int depth) {
  std::string out;
  write_pretty(node, depth, out);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string serialize(const Document& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!doc.doctype.empty()) {
    out += doc.doctype;
    out += '\n';
  }
  write_pretty(doc.root, 0, out);
  return out;
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == ':' || c == '-' || c == '.' || u >= 0x80;
}

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  Document run() {
    Document doc;
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    bool have_root = false;
    while (true) {
      skip_space();
      if (eof()) break;
      if (starts("<?")) {
        skip_until("?>");
      } else if (starts("<!--")) {
        skip_until("-->");
      } else if (starts("<!DOCTYPE")) {
        if (have_root) fail("DOCTYPE after root element");
        doc.doctype = read_doctype();
      } else if (peek() == '<') {
        if (have_root) fail("content after root element");
        doc.root = read_element();
        have_root = true;
      } else {
        fail("unexpected text outside the root element");
      }
    }
    if (!have_root) fail("no root element");
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Xml, "xml offset " + std::to_string(pos_) + ": " + msg);
  }

  bool eof() const { return pos_ >= in_.size(); }
  char peek() const { return eof() ? '\0' : in_[pos_]; }
  bool starts(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (!eof() && is_space(in_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator) {
    auto at = in_.find(terminator, pos_);
    if (at == std::string_view::npos) fail("unterminated construct, expected '" + std::string(terminator) + "'");
    pos_ = at + terminator.size();
  }

  std::string read_doctype() {
    std::size_t start = pos_;
    int bracket = 0;
    while (!eof()) {
      char c = in_[pos_++];
      if (c == '[') ++bracket;
      if (c == ']') --bracket;
      if (c == '>' && bracket == 0) return std::string(in_.substr(start, pos_ - start));
    }
    fail("unterminated DOCTYPE");
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (!eof() && is_name_char(in_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "amp") out += '&';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') {
        std::uint32_t cp = 0;
        try {
          cp = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                   ? static_cast<std::uint32_t>(std::stoul(std::string(ent.substr(2)), nullptr, 16))
                   : static_cast<std::uint32_t>(std::stoul(std::string(ent.substr(1)), nullptr, 10));
        } catch (const std::exception&) {
          fail("bad character reference '&" + std::string(ent) + ";'");
        }
        append_utf8(out, cp);
      } else {
        fail("unknown entity '&" + std::string(ent) + ";'");
      }
      i = semi;
    }
    return out;
  }

  Node read_element() {
    ++pos_;  // '<'
    Node el = Node::element(read_name());
    while (true) {
      skip_space();
      if (eof()) fail("unterminated start tag <" + el.name + ">");
      if (starts("/>")) {
        pos_ += 2;
        return el;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      std::string key = read_name();
      skip_space();
      if (peek() != '=') fail("expected '=' after attribute " + key);
      ++pos_;
      skip_space();
      char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      auto close = in_.find(quote, pos_);
      if (close == std::string_view::npos) fail("unterminated attribute value");
      if (el.attr(key)) fail("duplicate attribute " + key);
      el.attributes.emplace_back(key, decode(in_.substr(pos_, close - pos_)));
      pos_ = close + 1;
    }
    read_content(el);
    return el;
  }

  void read_content(Node& el) {
    while (true) {
      if (eof()) fail("unterminated element <" + el.name + ">");
      if (starts("</")) {
        pos_ += 2;
        std::string name = read_name();
        if (name != el.name) fail("mismatched end tag </" + name + "> for <" + el.name + ">");
        skip_space();
        if (peek() != '>') fail("expected '>'");
        ++pos_;
        return;
      }
      if (starts("<!--")) {
        skip_until("-->");
      } else if (starts("<![CDATA[")) {
        pos_ += 9;
        auto end = in_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        el.append_text(in_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts("<?")) {
        skip_until("?>");
      } else if (peek() == '<') {
        el.append(read_element());
      } else {
        std::size_t start = pos_;
        while (!eof() && in_[pos_] != '<') ++pos_;
        std::string_view raw = in_.substr(start, pos_ - start);
        bool indentation = raw.find('\n') != std::string_view::npos &&
                           std::all_of(raw.begin(), raw.end(), is_space);
        if (!indentation) el.append_text(decode(raw));
      }
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

Document parse(std::string_view input) { return Parser(input).run(); }

const Node* find_if(const Node& root, const std::function<bool(const Node&)>& pred) {
  if (root.is_element() && pred(root)) return &root;
  for (const auto& c : root.children) {
    if (const Node* hit = find_if(c, pred)) return hit;
  }
  return nullptr;
}

Node* find_if(Node& root, const std::function<bool(const Node&)>& pred) {
  return const_cast<Node*>(find_if(static_cast<const Node&>(root), pred));
}

Node* find_by_id(Node& root, std::string_view xml_id) {
  return find_if(root, [&](const Node& n) {
    const std::string* id = n.attr("xml:id");
    return id && *id == xml_id;
  });
}

const Node* find_by_id(const Node& root, std::string_view xml_id) {
  return find_if(root, [&](const Node& n) {
    const std::string* id = n.attr("xml:id");
    return id && *id == xml_id;
  });
}

void for_each_element(const Node& root, const std::function<void(const Node&)>& fn) {
  if (!root.is_element()) return;
  fn(root);
  for (const auto& c : root.children) for_each_element(c, fn);
}

}  // namespace semtex::xml
