#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semtex::xml {

/// A minimal, namespace-unaware XML tree. Prefixed names such as `m:mo` or
/// `xml:id` are kept verbatim.
struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string name;
  std::string text;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;

  static Node element(std::string name) {
    Node n;
    n.name = std::move(name);
    return n;
  }
  static Node make_text(std::string value) {
    Node n;
    n.kind = Kind::Text;
    n.text = std::move(value);
    return n;
  }

  bool is_element() const { return kind == Kind::Element; }
  bool is_text() const { return kind == Kind::Text; }

  const std::string* attr(std::string_view key) const;
  std::string attr_or(std::string_view key, std::string fallback = {}) const;
  Node& set_attr(std::string key, std::string value);
  bool remove_attr(std::string_view key);

  Node& append(Node child);
  /// Appends text, merging with a trailing text child so the tree never holds
  /// adjacent text nodes.
  Node& append_text(std::string_view value);

  const Node* first_child(std::string_view element_name) const;
  Node* first_child(std::string_view element_name);
  std::vector<const Node*> child_elements(std::string_view element_name = {}) const;

  /// Concatenation of the direct text children only.
  std::string direct_text() const;
  /// Concatenation of all descendant text.
  std::string text_content() const;
};

/// Structural equality: attribute order is ignored, everything else compared.
bool operator==(const Node& a, const Node& b);
inline bool operator!=(const Node& a, const Node& b) { return !(a == b); }

struct Document {
  std::string doctype;  // raw `<!DOCTYPE ...>` text, empty when absent
  Node root;
};

/// Canonical UTF-8 serialization: XML declaration, attributes sorted by name,
/// two-space indentation for element-only content, mixed content written
/// inline. Literal newlines inside text and attribute values are written as
/// character references, so the only raw newlines in the output are
/// indentation.
std::string serialize(const Document& doc);
/// Serializes a single subtree without declaration, starting at `depth`.
std::string serialize_fragment(const Node& node, int depth = 0);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

/// Parses a document. Whitespace-only text nodes that contain a literal
/// newline are indentation and are dropped; comments and processing
/// instructions are skipped. Throws semtex::Error (ErrorKind::Xml).
Document parse(std::string_view input);

/// Depth-first pre-order search.
const Node* find_if(const Node& root, const std::function<bool(const Node&)>& pred);
Node* find_if(Node& root, const std::function<bool(const Node&)>& pred);
Node* find_by_id(Node& root, std::string_view xml_id);
const Node* find_by_id(const Node& root, std::string_view xml_id);

void for_each_element(const Node& root, const std::function<void(const Node&)>& fn);

}  // namespace semtex::xml
