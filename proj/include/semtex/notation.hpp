#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semtex/content.hpp"
#include "semtex/modsys.hpp"
#include "semtex/xml.hpp"

namespace semtex::notation {

inline constexpr const char* kMathMlNs = "http://www.w3.org/1998/Math/MathML";

/// Presentation template node.
struct TNode {
  enum class Kind { Mi, Mo, Mn, Mtext, Mspace, Row, Sup, Slot };
  Kind kind = Kind::Row;
  std::string text;
  int slot = 0;           // Slot: 1-based parameter index
  bool fence = false;     // Mo: a bracket
  bool elidable = false;  // Mo fence the viewer may hide
  std::vector<TNode> children;  // Row: items; Sup: {base, script}
};
bool operator==(const TNode& a, const TNode& b);

struct NotationRule {
  content::OMS head;
  int arity = 0;
  TNode rendering;
};

/// Compiles a symdef body. Nested semantic macros are inlined with their
/// arguments substituted. Throws on cycles and unsupported commands.
NotationRule compile_notation(const modsys::SymDef& sym, const modsys::Scope& scope);

/// Binds slots to OMA arguments when head and arity match; nullopt otherwise.
std::optional<std::vector<content::OMObject>> match_prototype(const NotationRule& rule,
                                                              const content::OMObject& obj);

class RuleSet {
 public:
  void add(NotationRule rule);
  const NotationRule* find(const content::OMS& head) const;
  std::size_t size() const { return rules_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, NotationRule> rules_;
};

/// Rules for the own symbols of every module in the graph.
RuleSet compile_rules(const modsys::ModuleGraph& graph);

/// Template as MathML elements with `prefix` (e.g. "m:"); slots become
/// `<render name="argN"/>`.
xml::Node template_to_mathml(const TNode& t, const std::string& prefix);

struct RenderOptions {
  std::string id_prefix = "f";
  std::function<std::string(const content::OMS&)> symbol_uri;  // href of symbol tokens, optional
  bool fallback = true;  // render rule-less symbols by name
};

struct RenderedFormula {
  xml::Node math;  // <math><semantics>PRES<annotation-xml>OMOBJ</annotation-xml></semantics></math>
  content::OMObject content;
  std::vector<std::pair<std::string, std::string>> crossrefs;  // presentation id, content id
};

RenderedFormula render_object(const content::OMObject& obj, const RuleSet& rules, const RenderOptions& opts = {});

/// The presentation child of a rendered `math` element.
const xml::Node& presentation_of(const xml::Node& math);
/// The content tree carried by a rendered `math` element.
content::OMObject annotation_of(const xml::Node& math);

/// Plain text of the presentation: spaces for mspace, Unicode superscripts
/// for msup scripts; annotations skipped.
std::string linearize(const xml::Node& math);

}  // namespace semtex::notation
