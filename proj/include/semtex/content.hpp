#pragma once

#include <string>
#include <variant>
#include <vector>

#include "semtex/modsys.hpp"
#include "semtex/syntax.hpp"
#include "semtex/xml.hpp"

namespace semtex::content {

inline constexpr const char* kOpenMathNs = "http://www.openmath.org/OpenMath";

struct OMObject;

struct OMS {
  std::string cd;
  std::string name;
};
struct OMV {
  std::string name;
};
struct OMI {
  std::string value;  // decimal digits without leading zeros
};
/// Application; elems[0] is the head, the rest are arguments.
struct OMA {
  std::vector<OMObject> elems;
};

struct OMObject {
  std::variant<OMS, OMV, OMI, OMA> value;

  template <class T>
  const T* as() const { return std::get_if<T>(&value); }
};

bool operator==(const OMS& a, const OMS& b);
bool operator==(const OMV& a, const OMV& b);
bool operator==(const OMI& a, const OMI& b);
bool operator==(const OMA& a, const OMA& b);
bool operator==(const OMObject& a, const OMObject& b);
inline bool operator!=(const OMObject& a, const OMObject& b) { return !(a == b); }

OMObject oms(std::string cd, std::string name);
OMObject omv(std::string name);
OMObject omi(std::string digits);
OMObject oma(OMObject head, std::vector<OMObject> args);

/// Compact form such as `OMA(OMS(reals,greater), OMV(x), OMI(0))`.
std::string to_string(const OMObject& obj);

/// `OMS`/`OMV`/`OMI`/`OMA` element for an object (no OMOBJ wrapper).
xml::Node to_element(const OMObject& obj);
/// `<OMOBJ xmlns="...OpenMath">` wrapping the object.
xml::Node to_openmath(const OMObject& obj);
/// Inverse of to_openmath / to_element. Throws on foreign elements.
OMObject from_openmath(const xml::Node& node);

struct ArgBinding {
  std::vector<std::vector<syntax::Token>> args;  // args[k] binds #(k+1)
  std::vector<syntax::Token> rest;
};

/// TeX-style argument grabbing: each argument is a braced group (braces
/// removed) or a single token. Whitespace between arguments is skipped.
ArgBinding bind_args(const modsys::SymDef& macro, const std::vector<syntax::Token>& following);

/// Expands the tokens of one math group into a content tree. `at` locates
/// errors when the tokens carry no spans of their own.
OMObject expand_math(const std::vector<syntax::Token>& math, const modsys::Scope& scope,
                     const SourceSpan& at = {});

/// Every OMS in `obj`, pre-order.
std::vector<OMS> symbols_of(const OMObject& obj);

}  // namespace semtex::content
