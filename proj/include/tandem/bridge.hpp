#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tandem/dispatch.hpp"
#include "tandem/object_space.hpp"

namespace tandem {

// Arity-suffixed ruby selector: base#n followed by the splat mark (* or _)
// and the block mark (& or _). n stays within 0..3 except on the exact-arity
// seventeenth bridge.
struct FullSelector {
  std::string base;
  int n = 0;
  bool splat = false;
  bool block = false;

  std::string render() const;
  static std::optional<FullSelector> parse(std::string_view s);
};

struct TranslatedCall {
  FullSelector sel;
  int pack_from = -1;  // >=0: pack args[pack_from..] into the splat
};

// Call-site translation: argc <= 3 keeps the shape; beyond that the tail is
// packed into a splat and dispatched through base#3*.
TranslatedCall translate_call_site(const std::string& base, int argc,
                                   bool has_splat, bool has_block);

// Installs the 16-entry bridge family for `real` (17 when arity > 3) into
// the class's ruby dictionary. Outside bootstrap mode any previous family of
// the same base is erased first; in bootstrap mode real entries of sibling
// shapes survive. Returns the number of entries written.
int generate_bridges(ObjectSpace& sp, ObjRef cls, const MethodEntry& real);

std::vector<std::string> bridge_family_selectors(const std::string& base,
                                                 const Signature& sig);
FullSelector canonical_selector(const std::string& base, const Signature& sig);

// Parsed @ruby1: calling-convention selector.
struct StRubySelector {
  std::string base;
  int normal_args = 0;
  bool has_splat = false;
  bool has_block = false;
};

// Parses the keyword parts of an @ruby1: message. Shapes that would need a
// block or splat without any normal argument raise UnsupportedShape.
StRubySelector parse_st_ruby_selector(const std::vector<std::string>& parts);

// Splits a single-token script spelling into keyword parts, e.g.
// "@ruby1:set_name:_:" -> ["@ruby1:set_name:", "_:"]. A selector colon
// directly followed by __STAR:/__BLOCK: yields a colonless first part, which
// parse_st_ruby_selector then rejects.
std::vector<std::string> split_ruby_call_token(const std::string& token);

// Performs the cross-environment call: slot values in selector order
// (normals, then splat sequence, then block).
Value st_call_ruby(Interp& in, const Value& receiver, const StRubySelector& sel,
                   std::vector<Value> slot_values);

// Primitive installation: a ruby entry (full bridge family included)
// delegating to an existing smalltalk method. class_primitive targets
// ruby_singleton_class(cls).
void install_primitive(Interp& in, ObjRef cls, const std::string& ruby_name,
                       const std::string& st_selector);
void install_class_primitive(Interp& in, ObjRef cls,
                             const std::string& ruby_name,
                             const std::string& st_selector);

// Proxy objects that re-dispatch unknown smalltalk sends in the ruby
// environment. Wrapping a wrapper returns it unchanged.
ObjRef wrap(Interp& in, const Value& target);
bool is_wrapper(const ObjectSpace& sp, const Value& v);
Value wrapper_target(const ObjectSpace& sp, ObjRef wrapper);

// Convenience for tests and scripts: smalltalk-style send to a wrapper.
Value wrapper_send(Interp& in, ObjRef wrapper, const std::string& st_selector,
                   std::vector<Value> args, std::optional<Value> block);

}  // namespace tandem
