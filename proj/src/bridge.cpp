#include "tandem/bridge.hpp"

#include <algorithm>

#include "tandem/singleton.hpp"

namespace tandem {

namespace {

bool definite_fail(const Signature& sig, const CallShape& s) {
  // Shapes that cannot bind no matter what the splat holds.
  if (!s.splat && s.n < sig.required) return true;
  if (!sig.splat && s.n > sig.arity()) return true;
  return false;
}

}  // namespace

std::string FullSelector::render() const {
  return base + "#" + std::to_string(n) + (splat ? "*" : "_") +
         (block ? "&" : "_");
}

std::optional<FullSelector> FullSelector::parse(std::string_view s) {
  auto pos = s.rfind('#');
  if (pos == std::string_view::npos || pos == 0) return std::nullopt;
  std::string_view suffix = s.substr(pos + 1);
  if (suffix.size() < 3) return std::nullopt;
  char bm = suffix.back();
  char sm = suffix[suffix.size() - 2];
  if ((bm != '&' && bm != '_') || (sm != '*' && sm != '_')) return std::nullopt;
  std::string_view digits = suffix.substr(0, suffix.size() - 2);
  if (digits.empty()) return std::nullopt;
  int n = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + (c - '0');
  }
  FullSelector out;
  out.base = std::string(s.substr(0, pos));
  out.n = n;
  out.splat = sm == '*';
  out.block = bm == '&';
  return out;
}

TranslatedCall translate_call_site(const std::string& base, int argc,
                                   bool has_splat, bool has_block) {
  TranslatedCall tc;
  if (argc <= 3) {
    tc.sel = FullSelector{base, argc, has_splat, has_block};
    return tc;
  }
  // Arguments beyond the third travel in the splat.
  tc.sel = FullSelector{base, 3, true, has_block};
  tc.pack_from = 3;
  return tc;
}

FullSelector canonical_selector(const std::string& base, const Signature& sig) {
  return FullSelector{base, sig.arity(), sig.splat, sig.block};
}

std::vector<std::string> bridge_family_selectors(const std::string& base,
                                                 const Signature& sig) {
  std::vector<std::string> out;
  for (int n = 0; n <= 3; ++n)
    for (int s = 0; s <= 1; ++s)
      for (int b = 0; b <= 1; ++b)
        out.push_back(FullSelector{base, n, s == 1, b == 1}.render());
  if (sig.arity() > 3) out.push_back(canonical_selector(base, sig).render());
  return out;
}

int generate_bridges(ObjectSpace& sp, ObjRef cls, const MethodEntry& real) {
  MethodDict& dict = sp.cls(cls).env[env_index(Env::Ruby)].dict;
  if (!sp.bootstrap_mode) {
    for (auto it = dict.begin(); it != dict.end();) {
      if (it->second.base == real.base)
        it = dict.erase(it);
      else
        ++it;
    }
  }
  std::string canonical = canonical_selector(real.base, real.sig).render();

  std::vector<CallShape> shapes;
  for (int n = 0; n <= 3; ++n)
    for (int s = 0; s <= 1; ++s)
      for (int b = 0; b <= 1; ++b) shapes.push_back(CallShape{n, s == 1, b == 1});
  if (real.sig.arity() > 3)
    shapes.push_back(CallShape{real.sig.arity(), real.sig.splat, real.sig.block});

  int written = 0;
  for (const CallShape& shape : shapes) {
    std::string key =
        FullSelector{real.base, shape.n, shape.splat, shape.block}.render();
    bool is_canonical = key == canonical;
    if (sp.bootstrap_mode && !is_canonical) {
      auto it = dict.find(key);
      // Bootstrap overloads: sibling real entries survive stub generation.
      if (it != dict.end() && it->second.role == BridgeRole::Real) continue;
    }
    MethodEntry e;
    e.selector = key;
    e.env = Env::Ruby;
    e.visibility = real.visibility;
    e.sig = real.sig;
    e.role = is_canonical ? BridgeRole::Real
             : definite_fail(real.sig, shape) ? BridgeRole::ArgumentErrorStub
                                              : BridgeRole::DefaultFillingStub;
    e.shape = shape;
    e.base = real.base;
    e.canonical = canonical;
    e.body = real.body;
    e.defining_class = real.defining_class;
    dict[key] = std::move(e);
    ++written;
  }
  return written;
}

std::vector<std::string> split_ruby_call_token(const std::string& token) {
  static const std::string kPrefix = "@ruby1:";
  if (token.rfind(kPrefix, 0) != 0)
    fail(Err::ParseError, "ruby call token must start with @ruby1:");
  std::string rest = token.substr(kPrefix.size());
  if (rest.empty())
    fail(Err::ParseError, "empty ruby call token");
  if (rest.find(':') == std::string::npos) return {kPrefix + rest};

  std::vector<std::string> segments;
  std::string cur;
  for (char c : rest) {
    cur += c;
    if (c == ':') {
      segments.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty())
    fail(Err::ParseError, "ruby call token must end with a colon: " + token);

  std::vector<std::string> parts;
  bool special_first = segments.size() > 1 &&
                       (segments[1] == "__STAR:" || segments[1] == "__BLOCK:");
  if (special_first) {
    // The base keeps no colon: no leading normal argument slot.
    parts.push_back(kPrefix + segments[0].substr(0, segments[0].size() - 1));
  } else {
    parts.push_back(kPrefix + segments[0]);
  }
  for (std::size_t i = 1; i < segments.size(); ++i) parts.push_back(segments[i]);
  return parts;
}

StRubySelector parse_st_ruby_selector(const std::vector<std::string>& parts) {
  static const std::string kPrefix = "@ruby1:";
  if (parts.empty()) fail(Err::ParseError, "empty ruby selector");
  if (parts[0].rfind(kPrefix, 0) != 0 || parts[0].size() == kPrefix.size())
    fail(Err::ParseError, "ruby selector must start with @ruby1:");
  std::string head = parts[0].substr(kPrefix.size());

  StRubySelector sel;
  bool head_has_colon = head.back() == ':';
  if (head_has_colon) {
    sel.base = head.substr(0, head.size() - 1);
    sel.normal_args = 1;
  } else {
    sel.base = head;
  }
  if (sel.base.empty() || sel.base.find(':') != std::string::npos)
    fail(Err::ParseError, "malformed ruby selector base: " + parts[0]);

  if (!head_has_colon && parts.size() > 1) {
    if (parts[1] == "__STAR:" || parts[1] == "__BLOCK:")
      fail(Err::UnsupportedShape,
           "block or splat keyword without a leading normal argument");
    fail(Err::ParseError, "keyword parts after a unary ruby selector");
  }

  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.empty() || p.back() != ':')
      fail(Err::ParseError, "ruby selector part must end with a colon: " + p);
    if (p == "__STAR:") {
      if (sel.has_splat || sel.has_block)
        fail(Err::ParseError, "misplaced __STAR: marker");
      sel.has_splat = true;
    } else if (p == "__BLOCK:") {
      if (sel.has_block) fail(Err::ParseError, "duplicate __BLOCK: marker");
      sel.has_block = true;
    } else {
      if (sel.has_splat || sel.has_block)
        fail(Err::ParseError, "normal argument after a __STAR:/__BLOCK: marker");
      if (p.find(':') != p.size() - 1)
        fail(Err::ParseError, "malformed ruby selector part: " + p);
      ++sel.normal_args;
    }
  }
  return sel;
}

Value st_call_ruby(Interp& in, const Value& receiver, const StRubySelector& sel,
                   std::vector<Value> slot_values) {
  std::size_t expected = static_cast<std::size_t>(sel.normal_args) +
                         (sel.has_splat ? 1 : 0) + (sel.has_block ? 1 : 0);
  if (slot_values.size() != expected)
    fail(Err::UnsupportedShape,
         "selector " + sel.base + " takes " + std::to_string(expected) +
             " argument slots, got " + std::to_string(slot_values.size()));

  std::vector<Value> normals(slot_values.begin(),
                             slot_values.begin() + sel.normal_args);
  std::size_t next = static_cast<std::size_t>(sel.normal_args);
  std::optional<Value> splat;
  if (sel.has_splat) {
    if (!slot_values[next].is_seq())
      fail(Err::TypeError, "__STAR: slot must hold a sequence");
    splat = slot_values[next++];
  }
  std::optional<Value> block;
  if (sel.has_block) {
    if (!slot_values[next].is_block())
      fail(Err::TypeError, "__BLOCK: slot must hold a block");
    block = slot_values[next++];
  }
  return in.call_ruby(receiver, sel.base, std::move(normals), std::move(splat),
                      std::move(block), nullptr);
}

namespace {

void install_delegate(Interp& in, ObjRef target, ObjRef resolve_from,
                      const std::string& ruby_name,
                      const std::string& st_selector) {
  if (!in.lookup_from_class(resolve_from, st_selector, Env::Smalltalk).found())
    fail(Err::NoSuchMethod, "no smalltalk method " + st_selector);
  int k = st_selector_arity(st_selector);
  Signature sig;
  sig.required = k > 0 ? k - 1 : 0;
  if (k > 0)
    // A trailing block may stand in for the last smalltalk argument, so the
    // final slot is optional at the bridge level; the delegate binder decides.
    sig.optionals.push_back(Signature::Optional{"__last", ir_literal(Value::nil())});
  sig.block = true;
  auto body = std::make_shared<MethodBody>();
  body->impl = StDelegate{st_selector, k};
  in.define_method(target, Env::Ruby, ruby_name, Visibility::Public,
                   std::move(sig), std::move(body));
}

}  // namespace

void install_primitive(Interp& in, ObjRef cls, const std::string& ruby_name,
                       const std::string& st_selector) {
  install_delegate(in, cls, cls, ruby_name, st_selector);
}

void install_class_primitive(Interp& in, ObjRef cls,
                             const std::string& ruby_name,
                             const std::string& st_selector) {
  ObjRef target = singleton_engine::ruby_singleton_class(in.space(), cls);
  install_delegate(in, target, target, ruby_name, st_selector);
}

bool is_wrapper(const ObjectSpace& sp, const Value& v) {
  return v.is_ref() && !sp.is_class(v.as_ref()) &&
         sp.class_of(v.as_ref()) == sp.wk.wrapper_cls;
}

ObjRef wrap(Interp& in, const Value& target) {
  ObjectSpace& sp = in.space();
  if (is_wrapper(sp, target)) return target.as_ref();
  ObjRef w = sp.alloc_object(sp.wk.wrapper_cls, sp.wk.wrapper_cls);
  sp.rec(w).payload = target;
  return w;
}

Value wrapper_target(const ObjectSpace& sp, ObjRef wrapper) {
  const ObjRecord& r = sp.rec(wrapper);
  if (!r.payload) fail(Err::ModelViolation, "wrapper without a target");
  return *r.payload;
}

Value wrapper_send(Interp& in, ObjRef wrapper, const std::string& st_selector,
                   std::vector<Value> args, std::optional<Value> block) {
  return in.send(Value(wrapper), st_selector, std::move(args), std::nullopt,
                 std::move(block), Env::Smalltalk, nullptr);
}

}  // namespace tandem
