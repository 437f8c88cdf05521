#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tandem/object_space.hpp"

namespace tandem {

// Caller context for visibility checks. Top-level sends pass none: explicit
// receiver, no defining class.
struct CallCtx {
  std::optional<ObjRef> defining_class;
  bool implicit_self = false;
};

struct LookupResult {
  const MethodEntry* entry = nullptr;
  ObjRef holder{};
  MissReason reason = MissReason::Absent;
  bool found() const { return entry != nullptr; }
};

// What a native body sees: bound parameters plus the originally dispatched
// selector (does-not-understand hooks receive the raw send).
struct NativeCtx {
  Value receiver;
  std::vector<Value> args;
  std::optional<Value> block;
  std::string selector;
};

struct Activation {
  Value self;
  std::vector<Value> params;
  std::optional<Value> block;
  Env env = Env::Ruby;
  ObjRef holder{};
  const MethodEntry* entry = nullptr;
};

class Interp {
 public:
  explicit Interp(ObjectSpace& sp) : sp_(sp) {}

  ObjectSpace& space() { return sp_; }
  const ObjectSpace& space() const { return sp_; }

  // Installs a method. Ruby definitions generate the whole bridge family;
  // smalltalk definitions must be public.
  void define_method(ObjRef cls, Env env, const std::string& selector,
                     Visibility vis, Signature sig,
                     std::shared_ptr<const MethodBody> body);

  void define_ir(ObjRef cls, Env env, const std::string& selector,
                 Signature sig, IrPtr body,
                 Visibility vis = Visibility::Public);
  void define_native(ObjRef cls, Env env, const std::string& selector,
                     Signature sig,
                     std::function<Value(Interp&, const NativeCtx&)> fn,
                     Visibility vis = Visibility::Public);

  // Updates an entry and its whole bridge family uniformly. Accepts the base
  // name or any full bridge selector. Smalltalk env refuses non-public.
  void set_visibility(ObjRef cls, Env env, const std::string& selector,
                      Visibility vis);

  // First dictionary hit along the dispatch chain, then admissibility.
  // An inadmissible hit is a miss with the visibility reason; the walk does
  // not continue past it.
  LookupResult lookup(const Value& receiver, const std::string& selector,
                      Env env, const CallCtx* caller) const;
  LookupResult lookup_from_class(ObjRef start, const std::string& selector,
                                 Env env) const;

  // Dispatch walk order for a receiver: virtual class, then the env chain.
  std::vector<ObjRef> lookup_chain(const Value& receiver, Env env) const;

  // Full send. In ruby env `selector` is a full bridge selector; a miss
  // consults method_missing (ruby) or doesNotUnderstand: (smalltalk) once.
  Value send(const Value& receiver, const std::string& selector,
             std::vector<Value> normals, std::optional<Value> splat,
             std::optional<Value> block, Env env, const CallCtx* caller);

  // Ruby call-site convenience: derives the full selector from the shape,
  // packing arguments beyond three into the splat.
  Value call_ruby(const Value& receiver, const std::string& base,
                  std::vector<Value> args, std::optional<Value> splat,
                  std::optional<Value> block, const CallCtx* caller);

  Value eval_ir(const IrPtr& node, Activation& act);
  Value call_block(const Value& blockval, std::vector<Value> args);

 private:
  Value invoke_entry(const MethodEntry& e, ObjRef holder, const Value& recv,
                     std::vector<Value> normals, std::optional<Value> splat,
                     std::optional<Value> block, const std::string& dispatched);
  Value run_body(const MethodEntry& e, ObjRef holder, const Value& recv,
                 std::vector<Value> params, std::optional<Value> block,
                 const std::string& dispatched);
  Value dispatch_missing(const Value& recv, const std::string& selector,
                         std::vector<Value> normals, std::optional<Value> splat,
                         std::optional<Value> block, Env env,
                         MissReason reason);
  Value send_super(Activation& act, const std::string& selector,
                   std::vector<Value> normals, std::optional<Value> splat,
                   std::optional<Value> block);
  std::string describe_miss(MissReason reason, const std::string& name,
                            const Value& recv) const;
  std::optional<std::vector<Value>> try_bind(const MethodEntry& e,
                                             const Value& recv,
                                             const std::vector<Value>& flat,
                                             const std::optional<Value>& block);

  ObjectSpace& sp_;
};

// Flattens normals plus splat contents; the splat value must be a sequence.
std::vector<Value> flatten_args(std::vector<Value> normals,
                                const std::optional<Value>& splat);

// Argument count of a smalltalk selector: colon count, or one for a pure
// operator (binary) selector.
int st_selector_arity(const std::string& selector);

}  // namespace tandem
