#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tandem/errors.hpp"
#include "tandem/ir.hpp"
#include "tandem/value.hpp"

namespace tandem {

class Interp;
struct NativeCtx;

enum class Visibility { Public, Protected, Private };

// Role a ruby dictionary entry plays inside its bridge family.
enum class BridgeRole { Real, ArgumentErrorStub, DefaultFillingStub };

struct Signature {
  struct Optional {
    std::string name;
    IrPtr default_ir;  // evaluated in the callee's activation at bind time
  };
  int required = 0;
  std::vector<Optional> optionals;
  bool splat = false;
  bool block = false;

  int arity() const { return required + static_cast<int>(optionals.size()); }
};

// Call-site shape of a ruby bridge selector: leading normal argument count
// plus splat/block marks.
struct CallShape {
  int n = 0;
  bool splat = false;
  bool block = false;
};

// Body variants: an IR tree, a native hook, or a delegate that re-sends to
// a smalltalk method (the primitive mechanism).
struct StDelegate {
  std::string st_selector;
  int st_arity = 0;
};

struct MethodBody {
  std::variant<IrPtr, std::function<Value(Interp&, const NativeCtx&)>,
               StDelegate>
      impl;
};

struct MethodEntry {
  std::string selector;  // dispatch key (full selector in ruby env)
  Env env = Env::Ruby;
  Visibility visibility = Visibility::Public;
  Signature sig;
  BridgeRole role = BridgeRole::Real;
  CallShape shape;        // meaningful for ruby bridges
  std::string base;       // ruby base name (selector text in smalltalk)
  std::string canonical;  // full selector of the family's real entry
  std::shared_ptr<const MethodBody> body;
  ObjRef defining_class{};
};

using MethodDict = std::map<std::string, MethodEntry>;

// Per-environment face of a class: its own method dictionary plus an
// optional superclass reference. When the reference is absent the class
// defers to fallback_superclass (single-dictionary classes).
struct EnvSlot {
  MethodDict dict;
  bool has_superclass_ref = false;
  std::optional<ObjRef> superclass;
};

struct StaticSlot {
  std::string name;
  bool hidden_from_ruby = false;
};

struct ClassDesc {
  std::optional<std::string> name_st;
  std::optional<std::string> name_rb;
  bool is_meta = false;
  bool is_virtual = false;  // module inclusion copy
  bool is_module = false;
  bool instantiable = true;
  bool singleton_allowed = true;  // refusal flag for value classes
  std::optional<ObjRef> dest_class;  // inverse virtual-class link on metas
  std::optional<ObjRef> origin;      // module a virtual copy was taken from
  EnvSlot env[kEnvCount];
  std::optional<ObjRef> fallback_superclass;
  std::vector<StaticSlot> static_slots;  // declared on this class only
};

struct ObjRecord {
  ObjRef self{};
  ObjRef virtual_class{};
  ObjRef layout_class{};  // class whose slot layout static_values follows
  std::map<std::string, Value> dyn_ivars;
  std::vector<Value> static_values;
  std::optional<Value> payload;  // boxed primitive or wrapper target
  std::unique_ptr<ClassDesc> cls;  // null for plain objects
};

// Bootstrap-provided anchors the engines need by identity.
struct WellKnown {
  ObjRef object, behavior, module_cls, class_cls, metaclass3;
  ObjRef string_cls, integer_cls, symbol_cls, boolean_cls, nil_cls;
  ObjRef collection_cls, seq_collection_cls, array_cls, block_cls, wrapper_cls;
  ObjRef enumerable_mod;
};

class ObjectSpace {
 public:
  // --- allocation ---------------------------------------------------------
  ObjRef alloc_object(ObjRef vclass, ObjRef layout_class);
  ObjRef alloc_class_raw();  // bootstrap/engine use: empty descriptor
  ObjRef new_class(std::optional<std::string> name_st,
                   std::optional<std::string> name_rb, ObjRef superclass,
                   const std::vector<std::string>& ivars);
  ObjRef new_smalltalk_only_class(const std::string& name_st, ObjRef superclass,
                                  const std::vector<std::string>& ivars);
  ObjRef new_instance(ObjRef cls);
  ObjRef box(const Value& v);

  // --- structure ----------------------------------------------------------
  ObjRef virtual_class(ObjRef obj) const;
  void set_virtual_class(ObjRef obj, ObjRef vclass);
  ObjRef class_of(ObjRef obj) const;
  ObjRef class_of_value(const Value& v) const;
  ObjRef virtual_class_of_value(const Value& v) const;
  ObjRef destination_class(ObjRef meta) const;
  bool is_kind_of(const Value& v, ObjRef cls) const;

  bool is_class(ObjRef r) const { return rec(r).cls != nullptr; }
  bool is_meta(ObjRef r) const { return is_class(r) && cls(r).is_meta; }
  bool is_module(ObjRef r) const { return is_class(r) && cls(r).is_module; }

  // Immediate chain parent in one environment, honoring the fallback.
  std::optional<ObjRef> effective_superclass(ObjRef c, Env env) const;

  // --- instance variables -------------------------------------------------
  Value read_ivar(ObjRef obj, const std::string& name, Env env) const;
  void write_ivar(ObjRef obj, const std::string& name, Env env, Value v);
  Value dynamic_ivar_at(ObjRef obj, const std::string& name) const;
  void dynamic_ivar_at_put(ObjRef obj, const std::string& name, Value v);
  std::vector<std::string> instance_variables(ObjRef obj, Env env) const;

  // Declared slots of cls plus everything inherited, root first.
  std::vector<StaticSlot> effective_slots(ObjRef c) const;

  // --- registries ---------------------------------------------------------
  void register_name(Env env, const std::string& name, ObjRef r);
  std::optional<ObjRef> find_name(Env env, const std::string& name) const;
  std::vector<std::pair<std::string, ObjRef>> registry_entries(Env env) const;

  // --- bookkeeping --------------------------------------------------------
  std::size_t object_count() const { return objects_.size(); }
  std::size_t class_count() const;
  std::size_t meta_class_count() const;
  std::size_t module_count() const;

  ObjRecord& rec(ObjRef r);
  const ObjRecord& rec(ObjRef r) const;
  ClassDesc& cls(ObjRef r);
  const ClassDesc& cls(ObjRef r) const;

  ObjRef last_oop() const { return ObjRef{static_cast<std::uint32_t>(objects_.size() - 1)}; }

  WellKnown wk{};
  bool bootstrap_mode = false;

 private:
  std::vector<ObjRecord> objects_;
  std::map<std::string, ObjRef> registry_[kEnvCount];
};

}  // namespace tandem
