#include "tandem/object_space.hpp"

#include <algorithm>

namespace tandem {

namespace {
constexpr std::size_t kChainGuard = 10000;  // chains are acyclic by construction
}

ObjRecord& ObjectSpace::rec(ObjRef r) {
  if (r.oop >= objects_.size()) fail(Err::ModelViolation, "dangling object reference");
  return objects_[r.oop];
}

const ObjRecord& ObjectSpace::rec(ObjRef r) const {
  if (r.oop >= objects_.size()) fail(Err::ModelViolation, "dangling object reference");
  return objects_[r.oop];
}

ClassDesc& ObjectSpace::cls(ObjRef r) {
  auto& rc = rec(r);
  if (!rc.cls) fail(Err::ModelViolation, "not a class object");
  return *rc.cls;
}

const ClassDesc& ObjectSpace::cls(ObjRef r) const {
  const auto& rc = rec(r);
  if (!rc.cls) fail(Err::ModelViolation, "not a class object");
  return *rc.cls;
}

ObjRef ObjectSpace::alloc_object(ObjRef vclass, ObjRef layout_class) {
  ObjRef r{static_cast<std::uint32_t>(objects_.size())};
  ObjRecord rc;
  rc.self = r;
  rc.virtual_class = vclass;
  rc.layout_class = layout_class;
  for (const auto& slot : effective_slots(layout_class)) {
    (void)slot;
    rc.static_values.emplace_back();
  }
  objects_.push_back(std::move(rc));
  return r;
}

ObjRef ObjectSpace::alloc_class_raw() {
  ObjRef r{static_cast<std::uint32_t>(objects_.size())};
  ObjRecord rc;
  rc.self = r;
  rc.virtual_class = r;  // caller wires the real instance-of link
  rc.layout_class = r;
  rc.cls = std::make_unique<ClassDesc>();
  objects_.push_back(std::move(rc));
  return r;
}

ObjRef ObjectSpace::new_class(std::optional<std::string> name_st,
                              std::optional<std::string> name_rb,
                              ObjRef superclass,
                              const std::vector<std::string>& ivars) {
  if (!is_class(superclass) || cls(superclass).is_virtual)
    fail(Err::TypeError, "superclass must be a class");
  if (cls(superclass).is_module)
    fail(Err::TypeError, "cannot subclass a module");
  if (name_st && find_name(Env::Smalltalk, *name_st))
    fail(Err::NameConflict, "smalltalk name taken: " + *name_st);
  if (name_rb && find_name(Env::Ruby, *name_rb))
    fail(Err::NameConflict, "ruby name taken: " + *name_rb);

  auto inherited = effective_slots(superclass);
  for (std::size_t i = 0; i < ivars.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (ivars[i] == ivars[j])
        fail(Err::NameConflict, "duplicate static ivar: " + ivars[i]);
    for (const auto& s : inherited)
      if (s.name == ivars[i])
        fail(Err::NameConflict, "static ivar shadows inherited slot: " + ivars[i]);
  }

  ObjRef c = alloc_class_raw();
  {
    ClassDesc& d = cls(c);
    d.name_st = name_st;
    d.name_rb = name_rb;
    for (const auto& nm : ivars) d.static_slots.push_back({nm, false});
    for (int e = 0; e < kEnvCount; ++e) {
      d.env[e].has_superclass_ref = true;
      d.env[e].superclass = superclass;
    }
  }

  // The smalltalk meta class exists from the start; deeper levels are lazy.
  ObjRef meta = alloc_class_raw();
  {
    ClassDesc& d = cls(meta);
    d.is_meta = true;
    d.instantiable = false;
    d.dest_class = c;
    ObjRef super_meta = virtual_class(superclass);
    for (int e = 0; e < kEnvCount; ++e) {
      d.env[e].has_superclass_ref = true;
      d.env[e].superclass = super_meta;
    }
  }
  rec(meta).virtual_class = wk.metaclass3;
  rec(meta).layout_class = wk.metaclass3;
  rec(meta).static_values.assign(effective_slots(wk.metaclass3).size(), Value());
  if (!rec(meta).static_values.empty())
    rec(meta).static_values[0] = Value(c);  // destClass mirror

  rec(c).virtual_class = meta;
  rec(c).layout_class = meta;

  if (name_st) register_name(Env::Smalltalk, *name_st, c);
  if (name_rb) register_name(Env::Ruby, *name_rb, c);
  return c;
}

ObjRef ObjectSpace::new_smalltalk_only_class(const std::string& name_st,
                                             ObjRef superclass,
                                             const std::vector<std::string>& ivars) {
  ObjRef c = new_class(name_st, std::nullopt, superclass, ivars);
  // Single-dictionary class: the ruby side has no reference of its own and
  // rides the fallback chain.
  ClassDesc& d = cls(c);
  d.env[env_index(Env::Ruby)].has_superclass_ref = false;
  d.env[env_index(Env::Ruby)].superclass.reset();
  d.fallback_superclass = superclass;
  ObjRef meta = virtual_class(c);
  ClassDesc& md = cls(meta);
  md.env[env_index(Env::Ruby)].has_superclass_ref = false;
  md.env[env_index(Env::Ruby)].superclass.reset();
  md.fallback_superclass = virtual_class(superclass);
  return c;
}

ObjRef ObjectSpace::new_instance(ObjRef c) {
  if (!is_class(c)) fail(Err::TypeError, "new_instance needs a class");
  const ClassDesc& d = cls(c);
  if (d.is_module) fail(Err::NotInstantiable, "modules cannot be instantiated");
  if (d.is_meta) fail(Err::NotInstantiable, "meta classes cannot be instantiated");
  if (!d.instantiable) fail(Err::NotInstantiable, "class refuses instantiation");
  return alloc_object(c, c);
}

ObjRef ObjectSpace::box(const Value& v) {
  if (v.is_ref()) return v.as_ref();
  ObjRef c = class_of_value(v);
  ObjRef r = alloc_object(c, c);
  rec(r).payload = v;
  return r;
}

ObjRef ObjectSpace::virtual_class(ObjRef obj) const { return rec(obj).virtual_class; }

void ObjectSpace::set_virtual_class(ObjRef obj, ObjRef vclass) {
  rec(obj).virtual_class = vclass;
}

ObjRef ObjectSpace::class_of(ObjRef obj) const {
  ObjRef node = virtual_class(obj);
  std::size_t guard = 0;
  while (guard++ < kChainGuard) {
    const ClassDesc& d = cls(node);
    if (!d.is_meta && !d.is_virtual) return node;
    auto next = effective_superclass(node, Env::Ruby);
    if (!next) break;
    node = *next;
  }
  fail(Err::ModelViolation, "no non-meta class on the virtual class chain");
}

ObjRef ObjectSpace::class_of_value(const Value& v) const {
  if (v.is_ref()) return class_of(v.as_ref());
  if (v.is_nil()) return wk.nil_cls;
  if (v.is_bool()) return wk.boolean_cls;
  if (v.is_int()) return wk.integer_cls;
  if (v.is_text()) return wk.string_cls;
  if (v.is_symbol()) return wk.symbol_cls;
  if (v.is_seq()) return wk.array_cls;
  return wk.block_cls;
}

ObjRef ObjectSpace::virtual_class_of_value(const Value& v) const {
  if (v.is_ref()) return virtual_class(v.as_ref());
  return class_of_value(v);
}

ObjRef ObjectSpace::destination_class(ObjRef meta) const {
  const ClassDesc& d = cls(meta);
  if (!d.is_meta || !d.dest_class)
    fail(Err::NotAMetaClass, "destination_class needs a meta class");
  return *d.dest_class;
}

std::optional<ObjRef> ObjectSpace::effective_superclass(ObjRef c, Env env) const {
  const ClassDesc& d = cls(c);
  const EnvSlot& slot = d.env[env_index(env)];
  if (slot.has_superclass_ref) return slot.superclass;
  return d.fallback_superclass;
}

bool ObjectSpace::is_kind_of(const Value& v, ObjRef target) const {
  ObjRef node = virtual_class_of_value(v);
  std::size_t guard = 0;
  while (guard++ < kChainGuard) {
    if (node == target) return true;
    const ClassDesc& d = cls(node);
    if (d.is_virtual && d.origin && *d.origin == target) return true;
    auto next = effective_superclass(node, Env::Ruby);
    if (!next) return false;
    node = *next;
  }
  return false;
}

std::vector<StaticSlot> ObjectSpace::effective_slots(ObjRef c) const {
  if (!is_class(c)) return {};
  std::vector<ObjRef> chain;
  ObjRef node = c;
  std::size_t guard = 0;
  while (guard++ < kChainGuard) {
    if (!cls(node).is_virtual) chain.push_back(node);
    auto next = effective_superclass(node, Env::Smalltalk);
    if (!next) break;
    node = *next;
  }
  std::vector<StaticSlot> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    for (const auto& s : cls(*it).static_slots) out.push_back(s);
  return out;
}

namespace {
constexpr const char* kStPrefix = "_st_";

bool has_st_prefix(const std::string& name) {
  return name.rfind(kStPrefix, 0) == 0 && name.size() > 4;
}
}  // namespace

Value ObjectSpace::read_ivar(ObjRef obj, const std::string& name, Env env) const {
  const ObjRecord& rc = rec(obj);
  auto slots = effective_slots(rc.layout_class);
  auto find_slot = [&](const std::string& nm) -> int {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == nm) return static_cast<int>(i);
    return -1;
  };

  if (env == Env::Smalltalk) {
    int idx = find_slot(name);
    if (idx < 0) fail(Err::UndeclaredIvar, "undeclared instance variable: " + name);
    return rc.static_values[idx];
  }

  if (has_st_prefix(name)) {
    int idx = find_slot(name.substr(4));
    if (idx >= 0) return rc.static_values[idx];
    auto it = rc.dyn_ivars.find(name);
    return it == rc.dyn_ivars.end() ? Value::nil() : it->second;
  }
  int idx = find_slot(name);
  if (idx >= 0 && !slots[idx].hidden_from_ruby) return rc.static_values[idx];
  auto it = rc.dyn_ivars.find(name);
  return it == rc.dyn_ivars.end() ? Value::nil() : it->second;
}

void ObjectSpace::write_ivar(ObjRef obj, const std::string& name, Env env, Value v) {
  ObjRecord& rc = rec(obj);
  auto slots = effective_slots(rc.layout_class);
  auto find_slot = [&](const std::string& nm) -> int {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == nm) return static_cast<int>(i);
    return -1;
  };

  if (env == Env::Smalltalk) {
    int idx = find_slot(name);
    if (idx < 0) fail(Err::UndeclaredIvar, "undeclared instance variable: " + name);
    rc.static_values[idx] = std::move(v);
    return;
  }

  if (has_st_prefix(name)) {
    int idx = find_slot(name.substr(4));
    if (idx >= 0) {
      rc.static_values[idx] = std::move(v);
      return;
    }
    rc.dyn_ivars[name] = std::move(v);
    return;
  }
  int idx = find_slot(name);
  if (idx >= 0 && !slots[idx].hidden_from_ruby) {
    rc.static_values[idx] = std::move(v);
    return;
  }
  rc.dyn_ivars[name] = std::move(v);
}

Value ObjectSpace::dynamic_ivar_at(ObjRef obj, const std::string& name) const {
  const auto& dyn = rec(obj).dyn_ivars;
  auto it = dyn.find(name);
  return it == dyn.end() ? Value::nil() : it->second;
}

void ObjectSpace::dynamic_ivar_at_put(ObjRef obj, const std::string& name, Value v) {
  rec(obj).dyn_ivars[name] = std::move(v);
}

std::vector<std::string> ObjectSpace::instance_variables(ObjRef obj, Env env) const {
  const ObjRecord& rc = rec(obj);
  auto slots = effective_slots(rc.layout_class);
  std::vector<std::string> out;
  if (env == Env::Smalltalk) {
    for (const auto& s : slots) out.push_back(s.name);
    return out;
  }
  for (const auto& s : slots)
    if (!s.hidden_from_ruby) out.push_back(std::string(kStPrefix) + s.name);
  for (const auto& [k, v] : rc.dyn_ivars) out.push_back(k);
  return out;
}

void ObjectSpace::register_name(Env env, const std::string& name, ObjRef r) {
  auto& reg = registry_[env_index(env)];
  if (reg.count(name)) fail(Err::NameConflict, "name taken: " + name);
  reg[name] = r;
}

std::optional<ObjRef> ObjectSpace::find_name(Env env, const std::string& name) const {
  const auto& reg = registry_[env_index(env)];
  auto it = reg.find(name);
  if (it == reg.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, ObjRef>> ObjectSpace::registry_entries(
    Env env) const {
  const auto& reg = registry_[env_index(env)];
  return {reg.begin(), reg.end()};
}

std::size_t ObjectSpace::class_count() const {
  std::size_t n = 0;
  for (const auto& o : objects_)
    if (o.cls) ++n;
  return n;
}

std::size_t ObjectSpace::meta_class_count() const {
  std::size_t n = 0;
  for (const auto& o : objects_)
    if (o.cls && o.cls->is_meta) ++n;
  return n;
}

std::size_t ObjectSpace::module_count() const {
  std::size_t n = 0;
  for (const auto& o : objects_)
    if (o.cls && o.cls->is_module) ++n;
  return n;
}

}  // namespace tandem
