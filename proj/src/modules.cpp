#include "tandem/modules.hpp"

#include <algorithm>

namespace tandem::module_system {

namespace {

// Real module behind a chain node: the origin for copies, self for modules.
std::optional<ObjRef> origin_of(const ObjectSpace& sp, ObjRef node) {
  const ClassDesc& d = sp.cls(node);
  if (d.is_virtual) return d.origin;
  if (d.is_module) return node;
  return std::nullopt;
}

}  // namespace

ObjRef new_module(ObjectSpace& sp, const std::string& name_rb) {
  if (sp.find_name(Env::Ruby, name_rb))
    fail(Err::NameConflict, "ruby name taken: " + name_rb);
  ObjRef m = sp.alloc_class_raw();
  ClassDesc& d = sp.cls(m);
  d.name_rb = name_rb;
  d.is_module = true;
  d.instantiable = false;
  for (int e = 0; e < kEnvCount; ++e) {
    d.env[e].has_superclass_ref = true;
    d.env[e].superclass = sp.wk.object;
  }
  sp.rec(m).virtual_class = sp.wk.module_cls;
  sp.rec(m).layout_class = sp.wk.module_cls;
  sp.register_name(Env::Ruby, name_rb, m);
  return m;
}

void include_module(ObjectSpace& sp, ObjRef cls, ObjRef mod, Env env) {
  if (!sp.is_class(cls) || sp.cls(cls).is_virtual)
    fail(Err::TypeError, "include target must be a class or module");
  if (!sp.is_module(mod)) fail(Err::TypeError, "can only include modules");
  if (cls == mod) fail(Err::CyclicInclude, "module cannot include itself");

  // Nodes to splice: the module itself, then the copies already on its own
  // chain (flattened in chain order).
  std::vector<ObjRef> sources{mod};
  {
    auto node = virtual_superclass(sp, mod, env);
    while (node && sp.cls(*node).is_virtual) {
      sources.push_back(*node);
      node = virtual_superclass(sp, *node, env);
    }
  }
  for (ObjRef s : sources) {
    auto org = origin_of(sp, s);
    if (org && *org == cls)
      fail(Err::CyclicInclude, "include would close a module cycle");
  }

  // Origins already reachable from cls stay where they are.
  std::vector<ObjRef> present = included_modules(sp, cls, env);
  if (sp.cls(cls).is_module) present.push_back(cls);
  std::vector<ObjRef> insert;
  for (ObjRef s : sources) {
    auto org = origin_of(sp, s);
    if (org && std::find(present.begin(), present.end(), *org) != present.end())
      continue;
    insert.push_back(s);
  }
  if (insert.empty()) return;

  ClassDesc& cd = sp.cls(cls);
  EnvSlot& slot = cd.env[env_index(env)];
  if (!slot.has_superclass_ref) {
    // Single-dictionary class gains its own reference before the splice.
    slot.has_superclass_ref = true;
    slot.superclass = cd.fallback_superclass;
  }
  std::optional<ObjRef> next = slot.superclass;

  for (auto it = insert.rbegin(); it != insert.rend(); ++it) {
    ObjRef source = *it;
    ObjRef copy = sp.alloc_class_raw();
    ClassDesc& pd = sp.cls(copy);
    pd.is_virtual = true;
    pd.is_module = false;
    pd.instantiable = false;
    pd.origin = origin_of(sp, source);
    // Method snapshot: later edits to the module leave the copy untouched.
    for (int e = 0; e < kEnvCount; ++e) {
      pd.env[e].dict = sp.cls(source).env[e].dict;
      pd.env[e].has_superclass_ref = true;
      pd.env[e].superclass = next;
    }
    sp.rec(copy).virtual_class = sp.wk.module_cls;
    sp.rec(copy).layout_class = sp.wk.module_cls;
    next = copy;
  }
  slot.superclass = next;
}

std::optional<ObjRef> virtual_superclass(const ObjectSpace& sp, ObjRef cls,
                                         Env env) {
  return sp.effective_superclass(cls, env);
}

std::optional<ObjRef> superclass(const ObjectSpace& sp, ObjRef cls, Env env) {
  auto node = virtual_superclass(sp, cls, env);
  while (node && sp.cls(*node).is_virtual)
    node = virtual_superclass(sp, *node, env);
  return node;
}

std::vector<ObjRef> included_modules(const ObjectSpace& sp, ObjRef cls,
                                     Env env) {
  std::vector<ObjRef> out;
  auto node = virtual_superclass(sp, cls, env);
  while (node) {
    const ClassDesc& d = sp.cls(*node);
    if (d.is_virtual && d.origin &&
        std::find(out.begin(), out.end(), *d.origin) == out.end())
      out.push_back(*d.origin);
    node = virtual_superclass(sp, *node, env);
  }
  return out;
}

}  // namespace tandem::module_system
