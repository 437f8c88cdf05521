#include "tandem/singleton.hpp"

#include "tandem/modules.hpp"
#include "tandem/render.hpp"

namespace tandem::singleton_engine {

bool singleton_allowed(const ObjectSpace& sp, ObjRef obj) {
  if (sp.is_class(obj)) return true;
  return sp.cls(sp.class_of(obj)).singleton_allowed;
}

ObjRef singleton_of(ObjectSpace& sp, ObjRef obj) {
  ObjRef v = sp.virtual_class(obj);
  if (sp.is_class(v) && sp.cls(v).is_meta) return v;
  return generate_singleton(sp, obj);
}

ObjRef singleton_superclass(ObjectSpace& sp, ObjRef obj) {
  if (!sp.is_class(obj)) return sp.class_of(obj);
  if (obj == sp.wk.object) return sp.wk.class_cls;
  auto sup = module_system::superclass(sp, obj, Env::Ruby);
  if (!sup) fail(Err::ModelViolation, "class below the root has no superclass");
  return singleton_of(sp, *sup);
}

ObjRef generate_singleton(ObjectSpace& sp, ObjRef obj) {
  if (!singleton_allowed(sp, obj))
    fail(Err::SingletonForbidden,
         "singleton class not allowed for instances of " +
             render_class(sp, sp.class_of(obj)));
  {
    ObjRef v = sp.virtual_class(obj);
    if (sp.is_class(v) && sp.cls(v).is_meta)
      fail(Err::ModelViolation, "singleton class already generated");
  }
  ObjRef sup = singleton_superclass(sp, obj);
  ObjRef s = sp.alloc_class_raw();
  ClassDesc& d = sp.cls(s);
  d.is_meta = true;
  d.instantiable = false;
  d.dest_class = obj;
  for (int e = 0; e < kEnvCount; ++e) {
    d.env[e].has_superclass_ref = true;
    d.env[e].superclass = sup;
  }
  sp.rec(s).virtual_class = sp.wk.metaclass3;
  sp.rec(s).layout_class = sp.wk.metaclass3;
  sp.rec(s).static_values.assign(sp.effective_slots(sp.wk.metaclass3).size(),
                                 Value::nil());
  sp.rec(s).static_values[0] = Value(obj);
  sp.set_virtual_class(obj, s);
  return s;
}

void check_generate_singleton(ObjectSpace& sp, ObjRef obj) {
  if (!singleton_allowed(sp, obj)) return;
  ObjRef v = sp.virtual_class(obj);
  if (sp.is_class(v) && sp.cls(v).is_meta) return;
  generate_singleton(sp, obj);
}

void ensure_singleton_generated(ObjectSpace& sp, ObjRef obj, int levels) {
  if (levels <= 0) return;
  check_generate_singleton(sp, obj);
  ensure_singleton_generated(sp, sp.virtual_class(obj), levels - 1);
}

ObjRef ruby_singleton_class(ObjectSpace& sp, ObjRef obj) {
  if (!singleton_allowed(sp, obj))
    fail(Err::SingletonForbidden,
         "singleton class not allowed for instances of " +
             render_class(sp, sp.class_of(obj)));
  ensure_singleton_generated(sp, obj, 2);
  return sp.virtual_class(obj);
}

int max_gen(const ObjectSpace& sp, ObjRef obj) {
  ObjRef max_dest = obj;
  if (sp.is_class(obj)) {
    const ClassDesc& d = sp.cls(obj);
    if (d.is_meta) {
      if (!d.dest_class) fail(Err::ModelViolation, "meta class without a destination");
      max_dest = *d.dest_class;
    }
  } else {
    max_dest = sp.class_of(obj);
  }
  int between = 0;
  std::optional<ObjRef> node = max_dest;
  while (node && *node != sp.wk.object) {
    node = module_system::superclass(sp, *node, Env::Ruby);
    ++between;
  }
  return 5 + between + 2;
}

}  // namespace tandem::singleton_engine
