#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tandem/object_space.hpp"

namespace tandem::module_system {

// Creates a module: class Module, superclass Object in both environments,
// not instantiable. Registered in the ruby registry.
ObjRef new_module(ObjectSpace& sp, const std::string& name_rb);

// Splices a virtual copy of `mod` (method snapshot) above `cls` in `env`.
// A module whose own chain carries earlier inclusions is flattened in chain
// order. Re-inclusion of an already-present origin is a no-op.
void include_module(ObjectSpace& sp, ObjRef cls, ObjRef mod, Env env);

// First non-virtual class strictly above `cls`; none at the root.
std::optional<ObjRef> superclass(const ObjectSpace& sp, ObjRef cls, Env env);

// Immediate chain parent, virtual copies included.
std::optional<ObjRef> virtual_superclass(const ObjectSpace& sp, ObjRef cls,
                                         Env env);

// Origins of the virtual copies on cls's chain, nearest first, deduplicated.
std::vector<ObjRef> included_modules(const ObjectSpace& sp, ObjRef cls,
                                     Env env);

}  // namespace tandem::module_system
