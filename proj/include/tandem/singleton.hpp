#pragma once

#include "tandem/object_space.hpp"

namespace tandem::singleton_engine {

// Whether first-level generation is permitted for obj. Classes always
// allow it; instances of value classes with the refusal flag do not.
bool singleton_allowed(const ObjectSpace& sp, ObjRef obj);

// Superclass the singleton class of obj must get:
//   obj is not a class  ->  class_of(obj)
//   obj == Object       ->  Class
//   otherwise           ->  singleton(superclass(obj)), generated on demand
ObjRef singleton_superclass(ObjectSpace& sp, ObjRef obj);

// First-level singleton of obj: the existing meta if there is one,
// otherwise freshly generated. Ascending recursions use this.
ObjRef singleton_of(ObjectSpace& sp, ObjRef obj);

// Generates obj's singleton class: computes the superclass, creates a new
// class instance of Metaclass3, sets the meta bit and destination class,
// and repoints obj's virtual class.
ObjRef generate_singleton(ObjectSpace& sp, ObjRef obj);

// Generates iff obj's virtual class is not yet a meta class; silent no-op
// when generation is refused for obj's kind.
void check_generate_singleton(ObjectSpace& sp, ObjRef obj);

// Guarantees `depth` singleton levels above obj, recursing through the
// freshly generated virtual classes.
void ensure_singleton_generated(ObjectSpace& sp, ObjRef obj, int depth);

// Two levels ensured, then obj's virtual class: per-object methods work and
// so do class-side methods defined on the result.
ObjRef ruby_singleton_class(ObjectSpace& sp, ObjRef obj);

// Upper bound on classes any single generation cascade may create:
//   #helix + between(max_dest(obj), Object) + 2
int max_gen(const ObjectSpace& sp, ObjRef obj);

}  // namespace tandem::singleton_engine
