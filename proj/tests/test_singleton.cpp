#include "doctest.h"
#include "tandem/kernel.hpp"
#include "tandem/singleton.hpp"

using namespace tandem;
namespace se = singleton_engine;

TEST_CASE("first-level generation repoints the virtual class") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef person = sp.new_class("Person", "Person", sp.wk.object, {});
  ObjRef john = sp.new_instance(person);
  CHECK(sp.virtual_class(john) == person);

  ObjRef s = se::generate_singleton(sp, john);
  CHECK(sp.virtual_class(john) == s);
  CHECK(sp.is_meta(s));
  CHECK(sp.destination_class(s) == john);
  CHECK(sp.effective_superclass(s, Env::Ruby) == person);
  CHECK(sp.effective_superclass(s, Env::Smalltalk) == person);
  CHECK(sp.virtual_class(s) == sp.wk.metaclass3);
  CHECK(sp.class_of(john) == person);  // class query unaffected
}

TEST_CASE("singleton superclass formula") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  // Root case: Object's singleton side closes onto Class.
  CHECK(se::singleton_superclass(sp, sp.wk.object) == sp.wk.class_cls);

  // Class case: singleton of the superclass, generated on demand.
  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef b = sp.new_class("B", "B", a, {});
  CHECK(se::singleton_superclass(sp, b) == sp.virtual_class(a));

  // Non-class case: the object's class.
  ObjRef i = sp.new_instance(b);
  CHECK(se::singleton_superclass(sp, i) == b);
}

TEST_CASE("generation is refused for immediates' instances but not classes") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK(se::singleton_allowed(sp, sp.wk.integer_cls));
  ObjRef boxed = sp.box(Value(std::int64_t{5}));
  CHECK_FALSE(se::singleton_allowed(sp, boxed));
  CHECK_THROWS_AS(se::ruby_singleton_class(sp, boxed), RuntimeError);

  ObjRef s = sp.new_instance(sp.wk.string_cls);
  CHECK(se::singleton_allowed(sp, s));

  // check_generate stays silent where generation is refused.
  std::size_t before = sp.object_count();
  se::check_generate_singleton(sp, boxed);
  CHECK(sp.object_count() == before);
}

TEST_CASE("ruby_singleton_class ensures two levels and is idempotent") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef person = sp.new_class("Person", "Person", sp.wk.object, {});
  ObjRef john = sp.new_instance(person);

  ObjRef s1 = se::ruby_singleton_class(sp, john);
  CHECK(sp.virtual_class(john) == s1);
  CHECK(sp.effective_superclass(s1, Env::Ruby) == person);

  // Second level: the singleton's own virtual class is meta and sits above
  // Person's meta class.
  ObjRef s2 = sp.virtual_class(s1);
  CHECK(sp.is_meta(s2));
  CHECK(sp.effective_superclass(s2, Env::Ruby) == sp.virtual_class(person));

  std::size_t count = sp.object_count();
  CHECK(se::ruby_singleton_class(sp, john) == s1);
  CHECK(sp.object_count() == count);  // zero new classes on repeat
}

TEST_CASE("class receivers reuse the meta side") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef person = sp.new_class("Person", "Person", sp.wk.object, {});
  ObjRef meta = sp.virtual_class(person);
  CHECK(se::ruby_singleton_class(sp, person) == meta);

  // Deep ensure walks the meta spine, forcing ancestors' second levels in.
  se::ensure_singleton_generated(sp, person, 3);
  ObjRef meta2 = sp.virtual_class(meta);
  CHECK(sp.is_meta(meta2));
  CHECK(sp.destination_class(meta2) == meta);
  ObjRef object_meta2 = sp.virtual_class(sp.virtual_class(sp.wk.object));
  CHECK(sp.is_meta(object_meta2));
  CHECK(sp.effective_superclass(meta2, Env::Ruby) == object_meta2);
}

TEST_CASE("max_gen pinned arithmetic") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  // Root: maxDest=Object, between=0 -> 5+0+2.
  CHECK(se::max_gen(sp, sp.wk.object) == 7);
  ObjRef o = sp.new_instance(sp.new_class("Plain", "Plain", sp.wk.object, {}));
  CHECK(se::max_gen(sp, sp.class_of(o)) == 8);  // Plain: between=1
  CHECK(se::max_gen(sp, o) == 8);               // instance defers to class

  // Three classes above the destination: the worked bound of ten.
  ObjRef c1 = sp.new_class("C1", "C1", sp.wk.object, {});
  ObjRef c2 = sp.new_class("C2", "C2", c1, {});
  ObjRef c3 = sp.new_class("C3", "C3", c2, {});
  ObjRef deep = sp.new_instance(c3);
  CHECK(se::max_gen(sp, deep) == 5 + 3 + 2);

  // Meta receivers use the destination class.
  CHECK(se::max_gen(sp, sp.virtual_class(c3)) == se::max_gen(sp, c3));
}

TEST_CASE("generation cascade stays under the bound") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef c1 = sp.new_class("C1", "C1", sp.wk.object, {});
  ObjRef c2 = sp.new_class("C2", "C2", c1, {});
  ObjRef c3 = sp.new_class("C3", "C3", c2, {});
  ObjRef deep = sp.new_instance(c3);

  std::size_t before = sp.object_count();
  se::ensure_singleton_generated(sp, deep, 3);
  std::size_t made = sp.object_count() - before;
  CHECK(made <= static_cast<std::size_t>(se::max_gen(sp, deep) + 1));  // k=3
  CHECK(sp.is_meta(sp.virtual_class(deep)));
  CHECK(sp.is_meta(sp.virtual_class(sp.virtual_class(deep))));

  // Everything needed now exists; repeating builds nothing.
  before = sp.object_count();
  se::ensure_singleton_generated(sp, deep, 3);
  se::ruby_singleton_class(sp, deep);
  CHECK(sp.object_count() == before);
}

TEST_CASE("parallel hierarchies: singleton chains mirror base chains") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef b = sp.new_class("B", "B", sp.wk.object, {});
  ObjRef a = sp.new_class("A", "A", b, {});
  se::ensure_singleton_generated(sp, a, 2);
  se::ensure_singleton_generated(sp, b, 2);

  // singleton^2(A)'s chain reaches singleton^2(B).
  ObjRef sa2 = sp.virtual_class(sp.virtual_class(a));
  ObjRef sb2 = sp.virtual_class(sp.virtual_class(b));
  bool reached = false;
  std::optional<ObjRef> node = sa2;
  for (int i = 0; node && i < 64 && !reached; ++i) {
    reached = *node == sb2;
    node = sp.effective_superclass(*node, Env::Ruby);
  }
  CHECK(reached);
}

TEST_CASE("laziness: class and instance creation generate no extra levels") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;
  std::size_t metas_before = sp.meta_class_count();

  ObjRef prev = sp.wk.object;
  for (int i = 0; i < 10; ++i) {
    prev = sp.new_class("L" + std::to_string(i), "L" + std::to_string(i), prev,
                        {});
    sp.new_instance(prev);
  }
  // Exactly one automatic meta per class, nothing deeper.
  CHECK(sp.meta_class_count() == metas_before + 10);
  CHECK(sp.object_count() == kBootstrapObjectCount + 30);
}

TEST_CASE("modules can have singleton classes") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;
  ObjRef s = se::ruby_singleton_class(sp, sp.wk.enumerable_mod);
  CHECK(sp.is_meta(s));
  CHECK(sp.virtual_class(sp.wk.enumerable_mod) == s);
}
