#include "doctest.h"
#include "tandem/kernel.hpp"
#include "tandem/render.hpp"

using namespace tandem;

TEST_CASE("bootstrap population is fixed") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK(sp.object_count() == kBootstrapObjectCount);
  CHECK(sp.meta_class_count() == 15);  // 5 helix + 10 core metas
  CHECK(sp.module_count() == 1);       // Enumerable
}

TEST_CASE("helix wiring") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;
  const WellKnown& wk = sp.wk;

  // Base chain: Metaclass3 < Class < Module < Behavior < Object < nothing.
  CHECK(sp.effective_superclass(wk.metaclass3, Env::Smalltalk) == wk.class_cls);
  CHECK(sp.effective_superclass(wk.class_cls, Env::Smalltalk) == wk.module_cls);
  CHECK(sp.effective_superclass(wk.module_cls, Env::Smalltalk) == wk.behavior);
  CHECK(sp.effective_superclass(wk.behavior, Env::Smalltalk) == wk.object);
  CHECK_FALSE(sp.effective_superclass(wk.object, Env::Smalltalk).has_value());
  CHECK_FALSE(sp.effective_superclass(wk.object, Env::Ruby).has_value());

  // Meta side parallels the base side; Object's meta closes onto Class.
  ObjRef object_m = sp.virtual_class(wk.object);
  ObjRef behavior_m = sp.virtual_class(wk.behavior);
  CHECK(sp.is_meta(object_m));
  CHECK(sp.effective_superclass(object_m, Env::Ruby) == wk.class_cls);
  CHECK(sp.effective_superclass(behavior_m, Env::Ruby) == object_m);
  CHECK(sp.destination_class(object_m) == wk.object);

  // Every meta is an instance of Metaclass3; the class query skips metas,
  // so classes answer Class as their class.
  CHECK(sp.virtual_class(object_m) == wk.metaclass3);
  CHECK(sp.is_meta(sp.virtual_class(wk.metaclass3)));
  CHECK(sp.destination_class(sp.virtual_class(wk.metaclass3)) == wk.metaclass3);
  CHECK(sp.class_of(wk.object) == wk.class_cls);
  CHECK(sp.class_of(object_m) == wk.metaclass3);

  // Registries: smalltalk sees all five, ruby only three.
  CHECK(sp.find_name(Env::Smalltalk, "Behavior").has_value());
  CHECK(sp.find_name(Env::Smalltalk, "Metaclass3").has_value());
  CHECK_FALSE(sp.find_name(Env::Ruby, "Behavior").has_value());
  CHECK_FALSE(sp.find_name(Env::Ruby, "Metaclass3").has_value());
  CHECK(sp.find_name(Env::Ruby, "Object") == wk.object);
  CHECK(sp.find_name(Env::Ruby, "Module") == wk.module_cls);
  CHECK(sp.find_name(Env::Ruby, "Class") == wk.class_cls);
}

TEST_CASE("core class naming spans the environments") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK(sp.find_name(Env::Smalltalk, "SmallInteger") == sp.wk.integer_cls);
  CHECK(sp.find_name(Env::Ruby, "Fixnum") == sp.wk.integer_cls);
  CHECK(sp.find_name(Env::Smalltalk, "UndefinedObject") == sp.wk.nil_cls);
  CHECK(sp.find_name(Env::Ruby, "NilClass") == sp.wk.nil_cls);
  CHECK(sp.find_name(Env::Smalltalk, "ExecBlock") == sp.wk.block_cls);
  CHECK(sp.find_name(Env::Ruby, "Proc") == sp.wk.block_cls);
  CHECK(sp.find_name(Env::Smalltalk, "RubyWrapper") == sp.wk.wrapper_cls);
  CHECK_FALSE(sp.find_name(Env::Ruby, "RubyWrapper").has_value());
  CHECK_FALSE(sp.find_name(Env::Smalltalk, "Boolean") == std::nullopt);

  // Collection spine.
  CHECK(sp.effective_superclass(sp.wk.array_cls, Env::Smalltalk) ==
        sp.wk.seq_collection_cls);
  CHECK(sp.effective_superclass(sp.wk.seq_collection_cls, Env::Smalltalk) ==
        sp.wk.collection_cls);
  CHECK(sp.effective_superclass(sp.wk.collection_cls, Env::Smalltalk) ==
        sp.wk.object);
}

TEST_CASE("instantiability and the class query") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef p = sp.new_class("Person", "Person", sp.wk.object, {"name"});
  ObjRef inst = sp.new_instance(p);
  CHECK(sp.class_of(inst) == p);
  CHECK(sp.virtual_class(inst) == p);

  CHECK_THROWS_AS(sp.new_instance(sp.wk.boolean_cls), RuntimeError);
  CHECK_THROWS_AS(sp.new_instance(sp.wk.nil_cls), RuntimeError);
  CHECK_THROWS_AS(sp.new_instance(sp.wk.integer_cls), RuntimeError);
  CHECK_THROWS_AS(sp.new_instance(sp.wk.symbol_cls), RuntimeError);
  CHECK(sp.class_of(sp.new_instance(sp.wk.string_cls)) == sp.wk.string_cls);
}

TEST_CASE("class creation guards") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK_THROWS_AS(sp.new_class("Object2", "Object", sp.wk.object, {}),
                  RuntimeError);
  ObjRef a = sp.new_class("A", "A", sp.wk.object, {"x"});
  CHECK_THROWS_AS(sp.new_class("B", "B", a, {"x"}), RuntimeError);  // shadow
  CHECK_THROWS_AS(sp.new_class("C", "C", a, {"y", "y"}), RuntimeError);
}

TEST_CASE("static ivars live in declaration slots, layout frozen at birth") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {"x"});
  ObjRef b = sp.new_class("B", "B", a, {"y"});
  ObjRef i = sp.new_instance(b);

  auto slots = sp.effective_slots(b);
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].name == "x");  // root first
  CHECK(slots[1].name == "y");

  sp.write_ivar(i, "x", Env::Smalltalk, Value(std::int64_t{7}));
  CHECK(sp.read_ivar(i, "x", Env::Smalltalk) == Value(std::int64_t{7}));
  CHECK(sp.read_ivar(i, "y", Env::Smalltalk) == Value::nil());
  CHECK_THROWS_AS(sp.read_ivar(i, "zz", Env::Smalltalk), RuntimeError);

  // Declaring x later on an unrelated class does not move existing slots.
  ObjRef c = sp.new_class("C", "C", sp.wk.object, {"y", "x"});
  ObjRef j = sp.new_instance(c);
  sp.write_ivar(j, "x", Env::Smalltalk, Value(std::int64_t{1}));
  CHECK(sp.read_ivar(i, "x", Env::Smalltalk) == Value(std::int64_t{7}));
}

TEST_CASE("ruby ivar naming: _st_ prefix aliases statics, rest is dynamic") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef h = sp.new_class("Dict", "Dict", sp.wk.object, {"size"});
  ObjRef i = sp.new_instance(h);

  sp.write_ivar(i, "size", Env::Ruby, Value(std::int64_t{3}));
  CHECK(sp.read_ivar(i, "_st_size", Env::Ruby) == Value(std::int64_t{3}));
  CHECK(sp.read_ivar(i, "size", Env::Smalltalk) == Value(std::int64_t{3}));
  sp.write_ivar(i, "_st_size", Env::Ruby, Value(std::int64_t{4}));
  CHECK(sp.read_ivar(i, "size", Env::Ruby) == Value(std::int64_t{4}));

  // Undeclared ruby names go to the dynamic map; absent reads are nil.
  CHECK(sp.read_ivar(i, "color", Env::Ruby) == Value::nil());
  sp.write_ivar(i, "color", Env::Ruby, Value("red"));
  CHECK(sp.read_ivar(i, "color", Env::Ruby) == Value("red"));
  CHECK_THROWS_AS(sp.read_ivar(i, "color", Env::Smalltalk), RuntimeError);

  // _st_ alias to an undeclared slot falls back to a dynamic variable.
  CHECK(sp.read_ivar(i, "_st_missing", Env::Ruby) == Value::nil());
  sp.write_ivar(i, "_st_missing", Env::Ruby, Value(std::int64_t{8}));
  CHECK(sp.read_ivar(i, "_st_missing", Env::Ruby) == Value(std::int64_t{8}));
  CHECK_THROWS_AS(sp.read_ivar(i, "missing", Env::Smalltalk), RuntimeError);
}

TEST_CASE("instance_variables listings") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef h = sp.new_class("Dict", "Dict", sp.wk.object, {"size"});
  ObjRef i = sp.new_instance(h);
  sp.write_ivar(i, "color", Env::Ruby, Value("red"));
  sp.write_ivar(i, "age", Env::Ruby, Value(std::int64_t{9}));

  auto st = sp.instance_variables(i, Env::Smalltalk);
  REQUIRE(st.size() == 1);
  CHECK(st[0] == "size");

  auto rb = sp.instance_variables(i, Env::Ruby);
  REQUIRE(rb.size() == 3);
  CHECK(rb[0] == "_st_size");
  CHECK(rb[1] == "age");  // dynamic names in map order
  CHECK(rb[2] == "color");
}

TEST_CASE("hidden slots stay out of ruby listings but _st_ reaches them") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  // Metaclass3 declares the hidden destClass mirror slot; metas carry it.
  ObjRef p = sp.new_class("Person", "Person", sp.wk.object, {});
  ObjRef meta = sp.virtual_class(p);

  auto st = sp.instance_variables(meta, Env::Smalltalk);
  REQUIRE(st.size() == 1);
  CHECK(st[0] == "destClass");

  CHECK(sp.instance_variables(meta, Env::Ruby).empty());
  CHECK(sp.read_ivar(meta, "_st_destClass", Env::Ruby) == Value(p));
  CHECK(sp.read_ivar(meta, "destClass", Env::Smalltalk) == Value(p));
}

TEST_CASE("per-object dynamic ivars diverge") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef c = sp.new_class("Bag", "Bag", sp.wk.object, {});
  ObjRef a = sp.new_instance(c);
  ObjRef b = sp.new_instance(c);
  sp.dynamic_ivar_at_put(a, "tag", Value(std::int64_t{1}));
  CHECK(sp.dynamic_ivar_at(a, "tag") == Value(std::int64_t{1}));
  CHECK(sp.dynamic_ivar_at(b, "tag") == Value::nil());
  CHECK(sp.instance_variables(b, Env::Ruby).empty());
}

TEST_CASE("is_kind_of spans virtual copies and boxed immediates") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK(sp.is_kind_of(Value(std::int64_t{5}), sp.wk.integer_cls));
  CHECK(sp.is_kind_of(Value(std::int64_t{5}), sp.wk.object));
  CHECK(sp.is_kind_of(Value::seq({}), sp.wk.enumerable_mod));  // via copy
  CHECK_FALSE(sp.is_kind_of(Value("s"), sp.wk.integer_cls));
}

TEST_CASE("rendering of core values") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  CHECK(render_value(sp, Value::nil()) == "nil");
  CHECK(render_value(sp, Value(true)) == "true");
  CHECK(render_value(sp, Value(std::int64_t{-3})) == "-3");
  CHECK(render_value(sp, Value("a\nb")) == "\"a\\nb\"");
  CHECK(render_value(sp, Value::sym("hi")) == ":hi");
  CHECK(render_value(sp, Value::seq({Value(std::int64_t{1}), Value("x")})) ==
        "(1 \"x\")");
  CHECK(render_value(sp, Value(sp.wk.object)) == "Object");
  CHECK(render_value(sp, Value(sp.virtual_class(sp.wk.object))) ==
        "#<Class: Object>");
}
