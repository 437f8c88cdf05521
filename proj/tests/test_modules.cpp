#include "doctest.h"
#include "tandem/dispatch.hpp"
#include "tandem/kernel.hpp"
#include "tandem/modules.hpp"

using namespace tandem;
namespace ms = module_system;

namespace {

Signature sig0() { return Signature{}; }

std::vector<ObjRef> ruby_chain(const ObjectSpace& sp, ObjRef start) {
  std::vector<ObjRef> out;
  std::optional<ObjRef> node = start;
  while (node) {
    out.push_back(*node);
    node = sp.effective_superclass(*node, Env::Ruby);
  }
  return out;
}

}  // namespace

TEST_CASE("module objects") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef m = ms::new_module(sp, "Comparable");
  CHECK(sp.class_of(m) == sp.wk.module_cls);
  CHECK(sp.is_module(m));
  CHECK(sp.effective_superclass(m, Env::Ruby) == sp.wk.object);
  CHECK(sp.effective_superclass(m, Env::Smalltalk) == sp.wk.object);
  CHECK_THROWS_AS(sp.new_instance(m), RuntimeError);
  CHECK_THROWS_AS(ms::new_module(sp, "Comparable"), RuntimeError);
}

TEST_CASE("inclusion splices a virtual copy into one chain only") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef m = ms::new_module(sp, "M");
  auto st_before = ruby_chain(sp, a);  // also capture smalltalk side
  std::vector<ObjRef> st_chain_before;
  for (std::optional<ObjRef> n = a; n;
       n = sp.effective_superclass(*n, Env::Smalltalk))
    st_chain_before.push_back(*n);

  ms::include_module(sp, a, m, Env::Ruby);

  auto rb = ruby_chain(sp, a);
  REQUIRE(rb.size() == 3);
  CHECK(rb[0] == a);
  CHECK(sp.cls(rb[1]).is_virtual);
  CHECK(sp.cls(rb[1]).origin == m);
  CHECK(rb[2] == sp.wk.object);

  std::vector<ObjRef> st_chain_after;
  for (std::optional<ObjRef> n = a; n;
       n = sp.effective_superclass(*n, Env::Smalltalk))
    st_chain_after.push_back(*n);
  CHECK(st_chain_after == st_chain_before);  // node for node

  // superclass() skips the copy; virtual_superclass() exposes it.
  CHECK(ms::superclass(sp, a, Env::Ruby) == sp.wk.object);
  CHECK(ms::virtual_superclass(sp, a, Env::Ruby) == rb[1]);
  (void)st_before;
}

TEST_CASE("inclusion order: later includes sit nearer") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef m1 = ms::new_module(sp, "M1");
  ObjRef m2 = ms::new_module(sp, "M2");
  ms::include_module(sp, a, m1, Env::Ruby);
  ms::include_module(sp, a, m2, Env::Ruby);

  auto rb = ruby_chain(sp, a);
  REQUIRE(rb.size() == 4);
  CHECK(sp.cls(rb[1]).origin == m2);
  CHECK(sp.cls(rb[2]).origin == m1);
  CHECK(rb[3] == sp.wk.object);

  auto mods = ms::included_modules(sp, a, Env::Ruby);
  REQUIRE(mods.size() == 2);
  CHECK(mods[0] == m2);
  CHECK(mods[1] == m1);
}

TEST_CASE("re-inclusion is a no-op") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef m = ms::new_module(sp, "M");
  ms::include_module(sp, a, m, Env::Ruby);
  std::size_t count = sp.object_count();
  auto before = ruby_chain(sp, a);
  ms::include_module(sp, a, m, Env::Ruby);
  CHECK(sp.object_count() == count);
  CHECK(ruby_chain(sp, a) == before);
}

TEST_CASE("two inclusion sites get distinct copies") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef b = sp.new_class("B", "B", sp.wk.object, {});
  ObjRef m = ms::new_module(sp, "M");
  ms::include_module(sp, a, m, Env::Ruby);
  ms::include_module(sp, b, m, Env::Ruby);

  ObjRef copy_a = *ms::virtual_superclass(sp, a, Env::Ruby);
  ObjRef copy_b = *ms::virtual_superclass(sp, b, Env::Ruby);
  CHECK(copy_a != copy_b);
  CHECK(sp.cls(copy_a).origin == m);
  CHECK(sp.cls(copy_b).origin == m);
  CHECK(sp.effective_superclass(copy_a, Env::Ruby) == sp.wk.object);
  CHECK(sp.effective_superclass(copy_b, Env::Ruby) == sp.wk.object);
}

TEST_CASE("copies snapshot the module's methods at inclusion time") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;
  Interp& in = rt->interp;

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ObjRef m = ms::new_module(sp, "M");
  in.define_ir(m, Env::Ruby, "early", sig0(),
               ir_literal(Value(std::int64_t{1})));
  ms::include_module(sp, a, m, Env::Ruby);
  in.define_ir(m, Env::Ruby, "late", sig0(), ir_literal(Value(std::int64_t{2})));

  Value inst{sp.new_instance(a)};
  CHECK(in.call_ruby(inst, "early", {}, {}, {}, nullptr) ==
        Value(std::int64_t{1}));
  CHECK_THROWS_AS(in.call_ruby(inst, "late", {}, {}, {}, nullptr),
                  RuntimeError);
  // The module itself still answers late via its own dictionary... through
  // a fresh inclusion elsewhere.
  ObjRef b = sp.new_class("B", "B", sp.wk.object, {});
  ms::include_module(sp, b, m, Env::Ruby);
  Value binst{sp.new_instance(b)};
  CHECK(in.call_ruby(binst, "late", {}, {}, {}, nullptr) ==
        Value(std::int64_t{2}));
}

TEST_CASE("module-into-module flattens at the class splice") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef inner = ms::new_module(sp, "Inner");
  ObjRef outer = ms::new_module(sp, "Outer");
  ms::include_module(sp, outer, inner, Env::Ruby);

  ObjRef a = sp.new_class("A", "A", sp.wk.object, {});
  ms::include_module(sp, a, outer, Env::Ruby);

  auto mods = ms::included_modules(sp, a, Env::Ruby);
  REQUIRE(mods.size() == 2);
  CHECK(mods[0] == outer);
  CHECK(mods[1] == inner);

  // Including inner again later is absorbed by the dedup rule.
  ms::include_module(sp, a, inner, Env::Ruby);
  CHECK(ms::included_modules(sp, a, Env::Ruby).size() == 2);
}

TEST_CASE("cycles are refused") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  ObjRef m1 = ms::new_module(sp, "M1");
  ObjRef m2 = ms::new_module(sp, "M2");
  CHECK_THROWS_AS(ms::include_module(sp, m1, m1, Env::Ruby), RuntimeError);
  ms::include_module(sp, m1, m2, Env::Ruby);
  CHECK_THROWS_AS(ms::include_module(sp, m2, m1, Env::Ruby), RuntimeError);
}

TEST_CASE("bootstrap Array carries Enumerable on the ruby side only") {
  auto rt = bootstrap();
  ObjectSpace& sp = rt->space;

  auto mods = ms::included_modules(sp, sp.wk.array_cls, Env::Ruby);
  REQUIRE(mods.size() == 1);
  CHECK(mods[0] == sp.wk.enumerable_mod);
  CHECK(ms::included_modules(sp, sp.wk.array_cls, Env::Smalltalk).empty());
  CHECK(ms::superclass(sp, sp.wk.array_cls, Env::Ruby) ==
        sp.wk.seq_collection_cls);
}
