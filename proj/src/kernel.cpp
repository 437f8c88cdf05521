#include "tandem/kernel.hpp"

#include "tandem/bridge.hpp"
#include "tandem/modules.hpp"
#include "tandem/render.hpp"
#include "tandem/singleton.hpp"

namespace tandem {

namespace {

Signature sig_n(int required) {
  Signature s;
  s.required = required;
  return s;
}

void wire_helix_class(ObjectSpace& sp, ObjRef c, const char* name_st,
                      const char* name_rb, std::optional<ObjRef> super,
                      bool instantiable) {
  ClassDesc& d = sp.cls(c);
  d.name_st = name_st;
  if (name_rb) d.name_rb = name_rb;
  d.instantiable = instantiable;
  for (int e = 0; e < kEnvCount; ++e) {
    d.env[e].has_superclass_ref = true;
    d.env[e].superclass = super;
  }
}

void wire_helix_meta(ObjectSpace& sp, ObjRef meta, ObjRef base, ObjRef super) {
  ClassDesc& d = sp.cls(meta);
  d.is_meta = true;
  d.instantiable = false;
  d.dest_class = base;
  for (int e = 0; e < kEnvCount; ++e) {
    d.env[e].has_superclass_ref = true;
    d.env[e].superclass = super;
  }
}

ObjRef core_class(ObjectSpace& sp, const char* name_st, const char* name_rb,
                  ObjRef super, bool instantiable, bool singleton_ok) {
  ObjRef c = sp.new_class(
      std::optional<std::string>(name_st),
      name_rb ? std::optional<std::string>(name_rb) : std::nullopt, super, {});
  ClassDesc& d = sp.cls(c);
  d.instantiable = instantiable;
  d.singleton_allowed = singleton_ok;
  return c;
}

std::string bridge_base_of(const std::string& full) {
  auto pos = full.rfind('#');
  return pos == std::string::npos ? full : full.substr(0, pos);
}

Value wrap_if_ref(Interp& in, const Value& v) {
  if (v.is_ref() && !in.space().is_class(v.as_ref()))
    return Value(wrap(in, v));
  return v;
}

// Block handed across to ruby: arguments coming back into the block are
// wrapped, so the smalltalk body can keep using ruby-only selectors.
Value wrapping_block(Interp& in, const Value& orig) {
  auto bv = std::make_shared<BlockValue>();
  bv->nparams = orig.as_block()->nparams;
  Interp* inp = &in;
  Value kept = orig;
  bv->native = [inp, kept](std::vector<Value> args) {
    for (Value& a : args) a = wrap_if_ref(*inp, a);
    return inp->call_block(kept, std::move(args));
  };
  return Value(Value::Block(bv));
}

void install_smalltalk_object_protocol(Runtime& rt) {
  ObjectSpace& sp = rt.space;
  Interp& in = rt.interp;
  ObjRef object = sp.wk.object;

  in.define_native(object, Env::Smalltalk, "class", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     return Value(i.space().class_of_value(c.receiver));
                   });
  in.define_native(object, Env::Smalltalk, "virtualClass", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     return Value(i.space().virtual_class_of_value(c.receiver));
                   });
  in.define_native(object, Env::Smalltalk, "yourself", sig_n(0),
                   [](Interp&, const NativeCtx& c) { return c.receiver; });
  in.define_native(
      object, Env::Smalltalk, "rubySingletonClass", sig_n(0),
      [](Interp& i, const NativeCtx& c) {
        if (!c.receiver.is_ref())
          fail(Err::SingletonForbidden,
               "immediate values have no singleton class");
        return Value(
            singleton_engine::ruby_singleton_class(i.space(), c.receiver.as_ref()));
      });
  in.define_native(
      object, Env::Smalltalk, "ensureSingletonClassGenerated:", sig_n(1),
      [](Interp& i, const NativeCtx& c) {
        if (!c.receiver.is_ref())
          fail(Err::SingletonForbidden,
               "immediate values have no singleton class");
        auto depth = int_of(i.space(), c.args[0]);
        if (!depth) fail(Err::TypeError, "depth must be an integer");
        singleton_engine::ensure_singleton_generated(
            i.space(), c.receiver.as_ref(), static_cast<int>(*depth));
        return c.receiver;
      });
  auto ivar_name = [](const ObjectSpace& sp2, const Value& v) -> std::string {
    auto t = text_of(sp2, v);
    if (t) return *t;
    if (v.is_symbol()) return v.as_symbol().name;
    fail(Err::TypeError, "instance variable names are text or symbols");
  };
  in.define_native(object, Env::Smalltalk, "dynamicInstVarAt:", sig_n(1),
                   [ivar_name](Interp& i, const NativeCtx& c) {
                     if (!c.receiver.is_ref())
                       fail(Err::TypeError, "immediate values carry no state");
                     return i.space().dynamic_ivar_at(
                         c.receiver.as_ref(), ivar_name(i.space(), c.args[0]));
                   });
  in.define_native(object, Env::Smalltalk, "dynamicInstVarAt:put:", sig_n(2),
                   [ivar_name](Interp& i, const NativeCtx& c) {
                     if (!c.receiver.is_ref())
                       fail(Err::TypeError, "immediate values carry no state");
                     i.space().dynamic_ivar_at_put(
                         c.receiver.as_ref(), ivar_name(i.space(), c.args[0]),
                         c.args[1]);
                     return c.args[1];
                   });
  in.define_native(object, Env::Smalltalk, "instanceVariables", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     std::vector<Value> names;
                     if (c.receiver.is_ref())
                       for (auto& n : i.space().instance_variables(
                                c.receiver.as_ref(), Env::Smalltalk))
                         names.push_back(Value(n));
                     return Value::seq(std::move(names));
                   });
  in.define_native(object, Env::Smalltalk, "doesNotUnderstand:", sig_n(1),
                   [](Interp& i, const NativeCtx& c) -> Value {
                     raise_not_found(Err::NoMethodError, MissReason::Absent,
                                     "undefined method '" + c.selector +
                                         "' for " +
                                         render_value(i.space(), c.receiver));
                   });
}

void install_smalltalk_core(Runtime& rt) {
  ObjectSpace& sp = rt.space;
  Interp& in = rt.interp;

  in.define_native(sp.wk.string_cls, Env::Smalltalk, ",", sig_n(1),
                   [](Interp& i, const NativeCtx& c) {
                     auto a = text_of(i.space(), c.receiver);
                     auto b = text_of(i.space(), c.args[0]);
                     if (!a || !b) fail(Err::TypeError, "',' needs text operands");
                     return Value(*a + *b);
                   });

  auto arith = [](char op) {
    return [op](Interp& i, const NativeCtx& c) {
      auto a = int_of(i.space(), c.receiver);
      auto b = int_of(i.space(), c.args[0]);
      if (!a || !b) fail(Err::TypeError, "arithmetic needs integer operands");
      if (op == '+') return Value(*a + *b);
      if (op == '-') return Value(*a - *b);
      return Value(*a * *b);
    };
  };
  in.define_native(sp.wk.integer_cls, Env::Smalltalk, "+", sig_n(1), arith('+'));
  in.define_native(sp.wk.integer_cls, Env::Smalltalk, "-", sig_n(1), arith('-'));
  in.define_native(sp.wk.integer_cls, Env::Smalltalk, "*", sig_n(1), arith('*'));

  in.define_native(sp.wk.behavior, Env::Smalltalk, "new", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     if (!c.receiver.is_ref() ||
                         !i.space().is_class(c.receiver.as_ref()))
                       fail(Err::TypeError, "'new' needs a class receiver");
                     return Value(i.space().new_instance(c.receiver.as_ref()));
                   });
  in.define_native(sp.wk.behavior, Env::Smalltalk, "name", sig_n(0),
                   [](Interp& i, const NativeCtx& c) -> Value {
                     if (!c.receiver.is_ref() ||
                         !i.space().is_class(c.receiver.as_ref()))
                       fail(Err::TypeError, "'name' needs a class receiver");
                     const ClassDesc& d = i.space().cls(c.receiver.as_ref());
                     if (d.name_st) return Value(*d.name_st);
                     if (d.name_rb) return Value(*d.name_rb);
                     return Value::nil();
                   });

  auto block_value = [](Interp& i, const NativeCtx& c) {
    return i.call_block(c.receiver, c.args);
  };
  in.define_native(sp.wk.block_cls, Env::Smalltalk, "value", sig_n(0), block_value);
  in.define_native(sp.wk.block_cls, Env::Smalltalk, "value:", sig_n(1), block_value);
  in.define_native(sp.wk.block_cls, Env::Smalltalk, "value:value:", sig_n(2),
                   block_value);
  in.define_native(sp.wk.block_cls, Env::Smalltalk, "value:value:value:",
                   sig_n(3), block_value);
}

void install_wrapper_protocol(Runtime& rt) {
  ObjectSpace& sp = rt.space;
  Interp& in = rt.interp;

  // Unknown smalltalk sends to a wrapper re-dispatch in the ruby environment
  // against the wrapped target; reference results are wrapped again.
  in.define_native(
      sp.wk.wrapper_cls, Env::Smalltalk, "doesNotUnderstand:", sig_n(1),
      [](Interp& i, const NativeCtx& c) {
        ObjectSpace& sp2 = i.space();
        Value target = wrapper_target(sp2, c.receiver.as_ref());
        StRubySelector sel =
            parse_st_ruby_selector(split_ruby_call_token("@ruby1:" + c.selector));
        std::vector<Value> slots = c.args;
        // A trailing block completes the argument list, as with delegates.
        if (c.block) slots.push_back(*c.block);
        for (Value& s : slots) {
          if (s.is_block())
            s = wrapping_block(i, s);
          else if (is_wrapper(sp2, s))
            s = wrapper_target(sp2, s.as_ref());
        }
        Value out = st_call_ruby(i, target, sel, std::move(slots));
        return wrap_if_ref(i, out);
      });

  // The first-level meta exists since class creation; no generation here.
  ObjRef wrapper_meta = sp.virtual_class(sp.wk.wrapper_cls);
  in.define_native(wrapper_meta, Env::Smalltalk, "on:", sig_n(1),
                   [](Interp& i, const NativeCtx& c) {
                     return Value(wrap(i, c.args[0]));
                   });
}

void install_ruby_core(Runtime& rt) {
  ObjectSpace& sp = rt.space;
  Interp& in = rt.interp;

  {
    Signature sig;
    sig.required = 1;
    sig.splat = true;
    sig.block = true;
    in.define_native(
        sp.wk.object, Env::Ruby, "method_missing", sig,
        [](Interp& i, const NativeCtx& c) -> Value {
          if (!c.args[0].is_symbol())
            fail(Err::TypeError, "method_missing needs the selector symbol");
          std::string full = c.args[0].as_symbol().name;
          std::string base = bridge_base_of(full);
          // Visibility-blind retry recovers why the original send missed.
          LookupResult res = i.lookup(c.receiver, full, Env::Ruby, nullptr);
          MissReason reason = res.found() ? MissReason::Absent : res.reason;
          std::string what;
          switch (reason) {
            case MissReason::Private:
              what = "private method '" + base + "' called for ";
              break;
            case MissReason::Protected:
              what = "protected method '" + base + "' called for ";
              break;
            default:
              what = "undefined method '" + base + "' for ";
              break;
          }
          raise_not_found(Err::NoMethodError, reason,
                          what + render_value(i.space(), c.receiver));
        });
  }
  in.define_native(sp.wk.object, Env::Ruby, "class", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     return Value(i.space().class_of_value(c.receiver));
                   });

  in.define_native(sp.wk.class_cls, Env::Ruby, "new", sig_n(0),
                   [](Interp& i, const NativeCtx& c) {
                     if (!c.receiver.is_ref() ||
                         !i.space().is_class(c.receiver.as_ref()))
                       fail(Err::TypeError, "'new' needs a class receiver");
                     return Value(i.space().new_instance(c.receiver.as_ref()));
                   });

  in.define_ir(sp.wk.string_cls, Env::Ruby, "*", sig_n(1),
               ir_node(IrOp::TextRep, "", {ir_self(), ir_arg(0)}));
  in.define_ir(sp.wk.string_cls, Env::Ruby, "+", sig_n(1),
               ir_node(IrOp::Concat, "", {ir_self(), ir_arg(0)}));

  in.define_ir(sp.wk.integer_cls, Env::Ruby, "+", sig_n(1),
               ir_node(IrOp::Add, "", {ir_self(), ir_arg(0)}));
  in.define_ir(sp.wk.integer_cls, Env::Ruby, "-", sig_n(1),
               ir_node(IrOp::Sub, "", {ir_self(), ir_arg(0)}));
  in.define_ir(sp.wk.integer_cls, Env::Ruby, "*", sig_n(1),
               ir_node(IrOp::Mul, "", {ir_self(), ir_arg(0)}));

  {
    Signature sig;
    sig.splat = true;
    in.define_native(sp.wk.block_cls, Env::Ruby, "call", sig,
                     [](Interp& i, const NativeCtx& c) {
                       return i.call_block(c.receiver, *c.args[0].as_seq());
                     });
  }

  // Module demo protocol: Array picks these up through its inclusion copy.
  in.define_native(sp.wk.enumerable_mod, Env::Ruby, "enum_kind", sig_n(0),
                   [](Interp&, const NativeCtx&) {
                     return Value("enumerable");
                   });
  in.define_native(sp.wk.enumerable_mod, Env::Ruby, "size", sig_n(0),
                   [](Interp& i, const NativeCtx& c) -> Value {
                     if (c.receiver.is_seq())
                       return Value(static_cast<std::int64_t>(
                           c.receiver.as_seq()->size()));
                     auto t = text_of(i.space(), c.receiver);
                     if (t) return Value(static_cast<std::int64_t>(t->size()));
                     fail(Err::TypeError, "size needs a sequence or text");
                   });
  in.define_native(sp.wk.array_cls, Env::Ruby, "first", sig_n(0),
                   [](Interp&, const NativeCtx& c) -> Value {
                     if (!c.receiver.is_seq())
                       fail(Err::TypeError, "first needs a sequence");
                     const auto& xs = *c.receiver.as_seq();
                     return xs.empty() ? Value::nil() : xs[0];
                   });
}

}  // namespace

std::unique_ptr<Runtime> bootstrap() {
  auto rt = std::make_unique<Runtime>();
  ObjectSpace& sp = rt->space;
  sp.bootstrap_mode = true;

  // Helix: five classes and their first-level meta classes, fixed oops 0..9.
  ObjRef object = sp.alloc_class_raw();
  ObjRef behavior = sp.alloc_class_raw();
  ObjRef module_cls = sp.alloc_class_raw();
  ObjRef class_cls = sp.alloc_class_raw();
  ObjRef metaclass3 = sp.alloc_class_raw();
  ObjRef object_m = sp.alloc_class_raw();
  ObjRef behavior_m = sp.alloc_class_raw();
  ObjRef module_m = sp.alloc_class_raw();
  ObjRef class_m = sp.alloc_class_raw();
  ObjRef metaclass3_m = sp.alloc_class_raw();

  wire_helix_class(sp, object, "Object", "Object", std::nullopt, true);
  wire_helix_class(sp, behavior, "Behavior", nullptr, object, false);
  wire_helix_class(sp, module_cls, "Module", "Module", behavior, false);
  wire_helix_class(sp, class_cls, "Class", "Class", module_cls, false);
  wire_helix_class(sp, metaclass3, "Metaclass3", nullptr, class_cls, false);
  sp.cls(metaclass3).static_slots.push_back({"destClass", true});

  // The root's meta descends from Class, closing the instance-of spiral.
  wire_helix_meta(sp, object_m, object, class_cls);
  wire_helix_meta(sp, behavior_m, behavior, object_m);
  wire_helix_meta(sp, module_m, module_cls, behavior_m);
  wire_helix_meta(sp, class_m, class_cls, module_m);
  wire_helix_meta(sp, metaclass3_m, metaclass3, class_m);

  const ObjRef bases[] = {object, behavior, module_cls, class_cls, metaclass3};
  const ObjRef metas[] = {object_m, behavior_m, module_m, class_m, metaclass3_m};
  for (int i = 0; i < 5; ++i) {
    sp.rec(bases[i]).virtual_class = metas[i];
    sp.rec(bases[i]).layout_class = metas[i];
    sp.rec(metas[i]).virtual_class = metaclass3;
    sp.rec(metas[i]).layout_class = metaclass3;
  }
  for (int i = 0; i < 5; ++i) {
    auto& mv = sp.rec(metas[i]).static_values;
    mv.assign(sp.effective_slots(metaclass3).size(), Value());
    mv[0] = Value(bases[i]);
  }

  sp.register_name(Env::Smalltalk, "Object", object);
  sp.register_name(Env::Smalltalk, "Behavior", behavior);
  sp.register_name(Env::Smalltalk, "Module", module_cls);
  sp.register_name(Env::Smalltalk, "Class", class_cls);
  sp.register_name(Env::Smalltalk, "Metaclass3", metaclass3);
  sp.register_name(Env::Ruby, "Object", object);
  sp.register_name(Env::Ruby, "Module", module_cls);
  sp.register_name(Env::Ruby, "Class", class_cls);

  sp.wk.object = object;
  sp.wk.behavior = behavior;
  sp.wk.module_cls = module_cls;
  sp.wk.class_cls = class_cls;
  sp.wk.metaclass3 = metaclass3;

  // Core classes, a meta each: oops 10..29.
  sp.wk.string_cls = core_class(sp, "String", "String", object, true, true);
  sp.wk.integer_cls =
      core_class(sp, "SmallInteger", "Fixnum", object, false, false);
  sp.wk.symbol_cls = core_class(sp, "Symbol", "Symbol", object, false, false);
  sp.wk.boolean_cls = core_class(sp, "Boolean", nullptr, object, false, false);
  sp.wk.nil_cls =
      core_class(sp, "UndefinedObject", "NilClass", object, false, false);
  sp.wk.collection_cls =
      core_class(sp, "Collection", nullptr, object, false, true);
  sp.wk.seq_collection_cls = core_class(sp, "SequenceableCollection", nullptr,
                                        sp.wk.collection_cls, false, true);
  sp.wk.array_cls =
      core_class(sp, "Array", "Array", sp.wk.seq_collection_cls, false, true);
  sp.wk.block_cls = core_class(sp, "ExecBlock", "Proc", object, false, true);
  sp.wk.wrapper_cls =
      core_class(sp, "RubyWrapper", nullptr, object, false, true);

  // Enumerable module (oop 30) and its inclusion copy in Array (oop 31).
  sp.wk.enumerable_mod = module_system::new_module(sp, "Enumerable");
  module_system::include_module(sp, sp.wk.array_cls, sp.wk.enumerable_mod,
                                Env::Ruby);

  install_smalltalk_object_protocol(*rt);
  install_smalltalk_core(*rt);
  install_ruby_core(*rt);
  install_wrapper_protocol(*rt);

  sp.bootstrap_mode = false;
  return rt;
}

}  // namespace tandem
