#include "tandem/dispatch.hpp"

#include <algorithm>

#include "tandem/bridge.hpp"
#include "tandem/render.hpp"

namespace tandem {

namespace {

constexpr int kChainGuard = 10000;

bool is_operator_selector(const std::string& s) {
  static const std::string ops = "+-*/~<>=&|@%,?!^";
  if (s.empty()) return false;
  for (char c : s)
    if (ops.find(c) == std::string::npos) return false;
  return true;
}

std::string base_of_full(const std::string& selector) {
  auto pos = selector.rfind('#');
  if (pos == std::string::npos) return selector;
  return selector.substr(0, pos);
}

// Holder-or-subclass along the ruby chain, virtual copies matching through
// their origin.
bool defines_under(const ObjectSpace& sp, ObjRef from, ObjRef holder) {
  std::optional<ObjRef> target_origin;
  if (sp.cls(holder).is_virtual) target_origin = sp.cls(holder).origin;
  std::optional<ObjRef> node = from;
  int guard = 0;
  while (node) {
    if (++guard > kChainGuard) fail(Err::ModelViolation, "chain runaway");
    if (*node == holder) return true;
    const ClassDesc& d = sp.cls(*node);
    if (d.is_virtual && d.origin &&
        (d.origin == target_origin || *d.origin == holder))
      return true;
    node = sp.effective_superclass(*node, Env::Ruby);
  }
  return false;
}

}  // namespace

int st_selector_arity(const std::string& selector) {
  if (is_operator_selector(selector)) return 1;
  return static_cast<int>(std::count(selector.begin(), selector.end(), ':'));
}

std::vector<Value> flatten_args(std::vector<Value> normals,
                                const std::optional<Value>& splat) {
  if (splat) {
    if (!splat->is_seq())
      fail(Err::TypeError, "splat value must be a sequence");
    for (const Value& v : *splat->as_seq()) normals.push_back(v);
  }
  return normals;
}

void Interp::define_method(ObjRef cls, Env env, const std::string& selector,
                           Visibility vis, Signature sig,
                           std::shared_ptr<const MethodBody> body) {
  if (!sp_.is_class(cls)) fail(Err::TypeError, "methods live on classes");
  if (env == Env::Smalltalk) {
    if (vis != Visibility::Public)
      fail(Err::VisibilityUnsupported,
           "smalltalk methods are always public: " + selector);
    if (sig.required != st_selector_arity(selector) || !sig.optionals.empty() ||
        sig.splat)
      fail(Err::ArgumentError,
           "smalltalk signature must match the selector arity: " + selector);
    MethodEntry e;
    e.selector = selector;
    e.env = env;
    e.visibility = vis;
    e.sig = std::move(sig);
    e.role = BridgeRole::Real;
    e.base = selector;
    e.canonical = selector;
    e.body = std::move(body);
    e.defining_class = cls;
    sp_.cls(cls).env[env_index(env)].dict[selector] = std::move(e);
    return;
  }
  MethodEntry real;
  real.selector = canonical_selector(selector, sig).render();
  real.env = env;
  real.visibility = vis;
  real.sig = std::move(sig);
  real.role = BridgeRole::Real;
  real.shape = CallShape{std::min(real.sig.arity(), 3), real.sig.splat,
                         real.sig.block};
  if (real.sig.arity() > 3)
    real.shape = CallShape{real.sig.arity(), real.sig.splat, real.sig.block};
  real.base = selector;
  real.canonical = real.selector;
  real.body = std::move(body);
  real.defining_class = cls;
  generate_bridges(sp_, cls, real);
}

void Interp::define_ir(ObjRef cls, Env env, const std::string& selector,
                       Signature sig, IrPtr body, Visibility vis) {
  auto mb = std::make_shared<MethodBody>();
  mb->impl = std::move(body);
  define_method(cls, env, selector, vis, std::move(sig), std::move(mb));
}

void Interp::define_native(ObjRef cls, Env env, const std::string& selector,
                           Signature sig,
                           std::function<Value(Interp&, const NativeCtx&)> fn,
                           Visibility vis) {
  auto mb = std::make_shared<MethodBody>();
  mb->impl = std::move(fn);
  define_method(cls, env, selector, vis, std::move(sig), std::move(mb));
}

void Interp::set_visibility(ObjRef cls, Env env, const std::string& selector,
                            Visibility vis) {
  if (env == Env::Smalltalk) {
    if (vis == Visibility::Public) return;
    fail(Err::VisibilityUnsupported,
         "smalltalk methods are always public: " + selector);
  }
  std::string base = base_of_full(selector);
  MethodDict& dict = sp_.cls(cls).env[env_index(Env::Ruby)].dict;
  int hits = 0;
  for (auto& [key, entry] : dict) {
    if (entry.base == base) {
      entry.visibility = vis;
      ++hits;
    }
  }
  if (hits == 0)
    fail(Err::NoSuchMethod, "no method family named " + base);
}

std::vector<ObjRef> Interp::lookup_chain(const Value& receiver,
                                         Env env) const {
  std::vector<ObjRef> chain;
  std::optional<ObjRef> node = sp_.virtual_class_of_value(receiver);
  int guard = 0;
  while (node) {
    if (++guard > kChainGuard) fail(Err::ModelViolation, "chain runaway");
    chain.push_back(*node);
    node = sp_.effective_superclass(*node, env);
  }
  return chain;
}

LookupResult Interp::lookup_from_class(ObjRef start,
                                       const std::string& selector,
                                       Env env) const {
  LookupResult res;
  std::optional<ObjRef> node = start;
  int guard = 0;
  while (node) {
    if (++guard > kChainGuard) fail(Err::ModelViolation, "chain runaway");
    const MethodDict& dict = sp_.cls(*node).env[env_index(env)].dict;
    auto it = dict.find(selector);
    if (it != dict.end()) {
      res.entry = &it->second;
      res.holder = *node;
      return res;
    }
    node = sp_.effective_superclass(*node, env);
  }
  res.reason = MissReason::Absent;
  return res;
}

LookupResult Interp::lookup(const Value& receiver, const std::string& selector,
                            Env env, const CallCtx* caller) const {
  LookupResult hit =
      lookup_from_class(sp_.virtual_class_of_value(receiver), selector, env);
  if (!hit.found()) return hit;
  if (env == Env::Ruby) {
    // First hit decides: an inadmissible entry is a miss, not a fall-through.
    if (hit.entry->visibility == Visibility::Private) {
      if (!(caller && caller->implicit_self)) {
        LookupResult miss;
        miss.reason = MissReason::Private;
        return miss;
      }
    } else if (hit.entry->visibility == Visibility::Protected) {
      bool ok = caller && caller->defining_class &&
                defines_under(sp_, *caller->defining_class, hit.holder) &&
                sp_.is_kind_of(receiver, hit.holder);
      if (!ok) {
        LookupResult miss;
        miss.reason = MissReason::Protected;
        return miss;
      }
    }
  }
  return hit;
}

Value Interp::send(const Value& receiver, const std::string& selector,
                   std::vector<Value> normals, std::optional<Value> splat,
                   std::optional<Value> block, Env env, const CallCtx* caller) {
  LookupResult hit = lookup(receiver, selector, env, caller);
  if (hit.found())
    return invoke_entry(*hit.entry, hit.holder, receiver, std::move(normals),
                        std::move(splat), std::move(block), selector);
  return dispatch_missing(receiver, selector, std::move(normals),
                          std::move(splat), std::move(block), env, hit.reason);
}

Value Interp::call_ruby(const Value& receiver, const std::string& base,
                        std::vector<Value> args, std::optional<Value> splat,
                        std::optional<Value> block, const CallCtx* caller) {
  TranslatedCall tc = translate_call_site(base, static_cast<int>(args.size()),
                                          splat.has_value(), block.has_value());
  if (tc.pack_from >= 0) {
    std::vector<Value> packed(args.begin() + tc.pack_from, args.end());
    args.resize(tc.pack_from);
    if (splat) {
      if (!splat->is_seq())
        fail(Err::TypeError, "splat value must be a sequence");
      for (const Value& v : *splat->as_seq()) packed.push_back(v);
    }
    splat = Value::seq(std::move(packed));
  }
  return send(receiver, tc.sel.render(), std::move(args), std::move(splat),
              std::move(block), Env::Ruby, caller);
}

Value Interp::invoke_entry(const MethodEntry& e, ObjRef holder,
                           const Value& recv, std::vector<Value> normals,
                           std::optional<Value> splat,
                           std::optional<Value> block,
                           const std::string& dispatched) {
  if (e.env == Env::Smalltalk) {
    std::vector<Value> flat = flatten_args(std::move(normals), splat);
    if (static_cast<int>(flat.size()) != e.sig.required)
      fail(Err::ArgumentError,
           "wrong number of arguments (given " + std::to_string(flat.size()) +
               ") for " + e.selector);
    return run_body(e, holder, recv, std::move(flat), std::move(block),
                    dispatched);
  }

  if (e.role == BridgeRole::ArgumentErrorStub)
    fail(Err::ArgumentError, "wrong number of arguments (given " +
                                 std::to_string(flatten_args(normals, splat)
                                                    .size()) +
                                 ") for '" + e.base + "'");

  std::vector<Value> flat = flatten_args(std::move(normals), splat);

  // Real entries of the family in ascending arity: one candidate normally,
  // several only for bootstrap overloads.
  std::vector<const MethodEntry*> candidates;
  {
    const MethodDict& dict = sp_.cls(holder).env[env_index(Env::Ruby)].dict;
    for (const auto& [key, entry] : dict)
      if (entry.base == e.base && entry.role == BridgeRole::Real)
        candidates.push_back(&entry);
    std::sort(candidates.begin(), candidates.end(),
              [](const MethodEntry* a, const MethodEntry* b) {
                if (a->sig.arity() != b->sig.arity())
                  return a->sig.arity() < b->sig.arity();
                return a->selector < b->selector;
              });
  }
  if (candidates.empty())
    fail(Err::ModelViolation, "bridge family without a real entry: " + e.base);

  for (const MethodEntry* cand : candidates) {
    if (std::holds_alternative<StDelegate>(cand->body->impl)) {
      const StDelegate& d = std::get<StDelegate>(cand->body->impl);
      int t = static_cast<int>(flat.size());
      if (t == d.st_arity)
        return send(recv, d.st_selector, flat, std::nullopt, block,
                    Env::Smalltalk, nullptr);
      if (t == d.st_arity - 1 && block) {
        // Trailing block completes the smalltalk argument list.
        std::vector<Value> st_args = flat;
        st_args.push_back(*block);
        return send(recv, d.st_selector, std::move(st_args), std::nullopt,
                    std::nullopt, Env::Smalltalk, nullptr);
      }
      continue;
    }
    auto params = try_bind(*cand, recv, flat, block);
    if (params)
      return run_body(*cand, holder, recv, std::move(*params), block,
                      dispatched);
  }
  fail(Err::ArgumentError, "wrong number of arguments (given " +
                               std::to_string(flat.size()) + ") for '" +
                               e.base + "'");
}

std::optional<std::vector<Value>> Interp::try_bind(
    const MethodEntry& e, const Value& recv, const std::vector<Value>& flat,
    const std::optional<Value>& block) {
  const Signature& sig = e.sig;
  int t = static_cast<int>(flat.size());
  if (t < sig.required) return std::nullopt;
  if (!sig.splat && t > sig.arity()) return std::nullopt;

  std::vector<Value> params(flat.begin(),
                            flat.begin() + std::min(t, sig.required));
  // Optionals fill left to right; missing ones evaluate their default in the
  // partially built activation.
  for (std::size_t i = 0; i < sig.optionals.size(); ++i) {
    int idx = sig.required + static_cast<int>(i);
    if (idx < t) {
      params.push_back(flat[idx]);
    } else {
      Activation part{recv, params, block, e.env, e.defining_class, &e};
      params.push_back(eval_ir(sig.optionals[i].default_ir, part));
    }
  }
  if (sig.splat) {
    std::vector<Value> rest;
    for (int i = sig.arity(); i < t; ++i) rest.push_back(flat[i]);
    params.push_back(Value::seq(std::move(rest)));
  }
  if (sig.block) params.push_back(block ? *block : Value::nil());
  return params;
}

Value Interp::run_body(const MethodEntry& e, ObjRef holder, const Value& recv,
                       std::vector<Value> params, std::optional<Value> block,
                       const std::string& dispatched) {
  if (std::holds_alternative<IrPtr>(e.body->impl)) {
    Activation act{recv, std::move(params), std::move(block), e.env, holder,
                   &e};
    return eval_ir(std::get<IrPtr>(e.body->impl), act);
  }
  if (std::holds_alternative<std::function<Value(Interp&, const NativeCtx&)>>(
          e.body->impl)) {
    NativeCtx ctx{recv, std::move(params), std::move(block), dispatched};
    return std::get<std::function<Value(Interp&, const NativeCtx&)>>(
        e.body->impl)(*this, ctx);
  }
  fail(Err::ModelViolation, "delegate body outside bridge dispatch");
}

Value Interp::dispatch_missing(const Value& recv, const std::string& selector,
                               std::vector<Value> normals,
                               std::optional<Value> splat,
                               std::optional<Value> block, Env env,
                               MissReason reason) {
  if (env == Env::Ruby) {
    std::string base = base_of_full(selector);
    if (base == "method_missing") {
      // The hook itself is missing: report the original failure directly.
      raise_not_found(Err::NoMethodError, reason,
                      describe_miss(reason, base, recv));
    }
    std::vector<Value> hook_args;
    hook_args.push_back(Value::sym(selector));
    for (Value& v : normals) hook_args.push_back(std::move(v));
    CallCtx ctx{std::nullopt, true};
    return call_ruby(recv, "method_missing", std::move(hook_args),
                     std::move(splat), std::move(block), &ctx);
  }
  // Smalltalk side: a does-not-understand hook sees the raw send.
  std::vector<Value> flat = flatten_args(std::move(normals), splat);
  LookupResult hook = lookup_from_class(sp_.virtual_class_of_value(recv),
                                        "doesNotUnderstand:", Env::Smalltalk);
  if (hook.found() &&
      std::holds_alternative<std::function<Value(Interp&, const NativeCtx&)>>(
          hook.entry->body->impl)) {
    NativeCtx ctx{recv, std::move(flat), std::move(block), selector};
    return std::get<std::function<Value(Interp&, const NativeCtx&)>>(
        hook.entry->body->impl)(*this, ctx);
  }
  raise_not_found(Err::NoMethodError, reason,
                  describe_miss(reason, selector, recv));
}

std::string Interp::describe_miss(MissReason reason, const std::string& name,
                                  const Value& recv) const {
  std::string what;
  switch (reason) {
    case MissReason::Private:
      what = "private method '" + name + "' called for ";
      break;
    case MissReason::Protected:
      what = "protected method '" + name + "' called for ";
      break;
    default:
      what = "undefined method '" + name + "' for ";
      break;
  }
  return what + render_value(sp_, recv);
}

Value Interp::eval_ir(const IrPtr& n, Activation& act) {
  switch (n->op) {
    case IrOp::Literal:
      return n->literal;
    case IrOp::SelfRef:
      return act.self;
    case IrOp::ArgRef: {
      if (n->index < 0 || n->index >= static_cast<int>(act.params.size()))
        fail(Err::ModelViolation,
             "argument index out of range: " + std::to_string(n->index));
      return act.params[n->index];
    }
    case IrOp::IvarGet: {
      if (!act.self.is_ref())
        fail(Err::TypeError, "instance variables need a heap receiver");
      return sp_.read_ivar(act.self.as_ref(), n->name, act.env);
    }
    case IrOp::IvarSet: {
      if (!act.self.is_ref())
        fail(Err::TypeError, "instance variables need a heap receiver");
      Value v = eval_ir(n->kids[0], act);
      sp_.write_ivar(act.self.as_ref(), n->name, act.env, v);
      return v;
    }
    case IrOp::Send:
    case IrOp::ISend: {
      bool implicit = n->op == IrOp::ISend;
      std::size_t first_arg = implicit ? 0 : 1;
      Value recv = implicit ? act.self : eval_ir(n->kids[0], act);
      std::vector<Value> args;
      for (std::size_t i = first_arg; i < n->kids.size(); ++i)
        args.push_back(eval_ir(n->kids[i], act));
      std::optional<Value> blk;
      if (n->block_arg) blk = eval_ir(n->block_arg, act);
      CallCtx ctx{act.entry ? std::optional<ObjRef>(act.entry->defining_class)
                            : std::nullopt,
                  implicit};
      if (act.env == Env::Smalltalk)
        return send(recv, n->name, std::move(args), std::nullopt,
                    std::move(blk), Env::Smalltalk, &ctx);
      if (n->name.find('#') != std::string::npos)
        return send(recv, n->name, std::move(args), std::nullopt,
                    std::move(blk), Env::Ruby, &ctx);
      return call_ruby(recv, n->name, std::move(args), std::nullopt,
                       std::move(blk), &ctx);
    }
    case IrOp::CrossSend: {
      Value recv = eval_ir(n->kids[0], act);
      std::vector<Value> slots;
      for (std::size_t i = 1; i < n->kids.size(); ++i)
        slots.push_back(eval_ir(n->kids[i], act));
      StRubySelector sel =
          parse_st_ruby_selector(split_ruby_call_token(n->name));
      return st_call_ruby(*this, recv, sel, std::move(slots));
    }
    case IrOp::SuperSend: {
      if (!act.entry)
        fail(Err::ModelViolation, "super outside of a method body");
      std::vector<Value> args;
      for (const IrPtr& k : n->kids) args.push_back(eval_ir(k, act));
      std::optional<Value> blk = act.block;
      if (n->block_arg) blk = eval_ir(n->block_arg, act);
      std::string sel;
      if (act.env == Env::Ruby) {
        TranslatedCall tc =
            translate_call_site(act.entry->base, static_cast<int>(args.size()),
                                false, blk.has_value());
        if (tc.pack_from >= 0) {
          std::vector<Value> packed(args.begin() + tc.pack_from, args.end());
          args.resize(tc.pack_from);
          return send_super(act, tc.sel.render(), std::move(args),
                            Value::seq(std::move(packed)), std::move(blk));
        }
        sel = tc.sel.render();
      } else {
        sel = act.entry->selector;
      }
      return send_super(act, sel, std::move(args), std::nullopt,
                        std::move(blk));
    }
    case IrOp::BlockLit: {
      auto bv = std::make_shared<BlockValue>();
      bv->nparams = n->index;
      bv->body = n->kids[0];
      bv->env = act.env;
      bv->home_self = act.self;
      return Value(Value::Block(bv));
    }
    case IrOp::BlockCall: {
      Value target = eval_ir(n->kids[0], act);
      if (target.is_nil())
        fail(Err::LocalJumpError, "no block given");
      std::vector<Value> args;
      for (std::size_t i = 1; i < n->kids.size(); ++i)
        args.push_back(eval_ir(n->kids[i], act));
      return call_block(target, std::move(args));
    }
    case IrOp::SeqExpr: {
      Value last = Value::nil();
      for (const IrPtr& k : n->kids) last = eval_ir(k, act);
      return last;
    }
    case IrOp::ListExpr: {
      std::vector<Value> elems;
      for (const IrPtr& k : n->kids) elems.push_back(eval_ir(k, act));
      return Value::seq(std::move(elems));
    }
    case IrOp::Concat: {
      std::string out;
      for (const IrPtr& k : n->kids) {
        Value v = eval_ir(k, act);
        auto t = text_of(sp_, v);
        if (!t) fail(Err::TypeError, "concat needs text operands");
        out += *t;
      }
      return Value(std::move(out));
    }
    case IrOp::Add:
    case IrOp::Sub:
    case IrOp::Mul: {
      auto a = int_of(sp_, eval_ir(n->kids[0], act));
      auto b = int_of(sp_, eval_ir(n->kids[1], act));
      if (!a || !b) fail(Err::TypeError, "arithmetic needs integer operands");
      if (n->op == IrOp::Add) return Value(*a + *b);
      if (n->op == IrOp::Sub) return Value(*a - *b);
      return Value(*a * *b);
    }
    case IrOp::Eq: {
      Value a = eval_ir(n->kids[0], act);
      Value b = eval_ir(n->kids[1], act);
      return Value(a == b);
    }
    case IrOp::TextRep: {
      auto t = text_of(sp_, eval_ir(n->kids[0], act));
      auto cnt = int_of(sp_, eval_ir(n->kids[1], act));
      if (!t || !cnt)
        fail(Err::TypeError, "text repetition needs text and a count");
      std::string out;
      for (std::int64_t i = 0; i < *cnt; ++i) out += *t;
      return Value(std::move(out));
    }
  }
  fail(Err::ModelViolation, "unhandled IR op");
}

Value Interp::send_super(Activation& act, const std::string& selector,
                         std::vector<Value> normals, std::optional<Value> splat,
                         std::optional<Value> block) {
  auto start = sp_.effective_superclass(act.holder, act.env);
  if (!start)
    raise_not_found(Err::NoMethodError, MissReason::Absent,
                    describe_miss(MissReason::Absent, selector, act.self));
  LookupResult hit = lookup_from_class(*start, selector, act.env);
  if (!hit.found())
    raise_not_found(Err::NoMethodError, MissReason::Absent,
                    describe_miss(MissReason::Absent, selector, act.self));
  return invoke_entry(*hit.entry, hit.holder, act.self, std::move(normals),
                      std::move(splat), std::move(block), selector);
}

Value Interp::call_block(const Value& blockval, std::vector<Value> args) {
  if (!blockval.is_block())
    fail(Err::TypeError, "not a block value");
  const BlockValue& b = *blockval.as_block();
  if (b.native) return b.native(std::move(args));
  if (static_cast<int>(args.size()) != b.nparams)
    fail(Err::ArgumentError,
         "wrong number of block arguments (given " +
             std::to_string(args.size()) + ", expected " +
             std::to_string(b.nparams) + ")");
  Activation act{b.home_self, std::move(args), std::nullopt, b.env, ObjRef{},
                 nullptr};
  return eval_ir(b.body, act);
}

}  // namespace tandem
