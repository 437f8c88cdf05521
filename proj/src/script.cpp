#include "tandem/script.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "tandem/bridge.hpp"
#include "tandem/modules.hpp"
#include "tandem/render.hpp"
#include "tandem/singleton.hpp"

namespace tandem {

namespace {

// Grammar-level failure: aborts the whole run with exit code 2.
struct ParseAbort {
  std::string msg;
};

[[noreturn]] void abort_parse(const std::string& msg) { throw ParseAbort{msg}; }

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

std::string ltrim(std::string s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

// Whitespace tokens; double-quoted strings stay one token (quotes kept),
// parentheses split off as their own tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  bool in_str = false;
  auto flush = [&] {
    if (!cur.empty()) {
      toks.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_str) {
      cur += c;
      if (c == '\\' && i + 1 < line.size()) cur += line[++i];
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') {
      flush();
      cur += c;
      in_str = true;
    } else if (c == ' ' || c == '\t') {
      flush();
    } else if (c == '(' || c == ')') {
      flush();
      toks.push_back(std::string(1, c));
    } else {
      cur += c;
    }
  }
  if (in_str) abort_parse("unterminated string literal");
  flush();
  return toks;
}

bool looks_like_int(const std::string& t) {
  std::size_t i = (t[0] == '-') ? 1 : 0;
  if (i >= t.size()) return false;
  for (; i < t.size(); ++i)
    if (t[i] < '0' || t[i] > '9') return false;
  return true;
}

std::string unquote(const std::string& t) {
  std::string out;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] == '\\' && i + 2 < t.size()) {
      char n = t[++i];
      out += (n == 'n') ? '\n' : n;
    } else {
      out += t[i];
    }
  }
  return out;
}

class Runner {
 public:
  Runner(Runtime& rt, std::ostringstream& out, unsigned seed)
      : rt_(rt), sp_(rt.space), in_(rt.interp), out_(out), seed_(seed) {}

  bool failed = false;

  void run_line(const std::string& line) {
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) return;
    const std::string& cmd = toks[0];

    if (cmd != "expect_error" && pending_) {
      // An unexpected error nobody checked fails the run.
      failed = true;
      pending_.reset();
    }

    try {
      exec(cmd, toks, line);
    } catch (const RuntimeError& e) {
      out_ << "!! " << err_name(e.kind()) << ": " << e.what() << "\n";
      pending_ = e.kind();
    }
  }

  void finish() {
    if (pending_) failed = true;
  }

 private:
  Runtime& rt_;
  ObjectSpace& sp_;
  Interp& in_;
  std::ostringstream& out_;
  unsigned seed_;
  Env ambient_ = Env::Ruby;
  Value last_;
  std::optional<Err> pending_;

  // ---- expression helpers ------------------------------------------------

  ObjRef resolve_class(const std::string& name) {
    if (auto r = sp_.find_name(ambient_, name)) return *r;
    Env other = ambient_ == Env::Ruby ? Env::Smalltalk : Env::Ruby;
    if (auto r = sp_.find_name(other, name)) return *r;
    fail(Err::ParseError, "unknown name: " + name);
  }

  // Class designator: Name | meta:Name | singleton:Name.
  ObjRef resolve_designator(const std::string& tok) {
    if (tok.rfind("meta:", 0) == 0)
      return sp_.virtual_class(resolve_class(tok.substr(5)));
    if (tok.rfind("singleton:", 0) == 0)
      return singleton_engine::ruby_singleton_class(sp_,
                                                    resolve_class(tok.substr(10)));
    return resolve_class(tok);
  }

  Value parse_literal(const std::vector<std::string>& toks, std::size_t& i) {
    if (i >= toks.size()) abort_parse("missing literal");
    const std::string& t = toks[i];
    if (t == "(") {
      ++i;
      std::vector<Value> elems;
      while (i < toks.size() && toks[i] != ")") elems.push_back(parse_literal(toks, i));
      if (i >= toks.size()) abort_parse("unterminated list literal");
      ++i;  // ')'
      return Value::seq(std::move(elems));
    }
    ++i;
    if (t == "true") return Value(true);
    if (t == "false") return Value(false);
    if (t == "nil") return Value::nil();
    if (t[0] == '"') return Value(unquote(t));
    if (t[0] == ':' && t.size() > 1) return Value::sym(t.substr(1));
    if (looks_like_int(t)) return Value(static_cast<std::int64_t>(std::stoll(t)));
    abort_parse("not a literal: " + t);
  }

  bool is_literal_start(const std::string& t) {
    return t == "(" || t == "true" || t == "false" || t == "nil" ||
           t[0] == '"' || (t[0] == ':' && t.size() > 1) || looks_like_int(t);
  }

  // Receiver/argument expression: @lastresult | literal | new <Class> | name.
  Value parse_expr(const std::vector<std::string>& toks, std::size_t& i) {
    if (i >= toks.size()) abort_parse("missing expression");
    const std::string& t = toks[i];
    if (t == "@lastresult") {
      ++i;
      return last_;
    }
    if (t == "new") {
      ++i;
      if (i >= toks.size()) abort_parse("new needs a class name");
      ObjRef c = resolve_class(toks[i++]);
      return Value(sp_.new_instance(c));
    }
    if (is_literal_start(t)) return parse_literal(toks, i);
    ++i;
    return Value(resolve_designator(t));
  }

  Value make_block(const std::string& sexpr, const Value& home_self) {
    IrPtr ir = parse_sexpr(sexpr);
    if (ir->op != IrOp::BlockLit) abort_parse("blockv needs a (block n body) form");
    Activation act{home_self, {}, std::nullopt, ambient_, ObjRef{}, nullptr};
    return in_.eval_ir(ir, act);
  }

  static std::string rest_after(const std::string& line, const std::string& kw) {
    auto pos = line.find(" " + kw + " ");
    if (pos == std::string::npos) abort_parse("missing " + kw + " section");
    return ltrim(line.substr(pos + kw.size() + 2));
  }

  void emit_value(const Value& v) { out_ << "=> " << render_value(sp_, v) << "\n"; }

  // ---- commands ----------------------------------------------------------

  void exec(const std::string& cmd, const std::vector<std::string>& toks,
            const std::string& line) {
    if (cmd == "env") {
      if (toks.size() != 2) abort_parse("env <smalltalk|ruby>");
      if (toks[1] == "ruby") ambient_ = Env::Ruby;
      else if (toks[1] == "smalltalk") ambient_ = Env::Smalltalk;
      else abort_parse("env <smalltalk|ruby>");
      return;
    }
    if (cmd == "class") return cmd_class(toks);
    if (cmd == "module") {
      if (toks.size() != 2) abort_parse("module <Name>");
      last_ = Value(module_system::new_module(sp_, toks[1]));
      emit_value(last_);
      return;
    }
    if (cmd == "include") {
      if (toks.size() != 3 && toks.size() != 4)
        abort_parse("include <Class> <Module> [env]");
      Env env = ambient_;
      if (toks.size() == 4) {
        if (toks[3] == "ruby") env = Env::Ruby;
        else if (toks[3] == "smalltalk") env = Env::Smalltalk;
        else abort_parse("include env must be smalltalk or ruby");
      }
      module_system::include_module(sp_, resolve_designator(toks[1]),
                                    resolve_class(toks[2]), env);
      return;
    }
    if (cmd == "def") return cmd_def(toks, line);
    if (cmd == "defprim" || cmd == "defclassprim") {
      if (toks.size() != 4) abort_parse(cmd + " <Class> <ruby_name> <st_selector>");
      ObjRef c = resolve_designator(toks[1]);
      if (cmd == "defprim") install_primitive(in_, c, toks[2], toks[3]);
      else install_class_primitive(in_, c, toks[2], toks[3]);
      return;
    }
    if (cmd == "send") return cmd_send(toks, line);
    if (cmd == "stcallruby") return cmd_stcallruby(toks, line);
    if (cmd == "wrap") {
      std::size_t i = 1;
      Value v = parse_expr(toks, i);
      last_ = Value(wrap(in_, v));
      emit_value(last_);
      return;
    }
    if (cmd == "singleton") return cmd_singleton(toks);
    if (cmd == "expect") return cmd_expect(line);
    if (cmd == "expect_error") return cmd_expect_error(toks);
    if (cmd == "inspect") {
      if (toks.size() < 3 || toks[1] != "hierarchy")
        abort_parse("inspect hierarchy <Name|expr>");
      std::size_t i = 2;
      Value v = parse_expr(toks, i);
      out_ << inspect_hierarchy(sp_, v);
      return;
    }
    if (cmd == "ivars") {
      std::size_t i = 1;
      Value v = parse_expr(toks, i);
      if (!v.is_ref()) fail(Err::TypeError, "ivars needs a heap object");
      print_ivars(v.as_ref());
      return;
    }
    if (cmd == "fuzz") return cmd_fuzz(toks);
    abort_parse("unknown command: " + cmd);
  }

  void cmd_class(const std::vector<std::string>& toks) {
    if (toks.size() < 2) abort_parse("class <Name> ...");
    std::string name = toks[1];
    bool stonly = false;
    ObjRef super = sp_.wk.object;
    std::vector<std::string> ivars;
    std::size_t i = 2;
    while (i < toks.size()) {
      if (toks[i] == "stonly") {
        stonly = true;
        ++i;
      } else if (toks[i] == "super") {
        if (i + 1 >= toks.size()) abort_parse("super needs a class name");
        super = resolve_class(toks[i + 1]);
        i += 2;
      } else if (toks[i] == "ivars") {
        for (++i; i < toks.size(); ++i) ivars.push_back(toks[i]);
      } else {
        abort_parse("class: unexpected token " + toks[i]);
      }
    }
    ObjRef c = stonly ? sp_.new_smalltalk_only_class(name, super, ivars)
                      : sp_.new_class(name, name, super, ivars);
    last_ = Value(c);
    emit_value(last_);
  }

  void cmd_def(const std::vector<std::string>& toks, const std::string& line) {
    // def <Class> <selector> vis <v> sig <req> [opt n=lit ...] [splat]
    //     [block] body <sexpr>
    if (toks.size() < 7) abort_parse("def: too few tokens");
    ObjRef cls = resolve_designator(toks[1]);
    std::string selector = toks[2];
    std::size_t i = 3;
    if (toks[i] != "vis") abort_parse("def: expected vis");
    ++i;
    Visibility vis;
    if (toks[i] == "public") vis = Visibility::Public;
    else if (toks[i] == "private") vis = Visibility::Private;
    else if (toks[i] == "protected") vis = Visibility::Protected;
    else abort_parse("def: bad visibility " + toks[i]);
    ++i;
    if (i >= toks.size() || toks[i] != "sig") abort_parse("def: expected sig");
    ++i;
    if (i >= toks.size() || !looks_like_int(toks[i]))
      abort_parse("def: sig needs a required-arg count");
    Signature sig;
    sig.required = static_cast<int>(std::stol(toks[i++]));
    while (i < toks.size() && toks[i] != "body") {
      if (toks[i] == "opt") {
        ++i;
        if (i >= toks.size()) abort_parse("def: opt needs name=literal");
        auto eq = toks[i].find('=');
        if (eq == std::string::npos) abort_parse("def: opt needs name=literal");
        std::string oname = toks[i].substr(0, eq);
        std::string lit = toks[i].substr(eq + 1);
        Value v;
        if (lit.empty()) {
          // Quoted and parenthesised literals tokenize separately.
          ++i;
          v = parse_literal(toks, i);
        } else {
          std::vector<std::string> sub = tokenize(lit);
          std::size_t j = 0;
          v = parse_literal(sub, j);
          ++i;
        }
        sig.optionals.push_back({oname, ir_literal(v)});
      } else if (toks[i] == "splat") {
        sig.splat = true;
        ++i;
      } else if (toks[i] == "block") {
        sig.block = true;
        ++i;
      } else {
        abort_parse("def: unexpected token " + toks[i]);
      }
    }
    std::string body = rest_after(line, "body");
    in_.define_ir(cls, ambient_, selector, sig, parse_sexpr(body), vis);
  }

  void cmd_send(const std::vector<std::string>& toks, const std::string& line) {
    std::size_t i = 1;
    Value recv = parse_expr(toks, i);
    if (i >= toks.size()) abort_parse("send: missing selector");
    std::string selector = toks[i++];
    std::vector<Value> args;
    std::optional<Value> splat;
    std::optional<Value> block;
    while (i < toks.size()) {
      if (toks[i] == "star") {
        ++i;
        splat = parse_literal(toks, i);
        if (!splat->is_seq()) abort_parse("star needs a list literal");
      } else if (toks[i] == "blockv") {
        block = make_block(rest_after(line, "blockv"), recv);
        i = toks.size();
      } else {
        args.push_back(parse_expr(toks, i));
      }
    }
    if (ambient_ == Env::Smalltalk) {
      last_ = in_.send(recv, selector, std::move(args), std::move(splat),
                       std::move(block), Env::Smalltalk, nullptr);
    } else if (selector.find('#') != std::string::npos) {
      last_ = in_.send(recv, selector, std::move(args), std::move(splat),
                       std::move(block), Env::Ruby, nullptr);
    } else {
      last_ = in_.call_ruby(recv, selector, std::move(args), std::move(splat),
                            std::move(block), nullptr);
    }
    emit_value(last_);
  }

  void cmd_stcallruby(const std::vector<std::string>& toks,
                      const std::string& line) {
    std::size_t i = 1;
    Value recv = parse_expr(toks, i);
    if (i >= toks.size()) abort_parse("stcallruby: missing selector");
    std::string token = toks[i++];
    StRubySelector sel = parse_st_ruby_selector(split_ruby_call_token(token));
    std::vector<Value> slots;
    while (i < toks.size()) {
      if (toks[i] == "blockv") {
        slots.push_back(make_block(rest_after(line, "blockv"), recv));
        i = toks.size();
      } else {
        slots.push_back(parse_expr(toks, i));
      }
    }
    last_ = st_call_ruby(in_, recv, sel, std::move(slots));
    emit_value(last_);
  }

  void cmd_singleton(const std::vector<std::string>& toks) {
    std::size_t i = 1;
    Value v = parse_expr(toks, i);
    if (!v.is_ref())
      fail(Err::SingletonForbidden, "immediate values have no singleton class");
    ObjRef obj = v.as_ref();
    if (i < toks.size()) {
      if (!looks_like_int(toks[i])) abort_parse("singleton: depth must be a number");
      int depth = static_cast<int>(std::stol(toks[i]));
      singleton_engine::ensure_singleton_generated(sp_, obj, depth);
      last_ = Value(sp_.virtual_class(obj));
    } else {
      last_ = Value(singleton_engine::ruby_singleton_class(sp_, obj));
    }
    emit_value(last_);
  }

  void cmd_expect(const std::string& line) {
    std::string want = ltrim(line.substr(std::string("expect").size()));
    if (pending_) {
      out_ << "FAIL: expected " << want << " but the previous command raised\n";
      failed = true;
      pending_.reset();
      return;
    }
    std::string got = render_value(sp_, last_);
    if (got == want) {
      out_ << "ok\n";
    } else {
      out_ << "FAIL: expected " << want << " got " << got << "\n";
      failed = true;
    }
  }

  void cmd_expect_error(const std::vector<std::string>& toks) {
    if (toks.size() != 2) abort_parse("expect_error <Kind>");
    if (!pending_) {
      out_ << "FAIL: expected error " << toks[1] << " but none was raised\n";
      failed = true;
      return;
    }
    std::string got = err_name(*pending_);
    pending_.reset();
    if (got == toks[1]) {
      out_ << "ok (" << got << ")\n";
    } else {
      out_ << "FAIL: expected error " << toks[1] << " got " << got << "\n";
      failed = true;
    }
  }

  void print_ivars(ObjRef obj) {
    auto render_list = [&](Env env) {
      std::string s = "(";
      bool first = true;
      for (const auto& n : sp_.instance_variables(obj, env)) {
        if (!first) s += ' ';
        first = false;
        s += n;
      }
      return s + ")";
    };
    out_ << "st: " << render_list(Env::Smalltalk) << "\n";
    out_ << "rb: " << render_list(Env::Ruby) << "\n";
  }

  // Property run: lookup chains are link-consistent, acyclic, rooted, and
  // stable across recomputation.
  void cmd_fuzz(const std::vector<std::string>& toks) {
    if (toks.size() != 3 || toks[1] != "lookup" || !looks_like_int(toks[2]))
      abort_parse("fuzz lookup <cases>");
    int cases = static_cast<int>(std::stol(toks[2]));
    std::mt19937 rng(seed_);
    auto fresh = bootstrap();
    ObjectSpace& sp = fresh->space;
    Interp& in = fresh->interp;

    std::vector<ObjRef> classes{sp.wk.object};
    std::vector<ObjRef> modules;
    for (int i = 0; i < 6; ++i) {
      ObjRef super = classes[rng() % classes.size()];
      classes.push_back(sp.new_class("FzC" + std::to_string(i),
                                     "FzC" + std::to_string(i), super, {}));
    }
    for (int i = 0; i < 3; ++i)
      modules.push_back(module_system::new_module(sp, "FzM" + std::to_string(i)));
    for (int i = 0; i < 5; ++i) {
      ObjRef c = classes[1 + rng() % (classes.size() - 1)];
      ObjRef m = modules[rng() % modules.size()];
      Env e = (rng() % 2 == 0) ? Env::Ruby : Env::Smalltalk;
      try {
        module_system::include_module(sp, c, m, e);
      } catch (const RuntimeError&) {
      }
    }

    int checked = 0;
    for (int i = 0; i < cases; ++i) {
      ObjRef c = classes[1 + rng() % (classes.size() - 1)];
      Value probe(sp.new_instance(c));
      Env e = (rng() % 2 == 0) ? Env::Ruby : Env::Smalltalk;
      std::vector<ObjRef> chain = in.lookup_chain(probe, e);
      if (chain.empty() || chain.front() != sp.virtual_class_of_value(probe) ||
          chain.back() != sp.wk.object) {
        out_ << "FAIL: fuzz chain endpoints (case " << i << ")\n";
        failed = true;
        return;
      }
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        auto next = sp.effective_superclass(chain[k], e);
        if (!next || *next != chain[k + 1]) {
          out_ << "FAIL: fuzz chain link (case " << i << ")\n";
          failed = true;
          return;
        }
        if (std::count(chain.begin(), chain.end(), chain[k]) != 1) {
          out_ << "FAIL: fuzz chain cycle (case " << i << ")\n";
          failed = true;
          return;
        }
      }
      if (in.lookup_chain(probe, e) != chain) {
        out_ << "FAIL: fuzz chain instability (case " << i << ")\n";
        failed = true;
        return;
      }
      ++checked;
    }
    out_ << "fuzz lookup: " << checked << " cases ok (seed " << seed_ << ")\n";
  }
};

void chain_line(std::ostringstream& os, const ObjectSpace& sp, ObjRef node,
                bool ruby_section) {
  os << "  " << render_class(sp, node);
  const ClassDesc& d = sp.cls(node);
  if (d.is_meta && d.dest_class)
    os << " [M dest=" << render_value(sp, Value(*d.dest_class)) << "]";
  if (d.is_virtual && d.origin)
    os << " [V origin=" << render_class(sp, *d.origin) << "]";
  auto show = [&](Env e) {
    auto sup = sp.effective_superclass(node, e);
    return sup ? render_class(sp, *sup) : std::string("nil");
  };
  os << " st-> " << show(Env::Smalltalk);
  if (ruby_section) os << " rb-> " << show(Env::Ruby);
  os << "\n";
}

}  // namespace

std::string inspect_hierarchy(const ObjectSpace& sp, const Value& target) {
  std::ostringstream os;
  os << "object: " << render_value(sp, target) << "\n";

  ObjRef v = sp.virtual_class_of_value(target);
  os << "instance-of: " << render_class(sp, v) << "\n";
  int guard = 0;
  while (sp.cls(v).is_meta && guard++ < 64) {
    v = sp.virtual_class(v);
    os << "instance-of: " << render_class(sp, v) << "\n";
  }

  ObjRef start = (target.is_ref() && sp.is_class(target.as_ref()))
                     ? target.as_ref()
                     : sp.virtual_class_of_value(target);
  os << "ruby chain:\n";
  {
    std::optional<ObjRef> node = start;
    while (node) {
      chain_line(os, sp, *node, true);
      node = sp.effective_superclass(*node, Env::Ruby);
    }
  }
  os << "smalltalk chain:\n";
  {
    std::optional<ObjRef> node = start;
    while (node) {
      chain_line(os, sp, *node, false);
      node = sp.effective_superclass(*node, Env::Smalltalk);
    }
  }
  return os.str();
}

ScriptResult ScriptRunner::run(const std::string& script_text) {
  auto rt = bootstrap();
  std::ostringstream out;

  if (opt_.bootstrap_stats) {
    out << "bootstrap objects: " << rt->space.object_count() << "\n";
    out << "bootstrap classes: " << rt->space.class_count() << "\n";
    out << "bootstrap meta classes: " << rt->space.meta_class_count() << "\n";
    out << "bootstrap modules: " << rt->space.module_count() << "\n";
  }

  Runner runner(*rt, out, opt_.seed);
  int exit_code = 0;
  std::istringstream is(script_text);
  std::string raw;
  while (std::getline(is, raw)) {
    std::string line = rtrim(raw);
    std::string stripped = ltrim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    out << "> " << stripped << "\n";
    try {
      runner.run_line(stripped);
    } catch (const ParseAbort& a) {
      out << "!! parse abort: " << a.msg << "\n";
      exit_code = 2;
      break;
    }
  }
  if (exit_code == 0) {
    runner.finish();
    if (runner.failed) exit_code = 1;
  }

  if (opt_.dump_final && exit_code != 2) {
    out << "--- final hierarchy ---\n";
    std::vector<std::pair<std::string, ObjRef>> all;
    for (Env e : {Env::Smalltalk, Env::Ruby})
      for (auto& [name, r] : rt->space.registry_entries(e))
        all.emplace_back(name, r);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      if (a.second.oop != b.second.oop) return a.second.oop < b.second.oop;
      return a.first < b.first;
    });
    all.erase(std::unique(all.begin(), all.end(),
                          [](const auto& a, const auto& b) {
                            return a.second == b.second;
                          }),
              all.end());
    for (auto& [name, r] : all) out << inspect_hierarchy(rt->space, Value(r));
    out << "final objects: " << rt->space.object_count() << "\n";
    out << "final classes: " << rt->space.class_count() << "\n";
  }

  return ScriptResult{out.str(), exit_code};
}

}  // namespace tandem
