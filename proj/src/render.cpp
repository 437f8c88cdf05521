#include "tandem/render.hpp"

namespace tandem {

std::string quote_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::optional<std::string> text_of(const ObjectSpace& sp, const Value& v) {
  if (v.is_text()) return v.as_text();
  if (v.is_ref()) {
    const ObjRecord& r = sp.rec(v.as_ref());
    if (r.payload && r.payload->is_text()) return r.payload->as_text();
  }
  return std::nullopt;
}

std::optional<std::int64_t> int_of(const ObjectSpace& sp, const Value& v) {
  if (v.is_int()) return v.as_int();
  if (v.is_ref()) {
    const ObjRecord& r = sp.rec(v.as_ref());
    if (r.payload && r.payload->is_int()) return r.payload->as_int();
  }
  return std::nullopt;
}

std::string render_class(const ObjectSpace& sp, ObjRef c) {
  const ClassDesc& d = sp.cls(c);
  if (d.name_rb) return *d.name_rb;
  if (d.name_st) return *d.name_st;
  if (d.is_virtual && d.origin) return render_class(sp, *d.origin);
  if (d.is_meta && d.dest_class)
    return "#<Class: " + render_value(sp, Value(*d.dest_class)) + ">";
  return "#<anon:" + std::to_string(c.oop) + ">";
}

std::string render_value(const ObjectSpace& sp, const Value& v) {
  if (v.is_nil()) return "nil";
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_text()) return quote_text(v.as_text());
  if (v.is_symbol()) return ":" + v.as_symbol().name;
  if (v.is_seq()) {
    std::string out = "(";
    bool first = true;
    for (const Value& e : *v.as_seq()) {
      if (!first) out += ' ';
      first = false;
      out += render_value(sp, e);
    }
    return out + ")";
  }
  if (v.is_block())
    return "#<block/" + std::to_string(v.as_block()->nparams) + ">";
  ObjRef r = v.as_ref();
  if (sp.is_class(r)) return render_class(sp, r);
  const ObjRecord& rec = sp.rec(r);
  if (rec.payload) {
    // Boxed immediates display as their payload.
    ObjRef c = sp.class_of(r);
    if (c != sp.wk.wrapper_cls) return render_value(sp, *rec.payload);
    return "#<wrapper:" + std::to_string(r.oop) + " " +
           render_value(sp, *rec.payload) + ">";
  }
  return "#<" + render_class(sp, sp.class_of(r)) + ":" + std::to_string(r.oop) +
         ">";
}

}  // namespace tandem
