#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tandem/object_space.hpp"

namespace tandem {

// Deterministic display forms used by transcripts, dumps and error
// messages. Classes render by name (ruby name preferred), meta classes as
// #<Class: destination>, plain objects as #<ClassName:oop>.
std::string render_class(const ObjectSpace& sp, ObjRef cls);
std::string render_value(const ObjectSpace& sp, const Value& v);
std::string quote_text(const std::string& s);

// Primitive views that see through boxed immediates.
std::optional<std::string> text_of(const ObjectSpace& sp, const Value& v);
std::optional<std::int64_t> int_of(const ObjectSpace& sp, const Value& v);

}  // namespace tandem
