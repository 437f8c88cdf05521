#include "tandem/errors.hpp"

namespace tandem {

const char* err_name(Err e) {
  switch (e) {
    case Err::NameConflict: return "NameConflict";
    case Err::NotInstantiable: return "NotInstantiable";
    case Err::NotAMetaClass: return "NotAMetaClass";
    case Err::UndeclaredIvar: return "UndeclaredIvar";
    case Err::ModelViolation: return "ModelViolation";
    case Err::SingletonForbidden: return "SingletonForbidden";
    case Err::CyclicInclude: return "CyclicInclude";
    case Err::VisibilityUnsupported: return "VisibilityUnsupported";
    case Err::NoSuchMethod: return "NoSuchMethod";
    case Err::NoMethodError: return "NoMethodError";
    case Err::ArgumentError: return "ArgumentError";
    case Err::UnsupportedShape: return "UnsupportedShape";
    case Err::TypeError: return "TypeError";
    case Err::LocalJumpError: return "LocalJumpError";
    case Err::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace tandem
