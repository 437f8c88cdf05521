#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tandem {

// Domain error kinds surfaced by the runtime. Script transcripts and
// expect_error match on the short name, so the set is part of the
// observable surface.
enum class Err {
  NameConflict,
  NotInstantiable,
  NotAMetaClass,
  UndeclaredIvar,
  ModelViolation,
  SingletonForbidden,
  CyclicInclude,
  VisibilityUnsupported,
  NoSuchMethod,
  NoMethodError,
  ArgumentError,
  UnsupportedShape,
  TypeError,
  LocalJumpError,
  ParseError,
};

// Why a lookup failed. Stored on NoMethodError so the default handler can
// report private/protected hits distinctly from plain misses.
enum class MissReason { Absent, Private, Protected };

const char* err_name(Err e);

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(Err kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  RuntimeError(Err kind, std::string msg, MissReason reason)
      : std::runtime_error(std::move(msg)), kind_(kind), miss_(reason) {}

  Err kind() const { return kind_; }
  std::optional<MissReason> miss_reason() const { return miss_; }

 private:
  Err kind_;
  std::optional<MissReason> miss_;
};

[[noreturn]] inline void fail(Err kind, std::string msg) {
  throw RuntimeError(kind, std::move(msg));
}

[[noreturn]] inline void raise_not_found(Err kind, MissReason reason,
                                         std::string msg) {
  throw RuntimeError(kind, std::move(msg), reason);
}

}  // namespace tandem
