#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace tandem {

// The two method environments every class carries dictionaries for.
enum class Env : int { Smalltalk = 0, Ruby = 1 };
constexpr int kEnvCount = 2;

inline int env_index(Env e) { return static_cast<int>(e); }
inline const char* env_name(Env e) {
  return e == Env::Smalltalk ? "smalltalk" : "ruby";
}

// Opaque object handle. Oops are assigned sequentially at allocation and
// never reused, which keeps dumps and transcripts deterministic.
struct ObjRef {
  std::uint32_t oop = 0;
  friend bool operator==(const ObjRef&, const ObjRef&) = default;
  friend auto operator<=>(const ObjRef&, const ObjRef&) = default;
};

struct NilValue {
  friend bool operator==(const NilValue&, const NilValue&) { return true; }
};

struct SymbolValue {
  std::string name;
  friend bool operator==(const SymbolValue&, const SymbolValue&) = default;
};

struct BlockValue;  // defined in ir.hpp

class Value {
 public:
  using Seq = std::shared_ptr<std::vector<Value>>;
  using Block = std::shared_ptr<const BlockValue>;
  using Variant = std::variant<NilValue, bool, std::int64_t, std::string,
                               SymbolValue, Seq, Block, ObjRef>;

  Value() : v_(NilValue{}) {}
  Value(bool b) : v_(b) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(SymbolValue s) : v_(std::move(s)) {}
  Value(Seq s) : v_(std::move(s)) {}
  Value(Block b) : v_(std::move(b)) {}
  Value(ObjRef r) : v_(r) {}

  static Value nil() { return Value(); }
  static Value sym(std::string n) { return Value(SymbolValue{std::move(n)}); }
  static Value seq(std::vector<Value> elems) {
    return Value(std::make_shared<std::vector<Value>>(std::move(elems)));
  }

  bool is_nil() const { return std::holds_alternative<NilValue>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_symbol() const { return std::holds_alternative<SymbolValue>(v_); }
  bool is_seq() const { return std::holds_alternative<Seq>(v_); }
  bool is_block() const { return std::holds_alternative<Block>(v_); }
  bool is_ref() const { return std::holds_alternative<ObjRef>(v_); }

  bool as_bool() const { return std::get<bool>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  const SymbolValue& as_symbol() const { return std::get<SymbolValue>(v_); }
  const Seq& as_seq() const { return std::get<Seq>(v_); }
  const Block& as_block() const { return std::get<Block>(v_); }
  ObjRef as_ref() const { return std::get<ObjRef>(v_); }

  const Variant& raw() const { return v_; }

  // Structural equality; sequences compare element-wise, blocks by identity.
  friend bool operator==(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (a.is_seq()) {
      const auto& x = *a.as_seq();
      const auto& y = *b.as_seq();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] == y[i])) return false;
      return true;
    }
    if (a.is_block()) return a.as_block() == b.as_block();
    return a.v_ == b.v_;
  }

 private:
  Variant v_;
};

}  // namespace tandem
