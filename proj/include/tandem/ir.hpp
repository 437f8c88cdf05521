#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tandem/value.hpp"

namespace tandem {

// Method-body IR. Bodies are small expression trees; the script front end
// parses them from s-expressions, bootstrap builds them directly.
//
//   42 "text" :sym true false nil      literals
//   self | (self)                      receiver
//   (arg N)                            bound parameter N
//   (ivar name) (ivset name e)         instance variable access
//   (send recv sel a... [(blockarg b)])    explicit-receiver send
//   (isend sel a... [(blockarg b)])        implicit-self send
//   (csend "@ruby1:..." recv slot...)      cross-environment call
//   (super a... [(blockarg b)])            continue lookup above the holder
//   (block nparams body)               block literal
//   (call e a...)                      invoke a block value
//   (seq e...) (list e...)
//   (concat e...) (add a b) (sub a b) (mul a b) (eq a b) (textrep s n)
enum class IrOp {
  Literal,
  SelfRef,
  ArgRef,
  IvarGet,
  IvarSet,
  Send,
  ISend,
  CrossSend,
  SuperSend,
  BlockLit,
  BlockCall,
  SeqExpr,
  ListExpr,
  Concat,
  Add,
  Sub,
  Mul,
  Eq,
  TextRep,
};

struct IrNode;
using IrPtr = std::shared_ptr<const IrNode>;

struct IrNode {
  IrOp op;
  Value literal;             // Literal
  int index = 0;             // ArgRef index, BlockLit param count
  std::string name;          // ivar name, selector, @ruby1 token
  std::vector<IrPtr> kids;   // operands; Send/CrossSend: kids[0] = receiver
  IrPtr block_arg;           // optional block argument of a send
};

IrPtr ir_literal(Value v);
IrPtr ir_self();
IrPtr ir_arg(int index);
IrPtr ir_node(IrOp op, std::string name, std::vector<IrPtr> kids,
              IrPtr block_arg = nullptr);

// Parses one s-expression. Throws Err::ParseError on malformed input.
IrPtr parse_sexpr(const std::string& text);

// A block value: parameter count plus a body evaluated in the defining
// environment with the creator's receiver as self. Wrapper plumbing may
// substitute a native callable instead of a body.
struct BlockValue {
  int nparams = 0;
  IrPtr body;
  Env env = Env::Ruby;
  Value home_self;
  std::function<Value(std::vector<Value>)> native;  // set => body ignored
};

}  // namespace tandem
