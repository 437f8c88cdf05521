#include "tandem/ir.hpp"

#include <cctype>
#include <cstdlib>

#include "tandem/errors.hpp"

namespace tandem {

IrPtr ir_literal(Value v) {
  auto n = std::make_shared<IrNode>();
  n->op = IrOp::Literal;
  n->literal = std::move(v);
  return n;
}

IrPtr ir_self() {
  auto n = std::make_shared<IrNode>();
  n->op = IrOp::SelfRef;
  return n;
}

IrPtr ir_arg(int index) {
  auto n = std::make_shared<IrNode>();
  n->op = IrOp::ArgRef;
  n->index = index;
  return n;
}

IrPtr ir_node(IrOp op, std::string name, std::vector<IrPtr> kids,
              IrPtr block_arg) {
  auto n = std::make_shared<IrNode>();
  n->op = op;
  n->name = std::move(name);
  n->kids = std::move(kids);
  n->block_arg = std::move(block_arg);
  return n;
}

namespace {

struct SexprToken {
  enum Kind { LParen, RParen, Atom, Text } kind;
  std::string text;
};

std::vector<SexprToken> lex(const std::string& src) {
  std::vector<SexprToken> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({SexprToken::LParen, "("});
      ++i;
      continue;
    }
    if (c == ')') {
      out.push_back({SexprToken::RParen, ")"});
      ++i;
      continue;
    }
    if (c == '"') {
      std::string s;
      ++i;
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          s += (e == 'n') ? '\n' : e;
          i += 2;
        } else {
          s += src[i++];
        }
      }
      if (i >= src.size()) fail(Err::ParseError, "unterminated string literal");
      ++i;
      out.push_back({SexprToken::Text, s});
      continue;
    }
    std::string a;
    while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) &&
           src[i] != '(' && src[i] != ')' && src[i] != '"') {
      a += src[i++];
    }
    out.push_back({SexprToken::Atom, a});
  }
  return out;
}

bool is_int_atom(const std::string& a) {
  std::size_t i = (a.size() > 1 && (a[0] == '-' || a[0] == '+')) ? 1 : 0;
  if (i >= a.size()) return false;
  for (; i < a.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(a[i]))) return false;
  return true;
}

class SexprParser {
 public:
  explicit SexprParser(std::vector<SexprToken> toks) : toks_(std::move(toks)) {}

  IrPtr parse_one() {
    IrPtr n = expr();
    if (pos_ != toks_.size())
      fail(Err::ParseError, "trailing tokens after expression");
    return n;
  }

 private:
  const SexprToken& peek() {
    if (pos_ >= toks_.size()) fail(Err::ParseError, "unexpected end of expression");
    return toks_[pos_];
  }
  SexprToken next() {
    const SexprToken& t = peek();
    ++pos_;
    return t;
  }

  IrPtr expr() {
    SexprToken t = next();
    if (t.kind == SexprToken::Text) return ir_literal(Value(t.text));
    if (t.kind == SexprToken::Atom) return atom(t.text);
    if (t.kind == SexprToken::RParen) fail(Err::ParseError, "unexpected )");
    return form();
  }

  IrPtr atom(const std::string& a) {
    if (a == "self") return ir_self();
    if (a == "true") return ir_literal(Value(true));
    if (a == "false") return ir_literal(Value(false));
    if (a == "nil") return ir_literal(Value::nil());
    if (is_int_atom(a))
      return ir_literal(Value(static_cast<std::int64_t>(std::strtoll(a.c_str(), nullptr, 10))));
    if (a.size() > 1 && a[0] == ':') return ir_literal(Value::sym(a.substr(1)));
    fail(Err::ParseError, "unknown atom: " + a);
  }

  std::string head() {
    SexprToken t = next();
    if (t.kind != SexprToken::Atom)
      fail(Err::ParseError, "expected operator atom after (");
    return t.text;
  }

  // Name position accepts a bare word or a quoted string.
  std::string name_token() {
    SexprToken t = next();
    if (t.kind == SexprToken::Atom || t.kind == SexprToken::Text) return t.text;
    fail(Err::ParseError, "expected a name");
  }

  int int_token() {
    SexprToken t = next();
    if (t.kind != SexprToken::Atom || !is_int_atom(t.text))
      fail(Err::ParseError, "expected an integer");
    return static_cast<int>(std::strtol(t.text.c_str(), nullptr, 10));
  }

  std::vector<IrPtr> rest_until_rparen(IrPtr* block_arg_out) {
    std::vector<IrPtr> kids;
    while (peek().kind != SexprToken::RParen) {
      // (blockarg <block>) may close the argument list of a send form.
      if (block_arg_out && peek().kind == SexprToken::LParen &&
          pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == SexprToken::Atom &&
          toks_[pos_ + 1].text == "blockarg") {
        next();  // (
        next();  // blockarg
        *block_arg_out = expr();
        expect_rparen();
        if (peek().kind != SexprToken::RParen)
          fail(Err::ParseError, "blockarg must close the argument list");
        break;
      }
      kids.push_back(expr());
    }
    next();  // )
    return kids;
  }

  void expect_rparen() {
    if (next().kind != SexprToken::RParen) fail(Err::ParseError, "expected )");
  }

  IrPtr form() {
    std::string h = head();
    if (h == "self") {
      expect_rparen();
      return ir_self();
    }
    if (h == "arg") {
      int idx = int_token();
      expect_rparen();
      return ir_arg(idx);
    }
    if (h == "ivar") {
      std::string nm = name_token();
      expect_rparen();
      return ir_node(IrOp::IvarGet, nm, {});
    }
    if (h == "ivset") {
      std::string nm = name_token();
      IrPtr v = expr();
      expect_rparen();
      return ir_node(IrOp::IvarSet, nm, {v});
    }
    if (h == "send") {
      IrPtr recv = expr();
      std::string sel = name_token();
      IrPtr blk;
      std::vector<IrPtr> kids = rest_until_rparen(&blk);
      kids.insert(kids.begin(), recv);
      return ir_node(IrOp::Send, sel, std::move(kids), blk);
    }
    if (h == "isend") {
      std::string sel = name_token();
      IrPtr blk;
      std::vector<IrPtr> kids = rest_until_rparen(&blk);
      return ir_node(IrOp::ISend, sel, std::move(kids), blk);
    }
    if (h == "csend") {
      std::string tok = name_token();
      IrPtr recv = expr();
      std::vector<IrPtr> kids = rest_until_rparen(nullptr);
      kids.insert(kids.begin(), recv);
      return ir_node(IrOp::CrossSend, tok, std::move(kids));
    }
    if (h == "super") {
      IrPtr blk;
      std::vector<IrPtr> kids = rest_until_rparen(&blk);
      return ir_node(IrOp::SuperSend, "", std::move(kids), blk);
    }
    if (h == "block") {
      int nparams = int_token();
      IrPtr body = expr();
      expect_rparen();
      auto n = std::make_shared<IrNode>();
      n->op = IrOp::BlockLit;
      n->index = nparams;
      n->kids.push_back(body);
      return n;
    }
    if (h == "call") {
      IrPtr target = expr();
      std::vector<IrPtr> kids = rest_until_rparen(nullptr);
      kids.insert(kids.begin(), target);
      return ir_node(IrOp::BlockCall, "", std::move(kids));
    }
    if (h == "seq") return ir_node(IrOp::SeqExpr, "", rest_until_rparen(nullptr));
    if (h == "list") return ir_node(IrOp::ListExpr, "", rest_until_rparen(nullptr));
    if (h == "concat") return ir_node(IrOp::Concat, "", rest_until_rparen(nullptr));
    if (h == "add" || h == "sub" || h == "mul" || h == "eq" || h == "textrep") {
      IrPtr a = expr();
      IrPtr b = expr();
      expect_rparen();
      IrOp op = h == "add"   ? IrOp::Add
                : h == "sub" ? IrOp::Sub
                : h == "mul" ? IrOp::Mul
                : h == "eq"  ? IrOp::Eq
                             : IrOp::TextRep;
      return ir_node(op, "", {a, b});
    }
    fail(Err::ParseError, "unknown form: " + h);
  }

  std::vector<SexprToken> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

IrPtr parse_sexpr(const std::string& text) {
  auto toks = lex(text);
  if (toks.empty()) fail(Err::ParseError, "empty expression");
  return SexprParser(std::move(toks)).parse_one();
}

}  // namespace tandem
