#include "crn/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace crn {

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text, Expression& out)
      : s_(text), out_(out) {}

  void run() {
    out_.text_ = s_;
    out_.root_ = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression error at column " + std::to_string(pos_ + 1) +
                         ": " + msg,
                     1, static_cast<int>(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool consume_str(const char* t) {
    skip_ws();
    size_t n = std::char_traits<char>::length(t);
    if (s_.compare(pos_, n, t) == 0) {
      pos_ += n;
      return true;
    }
    return false;
  }

  int add(Op op, double v = 0.0, int l = -1, int r = -1) {
    out_.nodes_.push_back({op, v, l, r});
    return static_cast<int>(out_.nodes_.size() - 1);
  }

  int parse_expr() {
    int lhs = parse_sum();
    skip_ws();
    // single optional comparison, lowest precedence
    struct {
      const char* tok;
      Op op;
    } cmps[] = {{"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq},
                {"!=", Op::Ne}, {"<", Op::Lt},  {">", Op::Gt}};
    for (auto& c : cmps)
      if (consume_str(c.tok)) return add(c.op, 0.0, lhs, parse_sum());
    return lhs;
  }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = add(Op::Add, 0.0, lhs, parse_term());
      else if (consume('-'))
        lhs = add(Op::Sub, 0.0, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (consume('*'))
        lhs = add(Op::Mul, 0.0, lhs, parse_unary());
      else if (consume('/'))
        lhs = add(Op::Div, 0.0, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (consume('-')) return add(Op::Neg, 0.0, parse_unary());
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (consume('^')) return add(Op::Pow, 0.0, base, parse_unary());
    return base;
  }

  int parse_primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    if (c == '\0') fail("unexpected end of expression");
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<size_t>(end - begin);
    return add(Op::Const, v);
  }

  int parse_name() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "x") return add(Op::Var);
    if (name == "pi") return add(Op::Const, M_PI);
    Op fn;
    if (name == "sin") fn = Op::Sin;
    else if (name == "cos") fn = Op::Cos;
    else if (name == "exp") fn = Op::Exp;
    else if (name == "log") fn = Op::Log;
    else if (name == "sqrt") fn = Op::Sqrt;
    else if (name == "floor") fn = Op::Floor;
    else if (name == "ind") fn = Op::Ind;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!consume('(')) fail("expected '(' after '" + name + "'");
    int arg = parse_expr();
    if (!consume(')')) fail("expected ')'");
    return add(fn, 0.0, arg);
  }

  const std::string& s_;
  size_t pos_ = 0;
  Expression& out_;
};

Expression Expression::parse(const std::string& text) {
  Expression e;
  ExpressionParser(text, e).run();
  return e;
}

double Expression::eval(double x) const {
  if (!valid()) throw Error("eval() on an empty expression");
  return eval_node(root_, x);
}

double Expression::eval_node(int node, double x) const {
  const Node& n = nodes_[static_cast<size_t>(node)];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Add: return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case Op::Sub: return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case Op::Mul: return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case Op::Div: return eval_node(n.lhs, x) / eval_node(n.rhs, x);
    case Op::Pow: return std::pow(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case Op::Neg: return -eval_node(n.lhs, x);
    case Op::Sin: return std::sin(eval_node(n.lhs, x));
    case Op::Cos: return std::cos(eval_node(n.lhs, x));
    case Op::Exp: return std::exp(eval_node(n.lhs, x));
    case Op::Log: return std::log(eval_node(n.lhs, x));
    case Op::Sqrt: return std::sqrt(eval_node(n.lhs, x));
    case Op::Floor: return std::floor(eval_node(n.lhs, x));
    case Op::Ind: return eval_node(n.lhs, x) != 0.0 ? 1.0 : 0.0;
    case Op::Lt: return eval_node(n.lhs, x) < eval_node(n.rhs, x) ? 1.0 : 0.0;
    case Op::Le: return eval_node(n.lhs, x) <= eval_node(n.rhs, x) ? 1.0 : 0.0;
    case Op::Gt: return eval_node(n.lhs, x) > eval_node(n.rhs, x) ? 1.0 : 0.0;
    case Op::Ge: return eval_node(n.lhs, x) >= eval_node(n.rhs, x) ? 1.0 : 0.0;
    case Op::Eq: return eval_node(n.lhs, x) == eval_node(n.rhs, x) ? 1.0 : 0.0;
    case Op::Ne: return eval_node(n.lhs, x) != eval_node(n.rhs, x) ? 1.0 : 0.0;
  }
  throw Error("corrupt expression node");
}

}  // namespace crn
