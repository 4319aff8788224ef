#ifndef CRN_EXPR_HPP
#define CRN_EXPR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "crn/common.hpp"

namespace crn {

/* Arithmetic expressions over one variable `x`, used for rate factors.
 *
 *   expr    := sum [ (< | <= | > | >= | == | !=) sum ]     comparisons give 0/1
 *   sum     := term { (+|-) term }
 *   term    := unary { (*|/) unary }
 *   unary   := - unary | power
 *   power   := primary [ ^ unary ]                          right associative
 *   primary := number | pi | x | name ( expr ) | ( expr )
 *
 * Functions: sin cos exp log sqrt floor ind.  ind(e) is 1 when e is nonzero
 * (so ind(x > 1) is the usual indicator) and 0 otherwise.
 */
class Expression {
 public:
  Expression() = default;

  /// Parse; throws ParseError with a 1-based column on bad input.
  static Expression parse(const std::string& text);

  double eval(double x) const;
  bool valid() const { return root_ >= 0; }
  const std::string& text() const { return text_; }

 private:
  enum class Op : std::uint8_t {
    Const, Var, Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Exp, Log, Sqrt, Floor, Ind,
    Lt, Le, Gt, Ge, Eq, Ne,
  };
  struct Node {
    Op op;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  double eval_node(int node, double x) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string text_;

  friend class ExpressionParser;
};

}  // namespace crn

#endif
