#pragma once

// Scalar expression language for matrix entries, forcing terms and custom
// shift maps.
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = ("-" | "+") unary | power ;
//   power   = primary [ "^" unary ] ;           (* right associative *)
//   primary = number | constant | variable | function "(" expr ")" | "(" expr ")" ;
//   function = "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt" | "abs" | "floor" ;
//   constant = "pi" | "e" ;
//   variable = identifier ;                      (* t, or a named parameter *)

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "tsfloquet/errors.hpp"
#include "tsfloquet/types.hpp"

namespace tsfloquet {

using ParamMap = std::map<std::string, double, std::less<>>;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Floor };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct NumberNode {
  double value;
};
struct VariableNode {
  std::string name;
};
struct ConstantNode {
  std::string name;
  double value;
};
struct NegateNode {
  ExprNodePtr operand;
};
struct BinaryNode {
  BinaryOp op;
  ExprNodePtr lhs;
  ExprNodePtr rhs;
};
struct CallNode {
  Function fn;
  ExprNodePtr arg;
};

struct ExprNode {
  std::variant<NumberNode, VariableNode, ConstantNode, NegateNode, BinaryNode, CallNode> data;
  std::size_t position = 0;
};

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  static Expr parse(std::string_view source);
  static Expr constant(double value);

  /// Evaluate at time t. Named variables other than t resolve through params.
  [[nodiscard]] double eval(double t, const ParamMap& params = {}) const;

  /// Fully parenthesised rendering that parses back to the same tree.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] const ExprNode& root() const { return *root_; }
  [[nodiscard]] const std::string& source() const { return source_; }
  [[nodiscard]] std::set<std::string> variables() const;

  /// Closure over a fixed parameter map.
  [[nodiscard]] ScalarFn bind(ParamMap params) const;

  /// Structural equality; source positions are ignored.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr(ExprNodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  ExprNodePtr root_;
  std::string source_;
};

std::string_view to_string(Function fn) noexcept;

}  // namespace tsfloquet
