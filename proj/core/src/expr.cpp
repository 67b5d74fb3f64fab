#include "tsfloquet/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace tsfloquet {
namespace {

constexpr std::array<std::pair<std::string_view, Function>, 8> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"exp", Function::Exp},
    {"ln", Function::Ln},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
    {"floor", Function::Floor},
}};

ExprNodePtr make(std::size_t pos, auto&& payload) {
  auto node = std::make_shared<ExprNode>();
  node->data = std::forward<decltype(payload)>(payload);
  node->position = pos;
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprNodePtr parse() {
    auto root = expression();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return root;
  }

 private:
  [[noreturn]] void fail(const char* expected) const {
    throw SyntaxError(pos_, expected, std::string(src_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprNodePtr expression() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(at, BinaryNode{BinaryOp::Add, lhs, term()});
      } else if (accept('-')) {
        lhs = make(at, BinaryNode{BinaryOp::Sub, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr term() {
    auto lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(at, BinaryNode{BinaryOp::Mul, lhs, unary()});
      } else if (accept('/')) {
        lhs = make(at, BinaryNode{BinaryOp::Div, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return make(at, NegateNode{unary()});
    if (accept('+')) return unary();
    return power();
  }

  ExprNodePtr power() {
    auto base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) return make(at, BinaryNode{BinaryOp::Pow, base, unary()});
    return base;
  }

  ExprNodePtr primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) fail("number, identifier or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expression();
      if (!accept(')')) fail("')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* first = src_.data() + pos_;
      const char* last = src_.data() + src_.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr == first) fail("number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return make(at, NumberNode{value});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      std::string name(src_.substr(pos_, end - pos_));
      pos_ = end;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        for (const auto& [fname, fn] : kFunctions) {
          if (fname == name) {
            ++pos_;
            auto arg = expression();
            if (!accept(')')) fail("')'");
            return make(at, CallNode{fn, arg});
          }
        }
        throw Error(ErrorCode::UnknownFunction,
                    "'" + name + "' at position " + std::to_string(at) + " in \"" +
                        std::string(src_) + "\"");
      }
      for (const auto& entry : kFunctions) {
        if (entry.first == name) fail("'(' after function name");
      }
      if (name == "pi") return make(at, ConstantNode{name, std::numbers::pi});
      if (name == "e") return make(at, ConstantNode{name, std::numbers::e});
      return make(at, VariableNode{std::move(name)});
    }
    fail("number, identifier or '('");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_error(const char* what, double arg) {
  throw Error(ErrorCode::DomainError, std::string(what) + " of " + std::to_string(arg));
}

double evaluate(const ExprNode& node, double t, const ParamMap& params) {
  return std::visit(
      [&](const auto& n) -> double {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, NumberNode>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, ConstantNode>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, VariableNode>) {
          if (n.name == "t") return t;
          if (auto it = params.find(n.name); it != params.end()) return it->second;
          throw Error(ErrorCode::UnboundVariable, "'" + n.name + "'");
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return -evaluate(*n.operand, t, params);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          const double a = evaluate(*n.lhs, t, params);
          const double b = evaluate(*n.rhs, t, params);
          switch (n.op) {
            case BinaryOp::Add: return a + b;
            case BinaryOp::Sub: return a - b;
            case BinaryOp::Mul: return a * b;
            case BinaryOp::Div:
              if (b == 0.0) domain_error("division", a);
              return a / b;
            case BinaryOp::Pow: {
              const double r = std::pow(a, b);
              if (!std::isfinite(r)) domain_error("power", a);
              return r;
            }
          }
          return 0.0;
        } else {
          const double x = evaluate(*n.arg, t, params);
          switch (n.fn) {
            case Function::Sin: return std::sin(x);
            case Function::Cos: return std::cos(x);
            case Function::Tan: return std::tan(x);
            case Function::Exp: return std::exp(x);
            case Function::Ln:
              if (!(x > 0.0)) domain_error("ln", x);
              return std::log(x);
            case Function::Sqrt:
              if (x < 0.0) domain_error("sqrt", x);
              return std::sqrt(x);
            case Function::Abs: return std::abs(x);
            case Function::Floor: return std::floor(x);
          }
          return 0.0;
        }
      },
      node.data);
}

void render(const ExprNode& node, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, NumberNode>) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.17g", n.value);
          out += buf;
        } else if constexpr (std::is_same_v<N, ConstantNode>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, VariableNode>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          out += "(-";
          render(*n.operand, out);
          out += ')';
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
          out += '(';
          render(*n.lhs, out);
          out += kOps[static_cast<int>(n.op)];
          render(*n.rhs, out);
          out += ')';
        } else {
          out += to_string(n.fn);
          out += '(';
          render(*n.arg, out);
          out += ')';
        }
      },
      node.data);
}

bool same(const ExprNode& a, const ExprNode& b) {
  if (a.data.index() != b.data.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(b.data);
        if constexpr (std::is_same_v<N, NumberNode>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<N, ConstantNode> || std::is_same_v<N, VariableNode>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return same(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          return x.op == y.op && same(*x.lhs, *y.lhs) && same(*x.rhs, *y.rhs);
        } else {
          return x.fn == y.fn && same(*x.arg, *y.arg);
        }
      },
      a.data);
}

void collect(const ExprNode& node, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VariableNode>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          collect(*n.operand, out);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          collect(*n.lhs, out);
          collect(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, CallNode>) {
          collect(*n.arg, out);
        }
      },
      node.data);
}

}  // namespace

std::string_view to_string(Function fn) noexcept {
  for (const auto& [name, f] : kFunctions) {
    if (f == fn) return name;
  }
  return "?";
}

Expr Expr::parse(std::string_view source) {
  Parser p(source);
  return Expr(p.parse(), std::string(source));
}

Expr Expr::constant(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return Expr(make(0, NumberNode{value}), buf);
}

double Expr::eval(double t, const ParamMap& params) const {
  return evaluate(*root_, t, params);
}

std::string Expr::to_string() const {
  std::string out;
  render(*root_, out);
  return out;
}

std::set<std::string> Expr::variables() const {
  std::set<std::string> out;
  collect(*root_, out);
  return out;
}

ScalarFn Expr::bind(ParamMap params) const {
  return [root = root_, params = std::move(params)](double t) {
    return evaluate(*root, t, params);
  };
}

bool operator==(const Expr& a, const Expr& b) { return same(*a.root_, *b.root_); }

}  // namespace tsfloquet
