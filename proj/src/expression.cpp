#include "curvedq/expression.hpp"

#include "curvedq/errors.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

namespace curvedq {

struct Expression::Node {
  enum class Kind { number, variable, unary_minus, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  std::size_t slot = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(std::span<const double> vars) const {
    switch (kind) {
      case Kind::number:
        return value;
      case Kind::variable:
        return vars[slot];
      case Kind::unary_minus:
        return -lhs->eval(vars);
      case Kind::add:
        return lhs->eval(vars) + rhs->eval(vars);
      case Kind::sub:
        return lhs->eval(vars) - rhs->eval(vars);
      case Kind::mul:
        return lhs->eval(vars) * rhs->eval(vars);
      case Kind::div:
        return lhs->eval(vars) / rhs->eval(vars);
      case Kind::pow:
        return std::pow(lhs->eval(vars), rhs->eval(vars));
      case Kind::call:
        return fn(lhs->eval(vars));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

const std::map<std::string, double (*)(double)>& functions() {
  static const std::map<std::string, double (*)(double)> table{
      {"sin", [](double x) { return std::sin(x); }},
      {"cos", [](double x) { return std::cos(x); }},
      {"tan", [](double x) { return std::tan(x); }},
      {"sinh", [](double x) { return std::sinh(x); }},
      {"cosh", [](double x) { return std::cosh(x); }},
      {"tanh", [](double x) { return std::tanh(x); }},
      {"exp", [](double x) { return std::exp(x); }},
      {"log", [](double x) { return std::log(x); }},
      {"sqrt", [](double x) { return std::sqrt(x); }},
      {"abs", [](double x) { return std::abs(x); }},
  };
  return table;
}

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "', column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::unary_minus, unary());
    if (accept('+')) return unary();
    return power();
  }

  // Right associative; the exponent may carry its own sign.
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = s_.substr(start, pos_ - start);
      if (auto f = functions().find(name); f != functions().end()) {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::call;
        n->fn = f->second;
        n->lhs = arg;
        return n;
      }
      auto n = std::make_shared<Expression::Node>();
      if (name == "pi") {
        n->kind = Kind::number;
        n->value = std::numbers::pi;
        return n;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          n->kind = Kind::variable;
          n->slot = i;
          return n;
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = text;
  e.variables_ = std::move(variables);
  e.root_ = Parser(e.text_, e.variables_).parse();
  return e;
}

double Expression::operator()(std::span<const double> values) const {
  if (values.size() != variables_.size()) {
    throw ConfigError("expression '" + text_ + "' expects " + std::to_string(variables_.size()) +
                      " values");
  }
  return root_->eval(values);
}

}  // namespace curvedq
