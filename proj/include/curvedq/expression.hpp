#pragma once

// Arithmetic expressions over named variables: + - * / ^, unary minus,
// sin cos tan sinh cosh tanh exp log sqrt abs, and the constant pi.

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace curvedq {

class Expression {
 public:
  /// Throws ConfigError with the column of the offending token.
  static Expression parse(const std::string& text, std::vector<std::string> variables);

  /// Values are given in the order of the variable list passed to parse().
  double operator()(std::span<const double> values) const;
  double operator()(std::initializer_list<double> values) const {
    return (*this)(std::span<const double>(values.begin(), values.size()));
  }

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace curvedq
