#pragma once

// Component expressions for metrics and potentials.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' is right-associative and binds tighter than a leading minus, so
// "-r^2" is -(r^2) and "2^-1" is 0.5.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tmu/error.hpp"
#include "tmu/jet.hpp"

namespace tmu {

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ParseError : public ConfigurationError {
 public:
  ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected,
             std::string source);
  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }
  // Message plus the source line with a caret marker under the span.
  std::string annotated() const;

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
  std::string source_;
};

enum class UnaryFn { kNeg, kSqrt, kSin, kCos, kExp, kLn, kAbs };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

struct ExprNode {
  enum class Kind { kConstant, kSymbol, kUnary, kBinary };
  Kind kind;
  double constant = 0.0;
  std::string symbol;
  UnaryFn fn = UnaryFn::kNeg;
  BinaryOp op = BinaryOp::kAdd;
  std::shared_ptr<const ExprNode> lhs;  // unary child or binary left
  std::shared_ptr<const ExprNode> rhs;
  SourceSpan span;
};

class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const ExprNode> root, std::string source = {});

  const ExprNode& root() const { return *root_; }
  const std::string& source() const { return source_; }
  bool is_zero_constant() const;

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

using JetEnv = std::map<std::string, Jet, std::less<>>;

Expr parse(std::string_view source);

// Symbols must be bound in env; all jets in env share one layout.
Jet evaluate(const Expr& e, const JetEnv& env);
// Plain floating-point evaluation.
double evaluate(const Expr& e, const std::map<std::string, double, std::less<>>& env);

std::set<std::string> free_symbols(const Expr& e);

// Canonical text: binary operations fully parenthesised, constants with 17
// significant digits. parse(print(e)) prints identically.
std::string print(const Expr& e);

// Evaluation error for an unbound symbol.
class UnboundSymbol : public ConfigurationError {
 public:
  explicit UnboundSymbol(const std::string& name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

}  // namespace tmu
