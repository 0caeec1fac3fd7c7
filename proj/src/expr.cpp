#include "tmu/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <utility>

namespace tmu {

ParseError::ParseError(const std::string& message, SourceSpan span,
                       std::vector<std::string> expected, std::string source)
    : ConfigurationError(message), span_(span), expected_(std::move(expected)),
      source_(std::move(source)) {}

std::string ParseError::annotated() const {
  std::ostringstream os;
  os << what() << " at " << span_.begin << ".." << span_.end;
  if (!expected_.empty()) {
    os << "; expected one of:";
    for (const auto& e : expected_) os << ' ' << e;
  }
  os << "\n  " << source_ << "\n  " << std::string(span_.begin, ' ')
     << std::string(std::max<std::size_t>(1, span_.end - span_.begin), '^');
  return os.str();
}

UnboundSymbol::UnboundSymbol(const std::string& name)
    : ConfigurationError("unbound symbol '" + name + "'"), name_(name) {}

Expr::Expr() {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::kConstant;
  root_ = n;
  source_ = "0";
}

Expr::Expr(std::shared_ptr<const ExprNode> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

bool Expr::is_zero_constant() const {
  return root_->kind == ExprNode::Kind::kConstant && root_->constant == 0.0;
}

// ---------------------------------------------------------------------------
// Lexer and recursive-descent parser.

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::kNumber: return "number";
    case Tok::kIdent: return "identifier";
    case Tok::kPlus: return "'+'";
    case Tok::kMinus: return "'-'";
    case Tok::kStar: return "'*'";
    case Tok::kSlash: return "'/'";
    case Tok::kCaret: return "'^'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  SourceSpan span;
  double number = 0.0;
  std::string text;
};

const std::map<std::string, UnaryFn, std::less<>>& functions() {
  static const std::map<std::string, UnaryFn, std::less<>> f{
      {"sqrt", UnaryFn::kSqrt}, {"sin", UnaryFn::kSin}, {"cos", UnaryFn::kCos},
      {"exp", UnaryFn::kExp},   {"ln", UnaryFn::kLn},   {"abs", UnaryFn::kAbs}};
  return f;
}

std::vector<std::string> function_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : functions()) out.push_back(k);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  std::shared_ptr<const ExprNode> parse_all() {
    auto e = expr();
    if (cur_.kind != Tok::kEnd) {
      fail("unexpected " + describe(cur_), cur_.span, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    }
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
  int depth_ = 0;

  [[noreturn]] void fail(const std::string& msg, SourceSpan span, std::vector<std::string> expected) {
    throw ParseError(msg, span, std::move(expected), std::string(src_));
  }

  std::string describe(const Token& t) const {
    if (t.kind == Tok::kEnd) return "end of input";
    return "'" + std::string(src_.substr(t.span.begin, t.span.end - t.span.begin)) + "'";
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.span.begin = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::kEnd;
      t.span.end = pos_;
      cur_ = t;
      return;
    }
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      ++pos_;
    };
    switch (c) {
      case '+': single(Tok::kPlus); break;
      case '-': single(Tok::kMinus); break;
      case '*': single(Tok::kStar); break;
      case '/': single(Tok::kSlash); break;
      case '^': single(Tok::kCaret); break;
      case '(': single(Tok::kLParen); break;
      case ')': single(Tok::kRParen); break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          lex_number(t);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
          }
          t.kind = Tok::kIdent;
          t.text = std::string(src_.substr(t.span.begin, pos_ - t.span.begin));
        } else {
          fail("unexpected character", {pos_, pos_ + 1}, {"number", "identifier", "'('", "'-'"});
        }
    }
    t.span.end = pos_;
    cur_ = t;
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    bool digits = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) fail("malformed number", {start, pos_}, {"digit"});
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
        pos_ = p;
      } else {
        fail("malformed exponent in number", {start, p}, {"digit"});
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    t.kind = Tok::kNumber;
    t.number = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(t.number)) fail("number out of range", {start, pos_}, {});
  }

  void expect(Tok k) {
    if (cur_.kind != k) fail("unexpected " + describe(cur_), cur_.span, {tok_name(k)});
    advance();
  }

  static std::shared_ptr<ExprNode> binary(BinaryOp op, std::shared_ptr<const ExprNode> l,
                                          std::shared_ptr<const ExprNode> r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::kBinary;
    n->op = op;
    n->span = {l->span.begin, r->span.end};
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > 256) p.fail("expression nested too deeply", p.cur_.span, {});
    }
    ~DepthGuard() { --p.depth_; }
  };

  std::shared_ptr<const ExprNode> expr() {
    DepthGuard guard(*this);
    auto lhs = term();
    while (cur_.kind == Tok::kPlus || cur_.kind == Tok::kMinus) {
      const BinaryOp op = cur_.kind == Tok::kPlus ? BinaryOp::kAdd : BinaryOp::kSub;
      advance();
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  std::shared_ptr<const ExprNode> term() {
    auto lhs = unary();
    while (cur_.kind == Tok::kStar || cur_.kind == Tok::kSlash) {
      const BinaryOp op = cur_.kind == Tok::kStar ? BinaryOp::kMul : BinaryOp::kDiv;
      advance();
      lhs = binary(op, lhs, unary());
    }
    return lhs;
  }

  std::shared_ptr<const ExprNode> unary() {
    DepthGuard guard(*this);
    if (cur_.kind == Tok::kMinus) {
      const std::size_t begin = cur_.span.begin;
      advance();
      auto child = unary();
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::kUnary;
      n->fn = UnaryFn::kNeg;
      n->span = {begin, child->span.end};
      n->lhs = std::move(child);
      return n;
    }
    return power();
  }

  std::shared_ptr<const ExprNode> power() {
    auto base = primary();
    if (cur_.kind == Tok::kCaret) {
      advance();
      return binary(BinaryOp::kPow, base, unary());
    }
    return base;
  }

  std::shared_ptr<const ExprNode> primary() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::kNumber: {
        advance();
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::kConstant;
        n->constant = t.number;
        n->span = t.span;
        return n;
      }
      case Tok::kIdent: {
        advance();
        if (cur_.kind == Tok::kLParen) {
          auto it = functions().find(t.text);
          if (it == functions().end()) {
            fail("unknown function '" + t.text + "'", t.span, function_names());
          }
          advance();
          auto arg = expr();
          const std::size_t end = cur_.span.end;
          expect(Tok::kRParen);
          auto n = std::make_shared<ExprNode>();
          n->kind = ExprNode::Kind::kUnary;
          n->fn = it->second;
          n->span = {t.span.begin, end};
          n->lhs = std::move(arg);
          return n;
        }
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::kSymbol;
        n->symbol = t.text;
        n->span = t.span;
        return n;
      }
      case Tok::kLParen: {
        advance();
        auto inner = expr();
        expect(Tok::kRParen);
        return inner;
      }
      default:
        fail("unexpected " + describe(t), t.span, {"number", "identifier", "'('", "'-'"});
    }
  }
};

// ---------------------------------------------------------------------------
// Evaluation.

struct JetEvaluator {
  const JetEnv& env;
  const JetLayout* layout = nullptr;

  Jet constant(double v) const { return Jet(*layout, v); }

  Jet eval(const ExprNode& n) const {
    switch (n.kind) {
      case ExprNode::Kind::kConstant:
        return constant(n.constant);
      case ExprNode::Kind::kSymbol: {
        auto it = env.find(n.symbol);
        if (it != env.end()) return it->second;
        if (n.symbol == "pi") return constant(std::numbers::pi);
        throw UnboundSymbol(n.symbol);
      }
      case ExprNode::Kind::kUnary: {
        Jet a = eval(*n.lhs);
        switch (n.fn) {
          case UnaryFn::kNeg: return -a;
          case UnaryFn::kSqrt: return sqrt(a);
          case UnaryFn::kSin: return sin(a);
          case UnaryFn::kCos: return cos(a);
          case UnaryFn::kExp: return exp(a);
          case UnaryFn::kLn: return log(a);
          case UnaryFn::kAbs: return abs(a);
        }
        break;
      }
      case ExprNode::Kind::kBinary: {
        Jet a = eval(*n.lhs);
        Jet b = eval(*n.rhs);
        switch (n.op) {
          case BinaryOp::kAdd: return a + b;
          case BinaryOp::kSub: return a - b;
          case BinaryOp::kMul: return a * b;
          case BinaryOp::kDiv: return a / b;
          case BinaryOp::kPow: {
            bool constant_exponent = true;
            auto c = b.coefficients();
            for (std::size_t i = 1; i < c.size(); ++i) constant_exponent &= c[i] == 0.0;
            if (constant_exponent) return pow(a, b.value());
            if (a.value() <= 0.0) {
              throw SingularEvaluation(
                  "variable exponent needs a positive base, got " + std::to_string(a.value()),
                  a.value());
            }
            return exp(b * log(a));
          }
        }
        break;
      }
    }
    throw UsageError("corrupt expression node");
  }
};

double eval_double(const ExprNode& n, const std::map<std::string, double, std::less<>>& env) {
  switch (n.kind) {
    case ExprNode::Kind::kConstant:
      return n.constant;
    case ExprNode::Kind::kSymbol: {
      auto it = env.find(n.symbol);
      if (it != env.end()) return it->second;
      if (n.symbol == "pi") return std::numbers::pi;
      throw UnboundSymbol(n.symbol);
    }
    case ExprNode::Kind::kUnary: {
      const double a = eval_double(*n.lhs, env);
      switch (n.fn) {
        case UnaryFn::kNeg: return -a;
        case UnaryFn::kSqrt:
          if (a < 0) throw SingularEvaluation("sqrt of negative value " + std::to_string(a), a);
          return std::sqrt(a);
        case UnaryFn::kSin: return std::sin(a);
        case UnaryFn::kCos: return std::cos(a);
        case UnaryFn::kExp: return std::exp(a);
        case UnaryFn::kLn:
          if (a <= 0) throw SingularEvaluation("ln of non-positive value " + std::to_string(a), a);
          return std::log(a);
        case UnaryFn::kAbs: return std::abs(a);
      }
      break;
    }
    case ExprNode::Kind::kBinary: {
      const double a = eval_double(*n.lhs, env);
      const double b = eval_double(*n.rhs, env);
      switch (n.op) {
        case BinaryOp::kAdd: return a + b;
        case BinaryOp::kSub: return a - b;
        case BinaryOp::kMul: return a * b;
        case BinaryOp::kDiv:
          if (b == 0.0) throw SingularEvaluation("division by zero", b);
          return a / b;
        case BinaryOp::kPow:
          if (a < 0 && b != std::floor(b)) {
            throw SingularEvaluation("non-integer power of negative value " + std::to_string(a), a);
          }
          if (a == 0 && b < 0) throw SingularEvaluation("negative power of zero", a);
          return std::pow(a, b);
      }
      break;
    }
  }
  throw UsageError("corrupt expression node");
}

void collect(const ExprNode& n, std::set<std::string>& out) {
  switch (n.kind) {
    case ExprNode::Kind::kConstant: return;
    case ExprNode::Kind::kSymbol: out.insert(n.symbol); return;
    case ExprNode::Kind::kUnary: collect(*n.lhs, out); return;
    case ExprNode::Kind::kBinary:
      collect(*n.lhs, out);
      collect(*n.rhs, out);
      return;
  }
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::kConstant:
      if (n.constant < 0) {
        out += "(-" + number_text(-n.constant) + ")";
      } else {
        out += number_text(n.constant);
      }
      return;
    case ExprNode::Kind::kSymbol:
      out += n.symbol;
      return;
    case ExprNode::Kind::kUnary: {
      static const char* names[] = {"-", "sqrt", "sin", "cos", "exp", "ln", "abs"};
      if (n.fn == UnaryFn::kNeg) {
        out += "(-";
        print_node(*n.lhs, out);
        out += ")";
      } else {
        out += names[static_cast<int>(n.fn)];
        out += "(";
        print_node(*n.lhs, out);
        out += ")";
      }
      return;
    }
    case ExprNode::Kind::kBinary: {
      static const char* ops[] = {" + ", " - ", " * ", " / ", "^"};
      out += "(";
      print_node(*n.lhs, out);
      out += ops[static_cast<int>(n.op)];
      print_node(*n.rhs, out);
      out += ")";
      return;
    }
  }
}

const JetLayout* find_layout(const ExprNode& n, const JetEnv& env) {
  // Any bound jet fixes the layout; the expression's own constants adopt it.
  (void)n;
  for (const auto& [k, v] : env) {
    if (v.has_layout()) return &v.layout();
  }
  return nullptr;
}

}  // namespace

Expr parse(std::string_view source) {
  Parser p(source);
  return Expr(p.parse_all(), std::string(source));
}

Jet evaluate(const Expr& e, const JetEnv& env) {
  JetEvaluator ev{env};
  ev.layout = find_layout(e.root(), env);
  if (!ev.layout) ev.layout = &JetLayout::get(0, 1);
  return ev.eval(e.root());
}

double evaluate(const Expr& e, const std::map<std::string, double, std::less<>>& env) {
  return eval_double(e.root(), env);
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect(e.root(), out);
  return out;
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

}  // namespace tmu
