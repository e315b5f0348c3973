#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace finsler {

// Parse failure with the byte offset into the original input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/* Scalar expressions over chart coordinates, used for conformal factors.
 *
 *   expr   := term  (('+'|'-') term)*
 *   term   := unary (('*'|'/') unary)*
 *   unary  := '-' unary | power
 *   power  := atom ('^' unary)?            right associative
 *   atom   := number | var | func '(' expr ')' | '(' expr ')'
 *   var    := 'x' digits                   x1 is the first coordinate
 *   func   := 'sin' | 'cos' | 'exp' | 'log'
 */
class SigmaExpr {
  enum class Kind { Num, Var, Neg, Sin, Cos, Exp, Log, Add, Sub, Mul, Div, Pow };

  struct Node {
    Kind kind;
    double num = 0.0;
    int var = 0;  // zero-based coordinate index
    std::shared_ptr<const Node> a, b;
  };

 public:
  SigmaExpr() = default;

  static SigmaExpr parse(std::string_view src, std::size_t base_offset = 0) {
    Parser p{src, 0, base_offset};
    SigmaExpr e;
    e.root_ = p.expr();
    p.skip_ws();
    if (p.pos != src.size())
      throw ParseError("unexpected trailing input in expression", base_offset + p.pos);
    return e;
  }

  bool valid() const { return root_ != nullptr; }

  // Highest coordinate index used, 1-based; 0 for constant expressions.
  int max_var() const { return max_var(root_.get()); }

  template <class S>
  S eval(std::span<const S> x) const {
    return eval_node<S>(root_.get(), x);
  }

  double eval_at(std::span<const double> x) const { return eval<double>(x); }

  std::string render() const { return render_node(root_.get(), 0); }

 private:
  std::shared_ptr<const Node> root_;

  using P = std::shared_ptr<const Node>;

  static P make(Kind k, P a = nullptr, P b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;
    std::size_t base;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
      skip_ws();
      return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
      if (peek() == c) {
        ++pos;
        return true;
      }
      return false;
    }

    P expr() {
      P lhs = term();
      for (;;) {
        if (eat('+')) lhs = make(Kind::Add, lhs, term());
        else if (eat('-')) lhs = make(Kind::Sub, lhs, term());
        else return lhs;
      }
    }

    P term() {
      P lhs = unary();
      for (;;) {
        if (eat('*')) lhs = make(Kind::Mul, lhs, unary());
        else if (eat('/')) lhs = make(Kind::Div, lhs, unary());
        else return lhs;
      }
    }

    P unary() {
      if (eat('-')) return make(Kind::Neg, unary());
      return power();
    }

    P power() {
      P base_node = atom();
      if (eat('^')) return make(Kind::Pow, base_node, unary());
      return base_node;
    }

    P atom() {
      skip_ws();
      if (pos >= s.size()) throw ParseError("unexpected end of expression", base + pos);
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        P inner = expr();
        if (!eat(')')) throw ParseError("expected ')'", base + pos);
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
      throw ParseError(std::string("unexpected character '") + c + "' in expression",
                       base + pos);
    }

    P number() {
      const std::size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
              s[pos] == 'e' || s[pos] == 'E' ||
              ((s[pos] == '+' || s[pos] == '-') && pos > start &&
               (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
        ++pos;
      try {
        std::size_t used = 0;
        const std::string text(s.substr(start, pos - start));
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Num;
        n->num = v;
        return n;
      } catch (const std::exception&) {
        throw ParseError("malformed number", base + start);
      }
    }

    P identifier() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string_view name = s.substr(start, pos - start);
      if (name.size() >= 2 && name[0] == 'x') {
        bool digits = true;
        for (std::size_t i = 1; i < name.size(); ++i)
          digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
        if (digits) {
          const int idx = std::stoi(std::string(name.substr(1)));
          if (idx < 1) throw ParseError("coordinate indices start at x1", base + start);
          auto n = std::make_shared<Node>();
          n->kind = Kind::Var;
          n->var = idx - 1;
          return n;
        }
      }
      Kind k;
      if (name == "sin") k = Kind::Sin;
      else if (name == "cos") k = Kind::Cos;
      else if (name == "exp") k = Kind::Exp;
      else if (name == "log") k = Kind::Log;
      else
        throw ParseError("unknown identifier '" + std::string(name) + "'", base + start);
      if (!eat('(')) throw ParseError("expected '(' after function name", base + pos);
      P arg = expr();
      if (!eat(')')) throw ParseError("expected ')'", base + pos);
      return make(k, arg);
    }
  };

  static int max_var(const Node* n) {
    if (!n) return 0;
    int m = n->kind == Kind::Var ? n->var + 1 : 0;
    m = std::max(m, max_var(n->a.get()));
    return std::max(m, max_var(n->b.get()));
  }

  template <class S>
  static S eval_node(const Node* n, std::span<const S> x) {
    switch (n->kind) {
      case Kind::Num: return S(n->num);
      case Kind::Var: return x[static_cast<std::size_t>(n->var)];
      case Kind::Neg: return -eval_node<S>(n->a.get(), x);
      case Kind::Sin: return sin(eval_node<S>(n->a.get(), x));
      case Kind::Cos: return cos(eval_node<S>(n->a.get(), x));
      case Kind::Exp: return exp(eval_node<S>(n->a.get(), x));
      case Kind::Log: return log(eval_node<S>(n->a.get(), x));
      case Kind::Add: return eval_node<S>(n->a.get(), x) + eval_node<S>(n->b.get(), x);
      case Kind::Sub: return eval_node<S>(n->a.get(), x) - eval_node<S>(n->b.get(), x);
      case Kind::Mul: return eval_node<S>(n->a.get(), x) * eval_node<S>(n->b.get(), x);
      case Kind::Div: return eval_node<S>(n->a.get(), x) / eval_node<S>(n->b.get(), x);
      case Kind::Pow: return pow(eval_node<S>(n->a.get(), x), eval_node<S>(n->b.get(), x));
    }
    throw std::logic_error("unreachable expression node");
  }

  static int precedence(Kind k) {
    switch (k) {
      case Kind::Add:
      case Kind::Sub: return 1;
      case Kind::Mul:
      case Kind::Div: return 2;
      case Kind::Neg: return 3;
      case Kind::Pow: return 4;
      default: return 5;
    }
  }

  static std::string render_node(const Node* n, int parent_prec) {
    std::string out;
    const int prec = precedence(n->kind);
    switch (n->kind) {
      case Kind::Num: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", n->num);
        out = buf;
        break;
      }
      case Kind::Var: out = "x" + std::to_string(n->var + 1); break;
      case Kind::Neg: out = "-" + render_node(n->a.get(), prec); break;
      case Kind::Sin: out = "sin(" + render_node(n->a.get(), 0) + ")"; break;
      case Kind::Cos: out = "cos(" + render_node(n->a.get(), 0) + ")"; break;
      case Kind::Exp: out = "exp(" + render_node(n->a.get(), 0) + ")"; break;
      case Kind::Log: out = "log(" + render_node(n->a.get(), 0) + ")"; break;
      case Kind::Add: out = render_node(n->a.get(), prec) + "+" + render_node(n->b.get(), prec + 1); break;
      case Kind::Sub: out = render_node(n->a.get(), prec) + "-" + render_node(n->b.get(), prec + 1); break;
      case Kind::Mul: out = render_node(n->a.get(), prec) + "*" + render_node(n->b.get(), prec + 1); break;
      case Kind::Div: out = render_node(n->a.get(), prec) + "/" + render_node(n->b.get(), prec + 1); break;
      case Kind::Pow: out = render_node(n->a.get(), prec + 1) + "^" + render_node(n->b.get(), prec); break;
    }
    if (prec < parent_prec) out = "(" + out + ")";
    return out;
  }
};

}  // namespace finsler
