#pragma once

// Scalar expressions in coordinates x1..xn: recursive-descent parser,
// canonical printer, and evaluators for plain values and second-order jets.
// Grammar (whitespace ignored):
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?          right-associative, so 2^3^2 = 512
//   atom  := number | func '(' expr ')' | x<k> | '(' expr ')'
//
// Functions: sin cos exp log sqrt tanh.  Unary minus binds looser than '^'
// (-x1^2 is -(x1^2)) and exponents accept a sign (2^-3 = 0.125).

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "mpray/error.hpp"
#include "mpray/jet.hpp"

namespace mpray {

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh };

class Expr {
 public:
  // Parses `src` as an expression in x1..x<dim>.  Throws ParseError.
  static Expr parse(std::string_view src, int dim) {
    Parser p{.src = src, .dim = dim};
    Expr e;
    e.dim_ = dim;
    e.nodes_ = p.run();
    e.annotate_integer_exponents();
    return e;
  }

  static Expr constant(int dim, double c) {
    Expr e;
    e.dim_ = dim;
    e.nodes_.push_back(Node{.kind = Kind::Constant, .value = c});
    return e;
  }

  int dim() const { return dim_; }

  // Plain value at x.
  double eval(const Vec& x) const {
    thread_local std::vector<double> val;
    val.resize(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
      const Node& nd = nodes_[idx];
      switch (nd.kind) {
        case Kind::Constant:
          val[idx] = nd.value;
          break;
        case Kind::Variable:
          val[idx] = x[nd.var];
          break;
        case Kind::Neg:
          val[idx] = -val[static_cast<std::size_t>(nd.lhs)];
          break;
        case Kind::Binary: {
          const double a = val[static_cast<std::size_t>(nd.lhs)];
          const double b = val[static_cast<std::size_t>(nd.rhs)];
          val[idx] = eval_binary(nd, a, b);
          break;
        }
        case Kind::Call: {
          const double a = val[static_cast<std::size_t>(nd.lhs)];
          val[idx] = eval_call(nd, a);
          break;
        }
      }
    }
    return val.back();
  }

  // Value, gradient and Hessian at x.
  Jet2 jet2(const Vec& x) const {
    thread_local std::vector<Jet2> val;
    val.resize(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
      const Node& nd = nodes_[idx];
      switch (nd.kind) {
        case Kind::Constant:
          val[idx] = Jet2::constant(dim_, nd.value);
          break;
        case Kind::Variable:
          val[idx] = Jet2::variable(dim_, nd.var, x[nd.var]);
          break;
        case Kind::Neg:
          val[idx] = -val[static_cast<std::size_t>(nd.lhs)];
          break;
        case Kind::Binary: {
          const Jet2& a = val[static_cast<std::size_t>(nd.lhs)];
          const Jet2& b = val[static_cast<std::size_t>(nd.rhs)];
          val[idx] = jet_binary(nd, a, b);
          break;
        }
        case Kind::Call: {
          const Jet2& a = val[static_cast<std::size_t>(nd.lhs)];
          val[idx] = jet_call(nd, a);
          break;
        }
      }
    }
    return val.back();
  }

  // Canonical form; parse(str()) reproduces this expression node for node.
  std::string str() const {
    std::string out;
    print(static_cast<int>(nodes_.size()) - 1, 0, out);
    return out;
  }

  bool operator==(const Expr& o) const {
    if (dim_ != o.dim_) return false;
    return equal_nodes(o, static_cast<int>(nodes_.size()) - 1,
                       static_cast<int>(o.nodes_.size()) - 1);
  }

 private:
  enum class Kind { Constant, Variable, Neg, Binary, Call };

  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;       // Constant
    int var = 0;              // Variable index
    BinOp op = BinOp::Add;    // Binary
    Func fn = Func::Sin;      // Call
    int lhs = -1, rhs = -1;   // child node indices (children precede parents)
    std::size_t offset = 0;   // byte offset into the source, for error reports
    bool int_exp = false;     // Pow only: exponent is a constant integer
    long exp_value = 0;       // Pow only: that integer
  };

  std::vector<Node> nodes_;
  int dim_ = 0;

  // Pow nodes whose exponent subtree is variable-free and evaluates to an
  // integer are computed by binary exponentiation, which accepts any base
  // (so 2^3^2 = 512 exactly and (-2)^2 works).  Decided once at parse time.
  void annotate_integer_exponents() {
    std::vector<char> var_free(nodes_.size(), 1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& nd = nodes_[i];
      switch (nd.kind) {
        case Kind::Variable:
          var_free[i] = 0;
          break;
        case Kind::Neg:
        case Kind::Call:
          var_free[i] = var_free[static_cast<std::size_t>(nd.lhs)];
          break;
        case Kind::Binary:
          var_free[i] = var_free[static_cast<std::size_t>(nd.lhs)] &&
                        var_free[static_cast<std::size_t>(nd.rhs)];
          break;
        case Kind::Constant:
          break;
      }
      if (nd.kind == Kind::Binary && nd.op == BinOp::Pow &&
          var_free[static_cast<std::size_t>(nd.rhs)]) {
        const Vec unused(dim_ == 0 ? 1 : dim_);
        double p = 0.0;
        try {
          p = eval_rec(nd.rhs, unused);
        } catch (const DomainError&) {
          continue;  // the error will resurface at evaluation time
        }
        if (std::abs(p) <= 1e6 && p == std::nearbyint(p)) {
          nodes_[i].int_exp = true;
          nodes_[i].exp_value = static_cast<long>(p);
        }
      }
    }
  }

  // Recursive value evaluation of a single subtree (used for constant
  // exponent folding; the subtree is variable-free when called).
  double eval_rec(int idx, const Vec& x) const {
    const Node& nd = nodes_[static_cast<std::size_t>(idx)];
    switch (nd.kind) {
      case Kind::Constant: return nd.value;
      case Kind::Variable: return x[nd.var];
      case Kind::Neg: return -eval_rec(nd.lhs, x);
      case Kind::Binary: return eval_binary(nd, eval_rec(nd.lhs, x), eval_rec(nd.rhs, x));
      case Kind::Call: return eval_call(nd, eval_rec(nd.lhs, x));
    }
    return 0.0;  // unreachable
  }

  double eval_binary(const Node& nd, double a, double b) const {
    switch (nd.op) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
      case BinOp::Div:
        if (b == 0.0) throw DomainError("division by zero", nd.offset);
        return a / b;
      case BinOp::Pow: {
        if (nd.int_exp) {
          if (a == 0.0 && nd.exp_value < 0)
            throw DomainError("zero base with negative exponent", nd.offset);
          return powi_value(a, nd.exp_value);
        }
        if (!(a > 0.0)) throw DomainError("pow with nonpositive base", nd.offset);
        return std::exp(b * std::log(a));
      }
    }
    return 0.0;  // unreachable
  }

  Jet2 jet_binary(const Node& nd, const Jet2& a, const Jet2& b) const {
    switch (nd.op) {
      case BinOp::Add: return a + b;
      case BinOp::Sub: return a - b;
      case BinOp::Mul: return a * b;
      case BinOp::Div:
        if (b.v == 0.0) throw DomainError("division by zero", nd.offset);
        return a / b;
      case BinOp::Pow: {
        if (nd.int_exp) {
          if (a.v == 0.0 && nd.exp_value < 0)
            throw DomainError("zero base with negative exponent", nd.offset);
          return powi(a, nd.exp_value);
        }
        if (!(a.v > 0.0)) throw DomainError("pow with nonpositive base", nd.offset);
        return exp(b * log(a));
      }
    }
    return Jet2();  // unreachable
  }

  double eval_call(const Node& nd, double a) const {
    switch (nd.fn) {
      case Func::Sin: return std::sin(a);
      case Func::Cos: return std::cos(a);
      case Func::Exp: return std::exp(a);
      case Func::Log:
        if (!(a > 0.0)) throw DomainError("log of nonpositive value", nd.offset);
        return std::log(a);
      case Func::Sqrt:
        if (a < 0.0) throw DomainError("sqrt of negative value", nd.offset);
        return std::sqrt(a);
      case Func::Tanh: return std::tanh(a);
    }
    return 0.0;  // unreachable
  }

  Jet2 jet_call(const Node& nd, const Jet2& a) const {
    switch (nd.fn) {
      case Func::Sin: return sin(a);
      case Func::Cos: return cos(a);
      case Func::Exp: return exp(a);
      case Func::Log:
        if (!(a.v > 0.0)) throw DomainError("log of nonpositive value", nd.offset);
        return log(a);
      case Func::Sqrt:
        if (!(a.v > 0.0)) throw DomainError("sqrt derivative at nonpositive value", nd.offset);
        return sqrt(a);
      case Func::Tanh: return tanh(a);
    }
    return Jet2();  // unreachable
  }

  // Printing.  Precedence: add=1, mul=2, neg=3, pow=4, atom=5.
  int precedence(int idx) const {
    const Node& nd = nodes_[static_cast<std::size_t>(idx)];
    switch (nd.kind) {
      case Kind::Binary:
        switch (nd.op) {
          case BinOp::Add:
          case BinOp::Sub: return 1;
          case BinOp::Mul:
          case BinOp::Div: return 2;
          case BinOp::Pow: return 4;
        }
        return 1;
      case Kind::Neg: return 3;
      default: return 5;
    }
  }

  static const char* func_name(Func f) {
    switch (f) {
      case Func::Sin: return "sin";
      case Func::Cos: return "cos";
      case Func::Exp: return "exp";
      case Func::Log: return "log";
      case Func::Sqrt: return "sqrt";
      case Func::Tanh: return "tanh";
    }
    return "";
  }

  void print(int idx, int min_prec, std::string& out) const {
    const Node& nd = nodes_[static_cast<std::size_t>(idx)];
    const bool parens = precedence(idx) < min_prec;
    if (parens) out += '(';
    switch (nd.kind) {
      case Kind::Constant: {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), nd.value);
        out.append(buf, res.ptr);
        break;
      }
      case Kind::Variable:
        out += 'x';
        out += std::to_string(nd.var + 1);
        break;
      case Kind::Neg:
        out += '-';
        print(nd.lhs, 3, out);
        break;
      case Kind::Call:
        out += func_name(nd.fn);
        out += '(';
        print(nd.lhs, 0, out);
        out += ')';
        break;
      case Kind::Binary: {
        const char* sym = "";
        int lp = 0, rp = 0;
        switch (nd.op) {
          case BinOp::Add: sym = "+"; lp = 1; rp = 2; break;
          case BinOp::Sub: sym = "-"; lp = 1; rp = 2; break;
          case BinOp::Mul: sym = "*"; lp = 2; rp = 3; break;
          case BinOp::Div: sym = "/"; lp = 2; rp = 3; break;
          // Left operand of '^' must be an atom; the exponent is unary-level.
          case BinOp::Pow: sym = "^"; lp = 5; rp = 3; break;
        }
        print(nd.lhs, lp, out);
        out += sym;
        print(nd.rhs, rp, out);
        break;
      }
    }
    if (parens) out += ')';
  }

  bool equal_nodes(const Expr& o, int ia, int ib) const {
    const Node& a = nodes_[static_cast<std::size_t>(ia)];
    const Node& b = o.nodes_[static_cast<std::size_t>(ib)];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Constant: return a.value == b.value;
      case Kind::Variable: return a.var == b.var;
      case Kind::Neg: return equal_nodes(o, a.lhs, b.lhs);
      case Kind::Call: return a.fn == b.fn && equal_nodes(o, a.lhs, b.lhs);
      case Kind::Binary:
        return a.op == b.op && equal_nodes(o, a.lhs, b.lhs) && equal_nodes(o, a.rhs, b.rhs);
    }
    return false;
  }

  // ---- parsing ----
  struct Parser {
    std::string_view src;
    int dim = 0;
    std::size_t pos = 0;
    std::vector<Node> nodes{};

    std::vector<Node> run() {
      const int root = parse_expr();
      skip_ws();
      if (pos != src.size()) throw ParseError("unexpected trailing input", pos);
      (void)root;  // children precede parents; root is nodes.back()
      return std::move(nodes);
    }

    void skip_ws() {
      while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                  src[pos] == '\r'))
        ++pos;
    }

    bool peek_is(char c) {
      skip_ws();
      return pos < src.size() && src[pos] == c;
    }

    int push(Node nd) {
      nodes.push_back(nd);
      return static_cast<int>(nodes.size()) - 1;
    }

    int parse_expr() {
      int lhs = parse_term();
      for (;;) {
        skip_ws();
        if (pos >= src.size()) break;
        const char c = src[pos];
        if (c != '+' && c != '-') break;
        const std::size_t op_off = pos;
        ++pos;
        const int rhs = parse_term();
        lhs = push(Node{.kind = Kind::Binary, .op = c == '+' ? BinOp::Add : BinOp::Sub,
                        .lhs = lhs, .rhs = rhs, .offset = op_off});
      }
      return lhs;
    }

    int parse_term() {
      int lhs = parse_unary();
      for (;;) {
        skip_ws();
        if (pos >= src.size()) break;
        const char c = src[pos];
        if (c != '*' && c != '/') break;
        const std::size_t op_off = pos;
        ++pos;
        const int rhs = parse_unary();
        lhs = push(Node{.kind = Kind::Binary, .op = c == '*' ? BinOp::Mul : BinOp::Div,
                        .lhs = lhs, .rhs = rhs, .offset = op_off});
      }
      return lhs;
    }

    int parse_unary() {
      skip_ws();
      if (pos < src.size() && src[pos] == '-') {
        const std::size_t off = pos;
        ++pos;
        const int child = parse_unary();
        return push(Node{.kind = Kind::Neg, .lhs = child, .offset = off});
      }
      return parse_power();
    }

    int parse_power() {
      const int base = parse_atom();
      skip_ws();
      if (pos < src.size() && src[pos] == '^') {
        const std::size_t off = pos;
        ++pos;
        const int expo = parse_unary();  // right-associative, sign allowed
        return push(Node{.kind = Kind::Binary, .op = BinOp::Pow, .lhs = base, .rhs = expo, .offset = off});
      }
      return base;
    }

    int parse_atom() {
      skip_ws();
      if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        const int inner = parse_expr();
        if (!peek_is(')')) throw ParseError("expected ')'", pos);
        ++pos;
        return inner;
      }
      if ((c >= '0' && c <= '9') || c == '.') {
        const std::size_t off = pos;
        const char* begin = src.data() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", off);
        if (!std::isfinite(v)) throw ParseError("numeric literal out of range", off);
        pos += static_cast<std::size_t>(end - begin);
        return push(Node{.kind = Kind::Constant, .value = v, .offset = off});
      }
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
        const std::size_t off = pos;
        std::size_t end = pos;
        while (end < src.size() &&
               ((src[end] >= 'a' && src[end] <= 'z') || (src[end] >= 'A' && src[end] <= 'Z') ||
                (src[end] >= '0' && src[end] <= '9') || src[end] == '_'))
          ++end;
        const std::string_view name = src.substr(pos, end - pos);
        pos = end;
        if (name.size() >= 2 && name[0] == 'x') {
          bool digits = true;
          for (std::size_t i = 1; i < name.size(); ++i)
            if (name[i] < '0' || name[i] > '9') digits = false;
          if (digits) {
            const int k = std::atoi(std::string(name.substr(1)).c_str());
            if (k < 1 || k > dim)
              throw ParseError("variable " + std::string(name) + " out of range for dimension " +
                                   std::to_string(dim),
                               off);
            return push(Node{.kind = Kind::Variable, .var = k - 1, .offset = off});
          }
        }
        Func fn;
        if (name == "sin") fn = Func::Sin;
        else if (name == "cos") fn = Func::Cos;
        else if (name == "exp") fn = Func::Exp;
        else if (name == "log") fn = Func::Log;
        else if (name == "sqrt") fn = Func::Sqrt;
        else if (name == "tanh") fn = Func::Tanh;
        else throw ParseError("unknown identifier '" + std::string(name) + "'", off);
        if (!peek_is('(')) throw ParseError("expected '(' after function name", pos);
        ++pos;
        const int arg = parse_expr();
        if (peek_is(','))
          throw ParseError(std::string(func_name(fn)) + " takes exactly one argument", pos);
        if (!peek_is(')')) throw ParseError("expected ')'", pos);
        ++pos;
        return push(Node{.kind = Kind::Call, .fn = fn, .lhs = arg, .offset = off});
      }
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  };
};

}  // namespace mpray
