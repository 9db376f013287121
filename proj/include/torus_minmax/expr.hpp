#pragma once

// Closed-form scalar fields on the plane.
//
// Expression grammar (whitespace ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          exponent must be constant
//   primary := number | 'pi' | 'x' | 'y' | '(' expr ')'
//            | 'sin' '(' expr ')' | 'cos' '(' expr ')' | 'sqrt' '(' expr ')'
//            | 'smoothstep' '(' expr ',' expr ',' expr [',' order] ')'
//
// smoothstep(e0, e1, t) is 0 for t <= e0, 1 for t >= e1 and a polynomial
// ramp in between; order 1 is the C1 cubic, 2 (default) the C2 quintic and
// 3 the C3 septic. Parse errors report the 0-based character position.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "autodiff.hpp"
#include "common.hpp"

namespace torus_minmax {

struct ParseError : Error {
  ParseError(std::size_t pos, const std::string& msg)
      : Error("parse", "parse error at position " + std::to_string(pos) + ": " + msg), position(pos) {}
  std::size_t position;
};

template <class T>
T smoothstep_ramp(const T& e0, const T& e1, const T& t, int order) {
  const T u = (t - e0) / (e1 - e0);
  const double uv = value_of(u);
  if (uv <= 0.0) return T(0.0);
  if (uv >= 1.0) return T(1.0);
  const T u2 = u * u;
  const T u3 = u2 * u;
  switch (order) {
    case 1:
      return u2 * (T(3.0) - T(2.0) * u);
    case 3:
      return u2 * u2 * (T(35.0) + u * (T(-84.0) + u * (T(70.0) - T(20.0) * u)));
    default:
      return u3 * (T(10.0) + u * (T(-15.0) + T(6.0) * u));
  }
}

class Program {
 public:
  enum class Op : std::uint8_t { Const, X, Y, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Sqrt, Smooth };
  struct Instr {
    Op op;
    double imm = 0.0;  // constant value, exponent, or smoothstep order
  };
  static constexpr int kMaxStack = 48;

  static Program parse(std::string_view src) {
    Parser p{src, 0};
    auto root = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) throw ParseError(p.pos, "unexpected trailing input");
    Program prog;
    prog.source_ = std::string(src);
    int depth = 0, max_depth = 0;
    prog.emit(*root, depth, max_depth);
    if (max_depth > kMaxStack) throw ParseError(0, "expression too deeply nested");
    prog.uses_x_ = root->uses_x;
    prog.uses_y_ = root->uses_y;
    return prog;
  }

  template <class T>
  T eval(const T& x, const T& y) const {
    std::array<T, kMaxStack> st;
    int sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Const: st[sp++] = T(in.imm); break;
        case Op::X: st[sp++] = x; break;
        case Op::Y: st[sp++] = y; break;
        case Op::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
        case Op::Div: --sp; st[sp - 1] = st[sp - 1] / st[sp]; break;
        case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::Pow: st[sp - 1] = ad_pow(st[sp - 1], in.imm); break;
        case Op::Sin: st[sp - 1] = ad_sin(st[sp - 1]); break;
        case Op::Cos: st[sp - 1] = ad_cos(st[sp - 1]); break;
        case Op::Sqrt: st[sp - 1] = ad_sqrt(st[sp - 1]); break;
        case Op::Smooth:
          sp -= 2;
          st[sp - 1] = smoothstep_ramp(st[sp - 1], st[sp], st[sp + 1], static_cast<int>(in.imm));
          break;
      }
    }
    return st[0];
  }

  const std::string& source() const { return source_; }
  bool uses_x() const { return uses_x_; }
  bool uses_y() const { return uses_y_; }

 private:
  struct Node {
    Op op;
    double imm = 0.0;
    std::vector<std::unique_ptr<Node>> kids;
    bool uses_x = false, uses_y = false;
    bool is_const() const { return !uses_x && !uses_y; }
  };
  using NodePtr = std::unique_ptr<Node>;

  static NodePtr make(Op op, double imm = 0.0) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->imm = imm;
    n->uses_x = op == Op::X;
    n->uses_y = op == Op::Y;
    return n;
  }
  static NodePtr make(Op op, std::vector<NodePtr> kids, double imm = 0.0) {
    auto n = make(op, imm);
    for (auto& k : kids) {
      n->uses_x = n->uses_x || k->uses_x;
      n->uses_y = n->uses_y || k->uses_y;
    }
    n->kids = std::move(kids);
    return n;
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(c)) throw ParseError(pos, std::string("expected '") + c + "'");
    }

    NodePtr parse_expr() {
      auto lhs = parse_term();
      for (;;) {
        if (accept('+')) {
          std::vector<NodePtr> k;
          k.push_back(std::move(lhs));
          k.push_back(parse_term());
          lhs = make(Op::Add, std::move(k));
        } else if (accept('-')) {
          std::vector<NodePtr> k;
          k.push_back(std::move(lhs));
          k.push_back(parse_term());
          lhs = make(Op::Sub, std::move(k));
        } else {
          return lhs;
        }
      }
    }
    NodePtr parse_term() {
      auto lhs = parse_unary();
      for (;;) {
        Op op;
        if (accept('*')) op = Op::Mul;
        else if (accept('/')) op = Op::Div;
        else return lhs;
        std::vector<NodePtr> k;
        k.push_back(std::move(lhs));
        k.push_back(parse_unary());
        lhs = make(op, std::move(k));
      }
    }
    NodePtr parse_unary() {
      if (accept('-')) {
        std::vector<NodePtr> k;
        k.push_back(parse_unary());
        return make(Op::Neg, std::move(k));
      }
      if (accept('+')) return parse_unary();
      return parse_power();
    }
    NodePtr parse_power() {
      auto base = parse_primary();
      skip_ws();
      const std::size_t at = pos;
      if (accept('^')) {
        auto ex = parse_unary();
        if (!ex->is_const()) throw ParseError(at, "exponent must be a constant");
        const double e = Program::fold(*ex);
        std::vector<NodePtr> k;
        k.push_back(std::move(base));
        return make(Op::Pow, std::move(k), e);
      }
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= s.size()) throw ParseError(pos, "unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
          std::size_t q = pos + 1;
          if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
          if (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q]))) {
            pos = q;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
          }
        }
        const std::string tok(s.substr(start, pos - start));
        std::istringstream is(tok);
        is.imbue(std::locale::classic());
        double v = 0.0;
        if (!(is >> v) || !is.eof()) throw ParseError(start, "malformed number '" + tok + "'");
        return make(Op::Const, v);
      }
      if (accept('(')) {
        auto e = parse_expr();
        expect(')');
        return e;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string_view id = s.substr(start, pos - start);
        if (id == "x") return make(Op::X);
        if (id == "y") return make(Op::Y);
        if (id == "pi") return make(Op::Const, kPi);
        Op fop;
        if (id == "sin") fop = Op::Sin;
        else if (id == "cos") fop = Op::Cos;
        else if (id == "sqrt") fop = Op::Sqrt;
        else if (id == "smoothstep") fop = Op::Smooth;
        else throw ParseError(start, "unknown identifier '" + std::string(id) + "'");
        expect('(');
        std::vector<NodePtr> args;
        args.push_back(parse_expr());
        if (fop != Op::Smooth) {
          expect(')');
          return make(fop, std::move(args));
        }
        expect(',');
        args.push_back(parse_expr());
        expect(',');
        args.push_back(parse_expr());
        double order = 2.0;
        skip_ws();
        const std::size_t at = pos;
        if (accept(',')) {
          auto o = parse_expr();
          if (!o->is_const()) throw ParseError(at, "smoothstep order must be a constant");
          order = Program::fold(*o);
          if (order != 1.0 && order != 2.0 && order != 3.0) throw ParseError(at, "smoothstep order must be 1, 2 or 3");
        }
        expect(')');
        return make(Op::Smooth, std::move(args), order);
      }
      throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }
  };

  static double fold(const Node& n) {
    Program p;
    int d = 0, md = 0;
    p.emit(n, d, md);
    if (md > kMaxStack) throw ParseError(0, "expression too deeply nested");
    return p.eval<double>(0.0, 0.0);
  }

  void emit(const Node& n, int& depth, int& max_depth) {
    for (const auto& k : n.kids) emit(*k, depth, max_depth);
    code_.push_back({n.op, n.imm});
    switch (n.op) {
      case Op::Const: case Op::X: case Op::Y: ++depth; break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: --depth; break;
      case Op::Smooth: depth -= 2; break;
      default: break;
    }
    if (depth > max_depth) max_depth = depth;
  }

  std::vector<Instr> code_;
  std::string source_;
  bool uses_x_ = false, uses_y_ = false;
};

/// Trigonometric polynomial  mean + sum a cos(2 pi (j x + k y)) + b sin(2 pi (j x + k y)).
struct FourierSeries {
  struct Term {
    int j = 0, k = 0;
    double a = 0.0, b = 0.0;
  };
  static constexpr int kMaxOrder = 8;
  double mean = 1.0;
  std::vector<Term> terms;

  int max_order() const {
    int m = 0;
    for (const auto& t : terms) m = std::max({m, std::abs(t.j), std::abs(t.k)});
    return m;
  }

  template <class T>
  T eval(const T& x, const T& y) const {
    const int m = max_order();
    if (m > kMaxOrder) throw Error("config", "Fourier order above " + std::to_string(kMaxOrder));
    // Powers of e^{2 pi i x} and e^{2 pi i y}, index = exponent + m.
    std::array<T, 2 * kMaxOrder + 1> cx, sx, cy, sy;
    cx[m] = T(1.0); sx[m] = T(0.0); cy[m] = T(1.0); sy[m] = T(0.0);
    if (m > 0) {
      const T ax = T(2.0 * kPi) * x;
      const T ay = T(2.0 * kPi) * y;
      const T c1x = ad_cos(ax), s1x = ad_sin(ax), c1y = ad_cos(ay), s1y = ad_sin(ay);
      for (int p = 1; p <= m; ++p) {
        cx[m + p] = cx[m + p - 1] * c1x - sx[m + p - 1] * s1x;
        sx[m + p] = sx[m + p - 1] * c1x + cx[m + p - 1] * s1x;
        cy[m + p] = cy[m + p - 1] * c1y - sy[m + p - 1] * s1y;
        sy[m + p] = sy[m + p - 1] * c1y + cy[m + p - 1] * s1y;
        cx[m - p] = cx[m + p]; sx[m - p] = -sx[m + p];
        cy[m - p] = cy[m + p]; sy[m - p] = -sy[m + p];
      }
    }
    T acc(mean);
    for (const auto& t : terms) {
      const T& a = cx[m + t.j]; const T& b = sx[m + t.j];
      const T& c = cy[m + t.k]; const T& d = sy[m + t.k];
      const T cs = a * c - b * d;  // cos(2pi(jx+ky))
      const T sn = b * c + a * d;  // sin(2pi(jx+ky))
      acc = acc + T(t.a) * cs + T(t.b) * sn;
    }
    return acc;
  }

  std::string to_expression() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << mean;
    for (const auto& t : terms) {
      if (t.a != 0.0) os << "+" << t.a << "*cos(2*pi*(" << t.j << "*x+" << t.k << "*y))";
      if (t.b != 0.0) os << "+" << t.b << "*sin(2*pi*(" << t.j << "*x+" << t.k << "*y))";
    }
    return os.str();
  }
};

/// A scalar field given either by a parsed expression or a Fourier series.
class ScalarField {
 public:
  ScalarField() : ScalarField(Program::parse("1")) {}
  explicit ScalarField(Program p) : impl_(std::make_shared<const Impl>(Impl{std::move(p)})) {}
  explicit ScalarField(FourierSeries f) : impl_(std::make_shared<const Impl>(Impl{std::move(f)})) {}
  static ScalarField parse(std::string_view src) { return ScalarField(Program::parse(src)); }

  template <class T>
  T eval(const T& x, const T& y) const {
    return std::visit([&](const auto& f) { return f.template eval<T>(x, y); }, impl_->body);
  }
  double operator()(double x, double y) const { return eval<double>(x, y); }

  std::string source() const {
    if (const auto* p = std::get_if<Program>(&impl_->body)) return p->source();
    return std::get<FourierSeries>(impl_->body).to_expression();
  }
  bool uses_x() const {
    if (const auto* p = std::get_if<Program>(&impl_->body)) return p->uses_x();
    for (const auto& t : std::get<FourierSeries>(impl_->body).terms) if (t.j != 0) return true;
    return false;
  }
  const FourierSeries* fourier() const { return std::get_if<FourierSeries>(&impl_->body); }

 private:
  struct Impl {
    std::variant<Program, FourierSeries> body;
  };
  std::shared_ptr<const Impl> impl_;
};

}  // namespace torus_minmax
