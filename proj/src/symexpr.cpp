#include "fsv/symexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace fsv {

namespace {

using Kind = Expr::Kind;

bool thin_equal(const Interval& x, double v) { return x.is_thin() && x.lo() == v; }

// Mantissa digits and decimal exponent of a decimal literal, normalized so
// that the value is 0.d1d2d3... * 10^exp with no leading/trailing zeros.
struct Decimal {
  std::string digits;
  long exp = 0;
};

Decimal normalize(std::string_view s) {
  std::string mant;
  long exp = 0;
  std::size_t i = 0;
  long point = -1;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      point = static_cast<long>(mant.size());
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      mant.push_back(c);
    } else {
      break;
    }
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) exp = std::strtol(std::string(s.substr(i + 1)).c_str(), nullptr, 10);
  if (point < 0) point = static_cast<long>(mant.size());
  std::size_t lead = 0;
  while (lead < mant.size() && mant[lead] == '0') ++lead;
  Decimal d;
  if (lead == mant.size()) return d;  // zero
  d.digits = mant.substr(lead);
  d.exp = exp + point - static_cast<long>(lead);
  while (!d.digits.empty() && d.digits.back() == '0') d.digits.pop_back();
  return d;
}

// Enclosure of a decimal literal: thin when the double is exact, else one ulp
// on each side.
Interval literal_enclosure(std::string_view text, double v) {
  // 800 digits hold the exact decimal expansion of any double.
  char buf[1024];
  std::snprintf(buf, sizeof buf, "%.800e", std::fabs(v));
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) text.remove_prefix(1);
  Decimal lit = normalize(text);
  Decimal exact = normalize(buf);
  if (lit.digits == exact.digits && (lit.digits.empty() || lit.exp == exact.exp)) return Interval(v);
  return Interval(down(v), up(v));
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        e = e + term();
      } else if (peek('-')) {
        ++pos_;
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        e = e * unary();
      } else if (peek('/')) {
        ++pos_;
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek('^')) {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected non-negative integer exponent", start);
      int k = std::atoi(std::string(s_.substr(start, pos_ - start)).c_str());
      return pow_int(base, k);
    }
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (peek('(')) {
        ++pos_;
        Expr arg = expr();
        expect(')');
        if (name == "sin") return sin(arg);
        if (name == "cos") return cos(arg);
        if (name == "exp") return exp(arg);
        if (name == "sqrt") return sqrt(arg);
        throw ParseError("unknown function '" + name + "'", start);
      }
      return Expr::var(name);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string text(s_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw ParseError("malformed number", start);
    return Expr::constant(literal_enclosure(text, v));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void collect_vars(const Expr::Node* n, std::set<std::string>& out) {
  if (!n) return;
  if (n->kind == Kind::Var) out.insert(n->name);
  collect_vars(n->a.get(), out);
  collect_vars(n->b.get(), out);
}

std::string format_interval(const Interval& v) {
  std::ostringstream os;
  os.precision(17);
  if (v.is_thin()) {
    os << v.lo();
  } else {
    os << "[" << v.lo() << "," << v.hi() << "]";
  }
  return os.str();
}

void print(const Expr::Node* n, std::ostream& os) {
  switch (n->kind) {
    case Kind::Const: os << format_interval(n->value); break;
    case Kind::Var: os << n->name; break;
    case Kind::Add: os << '('; print(n->a.get(), os); os << " + "; print(n->b.get(), os); os << ')'; break;
    case Kind::Sub: os << '('; print(n->a.get(), os); os << " - "; print(n->b.get(), os); os << ')'; break;
    case Kind::Mul: os << '('; print(n->a.get(), os); os << " * "; print(n->b.get(), os); os << ')'; break;
    case Kind::Div: os << '('; print(n->a.get(), os); os << " / "; print(n->b.get(), os); os << ')'; break;
    case Kind::Neg: os << "(-"; print(n->a.get(), os); os << ')'; break;
    case Kind::PowInt: os << '('; print(n->a.get(), os); os << ")^" << n->k; break;
    case Kind::Sin: os << "sin("; print(n->a.get(), os); os << ')'; break;
    case Kind::Cos: os << "cos("; print(n->a.get(), os); os << ')'; break;
    case Kind::Exp: os << "exp("; print(n->a.get(), os); os << ')'; break;
    case Kind::Sqrt: os << "sqrt("; print(n->a.get(), os); os << ')'; break;
  }
}

}  // namespace

Expr Expr::constant(const Interval& c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = c;
  return Expr(std::move(n));
}

Expr Expr::var(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = name;
  return Expr(std::move(n));
}

Expr Expr::make(Kind k, const Expr& a, const Expr& b, int power) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = a.n_;
  n->b = b.n_;
  n->k = power;
  return Expr(std::move(n));
}

bool Expr::is_zero() const { return n_->kind == Kind::Const && thin_equal(n_->value, 0.0); }
bool Expr::is_one() const { return n_->kind == Kind::Const && thin_equal(n_->value, 1.0); }

std::set<std::string> Expr::free_vars() const {
  std::set<std::string> out;
  collect_vars(n_.get(), out);
  return out;
}

std::string Expr::to_string() const {
  std::ostringstream os;
  print(n_.get(), os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.kind() == Kind::Const && b.kind() == Kind::Const) return Expr::constant(a.node().value + b.node().value);
  return Expr::make(Kind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (a.kind() == Kind::Const && b.kind() == Kind::Const) return Expr::constant(a.node().value - b.node().value);
  return Expr::make(Kind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.kind() == Kind::Const && b.kind() == Kind::Const) return Expr::constant(a.node().value * b.node().value);
  return Expr::make(Kind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (a.is_zero() && !(b.kind() == Kind::Const && b.node().value.contains_zero())) return Expr::constant(0.0);
  if (a.kind() == Kind::Const && b.kind() == Kind::Const) return Expr::constant(a.node().value / b.node().value);
  return Expr::make(Kind::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.kind() == Kind::Const) return Expr::constant(-a.node().value);
  if (a.kind() == Kind::Neg) return a.lhs();
  return Expr::make(Kind::Neg, a);
}

Expr pow_int(const Expr& a, int k) {
  if (k < 0) throw DomainError("negative integer power");
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.kind() == Kind::Const) return Expr::constant(pow_int(a.node().value, k));
  return Expr::make(Kind::PowInt, a, Expr(nullptr), k);
}

Expr sin(const Expr& a) {
  if (a.kind() == Kind::Const) return Expr::constant(sin(a.node().value));
  return Expr::make(Kind::Sin, a);
}

Expr cos(const Expr& a) {
  if (a.kind() == Kind::Const) return Expr::constant(cos(a.node().value));
  return Expr::make(Kind::Cos, a);
}

Expr exp(const Expr& a) {
  if (a.kind() == Kind::Const) return Expr::constant(exp(a.node().value));
  return Expr::make(Kind::Exp, a);
}

Expr sqrt(const Expr& a) {
  if (a.kind() == Kind::Const) return Expr::constant(sqrt(a.node().value));
  return Expr::make(Kind::Sqrt, a);
}

Interval decimal_enclosure(std::string_view text) {
  std::string t(text);
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw ParseError("malformed number", 0);
  return literal_enclosure(t, v);
}

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

Expr diff(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case Kind::Const: return Expr::constant(0.0);
    case Kind::Var: return Expr::constant(e.node().name == var ? 1.0 : 0.0);
    case Kind::Add: return diff(e.lhs(), var) + diff(e.rhs(), var);
    case Kind::Sub: return diff(e.lhs(), var) - diff(e.rhs(), var);
    case Kind::Mul: return diff(e.lhs(), var) * e.rhs() + e.lhs() * diff(e.rhs(), var);
    case Kind::Div: {
      Expr da = diff(e.lhs(), var), db = diff(e.rhs(), var);
      return da / e.rhs() - (e.lhs() * db) / pow_int(e.rhs(), 2);
    }
    case Kind::Neg: return -diff(e.lhs(), var);
    case Kind::PowInt: {
      int k = e.node().k;
      return Expr::constant(static_cast<double>(k)) * pow_int(e.lhs(), k - 1) * diff(e.lhs(), var);
    }
    case Kind::Sin: return cos(e.lhs()) * diff(e.lhs(), var);
    case Kind::Cos: return -(sin(e.lhs()) * diff(e.lhs(), var));
    case Kind::Exp: return e * diff(e.lhs(), var);
    case Kind::Sqrt: return diff(e.lhs(), var) / (Expr::constant(2.0) * e);
  }
  return Expr::constant(0.0);
}

Program::Program(const Expr& e, const std::vector<std::string>& symbols) {
  zero_ = e.is_zero();
  int depth = 0;
  // Post-order flattening; the stack depth is tracked to size the evaluator.
  auto emit = [&](auto&& self, const Expr::Node* n) -> void {
    Op op;
    op.kind = n->kind;
    switch (n->kind) {
      case Kind::Const:
        op.c = n->value;
        ++depth;
        break;
      case Kind::Var: {
        auto it = std::find(symbols.begin(), symbols.end(), n->name);
        if (it == symbols.end()) throw UnknownSymbol(n->name);
        op.slot = static_cast<int>(it - symbols.begin());
        ++depth;
        break;
      }
      case Kind::Add:
      case Kind::Sub:
      case Kind::Mul:
      case Kind::Div:
        self(self, n->a.get());
        self(self, n->b.get());
        --depth;
        break;
      default:
        self(self, n->a.get());
        op.k = n->k;
        break;
    }
    depth_ = std::max(depth_, depth);
    ops_.push_back(op);
  };
  emit(emit, &e.node());
}

template <class T>
T Program::run(const T* slots) const {
  constexpr int kInline = 48;
  T inline_stack[kInline] = {};
  std::vector<T> heap;
  T* st = inline_stack;
  if (depth_ > kInline) {
    heap.resize(depth_);
    st = heap.data();
  }
  int sp = 0;
  for (const Op& op : ops_) {
    switch (op.kind) {
      case Kind::Const:
        if constexpr (std::is_same_v<T, double>) {
          st[sp++] = op.c.mid();
        } else {
          st[sp++] = op.c;
        }
        break;
      case Kind::Var: st[sp++] = slots[op.slot]; break;
      case Kind::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
      case Kind::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
      case Kind::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
      case Kind::Div:
        --sp;
        if constexpr (!std::is_same_v<T, double>) {
          if (st[sp].contains_zero()) throw DomainError("denominator interval contains 0");
        }
        st[sp - 1] = st[sp - 1] / st[sp];
        break;
      case Kind::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Kind::PowInt:
        if constexpr (std::is_same_v<T, double>) {
          double r = 1.0;
          for (int i = 0; i < op.k; ++i) r *= st[sp - 1];
          st[sp - 1] = r;
        } else {
          st[sp - 1] = pow_int(st[sp - 1], op.k);
        }
        break;
      case Kind::Sin: { using std::sin; using fsv::sin; st[sp - 1] = sin(st[sp - 1]); break; }
      case Kind::Cos: { using std::cos; using fsv::cos; st[sp - 1] = cos(st[sp - 1]); break; }
      case Kind::Exp: { using std::exp; using fsv::exp; st[sp - 1] = exp(st[sp - 1]); break; }
      case Kind::Sqrt: { using std::sqrt; using fsv::sqrt; st[sp - 1] = sqrt(st[sp - 1]); break; }
    }
  }
  return st[0];
}

Interval Program::eval(const Interval* slots) const { return run(slots); }
double Program::eval(const double* slots) const { return run(slots); }

Interval eval(const Expr& e, const Env& env) {
  std::vector<std::string> names;
  std::vector<Interval> vals;
  for (const auto& [k, v] : env) {
    names.push_back(k);
    vals.push_back(v);
  }
  return Program(e, names).eval(vals.data());
}

double eval_point(const Expr& e, const std::map<std::string, double>& env) {
  std::vector<std::string> names;
  std::vector<double> vals;
  for (const auto& [k, v] : env) {
    names.push_back(k);
    vals.push_back(v);
  }
  return Program(e, names).eval(vals.data());
}

IMatrix jacobian(const std::vector<Expr>& f, const std::vector<std::string>& vars, const Env& env) {
  IMatrix J(f.size(), vars.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < vars.size(); ++j) J(i, j) = eval(diff(f[i], vars[j]), env);
  return J;
}

}  // namespace fsv
