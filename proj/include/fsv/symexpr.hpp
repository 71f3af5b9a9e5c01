#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fsv/interval.hpp"

namespace fsv {

class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, PowInt, Sin, Cos, Exp, Sqrt };

  struct Node {
    Kind kind;
    Interval value;  // Const
    std::string name;  // Var
    int k = 0;  // PowInt exponent
    std::shared_ptr<const Node> a, b;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(const Interval& c);
  static Expr var(const std::string& name);

  Kind kind() const { return n_->kind; }
  const Node& node() const { return *n_; }
  Expr lhs() const { return Expr(n_->a); }
  Expr rhs() const { return Expr(n_->b); }

  bool is_zero() const;
  bool is_one() const;
  std::set<std::string> free_vars() const;
  std::string to_string() const;

  // Builders apply constant folding and 0/1 identities only.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow_int(const Expr& a, int k);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr sqrt(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  static Expr make(Kind k, const Expr& a, const Expr& b = Expr(nullptr), int power = 0);

  std::shared_ptr<const Node> n_;
};

Expr parse(std::string_view src);

// Enclosure of a decimal number: thin when the text is exactly representable,
// else widened by one ulp each side. Throws ParseError on malformed text.
Interval decimal_enclosure(std::string_view text);
Expr diff(const Expr& e, const std::string& var);

using Env = std::map<std::string, Interval>;

Interval eval(const Expr& e, const Env& env);
double eval_point(const Expr& e, const std::map<std::string, double>& env);
IMatrix jacobian(const std::vector<Expr>& f, const std::vector<std::string>& vars, const Env& env);

// An expression compiled against a fixed symbol table; variables become slot
// indices, so evaluation does no name lookups and no allocation.
class Program {
 public:
  Program() = default;
  Program(const Expr& e, const std::vector<std::string>& symbols);

  Interval eval(const Interval* slots) const;
  double eval(const double* slots) const;
  bool is_constant_zero() const { return zero_; }

 private:
  struct Op {
    Expr::Kind kind;
    int slot = -1;
    int k = 0;
    Interval c;
  };
  template <class T>
  T run(const T* slots) const;

  std::vector<Op> ops_;
  int depth_ = 0;
  bool zero_ = false;
};

}  // namespace fsv
