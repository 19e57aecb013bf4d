#include "dgeom/field_dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace dgeom {

void validate(const BundleShape& s) {
  if (s.n < 1 || s.m < 1) throw ConfigError("bundle shape needs n >= 1 and m >= 1");
  if (s.n + s.m > kMaxVars)
    throw ConfigError("bundle dimension n + m = " + std::to_string(s.n + s.m) + " exceeds 6");
}

namespace expr {

enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Func };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt };

struct Node {
  Kind kind;
  double num = 0.0;
  int var = 0;  // coordinate slot in u
  int exponent = 0;
  Fn fn = Fn::Sin;
  std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

namespace {

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct FnName {
  const char* name;
  Fn fn;
};
constexpr FnName kFunctions[] = {{"sin", Fn::Sin}, {"cos", Fn::Cos},   {"tan", Fn::Tan},
                                 {"exp", Fn::Exp}, {"log", Fn::Log},   {"sqrt", Fn::Sqrt}};

const char* fn_name(Fn f) {
  for (auto& e : kFunctions)
    if (e.fn == f) return e.name;
  return "?";
}

class Parser {
public:
  Parser(const std::string& s, BundleShape shape) : s_(s), shape_(shape) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but the input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make(Kind::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make(Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make(Kind::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!accept('^')) return base;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->a = base;
    n->exponent = parse_int_exponent();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') fail("chained '^' needs parentheses");
    return n;
  }

  int parse_int_exponent() {
    bool paren = accept('(');
    int sign = 1;
    if (accept('-')) {
      sign = -1;
    } else {
      accept('+');
    }
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("exponent must be an integer literal");
    double v = scan_number();
    if (v != std::floor(v) || v > 64) {
      pos_ = start;
      fail("exponent must be an integer literal");
    }
    if (paren) expect(')');
    return sign * static_cast<int>(v);
  }

  double scan_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        pos_ = save;
        fail("malformed exponent in number");
      }
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || p != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Num;
      n->num = scan_number();
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      for (auto& f : kFunctions) {
        if (id == f.name) return parse_call(f.fn, start);
      }
      int slot = coordinate_slot(id);
      if (slot < 0) {
        pos_ = start;
        fail("unknown symbol '" + id + "'");
      }
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') fail("'" + id + "' is a coordinate, not a function");
      auto n = std::make_shared<Node>();
      n->kind = Kind::Var;
      n->var = slot;
      return n;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr parse_call(Fn fn, std::size_t start) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '(') {
      pos_ = start;
      fail(std::string("function '") + fn_name(fn) + "' needs an argument list");
    }
    ++pos_;
    if (accept(')')) {
      pos_ = start;
      fail(std::string("function '") + fn_name(fn) + "' expects 1 argument, got 0");
    }
    NodePtr arg = parse_sum();
    int count = 1;
    while (accept(',')) {
      parse_sum();
      ++count;
    }
    if (count != 1) {
      pos_ = start;
      fail(std::string("function '") + fn_name(fn) + "' expects 1 argument, got " +
           std::to_string(count));
    }
    expect(')');
    auto n = std::make_shared<Node>();
    n->kind = Kind::Func;
    n->fn = fn;
    n->a = arg;
    return n;
  }

  int coordinate_slot(const std::string& id) const {
    if (id.size() != 2) return -1;
    if (!std::isdigit(static_cast<unsigned char>(id[1]))) return -1;
    int k = id[1] - '0';
    if (k < 1) return -1;
    if (id[0] == 'x' && k <= shape_.n) return k - 1;
    if (id[0] == 'y' && k <= shape_.m) return shape_.n + k - 1;
    return -1;
  }

  const std::string& s_;
  BundleShape shape_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, std::span<const double> u) {
  switch (n.kind) {
    case Kind::Num: return n.num;
    case Kind::Var: return u[n.var];
    case Kind::Neg: return -eval(*n.a, u);
    case Kind::Add: return eval(*n.a, u) + eval(*n.b, u);
    case Kind::Sub: return eval(*n.a, u) - eval(*n.b, u);
    case Kind::Mul: return eval(*n.a, u) * eval(*n.b, u);
    case Kind::Div: {
      double d = eval(*n.b, u);
      if (d == 0.0) throw DomainError("division by zero");
      return eval(*n.a, u) / d;
    }
    case Kind::Pow: {
      double b = eval(*n.a, u);
      if (b == 0.0 && n.exponent < 0) throw DomainError("division by zero");
      return std::pow(b, n.exponent);
    }
    case Kind::Func: {
      double x = eval(*n.a, u);
      switch (n.fn) {
        case Fn::Sin: return std::sin(x);
        case Fn::Cos: return std::cos(x);
        case Fn::Tan:
          if (std::cos(x) == 0.0) throw DomainError("tan evaluated at a pole");
          return std::tan(x);
        case Fn::Exp: return std::exp(x);
        case Fn::Log:
          if (!(x > 0.0)) throw DomainError("log of a non-positive value");
          return std::log(x);
        case Fn::Sqrt:
          if (x < 0.0) throw DomainError("sqrt of a negative value");
          return std::sqrt(x);
      }
    }
  }
  return 0.0;
}

Jet eval_jet(const Node& n, std::span<const double> u, int d, int K) {
  switch (n.kind) {
    case Kind::Num: return Jet(d, K, n.num);
    case Kind::Var: return Jet::variable(d, K, n.var, u[n.var]);
    case Kind::Neg: return -eval_jet(*n.a, u, d, K);
    case Kind::Add: return eval_jet(*n.a, u, d, K) + eval_jet(*n.b, u, d, K);
    case Kind::Sub: return eval_jet(*n.a, u, d, K) - eval_jet(*n.b, u, d, K);
    case Kind::Mul: {
      // Constant factors are common in metric entries; skip the full product.
      if (n.a->kind == Kind::Num) return eval_jet(*n.b, u, d, K) * n.a->num;
      if (n.b->kind == Kind::Num) return eval_jet(*n.a, u, d, K) * n.b->num;
      return eval_jet(*n.a, u, d, K) * eval_jet(*n.b, u, d, K);
    }
    case Kind::Div:
      if (n.b->kind == Kind::Num) {
        if (n.b->num == 0.0) throw DomainError("division by zero");
        return eval_jet(*n.a, u, d, K) * (1.0 / n.b->num);
      }
      return eval_jet(*n.a, u, d, K) / eval_jet(*n.b, u, d, K);
    case Kind::Pow: return pow(eval_jet(*n.a, u, d, K), n.exponent);
    case Kind::Func: {
      Jet x = eval_jet(*n.a, u, d, K);
      switch (n.fn) {
        case Fn::Sin: return sin(x);
        case Fn::Cos: return cos(x);
        case Fn::Tan: return tan(x);
        case Fn::Exp: return exp(x);
        case Fn::Log: return log(x);
        case Fn::Sqrt: return sqrt(x);
      }
    }
  }
  return Jet(d, K);
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    case Kind::Num: return n.num < 0 ? 0 : 5;
    default: return 5;
  }
}

std::string number_text(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, p);
  if (v < 0) s = "(" + s + ")";
  return s;
}

std::string print(const Node& n, BundleShape shape) {
  auto wrap = [&](const Node& c, int min_prec) {
    std::string t = print(c, shape);
    return precedence(c) < min_prec ? "(" + t + ")" : t;
  };
  switch (n.kind) {
    case Kind::Num: return number_text(n.num);
    case Kind::Var:
      return n.var < shape.n ? "x" + std::to_string(n.var + 1)
                             : "y" + std::to_string(n.var - shape.n + 1);
    case Kind::Neg: return "-" + wrap(*n.a, 3);
    case Kind::Add: return wrap(*n.a, 1) + " + " + wrap(*n.b, 2);
    case Kind::Sub: return wrap(*n.a, 1) + " - " + wrap(*n.b, 2);
    case Kind::Mul: return wrap(*n.a, 2) + "*" + wrap(*n.b, 3);
    case Kind::Div: return wrap(*n.a, 2) + "/" + wrap(*n.b, 3);
    case Kind::Pow: return wrap(*n.a, 5) + "^" + std::to_string(n.exponent);
    case Kind::Func: return std::string(fn_name(n.fn)) + "(" + print(*n.a, shape) + ")";
  }
  return "";
}

}  // namespace
}  // namespace expr

namespace {
std::shared_ptr<const expr::Node> number_node(double v) {
  auto n = std::make_shared<expr::Node>();
  n->kind = expr::Kind::Num;
  n->num = v;
  return n;
}
}  // namespace

ScalarField::ScalarField() : root_(number_node(0.0)), source_("0") {}

ScalarField ScalarField::constant(double v, BundleShape shape) {
  ScalarField f;
  f.root_ = number_node(v);
  f.shape_ = shape;
  f.source_ = expr::number_text(v);
  return f;
}

double ScalarField::eval(std::span<const double> u) const { return expr::eval(*root_, u); }

Jet ScalarField::eval_jet(std::span<const double> u, int order) const {
  return expr::eval_jet(*root_, u, shape_.dim(), order);
}

std::string ScalarField::to_string() const { return expr::print(*root_, shape_); }

bool ScalarField::is_constant() const { return root_->kind == expr::Kind::Num; }

ScalarField parse_field(const std::string& src, BundleShape shape) {
  validate(shape);
  ScalarField f;
  f.root_ = expr::Parser(src, shape).parse();
  f.shape_ = shape;
  f.source_ = src;
  return f;
}

std::vector<Jet> eval_jets(const std::vector<ScalarField>& fs, std::span<const double> u, int order) {
  std::vector<Jet> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(f.eval_jet(u, order));
  return out;
}

}  // namespace dgeom
