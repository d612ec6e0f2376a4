#pragma once

// Immutable expression trees over named variables (phi, q, psi, f2), with
// scalar and truncated-series evaluation, symbolic differentiation and the
// JSON grammar used for custom potentials.

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/scalar.hpp"
#include "horizonlab/series.hpp"

namespace horizonlab {

enum class Op { Const, Var, Add, Mul, Pow, Sqrt, Exp, Neg };

inline const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Pow: return "pow";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Neg: return "neg";
  }
  return "?";
}

class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v) {
    Node n;
    n.op = Op::Const;
    n.value = v;
    return Expr(std::move(n));
  }

  static Expr variable(std::string name) {
    Node n;
    n.op = Op::Var;
    n.name = std::move(name);
    return Expr(std::move(n));
  }

  static Expr sum(const std::vector<Expr>& terms) {
    std::vector<Expr> flat;
    double folded = 0.0;
    for (const auto& t : terms) {
      if (t.op() == Op::Add) {
        for (const auto& a : t.args()) {
          if (a.is_constant())
            folded += a.value();
          else
            flat.push_back(a);
        }
      } else if (t.is_constant()) {
        folded += t.value();
      } else {
        flat.push_back(t);
      }
    }
    if (folded != 0.0 || flat.empty()) flat.push_back(constant(folded));
    if (flat.size() == 1) return flat.front();
    Node n;
    n.op = Op::Add;
    n.args = std::move(flat);
    return Expr(std::move(n));
  }

  static Expr product(const std::vector<Expr>& factors) {
    std::vector<Expr> flat;
    double folded = 1.0;
    auto absorb = [&](const Expr& f) {
      if (f.is_constant())
        folded *= f.value();
      else
        flat.push_back(f);
    };
    for (const auto& f : factors) {
      if (f.op() == Op::Mul)
        for (const auto& a : f.args()) absorb(a);
      else
        absorb(f);
    }
    if (folded == 0.0) return constant(0.0);
    if (folded != 1.0 || flat.empty()) flat.insert(flat.begin(), constant(folded));
    if (flat.size() == 1) return flat.front();
    Node n;
    n.op = Op::Mul;
    n.args = std::move(flat);
    return Expr(std::move(n));
  }

  static Expr power(const Expr& base, Ratio p) {
    if (p == Ratio(0)) return constant(1.0);
    if (p == Ratio(1)) return base;
    if (base.is_constant()) {
      const double b = base.value();
      // Fold only where the value is real and finite; otherwise keep the node
      // so evaluation reports the branch problem with context.
      if ((p.is_integer() && (b != 0.0 || p.num > 0)) || (!p.is_integer() && b > 0.0))
        return constant(ScalarOps<double>::pow(b, p));
    }
    if (base.op() == Op::Pow && base.exponent().is_integer() && p.is_integer())
      return power(base.args()[0], base.exponent() * p);
    Node n;
    n.op = Op::Pow;
    n.exponent = p;
    n.args = {base};
    return Expr(std::move(n));
  }

  static Expr sqrt(const Expr& x) {
    if (x.is_constant() && x.value() >= 0.0) return constant(std::sqrt(x.value()));
    Node n;
    n.op = Op::Sqrt;
    n.args = {x};
    return Expr(std::move(n));
  }

  static Expr exp(const Expr& x) {
    if (x.is_constant()) return constant(std::exp(x.value()));
    Node n;
    n.op = Op::Exp;
    n.args = {x};
    return Expr(std::move(n));
  }

  static Expr negate(const Expr& x) {
    if (x.is_constant()) return constant(-x.value());
    if (x.op() == Op::Neg) return x.args()[0];
    Node n;
    n.op = Op::Neg;
    n.args = {x};
    return Expr(std::move(n));
  }

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  Ratio exponent() const { return node_->exponent; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool is_zero() const { return is_constant(0.0); }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    write(os);
    return os.str();
  }

 private:
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    std::string name;
    Ratio exponent;
    std::vector<Expr> args;
  };

  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  void write(std::ostream& os) const {
    switch (op()) {
      case Op::Const: os << value(); break;
      case Op::Var: os << name(); break;
      case Op::Add:
      case Op::Mul: {
        os << "(";
        for (std::size_t i = 0; i < args().size(); ++i) {
          if (i) os << (op() == Op::Add ? " + " : "*");
          args()[i].write(os);
        }
        os << ")";
        break;
      }
      case Op::Pow:
        args()[0].write(os);
        os << "^(" << exponent() << ")";
        break;
      case Op::Sqrt:
      case Op::Exp:
        os << op_name(op()) << "(";
        args()[0].write(os);
        os << ")";
        break;
      case Op::Neg:
        os << "-";
        args()[0].write(os);
        break;
    }
  }

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::negate(b)}); }
inline Expr operator-(const Expr& a) { return Expr::negate(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::product({a, Expr::power(b, -1)}); }
inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator/(const Expr& a, double b) { return a * Expr::constant(1.0 / b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

inline Expr pow(const Expr& base, Ratio p) { return Expr::power(base, p); }
inline Expr sqrt(const Expr& x) { return Expr::sqrt(x); }
inline Expr exp(const Expr& x) { return Expr::exp(x); }
inline Expr var(std::string name) { return Expr::variable(std::move(name)); }
inline Expr cst(double v) { return Expr::constant(v); }

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e.op() == Op::Var) out.insert(e.name());
  for (const auto& a : e.args()) collect_variables(a, out);
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

inline bool depends_on(const Expr& e, const std::string& name) {
  return variables(e).count(name) > 0;
}

// ---------------------------------------------------------------------------
// Symbolic rewriting

inline Expr substitute(const Expr& e, const std::string& name, const Expr& with) {
  switch (e.op()) {
    case Op::Const: return e;
    case Op::Var: return e.name() == name ? with : e;
    case Op::Add: {
      std::vector<Expr> a;
      for (const auto& c : e.args()) a.push_back(substitute(c, name, with));
      return Expr::sum(a);
    }
    case Op::Mul: {
      std::vector<Expr> a;
      for (const auto& c : e.args()) a.push_back(substitute(c, name, with));
      return Expr::product(a);
    }
    case Op::Pow: return Expr::power(substitute(e.args()[0], name, with), e.exponent());
    case Op::Sqrt: return Expr::sqrt(substitute(e.args()[0], name, with));
    case Op::Exp: return Expr::exp(substitute(e.args()[0], name, with));
    case Op::Neg: return Expr::negate(substitute(e.args()[0], name, with));
  }
  return e;
}

inline Expr substitute(const Expr& e, const std::map<std::string, double>& values) {
  Expr out = e;
  for (const auto& [k, v] : values) out = substitute(out, k, Expr::constant(v));
  return out;
}

inline Expr derivative(const Expr& e, const std::string& name) {
  switch (e.op()) {
    case Op::Const: return cst(0.0);
    case Op::Var: return cst(e.name() == name ? 1.0 : 0.0);
    case Op::Add: {
      std::vector<Expr> terms;
      for (const auto& a : e.args()) terms.push_back(derivative(a, name));
      return Expr::sum(terms);
    }
    case Op::Mul: {
      std::vector<Expr> terms;
      const auto& f = e.args();
      for (std::size_t i = 0; i < f.size(); ++i) {
        auto di = derivative(f[i], name);
        if (di.is_zero()) continue;
        std::vector<Expr> factors{di};
        for (std::size_t j = 0; j < f.size(); ++j)
          if (j != i) factors.push_back(f[j]);
        terms.push_back(Expr::product(factors));
      }
      return Expr::sum(terms);
    }
    case Op::Pow: {
      const auto& b = e.args()[0];
      auto db = derivative(b, name);
      if (db.is_zero()) return cst(0.0);
      const Ratio p = e.exponent();
      return Expr::product({cst(p.to_double()), Expr::power(b, p - Ratio(1)), db});
    }
    case Op::Sqrt: {
      const auto& b = e.args()[0];
      auto db = derivative(b, name);
      if (db.is_zero()) return cst(0.0);
      return Expr::product({cst(0.5), db, Expr::power(e, -1)});
    }
    case Op::Exp: {
      auto db = derivative(e.args()[0], name);
      if (db.is_zero()) return cst(0.0);
      return Expr::product({e, db});
    }
    case Op::Neg: return Expr::negate(derivative(e.args()[0], name));
  }
  return cst(0.0);
}

// ---------------------------------------------------------------------------
// Evaluation. One recursive evaluator, specialised through a small value
// algebra for double and for Series<T>.

namespace detail {

struct DoubleAlgebra {
  using value_type = double;
  double constant(double v) const { return v; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  static double neg(double a) { return -a; }
  static double pow(double b, Ratio p) {
    if (b == 0.0 && p.num < 0) throw NotInvertible("division by zero");
    if (!p.is_integer() && b < 0.0) throw DomainError("fractional power of a negative value");
    return ScalarOps<double>::pow(b, p);
  }
  static double sqrt(double b) {
    if (b < 0.0) throw DomainError("sqrt of a negative value");
    return std::sqrt(b);
  }
  static double exp(double b) { return std::exp(b); }
  static void check(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value");
  }
};

template <class T>
struct SeriesAlgebra {
  using value_type = Series<T>;
  T base;
  int order;
  Series<T> constant(double v) const {
    return Series<T>::constant(base, ScalarOps<T>::from_double(v), order);
  }
  static Series<T> add(const Series<T>& a, const Series<T>& b) { return horizonlab::add(a, b); }
  static Series<T> mul(const Series<T>& a, const Series<T>& b) { return horizonlab::mul(a, b); }
  static Series<T> neg(const Series<T>& a) { return horizonlab::neg(a); }
  static Series<T> pow(const Series<T>& b, Ratio p) { return pow_rational(b, p); }
  static Series<T> sqrt(const Series<T>& b) { return sqrt_series(b); }
  static Series<T> exp(const Series<T>& b) { return exp_series(b); }
  static void check(const Series<T>&) {}
};

template <class Alg>
typename Alg::value_type eval_node(const Expr& e,
                                   const std::map<std::string, typename Alg::value_type>& env,
                                   const Alg& alg) {
  using V = typename Alg::value_type;
  switch (e.op()) {
    case Op::Const: return alg.constant(e.value());
    case Op::Var: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnboundVariable(e.name());
      return it->second;
    }
    default: break;
  }
  std::vector<V> vals;
  vals.reserve(e.args().size());
  for (const auto& a : e.args()) vals.push_back(eval_node(a, env, alg));
  try {
    V out = vals.front();
    switch (e.op()) {
      case Op::Add:
        for (std::size_t i = 1; i < vals.size(); ++i) out = Alg::add(out, vals[i]);
        break;
      case Op::Mul:
        for (std::size_t i = 1; i < vals.size(); ++i) out = Alg::mul(out, vals[i]);
        break;
      case Op::Pow: out = Alg::pow(vals[0], e.exponent()); break;
      case Op::Sqrt: out = Alg::sqrt(vals[0]); break;
      case Op::Exp: out = Alg::exp(vals[0]); break;
      case Op::Neg: out = Alg::neg(vals[0]); break;
      default: break;
    }
    Alg::check(out);
    return out;
  } catch (const NotInvertible& ex) {
    throw NotInvertible(std::string(ex.what()) + " in subexpression " + e.str());
  } catch (const UnboundVariable&) {
    throw;
  } catch (const DomainError& ex) {
    throw DomainError(std::string(ex.what()) + " in subexpression " + e.str());
  }
}

}  // namespace detail

using Bindings = std::map<std::string, double>;

inline double evaluate(const Expr& e, const Bindings& env) {
  return detail::eval_node(e, env, detail::DoubleAlgebra{});
}

template <class T>
using SeriesBindings = std::map<std::string, Series<T>>;

// Every bound series must share one base point; constants are expanded to
// the smallest bound order.
template <class T>
Series<T> evaluate_series(const Expr& e, const SeriesBindings<T>& env) {
  if (env.empty()) throw DomainError("evaluate_series needs at least one bound series");
  const auto& first = env.begin()->second;
  int order = first.order();
  for (const auto& [k, s] : env) {
    if (!(s.base_point() == first.base_point()))
      throw DomainError("bound series '" + k + "' has a different base point");
    order = std::min(order, s.order());
  }
  detail::SeriesAlgebra<T> alg{first.base_point(), order};
  auto out = detail::eval_node(e, env, alg);
  return out.order() > order ? out.truncated(order) : out;
}

// ---------------------------------------------------------------------------
// JSON grammar:
//   {"op": "add"|"mul"|"pow"|"sqrt"|"exp"|"neg"|"const"|"var",
//    "args": [...], "value": number, "exponent": [num, den], "name": string}

inline nlohmann::json to_json(const Expr& e) {
  nlohmann::json j;
  j["op"] = op_name(e.op());
  switch (e.op()) {
    case Op::Const: j["value"] = e.value(); break;
    case Op::Var: j["name"] = e.name(); break;
    case Op::Pow: j["exponent"] = {e.exponent().num, e.exponent().den}; [[fallthrough]];
    default: {
      auto args = nlohmann::json::array();
      for (const auto& a : e.args()) args.push_back(to_json(a));
      j["args"] = args;
    }
  }
  return j;
}

inline Expr expr_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
    throw DomainError("expression node must be an object with a string 'op'");
  const auto op = j["op"].get<std::string>();
  auto args = [&]() {
    std::vector<Expr> out;
    if (!j.contains("args") || !j["args"].is_array())
      throw DomainError("'" + op + "' node needs an 'args' array");
    for (const auto& a : j["args"]) out.push_back(expr_from_json(a));
    return out;
  };
  auto unary = [&]() {
    auto a = args();
    if (a.size() != 1) throw DomainError("'" + op + "' takes exactly one argument");
    return a.front();
  };
  if (op == "const") {
    if (!j.contains("value") || !j["value"].is_number())
      throw DomainError("'const' node needs a numeric 'value'");
    return Expr::constant(j["value"].get<double>());
  }
  if (op == "var") {
    if (!j.contains("name") || !j["name"].is_string())
      throw DomainError("'var' node needs a string 'name'");
    return Expr::variable(j["name"].get<std::string>());
  }
  if (op == "add") {
    auto a = args();
    if (a.empty()) throw DomainError("'add' needs at least one argument");
    return Expr::sum(a);
  }
  if (op == "mul") {
    auto a = args();
    if (a.empty()) throw DomainError("'mul' needs at least one argument");
    return Expr::product(a);
  }
  if (op == "pow") {
    const auto& ex = j.contains("exponent") ? j["exponent"] : nlohmann::json();
    if (!ex.is_array() || ex.size() != 2 || !ex[0].is_number_integer() ||
        !ex[1].is_number_integer())
      throw DomainError("'pow' node needs an integer pair 'exponent': [num, den]");
    return Expr::power(unary(), Ratio(ex[0].get<std::int64_t>(), ex[1].get<std::int64_t>()));
  }
  if (op == "sqrt") return Expr::sqrt(unary());
  if (op == "exp") return Expr::exp(unary());
  if (op == "neg") return Expr::negate(unary());
  throw DomainError("unknown expression op '" + op + "'");
}

}  // namespace horizonlab
