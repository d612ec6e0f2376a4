#pragma once

// Term-wise integration of power-law sums in one variable. Anything that
// does not decompose into c * x^p terms is reported as UnsupportedForm so
// callers can fall back to quadrature.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "horizonlab/errors.hpp"
#include "horizonlab/expr.hpp"

namespace horizonlab {

struct Monomial {
  double coeff = 0.0;
  Ratio exponent;
};

namespace detail {

inline std::vector<Monomial> combine(std::vector<Monomial> terms) {
  std::vector<Monomial> out;
  for (const auto& t : terms) {
    bool merged = false;
    for (auto& o : out)
      if (o.exponent == t.exponent) {
        o.coeff += t.coeff;
        merged = true;
        break;
      }
    if (!merged) out.push_back(t);
  }
  std::vector<Monomial> nonzero;
  for (const auto& o : out)
    if (o.coeff != 0.0) nonzero.push_back(o);
  return nonzero;
}

inline std::vector<Monomial> multiply(const std::vector<Monomial>& a, const std::vector<Monomial>& b) {
  std::vector<Monomial> out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back({x.coeff * y.coeff, x.exponent + y.exponent});
  return combine(out);
}

inline std::optional<std::vector<Monomial>> decompose(const Expr& e, const std::string& var) {
  if (!depends_on(e, var)) {
    // Constant with respect to var; it must still evaluate to a number.
    try {
      return std::vector<Monomial>{{evaluate(e, {}), Ratio(0)}};
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  switch (e.op()) {
    case Op::Var: return std::vector<Monomial>{{1.0, Ratio(1)}};
    case Op::Add: {
      std::vector<Monomial> out;
      for (const auto& a : e.args()) {
        auto d = decompose(a, var);
        if (!d) return std::nullopt;
        out.insert(out.end(), d->begin(), d->end());
      }
      return combine(out);
    }
    case Op::Mul: {
      std::vector<Monomial> out{{1.0, Ratio(0)}};
      for (const auto& a : e.args()) {
        auto d = decompose(a, var);
        if (!d) return std::nullopt;
        out = multiply(out, *d);
      }
      return out;
    }
    case Op::Neg: {
      auto d = decompose(e.args()[0], var);
      if (!d) return std::nullopt;
      for (auto& m : *d) m.coeff = -m.coeff;
      return d;
    }
    case Op::Sqrt:
    case Op::Pow: {
      const Ratio p = e.op() == Op::Sqrt ? Ratio(1, 2) : e.exponent();
      auto d = decompose(e.args()[0], var);
      if (!d) return std::nullopt;
      if (d->size() == 1) {
        const auto m = d->front();
        if (!p.is_integer() && m.coeff < 0.0) return std::nullopt;
        return std::vector<Monomial>{{ScalarOps<double>::pow(m.coeff, p), m.exponent * p}};
      }
      if (p.is_integer() && p.num >= 0 && p.num <= 16) {
        std::vector<Monomial> out{{1.0, Ratio(0)}};
        for (std::int64_t i = 0; i < p.num; ++i) out = multiply(out, *d);
        return out;
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

}  // namespace detail

inline std::vector<Monomial> as_monomials(const Expr& e, const std::string& var) {
  auto d = detail::decompose(e, var);
  if (!d) throw UnsupportedForm("not a sum of power-law terms in " + var + ": " + e.str());
  return *d;
}

inline Expr from_monomials(const std::vector<Monomial>& terms, const std::string& var) {
  std::vector<Expr> parts;
  for (const auto& t : terms) parts.push_back(t.coeff * pow(horizonlab::var(var), t.exponent));
  return Expr::sum(parts);
}

inline std::vector<Monomial> integrate(const std::vector<Monomial>& terms, const std::string& var) {
  std::vector<Monomial> out;
  for (const auto& t : terms) {
    const Ratio p1 = t.exponent + Ratio(1);
    if (p1 == Ratio(0))
      throw UnsupportedForm("antiderivative of " + var + "^-1 needs a logarithm (not supported)");
    out.push_back({t.coeff / p1.to_double(), p1});
  }
  return out;
}

// Antiderivative with zero integration constant.
inline Expr antiderivative(const Expr& e, const std::string& var) {
  return from_monomials(integrate(as_monomials(e, var), var), var);
}

}  // namespace horizonlab
