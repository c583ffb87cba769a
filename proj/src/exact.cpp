#include "uller/exact.hpp"

#include <cmath>

namespace uller {

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidDistribution, "non-finite probability");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 53 bits of mantissa as an integer, then scale by 2^(exp-53).
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  Rational r(m);
  int shift = exp - 53;
  using boost::multiprecision::cpp_int;
  if (shift >= 0) {
    r *= Rational(cpp_int(1) << shift);
  } else {
    r /= Rational(cpp_int(1) << -shift);
  }
  return r;
}

Rational ExactCarrier::lift(const Query& q, std::size_t k) {
  const Outcome& o = q.dist.outcomes()[k];
  if (o.exact) return Rational(o.exact->num, o.exact->den);
  return exact_from_double(o.prob);
}

Rational eval_exact(const Formula& f, const Interpretation& interp, const Env& env,
                    const EvalOptions& options) {
  return eval_semiring<ExactCarrier>(f, interp, env, options);
}

std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

bool has_exact_probabilities(const Interpretation& interp) {
  for (const auto& [name, def] : interp.functions()) {
    if (const auto* t = std::get_if<FunctionDef::Table>(&def.kind)) {
      for (const auto& [args, dist] : t->rows) {
        for (const auto& o : dist.outcomes()) {
          if (!o.exact) return false;
        }
      }
    } else if (!std::holds_alternative<FunctionDef::Deterministic>(def.kind)) {
      return false;
    }
  }
  return true;
}

}  // namespace uller
