#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "uller/sem_prob.hpp"

namespace uller {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational arithmetic. Outcomes use their Fraction when the source
/// gave one ("1/6"); otherwise the double is converted exactly.
struct ExactCarrier {
  using value_type = Rational;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational plus(const Rational& a, const Rational& b) { return a + b; }
  static Rational times(const Rational& a, const Rational& b) { return a * b; }
  static Rational complement(const Rational& a) { return Rational(1) - a; }
  static Rational lift(const Query& q, std::size_t k);
};

Rational exact_from_double(double x);

Rational eval_exact(const Formula& f, const Interpretation& interp, const Env& env = {},
                    const EvalOptions& options = {});

/// "p/q" in lowest terms, or "p" for integers.
std::string to_string(const Rational& r);

/// True when every distribution reachable through `interp` carries exact
/// fractions (so eval_exact reflects the source probabilities, not their
/// binary approximations).
bool has_exact_probabilities(const Interpretation& interp);

}  // namespace uller
