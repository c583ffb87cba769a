#pragma once

#include <algorithm>
#include <concepts>
#include <string>
#include <variant>
#include <vector>

#include "uller/dual.hpp"
#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

// ---------------------------------------------------------------------------
// Semiring carriers
//
// A carrier supplies zero/one/plus/times, a complement used for negation,
// and `lift`, which embeds the probability of outcome k of a queried
// distribution. Complement is not a semiring operation; carriers for which
// it has no meaning (max-product) are exact only on negation-free bodies.

template <class C>
concept SemiringCarrier = requires(const typename C::value_type& a, const Query& q, std::size_t k) {
  { C::zero() } -> std::convertible_to<typename C::value_type>;
  { C::one() } -> std::convertible_to<typename C::value_type>;
  { C::plus(a, a) } -> std::convertible_to<typename C::value_type>;
  { C::times(a, a) } -> std::convertible_to<typename C::value_type>;
  { C::complement(a) } -> std::convertible_to<typename C::value_type>;
  { C::lift(q, k) } -> std::convertible_to<typename C::value_type>;
};

struct ProbabilityCarrier {
  using value_type = double;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double plus(double a, double b) { return a + b; }
  static double times(double a, double b) { return a * b; }
  static double complement(double a) { return 1.0 - a; }
  static double lift(const Query& q, std::size_t k) { return q.dist.outcomes()[k].prob; }
};

/// Max-product: the probability of the single most likely satisfying
/// assignment.
struct ViterbiCarrier {
  using value_type = double;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double plus(double a, double b) { return std::max(a, b); }
  static double times(double a, double b) { return a * b; }
  static double complement(double a) { return 1.0 - a; }
  static double lift(const Query& q, std::size_t k) { return q.dist.outcomes()[k].prob; }
};

/// Forward-mode gradient carrier: (p, dp/dtheta). Softmax rows contribute
/// dp_k/dlogit_j = p_k (delta_kj - p_j).
struct DualCarrier {
  using value_type = Dual;
  static Dual zero() { return Dual(0.0); }
  static Dual one() { return Dual(1.0); }
  static Dual plus(const Dual& a, const Dual& b) { return a + b; }
  static Dual times(const Dual& a, const Dual& b) { return a * b; }
  static Dual complement(const Dual& a) { return Dual(1.0 - a.value, a.grad.scaled(-1.0)); }
  static Dual lift(const Query& q, std::size_t k);
};

// ---------------------------------------------------------------------------
// Generic evaluator

/// Direct recursive enumeration: forall = product over the domain, and =
/// times, not = complement, exists/or/implies through their classical
/// rewrites, statements = sum over outcomes of p(a) times the body with x := a.
/// No memoisation across statements: every statement visit is a fresh
/// random variable.
template <SemiringCarrier C>
class SemiringEvaluator {
 public:
  using V = typename C::value_type;

  SemiringEvaluator(const Interpretation& interp, const EvalOptions& options)
      : interp_(interp), budget_(options.node_budget) {}

  V eval(const Formula& f, const Env& env) {
    budget_.tick(f->span);
    return std::visit([&](const auto& node) { return visit(node, f, env); }, f->node);
  }

 private:
  V visit(const ForAll& q, const Formula& f, const Env& env) {
    const DomainDef& d = enumerable_domain(q.domain, f->span);
    V acc = C::one();
    for (const auto& a : d.elements) acc = C::times(acc, eval(q.body, env.bind(q.var, a)));
    return acc;
  }
  V visit(const Exists& q, const Formula& f, const Env& env) {
    const DomainDef& d = enumerable_domain(q.domain, f->span);
    V acc = C::one();
    for (const auto& a : d.elements) {
      acc = C::times(acc, C::complement(eval(q.body, env.bind(q.var, a))));
    }
    return C::complement(acc);
  }
  V visit(const And& x, const Formula&, const Env& env) {
    return C::times(eval(x.left, env), eval(x.right, env));
  }
  V visit(const Or& x, const Formula&, const Env& env) {
    return C::complement(
        C::times(C::complement(eval(x.left, env)), C::complement(eval(x.right, env))));
  }
  V visit(const Implies& x, const Formula&, const Env& env) {
    return C::complement(C::times(eval(x.left, env), C::complement(eval(x.right, env))));
  }
  V visit(const Not& x, const Formula&, const Env& env) {
    return C::complement(eval(x.operand, env));
  }
  V visit(const Pred& p, const Formula& f, const Env& env) {
    std::vector<Value> args;
    args.reserve(p.args.size());
    for (const auto& t : p.args) args.push_back(eval_term(t, interp_, env));
    return apply_predicate(p.name, args, interp_, f->span) ? C::one() : C::zero();
  }
  V visit(const Statement& s, const Formula& f, const Env& env) {
    std::vector<Value> args;
    args.reserve(s.args.size());
    for (const auto& t : s.args) args.push_back(eval_term(t, interp_, env));
    require_enumerable_codomain(s.func, f->span);
    const Query q = query(s.func, args, interp_, f->span);
    V acc = C::zero();
    const auto& outcomes = q.dist.outcomes();
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      if (outcomes[k].prob == 0.0) continue;
      acc = C::plus(acc, C::times(C::lift(q, k), eval(s.body, env.bind(s.var, outcomes[k].value))));
    }
    return acc;
  }

  const DomainDef& enumerable_domain(const std::string& name, Span span) {
    auto it = interp_.domains().find(name);
    if (it == interp_.domains().end()) {
      throw Error(ErrorKind::UnknownDomain, "unknown domain '" + name + "'", span);
    }
    if (!it->second.enumerable) {
      throw Error(ErrorKind::InfiniteDomain,
                  "cannot enumerate infinite domain '" + name + "'", span);
    }
    return it->second;
  }

  void require_enumerable_codomain(const std::string& func, Span span) {
    auto it = interp_.functions().find(func);
    if (it == interp_.functions().end()) return;  // query() reports it
    if (std::holds_alternative<FunctionDef::Deterministic>(it->second.kind)) return;
    auto d = interp_.domains().find(it->second.codomain);
    if (d != interp_.domains().end() && !d->second.enumerable) {
      throw Error(ErrorKind::InfiniteDomain,
                  "expectation over the infinite codomain '" + d->first + "' of '" + func +
                      "' is not supported",
                  span);
    }
  }

  const Interpretation& interp_;
  Budget budget_;
};

template <SemiringCarrier C>
typename C::value_type eval_semiring(const Formula& f, const Interpretation& interp,
                                     const Env& env = {}, const EvalOptions& options = {}) {
  return SemiringEvaluator<C>(interp, options).eval(f, env);
}

/// Probability that `f` holds, clamped to [0, 1].
double eval_prob(const Formula& f, const Interpretation& interp, const Env& env = {},
                 const EvalOptions& options = {});

/// Max-product value (probability of the most likely satisfying assignment on
/// negation-free bodies).
double eval_viterbi(const Formula& f, const Interpretation& interp, const Env& env = {},
                    const EvalOptions& options = {});

/// Probability and its gradient with respect to theta (dense).
struct ProbWithGradient {
  double value;
  std::vector<double> grad;
};
ProbWithGradient eval_prob_dual(const Formula& f, const Interpretation& interp,
                                const Env& env = {}, const EvalOptions& options = {});

/// Gradient of the loss transform of the probabilistic value, in one forward
/// pass with sparse tangents. Throws ZeroProbability for -log 0.
std::vector<double> grad_prob(const Formula& f, const Interpretation& interp,
                              LossTransform transform = LossTransform::NegLog,
                              const EvalOptions& options = {});

}  // namespace uller
