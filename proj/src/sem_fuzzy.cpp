#include "uller/sem_fuzzy.hpp"

#include <algorithm>
#include <memory>

#include "uller/dual.hpp"
#include "uller/sem_prob.hpp"

namespace uller {

std::string_view to_string(TNorm t) {
  switch (t) {
    case TNorm::Godel: return "godel";
    case TNorm::Product: return "product";
    case TNorm::Lukasiewicz: return "lukasiewicz";
  }
  return "?";
}

TNorm tnorm_from_string(std::string_view name) {
  if (name == "godel") return TNorm::Godel;
  if (name == "product") return TNorm::Product;
  if (name == "lukasiewicz") return TNorm::Lukasiewicz;
  throw Error(ErrorKind::InvalidConfig,
              "unknown t-norm '" + std::string(name) + "' (godel, product, lukasiewicz)");
}

namespace {

template <class T>
T tnorm_t(TNorm family, const T& a, const T& b) {
  switch (family) {
    case TNorm::Godel:
      return value_of(a) <= value_of(b) ? a : b;
    case TNorm::Product:
      return a * b;
    case TNorm::Lukasiewicz: {
      T s = a - (T(1.0) - b);  // exact when b = 1
      return value_of(s) > 0.0 ? s : T(0.0);
    }
  }
  return a;
}

template <class T>
T tconorm_t(TNorm family, const T& a, const T& b) {
  switch (family) {
    case TNorm::Godel:
      return value_of(a) >= value_of(b) ? a : b;
    case TNorm::Product:
      return a + b - a * b;
    case TNorm::Lukasiewicz: {
      T s = a + b;
      return value_of(s) < 1.0 ? s : T(1.0);
    }
  }
  return a;
}

template <class T>
T negation(const T& a) {
  return T(1.0) - a;
}

double lift(const Query& q, std::size_t k, double) { return q.dist.outcomes()[k].prob; }
Dual lift(const Query& q, std::size_t k, const Dual&) { return DualCarrier::lift(q, k); }

// Degrees bound by boolean-codomain statements, shadowed by any later
// binding of the same name.
template <class T>
struct DegreeEnv {
  struct Node {
    std::string name;
    std::optional<T> degree;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head;

  DegreeEnv bind(const std::string& name, std::optional<T> d) const {
    return {std::make_shared<const Node>(Node{name, std::move(d), head})};
  }
  const std::optional<T>* lookup(const std::string& name) const {
    for (const Node* n = head.get(); n; n = n->next.get()) {
      if (n->name == name) return &n->degree;
    }
    return nullptr;
  }
};

template <class T>
class FuzzyEvaluator {
 public:
  FuzzyEvaluator(const Interpretation& interp, const FuzzyOptions& options)
      : interp_(interp),
        family_(options.family),
        stmt_family_(options.statement_family.value_or(options.family)),
        budget_(options.eval.node_budget) {}

  T eval(const Formula& f, const Env& env, const DegreeEnv<T>& deg) {
    budget_.tick(f->span);
    return std::visit([&](const auto& node) { return visit(node, f, env, deg); }, f->node);
  }

 private:
  const DomainDef& domain(const std::string& name, Span span) {
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

  T visit(const ForAll& q, const Formula& f, const Env& env, const DegreeEnv<T>& deg) {
    T acc(1.0);
    for (const auto& a : domain(q.domain, f->span).elements) {
      acc = tnorm_t(family_, acc, eval(q.body, env.bind(q.var, a), deg.bind(q.var, {})));
    }
    return acc;
  }
  T visit(const Exists& q, const Formula& f, const Env& env, const DegreeEnv<T>& deg) {
    T acc(0.0);
    for (const auto& a : domain(q.domain, f->span).elements) {
      acc = tconorm_t(family_, acc, eval(q.body, env.bind(q.var, a), deg.bind(q.var, {})));
    }
    return acc;
  }
  T visit(const And& x, const Formula&, const Env& env, const DegreeEnv<T>& deg) {
    return tnorm_t(family_, eval(x.left, env, deg), eval(x.right, env, deg));
  }
  T visit(const Or& x, const Formula&, const Env& env, const DegreeEnv<T>& deg) {
    return tconorm_t(family_, eval(x.left, env, deg), eval(x.right, env, deg));
  }
  T visit(const Implies& x, const Formula&, const Env& env, const DegreeEnv<T>& deg) {
    return tconorm_t(family_, negation(eval(x.left, env, deg)), eval(x.right, env, deg));
  }
  T visit(const Not& x, const Formula&, const Env& env, const DegreeEnv<T>& deg) {
    return negation(eval(x.operand, env, deg));
  }
  T visit(const Pred& p, const Formula& f, const Env& env, const DegreeEnv<T>& deg) {
    if (p.name == "true") {
      if (p.args.size() != 1) {
        throw Error(ErrorKind::ArityMismatch,
                    "predicate 'true' expects 1 argument, got " + std::to_string(p.args.size()),
                    f->span);
      }
      if (const auto* v = std::get_if<VarTerm>(&p.args[0]->node)) {
        if (const auto* d = deg.lookup(v->name); d && *d) return **d;
      }
      const Value val = eval_term(p.args[0], interp_, env);
      auto degree = val.unit_degree();
      if (!degree) {
        throw Error(ErrorKind::TrueOnNonUnit,
                    "true() expects a truth degree in [0, 1], got " + to_string(val), f->span);
      }
      return T(*degree);
    }
    std::vector<Value> args;
    args.reserve(p.args.size());
    for (const auto& t : p.args) args.push_back(eval_term(t, interp_, env));
    return T(apply_predicate(p.name, args, interp_, f->span) ? 1.0 : 0.0);
  }
  T visit(const Statement& s, const Formula& f, const Env& env, const DegreeEnv<T>& deg) {
    std::vector<Value> args;
    args.reserve(s.args.size());
    for (const auto& t : s.args) args.push_back(eval_term(t, interp_, env));
    const FunctionDef* def = nullptr;
    if (auto it = interp_.functions().find(s.func); it != interp_.functions().end()) {
      def = &it->second;
    }
    const DomainDef* codomain = nullptr;
    if (def) {
      if (auto it = interp_.domains().find(def->codomain); it != interp_.domains().end()) {
        codomain = &it->second;
      }
    }
    const Query q = query(s.func, args, interp_, f->span);
    const auto& outcomes = q.dist.outcomes();

    if (codomain && codomain->enumerable && is_boolean_domain(*codomain)) {
      const Value one = boolean_one(*codomain);
      T degree(0.0);
      for (std::size_t k = 0; k < outcomes.size(); ++k) {
        if (outcomes[k].value == one) degree = lift(q, k, T{});
      }
      // A crisp degree binds the codomain element itself, so every use of
      // the variable agrees with classical evaluation.
      const double p1 = value_of(degree);
      Value bound = p1 == 1.0   ? one
                    : p1 == 0.0 ? other_element(*codomain, one)
                                : Value::real(p1);
      return eval(s.body, env.bind(s.var, std::move(bound)), deg.bind(s.var, degree));
    }

    const bool deterministic =
        def && std::holds_alternative<FunctionDef::Deterministic>(def->kind);
    if (!deterministic && codomain && !codomain->enumerable) {
      throw Error(ErrorKind::InfiniteDomain,
                  "no fuzzy semantics for a statement over the infinite codomain '" +
                      codomain->name + "'",
                  f->span);
    }
    T acc(0.0);
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      if (outcomes[k].prob == 0.0) continue;
      T body = eval(s.body, env.bind(s.var, outcomes[k].value), deg.bind(s.var, {}));
      acc = tconorm_t(stmt_family_, acc, tnorm_t(stmt_family_, lift(q, k, T{}), body));
    }
    return acc;
  }

  static Value other_element(const DomainDef& d, const Value& one) {
    for (const auto& e : d.elements) {
      if (!(e == one)) return e;
    }
    return one;
  }

  const Interpretation& interp_;
  TNorm family_;
  TNorm stmt_family_;
  Budget budget_;
};

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double tnorm(TNorm family, double a, double b) { return tnorm_t(family, a, b); }
double tconorm(TNorm family, double a, double b) { return tconorm_t(family, a, b); }

double eval_fuzzy(const Formula& f, const Interpretation& interp, const Env& env,
                  const FuzzyOptions& options) {
  return clamp_unit(FuzzyEvaluator<double>(interp, options).eval(f, env, {}));
}

FuzzyWithGradient eval_fuzzy_dual(const Formula& f, const Interpretation& interp,
                                  const Env& env, const FuzzyOptions& options) {
  Dual d = FuzzyEvaluator<Dual>(interp, options).eval(f, env, {});
  return {clamp_unit(d.value), d.grad.to_dense(interp.theta().size())};
}

std::vector<double> grad_fuzzy(const Formula& f, const Interpretation& interp,
                               LossTransform transform, const FuzzyOptions& options) {
  Dual d = FuzzyEvaluator<Dual>(interp, options).eval(f, Env{}, {});
  std::vector<double> g(interp.theta().size(), 0.0);
  if (transform == LossTransform::Neg) {
    d.grad.accumulate(g, -1.0);
  } else {
    apply_loss(transform, d.value, to_source(f));
    d.grad.accumulate(g, -1.0 / d.value);
  }
  return g;
}

}  // namespace uller
