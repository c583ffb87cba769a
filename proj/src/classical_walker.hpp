#pragma once

// Boolean formula walker shared by the classical and sampling semantics.
// The two differ only in how a statement picks the value it binds.

#include <string>
#include <variant>
#include <vector>

#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller::detail {

inline const DomainDef& quantified_domain(const Interpretation& interp, const std::string& name,
                                          Span span) {
  auto it = interp.domains().find(name);
  if (it == interp.domains().end()) {
    throw Error(ErrorKind::UnknownDomain, "unknown domain '" + name + "'", span);
  }
  if (!it->second.enumerable) {
    throw Error(ErrorKind::InfiniteDomain, "cannot enumerate infinite domain '" + name + "'",
                span);
  }
  return it->second;
}

// Chooser: Value choose(const Statement&, const FormulaNode&, const Query&)
template <class Chooser>
class BoolWalker {
 public:
  BoolWalker(const Interpretation& interp, Chooser& chooser, const EvalOptions& options)
      : interp_(interp), chooser_(chooser), budget_(options.node_budget) {}

  bool eval(const Formula& f, const Env& env) {
    budget_.tick(f->span);
    return std::visit([&](const auto& node) { return visit(node, f, env); }, f->node);
  }

 private:
  bool visit(const ForAll& q, const Formula& f, const Env& env) {
    for (const auto& a : quantified_domain(interp_, q.domain, f->span).elements) {
      if (!eval(q.body, env.bind(q.var, a))) return false;
    }
    return true;
  }
  bool visit(const Exists& q, const Formula& f, const Env& env) {
    for (const auto& a : quantified_domain(interp_, q.domain, f->span).elements) {
      if (eval(q.body, env.bind(q.var, a))) return true;
    }
    return false;
  }
  bool visit(const And& x, const Formula&, const Env& env) {
    return eval(x.left, env) && eval(x.right, env);
  }
  bool visit(const Or& x, const Formula&, const Env& env) {
    return eval(x.left, env) || eval(x.right, env);
  }
  bool visit(const Implies& x, const Formula&, const Env& env) {
    return !eval(x.left, env) || eval(x.right, env);
  }
  bool visit(const Not& x, const Formula&, const Env& env) { return !eval(x.operand, env); }
  bool visit(const Pred& p, const Formula& f, const Env& env) {
    std::vector<Value> args;
    args.reserve(p.args.size());
    for (const auto& t : p.args) args.push_back(eval_term(t, interp_, env));
    return apply_predicate(p.name, args, interp_, f->span);
  }
  bool visit(const Statement& s, const Formula& f, const Env& env) {
    std::vector<Value> args;
    args.reserve(s.args.size());
    for (const auto& t : s.args) args.push_back(eval_term(t, interp_, env));
    const Query q = query(s.func, args, interp_, f->span);
    return eval(s.body, env.bind(s.var, chooser_.choose(s, *f, q)));
  }

  const Interpretation& interp_;
  Chooser& chooser_;
  Budget budget_;
};

}  // namespace uller::detail
